//! Tensor expressions: sums of monomials with coefficients in Q(n)[i].
//!
//! A monomial is a coefficient times a product of factors. A factor is a
//! symbol with a prefix of covariant derivatives (listed outermost first)
//! and the symbol's own index slots. Expressions produced by the public
//! operations are always canonical, so structural equality decides
//! equality of expressions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::coeff::{Coeff, RatN};
use crate::error::{Error, Result};
use crate::index::{label_name, Kind, Label, Slot};
use crate::registry::{Registry, Weight};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Factor {
    pub sym: Arc<str>,
    /// Derivative directions, outermost first.
    pub derivs: Vec<Slot>,
    pub slots: Vec<Slot>,
}

impl Factor {
    pub fn new(sym: &str, derivs: Vec<Slot>, slots: Vec<Slot>) -> Self {
        Factor {
            sym: Arc::from(sym),
            derivs,
            slots,
        }
    }

    pub fn scalar(sym: &str) -> Self {
        Factor::new(sym, vec![], vec![])
    }

    pub fn all_slots(&self) -> impl Iterator<Item = &Slot> {
        self.derivs.iter().chain(self.slots.iter())
    }

    pub fn all_slots_mut(&mut self) -> impl Iterator<Item = &mut Slot> {
        self.derivs.iter_mut().chain(self.slots.iter_mut())
    }

    fn shape(&self) -> (&str, Vec<Kind>, Vec<Kind>) {
        (
            &self.sym,
            self.derivs.iter().map(|s| s.kind()).collect(),
            self.slots.iter().map(|s| s.kind()).collect(),
        )
    }

    /// Derivatives plus symbol slots: the rank of the factor.
    pub fn rank(&self) -> usize {
        self.derivs.len() + self.slots.len()
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Term {
    pub coeff: Coeff,
    pub factors: Vec<Factor>,
}

/// Per label: the kinds of its occurrences.
fn label_table(factors: &[Factor]) -> BTreeMap<Label, Vec<Kind>> {
    let mut m: BTreeMap<Label, Vec<Kind>> = BTreeMap::new();
    for f in factors {
        for s in f.all_slots() {
            if let Some(l) = s.label() {
                m.entry(l).or_default().push(s.kind());
            }
        }
    }
    m
}

impl Term {
    pub fn new(coeff: Coeff, factors: Vec<Factor>) -> Self {
        Term { coeff, factors }
    }

    pub fn labels(&self) -> BTreeMap<Label, Vec<Kind>> {
        label_table(&self.factors)
    }

    pub fn dummies(&self) -> BTreeSet<Label> {
        self.labels()
            .into_iter()
            .filter(|(_, v)| v.len() >= 2)
            .map(|(l, _)| l)
            .collect()
    }

    /// Free slots, sorted.
    pub fn free(&self) -> Vec<Slot> {
        let mut v: Vec<Slot> = self
            .labels()
            .into_iter()
            .filter(|(_, k)| k.len() == 1)
            .map(|(l, k)| Slot::new(k[0], l))
            .collect();
        v.sort();
        v
    }

    pub fn max_label(&self) -> Option<Label> {
        self.labels().keys().next_back().copied()
    }

    pub fn relabel(&mut self, map: &BTreeMap<Label, Label>) {
        for f in &mut self.factors {
            for s in f.all_slots_mut() {
                if let Some(l) = s.label() {
                    if let Some(&m) = map.get(&l) {
                        *s = s.with_label(m);
                    }
                }
            }
        }
    }

    /// Rename every dummy to a label at or above `start`.
    pub fn rename_dummies_from(&mut self, start: Label) -> Label {
        let mut next = start;
        let mut map = BTreeMap::new();
        for d in self.dummies() {
            map.insert(d, next);
            next += 1;
        }
        self.relabel(&map);
        next
    }

    pub fn weight(&self, reg: &Registry) -> Result<Weight> {
        let mut w = RatN::zero();
        let mut wb = RatN::zero();
        for f in &self.factors {
            let d = reg.get(&f.sym)?;
            w = &w + &d.weight.0;
            wb = &wb + &d.weight.1;
            let reeb = f.all_slots().filter(|s| **s == Slot::Reeb).count() as i64;
            w = &w - &RatN::from_int(reeb);
            wb = &wb - &RatN::from_int(reeb);
        }
        let pairs = RatN::from_int(self.dummies().len() as i64);
        Ok((&w - &pairs, &wb - &pairs))
    }

    /// Remove Levi form factors that are contracted with something.
    fn eliminate_h(&mut self) {
        'outer: loop {
            for (i, f) in self.factors.iter().enumerate() {
                if &*f.sym != "h" {
                    continue;
                }
                if !f.derivs.is_empty() {
                    self.coeff = Coeff::zero();
                    return;
                }
                let a = f.slots[0].label().unwrap();
                let b = f.slots[1].label().unwrap();
                if a == b {
                    self.factors.remove(i);
                    self.coeff = self.coeff.scale(&RatN::n());
                    continue 'outer;
                }
                let others = |l: Label, k: Kind, fs: &[Factor]| {
                    fs.iter().enumerate().any(|(j, g)| {
                        j != i && g.all_slots().any(|s| s.label() == Some(l) && s.kind() == k)
                    })
                };
                let (from, to, kind) = if others(a, Kind::Anti, &self.factors) {
                    (a, b, Kind::Anti)
                } else if others(b, Kind::Hol, &self.factors) {
                    (b, a, Kind::Hol)
                } else {
                    continue;
                };
                self.factors.remove(i);
                for g in &mut self.factors {
                    for s in g.all_slots_mut() {
                        if s.label() == Some(from) && s.kind() == kind {
                            *s = s.with_label(to);
                        }
                    }
                }
                continue 'outer;
            }
            return;
        }
    }

    /// Canonical representative, or `None` when the term vanishes.
    pub fn canonical(mut self, reg: &Registry) -> Option<Term> {
        if self.coeff.is_zero() {
            return None;
        }
        for f in &self.factors {
            if f.derivs.is_empty() {
                continue;
            }
            if reg.get(&f.sym).map(|d| d.parallel).unwrap_or(false) {
                return None;
            }
        }
        self.eliminate_h();
        if self.coeff.is_zero() {
            return None;
        }
        self.factors.sort_by(|a, b| a.shape().cmp(&b.shape()));
        let free: BTreeSet<Label> = self
            .labels()
            .into_iter()
            .filter(|(_, k)| k.len() == 1)
            .map(|(l, _)| l)
            .collect();

        // groups of factors sharing a shape may be permuted among themselves
        let mut groups: Vec<(usize, usize)> = vec![];
        let mut s = 0;
        for i in 1..=self.factors.len() {
            if i == self.factors.len() || self.factors[i].shape() != self.factors[s].shape() {
                groups.push((s, i));
                s = i;
            }
        }
        let syms: Vec<Vec<Vec<usize>>> = self
            .factors
            .iter()
            .map(|f| {
                reg.get(&f.sym)
                    .map(|d| d.symmetries.clone())
                    .unwrap_or_else(|_| vec![(0..f.slots.len()).collect()])
            })
            .collect();

        let mut best: Option<Vec<Factor>> = None;
        let mut order: Vec<usize> = (0..self.factors.len()).collect();
        let mut choice = vec![0usize; self.factors.len()];
        search_orders(
            &self.factors,
            &groups,
            0,
            &mut order,
            &syms,
            &mut choice,
            &free,
            &mut best,
        );
        self.factors = best.unwrap_or_default();
        Some(self)
    }
}

#[allow(clippy::too_many_arguments)]
fn search_orders(
    factors: &[Factor],
    groups: &[(usize, usize)],
    g: usize,
    order: &mut Vec<usize>,
    syms: &[Vec<Vec<usize>>],
    choice: &mut Vec<usize>,
    free: &BTreeSet<Label>,
    best: &mut Option<Vec<Factor>>,
) {
    if g == groups.len() {
        search_syms(factors, order, syms, choice, 0, free, best);
        return;
    }
    let (s, e) = groups[g];
    // Heap's algorithm over order[s..e]
    let k = e - s;
    let mut c = vec![0usize; k];
    search_orders(factors, groups, g + 1, order, syms, choice, free, best);
    let mut i = 0;
    while i < k {
        if c[i] < i {
            if i % 2 == 0 {
                order.swap(s, s + i);
            } else {
                order.swap(s + c[i], s + i);
            }
            search_orders(factors, groups, g + 1, order, syms, choice, free, best);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

fn search_syms(
    factors: &[Factor],
    order: &[usize],
    syms: &[Vec<Vec<usize>>],
    choice: &mut Vec<usize>,
    pos: usize,
    free: &BTreeSet<Label>,
    best: &mut Option<Vec<Factor>>,
) {
    if pos == order.len() {
        let cand = relabel_candidate(factors, order, syms, choice, free);
        if best.as_ref().is_none_or(|b| cand < *b) {
            *best = Some(cand);
        }
        return;
    }
    let fi = order[pos];
    for k in 0..syms[fi].len() {
        choice[fi] = k;
        search_syms(factors, order, syms, choice, pos + 1, free, best);
    }
}

fn relabel_candidate(
    factors: &[Factor],
    order: &[usize],
    syms: &[Vec<Vec<usize>>],
    choice: &[usize],
    free: &BTreeSet<Label>,
) -> Vec<Factor> {
    let mut map: BTreeMap<Label, Label> = BTreeMap::new();
    let mut next: Label = 0;
    let mut out = Vec::with_capacity(order.len());
    for &fi in order {
        let f = &factors[fi];
        let perm = &syms[fi][choice[fi]];
        let slots: Vec<Slot> = perm.iter().map(|&p| f.slots[p]).collect();
        let mut nf = Factor {
            sym: f.sym.clone(),
            derivs: f.derivs.clone(),
            slots,
        };
        for s in nf.all_slots_mut() {
            if let Some(l) = s.label() {
                if free.contains(&l) {
                    continue;
                }
                let m = *map.entry(l).or_insert_with(|| {
                    while free.contains(&next) {
                        next += 1;
                    }
                    next += 1;
                    next - 1
                });
                *s = s.with_label(m);
            }
        }
        out.push(nf);
    }
    out
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Expr {
    terms: Vec<Term>,
}

impl Expr {
    pub fn zero() -> Self {
        Expr { terms: vec![] }
    }

    pub fn constant(c: Coeff) -> Self {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr {
            terms: vec![Term::new(c, vec![])],
        }
    }

    pub fn one() -> Self {
        Expr::constant(Coeff::one())
    }

    pub fn factor(reg: &Registry, f: Factor) -> Self {
        Expr::from_terms(reg, vec![Term::new(Coeff::one(), vec![f])])
    }

    pub fn scalar(reg: &Registry, name: &str) -> Self {
        Expr::factor(reg, Factor::scalar(name))
    }

    /// Canonicalize and collect arbitrary terms.
    pub fn from_terms(reg: &Registry, terms: Vec<Term>) -> Self {
        let mut acc: BTreeMap<Vec<Factor>, Coeff> = BTreeMap::new();
        for t in terms {
            if let Some(c) = t.canonical(reg) {
                let e = acc.entry(c.factors).or_insert_with(Coeff::zero);
                *e = &*e + &c.coeff;
            }
        }
        Expr::collect(acc)
    }

    fn collect(acc: BTreeMap<Vec<Factor>, Coeff>) -> Self {
        Expr {
            terms: acc
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(f, c)| Term::new(c, f))
                .collect(),
        }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<Term> {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<Coeff> {
        match self.terms.as_slice() {
            [] => Some(Coeff::zero()),
            [t] if t.factors.is_empty() => Some(t.coeff.clone()),
            _ => None,
        }
    }

    pub fn add(&self, other: &Expr) -> Expr {
        let mut acc: BTreeMap<Vec<Factor>, Coeff> = BTreeMap::new();
        for t in self.terms.iter().chain(other.terms.iter()) {
            let e = acc.entry(t.factors.clone()).or_insert_with(Coeff::zero);
            *e = &*e + &t.coeff;
        }
        Expr::collect(acc)
    }

    pub fn neg(&self) -> Expr {
        self.scale(&Coeff::int(-1))
    }

    pub fn sub(&self, other: &Expr) -> Expr {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Coeff) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr {
            terms: self
                .terms
                .iter()
                .map(|t| Term::new(&t.coeff * c, t.factors.clone()))
                .collect(),
        }
    }

    pub fn sum<'a>(items: impl IntoIterator<Item = &'a Expr>) -> Expr {
        let mut acc: BTreeMap<Vec<Factor>, Coeff> = BTreeMap::new();
        for e in items {
            for t in &e.terms {
                let x = acc.entry(t.factors.clone()).or_insert_with(Coeff::zero);
                *x = &*x + &t.coeff;
            }
        }
        Expr::collect(acc)
    }

    pub fn max_label(&self) -> Option<Label> {
        self.terms.iter().filter_map(|t| t.max_label()).max()
    }

    pub fn mul(&self, reg: &Registry, other: &Expr) -> Expr {
        let mut out = vec![];
        for a in &self.terms {
            for b in &other.terms {
                let top = a.max_label().max(b.max_label()).map_or(0, |m| m + 1);
                let mut a = a.clone();
                let mut b = b.clone();
                let next = a.rename_dummies_from(top);
                b.rename_dummies_from(next);
                let mut fs = a.factors;
                fs.extend(b.factors);
                out.push(Term::new(&a.coeff * &b.coeff, fs));
            }
        }
        Expr::from_terms(reg, out)
    }

    /// Covariant derivative in direction `dir`, by the Leibniz rule.
    pub fn derive(&self, reg: &Registry, dir: Slot) -> Expr {
        let mut out = vec![];
        for t in &self.terms {
            let mut t = t.clone();
            if let Some(l) = dir.label() {
                if t.dummies().contains(&l) {
                    let top = t.max_label().unwrap().max(l) + 1;
                    let mut map = BTreeMap::new();
                    map.insert(l, top);
                    t.relabel(&map);
                }
            }
            for i in 0..t.factors.len() {
                let mut u = t.clone();
                u.factors[i].derivs.insert(0, dir);
                out.push(u);
            }
        }
        Expr::from_terms(reg, out)
    }

    /// Apply derivatives listed outermost first.
    pub fn derive_chain(&self, reg: &Registry, dirs: &[Slot]) -> Expr {
        dirs.iter()
            .rev()
            .fold(self.clone(), |e, d| e.derive(reg, *d))
    }

    pub fn conjugate(&self, reg: &Registry) -> Result<Expr> {
        let mut out = vec![];
        for t in &self.terms {
            let mut fs = vec![];
            for f in &t.factors {
                let d = reg.get(&f.sym)?;
                let (cname, perm) = &d.conj;
                let slots = perm.iter().map(|&p| f.slots[p].flip()).collect();
                fs.push(Factor::new(
                    cname,
                    f.derivs.iter().map(|s| s.flip()).collect(),
                    slots,
                ));
            }
            out.push(Term::new(t.coeff.conj(), fs));
        }
        Ok(Expr::from_terms(reg, out))
    }

    pub fn re(&self, reg: &Registry) -> Result<Expr> {
        Ok(self.add(&self.conjugate(reg)?).scale(&Coeff::frac(1, 2)))
    }

    pub fn im(&self, reg: &Registry) -> Result<Expr> {
        // (x - conj x) / (2i) = -(i/2)(x - conj x)
        let c = Coeff::from_gaussian(crate::coeff::rat(0, 1), crate::coeff::rat(-1, 2));
        Ok(self.sub(&self.conjugate(reg)?).scale(&c))
    }

    /// Rename the free label `from` to `to`, moving any dummy already
    /// called `to` out of the way.
    pub fn rename_free(&self, reg: &Registry, from: Label, to: Label) -> Expr {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let mut t = t.clone();
                if t.dummies().contains(&to) {
                    let top = t.max_label().unwrap().max(from) + 1;
                    t.relabel(&BTreeMap::from([(to, top)]));
                }
                t.relabel(&BTreeMap::from([(from, to)]));
                t
            })
            .collect();
        Expr::from_terms(reg, terms)
    }

    /// Replace every occurrence of a scalar symbol (with any derivative
    /// prefix) by an expression.
    pub fn substitute(&self, reg: &Registry, name: &str, by: &Expr) -> Expr {
        let mut parts = vec![];
        for t in &self.terms {
            let mut acc = Expr::constant(t.coeff.clone());
            let mut rest = vec![];
            for f in &t.factors {
                if &*f.sym == name && f.slots.is_empty() {
                    acc = acc.mul(reg, &by.derive_chain(reg, &f.derivs));
                } else {
                    rest.push(f.clone());
                }
            }
            if !rest.is_empty() {
                acc = acc.mul(reg, &Expr::from_terms(reg, vec![Term::new(Coeff::one(), rest)]));
            }
            parts.push(acc);
        }
        Expr::sum(parts.iter())
    }

    /// Common weight and free indices of all terms; `None` for zero.
    pub fn signature(&self, reg: &Registry) -> Result<Option<(Weight, Vec<Slot>)>> {
        let mut sig: Option<(Weight, Vec<Slot>)> = None;
        for t in &self.terms {
            let w = t.weight(reg)?;
            let fr = t.free();
            match &sig {
                None => sig = Some((w, fr)),
                Some((w0, f0)) => {
                    if *w0 != w {
                        return Err(Error::WeightMismatch(
                            fmt_weight(w0),
                            fmt_weight(&w),
                        ));
                    }
                    if *f0 != fr {
                        return Err(Error::FreeIndexMismatch(fmt_free(f0), fmt_free(&fr)));
                    }
                }
            }
        }
        Ok(sig)
    }

    /// Sum of two expressions that must share weight and free indices.
    pub fn checked_add(&self, reg: &Registry, other: &Expr) -> Result<Expr> {
        let a = self.signature(reg)?;
        let b = other.signature(reg)?;
        if let (Some((wa, fa)), Some((wb, fb))) = (&a, &b) {
            if wa != wb {
                return Err(Error::WeightMismatch(fmt_weight(wa), fmt_weight(wb)));
            }
            if fa != fb {
                return Err(Error::FreeIndexMismatch(fmt_free(fa), fmt_free(fb)));
            }
        }
        Ok(self.add(other))
    }

    /// Apply `f` to every coefficient, dropping zeros.
    pub fn map_coeffs(&self, f: impl Fn(&Coeff) -> Coeff) -> Expr {
        let mut acc = BTreeMap::new();
        for t in &self.terms {
            acc.insert(t.factors.clone(), f(&t.coeff));
        }
        Expr::collect(acc)
    }

    pub fn symbols(&self) -> BTreeSet<String> {
        self.terms
            .iter()
            .flat_map(|t| t.factors.iter().map(|f| f.sym.to_string()))
            .collect()
    }
}

pub fn fmt_weight(w: &Weight) -> String {
    format!("({}, {})", w.0, w.1)
}

fn fmt_free(f: &[Slot]) -> String {
    let v: Vec<String> = f
        .iter()
        .map(|s| match s {
            Slot::Hol(l) => label_name(*l),
            Slot::Anti(l) => format!("~{}", label_name(*l)),
            Slot::Reeb => "0".into(),
        })
        .collect();
    format!("[{}]", v.join(","))
}

fn fmt_slot(s: &Slot, dummies: &BTreeSet<Label>) -> String {
    match s {
        Slot::Hol(l) => label_name(*l),
        Slot::Anti(l) if dummies.contains(l) => format!("^{}", label_name(*l)),
        Slot::Anti(l) => format!("~{}", label_name(*l)),
        Slot::Reeb => "0".into(),
    }
}

fn fmt_factor(f: &Factor, dummies: &BTreeSet<Label>) -> String {
    let mut s = f.sym.to_string();
    if !f.slots.is_empty() {
        let v: Vec<String> = f.slots.iter().map(|x| fmt_slot(x, dummies)).collect();
        s = format!("{}[{}]", s, v.join(","));
    }
    if !f.derivs.is_empty() {
        let v: Vec<String> = f.derivs.iter().map(|x| fmt_slot(x, dummies)).collect();
        s = format!("D[{}]({})", v.join(","), s);
    }
    s
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dummies = self.dummies();
        let fs: Vec<String> = self
            .factors
            .iter()
            .map(|x| fmt_factor(x, &dummies))
            .collect();
        if fs.is_empty() {
            return write!(f, "{}", self.coeff);
        }
        if self.coeff.is_one() {
            write!(f, "{}", fs.join("*"))
        } else if self.coeff == Coeff::int(-1) {
            write!(f, "-{}", fs.join("*"))
        } else {
            write!(f, "{}*{}", self.coeff, fs.join("*"))
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, t) in self.terms.iter().enumerate() {
            let s = t.to_string();
            if k == 0 {
                f.write_str(&s)?;
            } else if let Some(rest) = s.strip_prefix('-') {
                write!(f, " - {}", rest)?;
            } else {
                write!(f, " + {}", s)?;
            }
        }
        Ok(())
    }
}
