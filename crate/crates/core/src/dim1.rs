//! Component calculus in dimension three (`n = 1`).
//!
//! With a unitary frame every index takes the single value 1, so a tensor
//! expression becomes a polynomial in components. A component is a symbol
//! with a derivative word over `{H, B, 0}` (holomorphic, antiholomorphic,
//! Reeb). In this dimension the Schouten tensor, its trace and the
//! curvature tensor are all multiples of `R`, and derivatives of equal kind
//! commute, so a word is in normal form when it reads `0…0 B…B H…H` from
//! the outside in.
//!
//! Commutators reduce to a count: for `Y` with `p` holomorphic and `q`
//! antiholomorphic slots (derivative letters included),
//!
//! ```text
//! [∇_H, ∇_B] Y = -(p - q) R Y - i ∇_0 Y
//! [∇_H, ∇_0] Y = -(p - q) (∇_B A) Y + A ∇_B Y
//! [∇_B, ∇_0] Y =  (p - q) (∇_H Ab) Y + Ab ∇_H Y
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::closure::{expand_symbols, Constraint};
use crate::coeff::{Coeff, Rational};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::index::Kind;
use crate::limit::limit_n;
use crate::registry::Registry;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Comp {
    pub sym: Arc<str>,
    /// Derivative letters, outermost first.
    pub word: Vec<Kind>,
    pub slots: Vec<Kind>,
}

impl Comp {
    pub fn new(sym: &str, word: Vec<Kind>, slots: Vec<Kind>) -> Comp {
        Comp {
            sym: sym.into(),
            word,
            slots,
        }
    }

    fn balance(&self, from: usize) -> i64 {
        self.word[from..]
            .iter()
            .chain(&self.slots)
            .map(|k| match k {
                Kind::Hol => 1,
                Kind::Anti => -1,
                Kind::Reeb => 0,
            })
            .sum()
    }
}

fn letter(k: Kind) -> &'static str {
    match k {
        Kind::Hol => "1",
        Kind::Anti => "~1",
        Kind::Reeb => "0",
    }
}

impl fmt::Display for Comp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[Kind]| v.iter().map(|k| letter(*k)).collect::<Vec<_>>().join(",");
        let inner = if self.slots.is_empty() {
            self.sym.to_string()
        } else {
            format!("{}[{}]", self.sym, list(&self.slots))
        };
        if self.word.is_empty() {
            write!(f, "{}", inner)
        } else {
            write!(f, "D[{}]({})", list(&self.word), inner)
        }
    }
}

/// Polynomial in components with Gaussian rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Poly1 {
    terms: BTreeMap<Vec<Comp>, Coeff>,
}

impl Poly1 {
    pub fn zero() -> Self {
        Poly1::default()
    }

    pub fn constant(c: Coeff) -> Self {
        let mut p = Poly1::zero();
        p.push(vec![], c);
        p
    }

    pub fn comp(c: Comp) -> Self {
        let mut p = Poly1::zero();
        p.push(vec![c], Coeff::one());
        p
    }

    fn push(&mut self, mut fs: Vec<Comp>, c: Coeff) {
        if c.is_zero() {
            return;
        }
        fs.sort();
        let e = self.terms.entry(fs.clone()).or_insert_with(Coeff::zero);
        *e = &*e + &c;
        if e.is_zero() {
            self.terms.remove(&fs);
        }
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

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Comp>, &Coeff)> {
        self.terms.iter()
    }

    pub fn add(&self, o: &Poly1) -> Poly1 {
        let mut p = self.clone();
        for (fs, c) in &o.terms {
            p.push(fs.clone(), c.clone());
        }
        p
    }

    pub fn scale(&self, k: &Coeff) -> Poly1 {
        let mut p = Poly1::zero();
        for (fs, c) in &self.terms {
            p.push(fs.clone(), c * k);
        }
        p
    }

    pub fn sub(&self, o: &Poly1) -> Poly1 {
        self.add(&o.scale(&Coeff::int(-1)))
    }

    pub fn mul(&self, o: &Poly1) -> Poly1 {
        let mut p = Poly1::zero();
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                let mut fs = a.clone();
                fs.extend(b.iter().cloned());
                p.push(fs, x * y);
            }
        }
        p
    }

    /// Apply one derivative letter by the Leibniz rule.
    pub fn derive(&self, k: Kind) -> Poly1 {
        let mut p = Poly1::zero();
        for (fs, c) in &self.terms {
            for i in 0..fs.len() {
                let mut g = fs.clone();
                g[i].word.insert(0, k);
                p.push(g, c.clone());
            }
        }
        p
    }

    /// Apply letters listed outermost first.
    pub fn derive_word(&self, word: &[Kind]) -> Poly1 {
        word.iter().rev().fold(self.clone(), |p, k| p.derive(*k))
    }

    pub fn conjugate(&self, reg: &Registry) -> Result<Poly1> {
        let mut p = Poly1::zero();
        for (fs, c) in &self.terms {
            let mut g = vec![];
            for f in fs {
                let d = reg.get(&f.sym)?;
                g.push(Comp::new(
                    &d.conj.0,
                    f.word.iter().map(|k| k.flip()).collect(),
                    f.slots.iter().map(|k| k.flip()).collect(),
                ));
            }
            p.push(g, c.conj());
        }
        Ok(p)
    }

    /// Replace a scalar symbol (with any word) by an expression.
    pub fn substitute(&self, name: &str, by: &Poly1) -> Poly1 {
        let mut p = Poly1::zero();
        for (fs, c) in &self.terms {
            let mut acc = Poly1::constant(c.clone());
            for f in fs {
                if &*f.sym == name && f.slots.is_empty() {
                    acc = acc.mul(&by.derive_word(&f.word));
                } else {
                    acc = acc.mul(&Poly1::comp(f.clone()));
                }
            }
            p = p.add(&acc);
        }
        p
    }

    /// Rational value when the polynomial is a real constant.
    pub fn as_constant(&self) -> Option<Coeff> {
        match self.terms.len() {
            0 => Some(Coeff::zero()),
            1 => self.terms.get(&vec![]).cloned(),
            _ => None,
        }
    }
}

impl fmt::Display for Poly1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (fs, c) in &self.terms {
            let body = fs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("*");
            let (neg, c) = if c.leading_negative() { (true, -c) } else { (false, c.clone()) };
            let sep = match (first, neg) {
                (true, true) => "-",
                (true, false) => "",
                (false, true) => " - ",
                (false, false) => " + ",
            };
            first = false;
            if body.is_empty() {
                write!(f, "{}{}", sep, c)?;
            } else if c.is_one() {
                write!(f, "{}{}", sep, body)?;
            } else if c.is_atomic() {
                write!(f, "{}{}*{}", sep, c, body)?;
            } else {
                write!(f, "{}({})*{}", sep, c, body)?;
            }
        }
        Ok(())
    }
}

fn one() -> Rational {
    Rational::from_integer(1.into())
}

/// Specialize a labelled expression to `n = 1` and pass to components.
pub fn reduce(reg: &Registry, e: &Expr) -> Result<Poly1> {
    let e = limit_n(&expand_symbols(reg, e), &one())?;
    let quarter = Coeff::frac(1, 4);
    let mut p = Poly1::zero();
    for t in e.terms() {
        let mut acc = Poly1::constant(t.coeff.clone());
        for f in &t.factors {
            let word: Vec<Kind> = f.derivs.iter().map(|s| s.kind()).collect();
            let x = match &*f.sym {
                "h" => Poly1::constant(Coeff::one()),
                "P" | "Pab" => Poly1::comp(Comp::new("R", word, vec![])).scale(&quarter),
                "Rm" => Poly1::comp(Comp::new("R", word, vec![])),
                _ => Poly1::comp(Comp::new(
                    &f.sym,
                    word,
                    f.slots.iter().map(|s| s.kind()).collect(),
                )),
            };
            acc = acc.mul(&x);
        }
        p = p.add(&acc);
    }
    Ok(p)
}

fn rank(k: Kind) -> u8 {
    match k {
        Kind::Hol => 0,
        Kind::Anti => 1,
        Kind::Reeb => 2,
    }
}

/// `∇_a ∇_b Y − ∇_b ∇_a Y` where `Y` is `c` with the letters before `j + 2`
/// removed.
fn commutator(c: &Comp, j: usize) -> Poly1 {
    use Kind::*;
    let (a, b) = (c.word[j], c.word[j + 1]);
    let y = Comp::new(&c.sym, c.word[j + 2..].to_vec(), c.slots.clone());
    let bal = Coeff::int(c.balance(j + 2));
    let yp = Poly1::comp(y.clone());
    let with = |k: Kind| Poly1::comp(Comp::new(&y.sym, [vec![k], y.word.clone()].concat(), y.slots.clone()));
    let (sign, lo, hi) = if rank(a) < rank(b) { (1, a, b) } else { (-1, b, a) };
    let out = match (lo, hi) {
        (Hol, Anti) => yp
            .mul(&Poly1::comp(Comp::new("R", vec![], vec![])))
            .scale(&(-&bal))
            .sub(&with(Reeb).scale(&Coeff::i())),
        (Hol, Reeb) => yp
            .mul(&Poly1::comp(Comp::new("A", vec![Anti], vec![Hol, Hol])))
            .scale(&(-&bal))
            .add(&with(Anti).mul(&Poly1::comp(Comp::new("A", vec![], vec![Hol, Hol])))),
        (Anti, Reeb) => yp
            .mul(&Poly1::comp(Comp::new("Ab", vec![Hol], vec![Anti, Anti])))
            .scale(&bal)
            .add(&with(Hol).mul(&Poly1::comp(Comp::new("Ab", vec![], vec![Anti, Anti])))),
        _ => Poly1::zero(),
    };
    out.scale(&Coeff::int(sign))
}

/// Swap letters `j` and `j+1` of factor `fi`; returns the swapped monomial
/// and the correction, both with the other factors and coefficient.
fn swap(fs: &[Comp], c: &Coeff, fi: usize, j: usize) -> (Vec<Comp>, Poly1) {
    let f = &fs[fi];
    let corr = commutator(f, j).derive_word(&f.word[..j]);
    let mut rest = Poly1::constant(c.clone());
    for (k, g) in fs.iter().enumerate() {
        if k != fi {
            rest = rest.mul(&Poly1::comp(g.clone()));
        }
    }
    let mut sw = fs.to_vec();
    sw[fi].word.swap(j, j + 1);
    (sw, rest.mul(&corr))
}

/// Move letter `q` of factor `fi` innermost.
fn move_innermost(fs: &[Comp], c: &Coeff, fi: usize, q: usize) -> (Vec<Comp>, Poly1) {
    let mut cur = fs.to_vec();
    let mut corr = Poly1::zero();
    for j in q..cur[fi].word.len() - 1 {
        let (sw, x) = swap(&cur, c, fi, j);
        corr = corr.add(&x);
        cur = sw;
    }
    (cur, corr)
}

/// A rewrite for a component whose innermost letter has been consumed.
type Expand = fn(Vec<Kind>) -> Poly1;
type Rule = fn(&Comp) -> Option<(Kind, Expand)>;

fn bianchi(c: &Comp) -> Option<(Kind, Expand)> {
    (&*c.sym == "R").then_some((Kind::Reeb, |w: Vec<Kind>| {
        use Kind::*;
        Poly1::comp(Comp::new("A", [w.clone(), vec![Anti, Anti]].concat(), vec![Hol, Hol]))
            .add(&Poly1::comp(Comp::new("Ab", [w, vec![Hol, Hol]].concat(), vec![Anti, Anti])))
    }))
}

fn pseudo_einstein(c: &Comp) -> Option<(Kind, Expand)> {
    use Kind::*;
    match &*c.sym {
        "A" => Some((Anti, |w: Vec<Kind>| {
            Poly1::comp(Comp::new("R", [w, vec![Hol]].concat(), vec![])).scale(&-&Coeff::i())
        })),
        "Ab" => Some((Hol, |w: Vec<Kind>| {
            Poly1::comp(Comp::new("R", [w, vec![Anti]].concat(), vec![])).scale(&Coeff::i())
        })),
        _ => None,
    }
}

/// Closure in dimension three under any combination of constraints.
pub struct Closure1<'a> {
    reg: &'a Registry,
    pluriharmonic: Vec<String>,
    pseudo_einstein: bool,
    torsion_free: bool,
}

impl<'a> Closure1<'a> {
    pub fn new(reg: &'a Registry, constraint: Constraint) -> Self {
        Closure1::with(reg, &[constraint])
    }

    pub fn with(reg: &'a Registry, constraints: &[Constraint]) -> Self {
        let mut c = Closure1 {
            reg,
            pluriharmonic: vec![],
            pseudo_einstein: false,
            torsion_free: false,
        };
        for k in constraints {
            match k {
                Constraint::General => {}
                Constraint::Pluriharmonic(v) => c.pluriharmonic.extend(v.iter().cloned()),
                Constraint::PseudoEinstein => c.pseudo_einstein = true,
                Constraint::TorsionFree => c.torsion_free = true,
            }
        }
        c
    }

    pub fn prepare(&self, p: &Poly1) -> Poly1 {
        self.pluriharmonic.iter().fold(p.clone(), |acc, n| {
            let h = Poly1::comp(Comp::new(&format!("{}_h", n), vec![], vec![]));
            let a = Poly1::comp(Comp::new(&format!("{}_a", n), vec![], vec![]));
            acc.substitute(n, &h.add(&a))
        })
    }

    fn kills(&self, c: &Comp) -> Option<Kind> {
        for n in &self.pluriharmonic {
            if *c.sym == *format!("{}_h", n) {
                return Some(Kind::Anti);
            }
            if *c.sym == *format!("{}_a", n) {
                return Some(Kind::Hol);
            }
        }
        if self.torsion_free && (&*c.sym == "A" || &*c.sym == "Ab") {
            return Some(Kind::Reeb);
        }
        None
    }

    pub fn close(&self, p: &Poly1) -> Poly1 {
        let rule: Rule = if self.pseudo_einstein {
            pseudo_einstein
        } else {
            bianchi
        };
        let mut pending = self.prepare(p);
        let mut done = Poly1::zero();
        let mut guard = 0usize;
        while let Some((fs, c)) = pending.terms.pop_first() {
            guard += 1;
            assert!(guard < 5_000_000, "component closure did not terminate");
            if fs.iter().any(|f| self.kills(f) == Some(Kind::Reeb)) {
                continue;
            }
            let mut acted = false;
            for (fi, f) in fs.iter().enumerate() {
                let target = self.kills(f).map(|k| (k, None)).or_else(|| rule(f).map(|(k, r)| (k, Some(r))));
                let Some((k, by)) = target else { continue };
                let Some(q) = f.word.iter().rposition(|x| *x == k) else { continue };
                let (moved, corr) = move_innermost(&fs, &c, fi, q);
                pending = pending.add(&corr);
                if let Some(by) = by {
                    let g = &moved[fi];
                    let outer = g.word[..g.word.len() - 1].to_vec();
                    let mut rest = Poly1::constant(c.clone());
                    for (k2, h) in moved.iter().enumerate() {
                        if k2 != fi {
                            rest = rest.mul(&Poly1::comp(h.clone()));
                        }
                    }
                    pending = pending.add(&rest.mul(&by(outer)));
                }
                acted = true;
                break;
            }
            if acted {
                continue;
            }
            let viol = fs.iter().enumerate().find_map(|(fi, f)| {
                (0..f.word.len().saturating_sub(1))
                    .find(|&j| rank(f.word[j]) < rank(f.word[j + 1]))
                    .map(|j| (fi, j))
            });
            match viol {
                Some((fi, j)) => {
                    let (sw, corr) = swap(&fs, &c, fi, j);
                    pending.push(sw, c);
                    pending = pending.add(&corr);
                }
                None => done.push(fs, c),
            }
        }
        done
    }

    pub fn is_zero(&self, p: &Poly1) -> bool {
        self.close(p).is_zero()
    }

    pub fn registry(&self) -> &Registry {
        self.reg
    }
}

/// Reduce a labelled expression to `n = 1` and close it.
pub fn close_at_one(reg: &Registry, c: Constraint, e: &Expr) -> Result<Poly1> {
    close_at_one_with(reg, &[c], e)
}

pub fn close_at_one_with(reg: &Registry, cs: &[Constraint], e: &Expr) -> Result<Poly1> {
    let p = reduce(reg, e)?;
    Ok(Closure1::with(reg, cs).close(&p))
}

/// Error for a component expression that should have vanished.
pub fn residual_error(p: &Poly1) -> Error {
    Error::Invalid(format!("nonzero residual {}", p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Factor;
    use crate::index::Slot;
    use crate::parse::parse;
    use crate::rules;

    fn at_one(src: &str, c: Constraint) -> Poly1 {
        let r = Registry::pseudohermitian();
        close_at_one(&r, c, &parse(&r, src).unwrap()).unwrap()
    }

    #[test]
    fn third_order_commutator() {
        let p = at_one("D[^b,b,a](f) - D[a,^b,b](f) - i*D[0,a](f) - R*D[a](f)", Constraint::General);
        assert!(p.is_zero(), "{}", p);
    }

    #[test]
    fn commutators_agree_with_the_labelled_rules() {
        let r = Registry::pseudohermitian();
        let ys = [
            Factor::scalar("f"),
            Factor::new("f", vec![Slot::Hol(5)], vec![]),
            Factor::new("f", vec![Slot::Anti(5), Slot::Hol(6)], vec![]),
            Factor::new("A", vec![Slot::Anti(7)], vec![Slot::Hol(5), Slot::Hol(6)]),
        ];
        let dirs = [Slot::Hol(1), Slot::Anti(2), Slot::Reeb];
        for y in &ys {
            for a in dirs {
                for b in dirs {
                    if a.kind() == b.kind() {
                        continue;
                    }
                    let lab = rules::commutator(&r, a, b, y, 20);
                    let want = reduce(&r, &lab).unwrap();
                    let mut word = vec![a.kind(), b.kind()];
                    word.extend(y.derivs.iter().map(|s| s.kind()));
                    let c = Comp::new(&y.sym, word, y.slots.iter().map(|s| s.kind()).collect());
                    let got = commutator(&c, 0);
                    let diff = Closure1::new(&r, Constraint::General).close(&got.sub(&want));
                    assert!(diff.is_zero(), "{:?} {:?} {:?}: {}", y, a, b, diff);
                }
            }
        }
    }

    #[test]
    fn paneitz_is_c_in_dimension_three() {
        let r = Registry::pseudohermitian();
        let e = crate::ops::parse_ops(&r, "P4(f) - C(f)").unwrap();
        let p = close_at_one(&r, Constraint::General, &e).unwrap();
        assert!(p.is_zero(), "{}", p);
    }

    #[test]
    fn pseudo_einstein_kills_w() {
        let p = at_one("D[a](R) - i*D[^b](A[a,b])", Constraint::PseudoEinstein);
        assert!(p.is_zero(), "{}", p);
        let p = at_one("D[a](R) - i*D[^b](A[a,b])", Constraint::General);
        assert!(!p.is_zero());
    }

    #[test]
    fn pluriharmonic_means_p_alpha_vanishes() {
        let p = at_one("D[a,b,^b](u) + i*A[a,b]*D[^b](u)", Constraint::Pluriharmonic(vec!["u".into()]));
        assert!(p.is_zero(), "{}", p);
        let p = at_one("D[a,b,^b](u) + i*A[a,b]*D[^b](u)", Constraint::General);
        assert!(!p.is_zero());
    }

    #[test]
    fn pole_is_reported() {
        let r = Registry::pseudohermitian();
        let e = parse(&r, "1/(n - 1)*P").unwrap();
        assert!(matches!(reduce(&r, &e), Err(Error::PoleAtLimit { .. })));
    }
}
