//! Rule-aware simplification at symbolic dimension.
//!
//! [`Closure::close`] alternates symbol expansion, constraint substitution,
//! normal ordering of derivative prefixes and the Bianchi rewrites until
//! nothing changes. Two expressions are equal modulo the calculus when the
//! closure of their difference is zero.

use std::collections::BTreeMap;

use crate::coeff::{Coeff, RatN};
use crate::error::{Error, Result};
use crate::expr::{Expr, Factor, Term};
use crate::index::{Kind, Label, Slot};
use crate::registry::Registry;
use crate::rules::commutator;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Constraint {
    General,
    /// The listed scalars are CR pluriharmonic.
    Pluriharmonic(Vec<String>),
    PseudoEinstein,
    TorsionFree,
}

impl Constraint {
    pub fn name(&self) -> String {
        match self {
            Constraint::General => "general".into(),
            Constraint::Pluriharmonic(v) => format!("pluriharmonic({})", v.join(",")),
            Constraint::PseudoEinstein => "pseudo-einstein".into(),
            Constraint::TorsionFree => "torsion-free".into(),
        }
    }

    /// Parse `general`, `pseudo-einstein`, `torsion-free` or
    /// `pluriharmonic(f,sigma)`.
    pub fn parse(s: &str) -> Result<Constraint> {
        let s = s.trim();
        match s {
            "general" | "" => return Ok(Constraint::General),
            "pseudo-einstein" => return Ok(Constraint::PseudoEinstein),
            "torsion-free" => return Ok(Constraint::TorsionFree),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("pluriharmonic(").and_then(|r| r.strip_suffix(')')) {
            let names = rest.split(',').map(|x| x.trim().to_string()).collect();
            return Ok(Constraint::Pluriharmonic(names));
        }
        Err(Error::Invalid(format!("unknown constraint `{}`", s)))
    }

    /// Several constraints separated by `;`.
    pub fn parse_list(s: &str) -> Result<Vec<Constraint>> {
        s.split(';').map(Constraint::parse).collect()
    }
}

pub fn n_plus(k: i64) -> RatN {
    RatN::linear(1, k)
}

fn c_real(r: RatN) -> Coeff {
    Coeff::real(r)
}

fn c_imag(r: RatN) -> Coeff {
    Coeff {
        re: RatN::zero(),
        im: r,
    }
}

fn fresh(t: &Term) -> Label {
    t.max_label().map_or(0, |m| m + 1)
}

/// Exchange derivatives `j` and `j+1` of factor `fi`. Returns the swapped
/// term and the commutator correction (already multiplied out).
pub fn swap_at(reg: &Registry, t: &Term, fi: usize, j: usize) -> (Term, Expr) {
    let fac = &t.factors[fi];
    let a = fac.derivs[j];
    let b = fac.derivs[j + 1];
    let y = Factor {
        sym: fac.sym.clone(),
        derivs: fac.derivs[j + 2..].to_vec(),
        slots: fac.slots.clone(),
    };
    let c = commutator(reg, a, b, &y, fresh(t));
    let c = c.derive_chain(reg, &fac.derivs[..j]);
    let mut others = t.clone();
    others.factors.remove(fi);
    let corr = Expr::from_terms(reg, vec![others]).mul(reg, &c);
    let mut sw = t.clone();
    sw.factors[fi].derivs.swap(j, j + 1);
    (sw, corr)
}

/// Move derivative `q` of factor `fi` to the innermost position.
pub fn move_innermost(reg: &Registry, t: &Term, fi: usize, q: usize) -> (Term, Expr) {
    let mut cur = t.clone();
    let mut corr = Expr::zero();
    let len = cur.factors[fi].derivs.len();
    for j in q..len.saturating_sub(1) {
        let (sw, c) = swap_at(reg, &cur, fi, j);
        corr = corr.add(&c);
        cur = sw;
    }
    (cur, corr)
}

fn rank(k: Kind) -> u8 {
    match k {
        Kind::Hol => 0,
        Kind::Anti => 1,
        Kind::Reeb => 2,
    }
}

/// Which out-of-order adjacent pair to exchange first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SwapOrder {
    OuterFirst,
    InnerFirst,
}

fn violation(t: &Term, order: SwapOrder) -> Option<(usize, usize)> {
    let mut all = t.factors.iter().enumerate().flat_map(|(fi, f)| {
        (0..f.derivs.len().saturating_sub(1))
            .filter(move |&j| rank(f.derivs[j].kind()) < rank(f.derivs[j + 1].kind()))
            .map(move |j| (fi, j))
    });
    match order {
        SwapOrder::OuterFirst => all.next(),
        SwapOrder::InnerFirst => all.last(),
    }
}

/// A block of derivative positions `s..e` of factor `fi` whose order only
/// matters up to lower-order terms. With `ext` the block continues into two
/// slots: `∇_γ A_{αβ}` is totally symmetric, and `∇_γ R_{αβ̄ρσ̄}` is
/// symmetric in `γ, α, ρ` up to torsion derivatives. Conjugates likewise.
#[derive(Clone, Copy, Debug)]
struct Run {
    fi: usize,
    s: usize,
    e: usize,
    ext: Option<[usize; 2]>,
}

impl Run {
    fn len(&self) -> usize {
        self.e - self.s + if self.ext.is_some() { 2 } else { 0 }
    }

    fn get(&self, f: &Factor, k: usize) -> Slot {
        match self.ext {
            Some(x) if self.s + k >= self.e => f.slots[x[self.s + k - self.e]],
            _ => f.derivs[self.s + k],
        }
    }

    fn set(&self, f: &mut Factor, k: usize, v: Slot) {
        match self.ext {
            Some(x) if self.s + k >= self.e => f.slots[x[self.s + k - self.e]] = v,
            _ => f.derivs[self.s + k] = v,
        }
    }
}

/// Slots that join a derivative run of the given kind.
fn block_slots(sym: &str, kind: Kind) -> Option<[usize; 2]> {
    match (sym, kind) {
        ("A", Kind::Hol) | ("Ab", Kind::Anti) => Some([0, 1]),
        ("Rm", Kind::Hol) => Some([0, 2]),
        ("Rm", Kind::Anti) => Some([1, 3]),
        _ => None,
    }
}

/// Runs of equal (non-Reeb) derivative kinds in a normal-ordered term.
fn runs(t: &Term) -> Vec<Run> {
    let mut out = vec![];
    for (fi, f) in t.factors.iter().enumerate() {
        let mut s = 0;
        for j in 1..=f.derivs.len() {
            if j == f.derivs.len() || f.derivs[j].kind() != f.derivs[s].kind() {
                let kind = f.derivs[s].kind();
                // in normal order only holomorphic letters follow an antiholomorphic run
                let ext = block_slots(&f.sym, kind)
                    .filter(|_| f.derivs[j..].iter().all(|d| d.kind() == Kind::Hol));
                if ext.is_some() || (j - s >= 2 && kind != Kind::Reeb) {
                    out.push(Run { fi, s, e: j, ext });
                }
                s = j;
            }
        }
    }
    out
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = vec![];
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

fn apply_perms(t: &Term, rs: &[Run], choice: &[Vec<usize>]) -> Term {
    let mut u = t.clone();
    for (r, p) in rs.iter().zip(choice) {
        let orig = &t.factors[r.fi];
        for (k, &src) in p.iter().enumerate() {
            r.set(&mut u.factors[r.fi], k, r.get(orig, src));
        }
    }
    u
}

/// Pick the run ordering with the least canonical form.
fn best_run_order(reg: &Registry, t: &Term) -> Option<Vec<Vec<usize>>> {
    let rs = runs(t);
    if rs.is_empty() {
        return None;
    }
    let perms: Vec<Vec<Vec<usize>>> = rs.iter().map(|r| permutations(r.len())).collect();
    let mut idx = vec![0usize; rs.len()];
    let mut best: Option<(Vec<Factor>, Vec<Vec<usize>>)> = None;
    loop {
        let choice: Vec<Vec<usize>> = idx.iter().zip(&perms).map(|(&i, p)| p[i].clone()).collect();
        let cand = apply_perms(t, &rs, &choice);
        if let Some(c) = cand.canonical(reg) {
            if best.as_ref().is_none_or(|(b, _)| c.factors < *b) {
                best = Some((c.factors, choice));
            }
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                let (_, ch) = best?;
                let identity = ch.iter().all(|p| p.iter().enumerate().all(|(a, &b)| a == b));
                return if identity { None } else { Some(ch) };
            }
            idx[k] += 1;
            if idx[k] < perms[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// `∇_γ R_{αβ̄ρσ̄} − ∇_α R_{γβ̄ρσ̄}` for the bare curvature factor `g`
/// with innermost derivative `γ`.
fn curvature_exchange(reg: &Registry, g: &Factor) -> Expr {
    let c = *g.derivs.last().expect("innermost derivative");
    let [a, b, r, s] = [g.slots[0], g.slots[1], g.slots[2], g.slots[3]];
    let i = c_imag(RatN::one());
    let mi = c_imag(RatN::from_int(-1));
    Expr::sum(
        [
            mono(reg, i.clone(), vec![fac("A", vec![b], vec![c, r]), fac("h", vec![], vec![a, s])]),
            mono(reg, mi.clone(), vec![fac("A", vec![b], vec![r, a]), fac("h", vec![], vec![c, s])]),
            mono(reg, i, vec![fac("A", vec![s], vec![c, r]), fac("h", vec![], vec![a, b])]),
            mono(reg, mi, vec![fac("A", vec![s], vec![r, a]), fac("h", vec![], vec![c, b])]),
        ]
        .iter(),
    )
}

/// Exchange derivative `pos` with slot `slot` of a block factor. The
/// exchange is exact for torsion once the derivative sits innermost; for
/// curvature it costs torsion derivatives.
fn deriv_slot_swap(reg: &Registry, t: &Term, fi: usize, pos: usize, slot: usize) -> (Term, Expr) {
    let (mut cur, mut corr) = move_innermost(reg, t, fi, pos);
    let f = &cur.factors[fi];
    let last = f.derivs.len() - 1;
    if &*f.sym == "Rm" {
        let bare = Factor::new(&f.sym, vec![f.derivs[last]], f.slots.clone());
        let by = if f.derivs[last].kind() == Kind::Hol {
            curvature_exchange(reg, &bare)
        } else {
            let conj = mono(reg, Coeff::one(), vec![bare]).conjugate(reg).expect("declared");
            curvature_exchange(reg, &conj.terms()[0].factors[0])
                .conjugate(reg)
                .expect("declared")
        };
        corr = corr.add(&replace_factor(reg, &cur, fi, &f.derivs[..last], &by));
    }
    let f = &mut cur.factors[fi];
    std::mem::swap(&mut f.derivs[last], &mut f.slots[slot]);
    for j in (pos..last).rev() {
        let (sw, c) = swap_at(reg, &cur, fi, j);
        corr = corr.add(&c);
        cur = sw;
    }
    (cur, corr)
}

/// Exchange positions `k` and `k+1` of a run.
fn run_swap(reg: &Registry, t: &Term, r: &Run, k: usize) -> (Term, Expr) {
    let inner = r.e - r.s;
    match r.ext {
        Some(x) if k + 1 == inner => deriv_slot_swap(reg, t, r.fi, r.s + k, x[0]),
        Some(x) if k == inner => {
            let mut u = t.clone();
            u.factors[r.fi].slots.swap(x[0], x[1]);
            (u, Expr::zero())
        }
        _ => swap_at(reg, t, r.fi, r.s + k),
    }
}

/// Reorder each run to the chosen permutation by adjacent swaps.
fn reorder_runs(reg: &Registry, t: &Term, choice: &[Vec<usize>]) -> (Term, Expr) {
    let rs = runs(t);
    let mut cur = t.clone();
    let mut corr = Expr::zero();
    for (r, p) in rs.iter().zip(choice) {
        // current[k] = original index now at position k of the run
        let mut current: Vec<usize> = (0..p.len()).collect();
        for (target_pos, &want) in p.iter().enumerate() {
            let mut at = current.iter().position(|&x| x == want).unwrap();
            while at > target_pos {
                let (sw, c) = run_swap(reg, &cur, r, at - 1);
                corr = corr.add(&c);
                cur = sw;
                current.swap(at - 1, at);
                at -= 1;
            }
        }
    }
    (cur, corr)
}

/// Bring every derivative prefix to normal order: holomorphic innermost,
/// then antiholomorphic, then Reeb outermost; equal-kind runs in the order
/// with the least canonical form, torsion slots included.
pub fn normal_order(reg: &Registry, e: &Expr) -> Expr {
    normal_order_by(reg, e, SwapOrder::OuterFirst)
}

pub fn normal_order_by(reg: &Registry, e: &Expr, order: SwapOrder) -> Expr {
    let mut pending: BTreeMap<Vec<Factor>, Coeff> = BTreeMap::new();
    let mut done: Vec<Term> = vec![];
    let add = |p: &mut BTreeMap<Vec<Factor>, Coeff>, t: &Term| {
        let c = p.entry(t.factors.clone()).or_insert_with(Coeff::zero);
        *c = &*c + &t.coeff;
        if c.is_zero() {
            p.remove(&t.factors);
        }
    };
    for t in e.terms() {
        add(&mut pending, t);
    }
    while let Some((fs, c)) = pending.pop_first() {
        let t = Term::new(c, fs);
        if let Some((fi, j)) = violation(&t, order) {
            let (sw, corr) = swap_at(reg, &t, fi, j);
            for u in Expr::from_terms(reg, vec![sw]).terms() {
                add(&mut pending, u);
            }
            for u in corr.terms() {
                add(&mut pending, u);
            }
            continue;
        }
        match best_run_order(reg, &t) {
            None => done.push(t),
            Some(choice) => {
                let (target, corr) = reorder_runs(reg, &t, &choice);
                done.extend(Expr::from_terms(reg, vec![target]).into_terms());
                for u in corr.terms() {
                    add(&mut pending, u);
                }
            }
        }
    }
    Expr::from_terms(reg, done)
}

fn mono(reg: &Registry, c: Coeff, fs: Vec<Factor>) -> Expr {
    Expr::from_terms(reg, vec![Term::new(c, fs)])
}

fn fac(sym: &str, derivs: Vec<Slot>, slots: Vec<Slot>) -> Factor {
    Factor::new(sym, derivs, slots)
}

/// Replacement for a factor without its derivative prefix, if the symbol
/// is a defined abbreviation or a trace.
fn expansion(reg: &Registry, f: &Factor, r: Label) -> Option<Expr> {
    use Slot::*;
    let s = r + 1;
    let name: &str = &f.sym;
    let inv = |k: i64| n_plus(k).inv();
    Some(match (name, f.slots.as_slice()) {
        ("R", []) => mono(reg, c_real(RatN::linear(2, 2)), vec![Factor::scalar("P")]),
        ("T", [Hol(l)]) => mono(reg, c_real(inv(2)), vec![fac("P", vec![Hol(*l)], vec![])]).add(&mono(
            reg,
            c_imag(-&inv(2)),
            vec![fac("A", vec![Anti(r)], vec![Hol(*l), Hol(r)])],
        )),
        ("Tb", [Anti(l)]) => mono(reg, c_real(inv(2)), vec![fac("P", vec![Anti(*l)], vec![])]).add(&mono(
            reg,
            c_imag(inv(2)),
            vec![fac("Ab", vec![Hol(r)], vec![Anti(*l), Anti(r)])],
        )),
        ("W", [Hol(l)]) => mono(reg, c_real(RatN::linear(2, 2)), vec![fac("P", vec![Hol(*l)], vec![])]).add(
            &mono(reg, c_imag(RatN::from_int(-1)), vec![fac("A", vec![Anti(r)], vec![Hol(*l), Hol(r)])]),
        ),
        ("Wb", [Anti(l)]) => mono(reg, c_real(RatN::linear(2, 2)), vec![fac("P", vec![Anti(*l)], vec![])])
            .add(&mono(
                reg,
                c_imag(RatN::one()),
                vec![fac("Ab", vec![Hol(r)], vec![Anti(*l), Anti(r)])],
            )),
        ("S", []) => {
            let m = c_real(-&RatN::n().inv());
            Expr::sum(
                [
                    mono(reg, m.clone(), vec![fac("T", vec![Anti(r)], vec![Hol(r)])]),
                    mono(reg, m.clone(), vec![fac("Tb", vec![Hol(r)], vec![Anti(r)])]),
                    mono(
                        reg,
                        m.clone(),
                        vec![
                            fac("Pab", vec![], vec![Hol(r), Anti(s)]),
                            fac("Pab", vec![], vec![Hol(s), Anti(r)]),
                        ],
                    ),
                    mono(
                        reg,
                        -&m,
                        vec![
                            fac("A", vec![], vec![Hol(r), Hol(s)]),
                            fac("Ab", vec![], vec![Anti(r), Anti(s)]),
                        ],
                    ),
                ]
                .iter(),
            )
        }
        ("Pab", [Hol(a), Anti(b)]) if a == b => mono(reg, Coeff::one(), vec![Factor::scalar("P")]),
        ("Rm", [Hol(x0), Anti(x1), Hol(x2), Anti(x3)]) => {
            let (p, q) = if x0 == x1 {
                (*x2, *x3)
            } else if x2 == x3 {
                (*x0, *x1)
            } else if x0 == x3 {
                (*x2, *x1)
            } else if x2 == x1 {
                (*x0, *x3)
            } else {
                return None;
            };
            ricci(reg, p, q)
        }
        _ => return None,
    })
}

/// Ricci tensor `(n+2) P_{pq̄} + P h_{pq̄}`.
pub fn ricci(reg: &Registry, p: Label, q: Label) -> Expr {
    use Slot::*;
    mono(reg, c_real(n_plus(2)), vec![fac("Pab", vec![], vec![Hol(p), Anti(q)])]).add(&mono(
        reg,
        Coeff::one(),
        vec![Factor::scalar("P"), fac("h", vec![], vec![Hol(p), Anti(q)])],
    ))
}

/// Replace one factor of `t` by `by` with the factor's derivatives applied.
fn replace_factor(reg: &Registry, t: &Term, fi: usize, derivs: &[Slot], by: &Expr) -> Expr {
    let mut others = t.clone();
    others.factors.remove(fi);
    Expr::from_terms(reg, vec![others]).mul(reg, &by.derive_chain(reg, derivs))
}

/// Expand abbreviations (R, T, W, S and conjugates) and traces.
pub fn expand_symbols(reg: &Registry, e: &Expr) -> Expr {
    let mut cur = e.clone();
    loop {
        let mut changed = false;
        let mut parts = vec![];
        for t in cur.terms() {
            let mut hit = None;
            for (fi, f) in t.factors.iter().enumerate() {
                if let Some(x) = expansion(reg, f, fresh(t)) {
                    hit = Some((fi, x));
                    break;
                }
            }
            match hit {
                Some((fi, x)) => {
                    changed = true;
                    parts.push(replace_factor(reg, t, fi, &t.factors[fi].derivs.clone(), &x));
                }
                None => parts.push(Expr::from_terms(reg, vec![t.clone()])),
            }
        }
        cur = Expr::sum(parts.iter());
        if !changed {
            return cur;
        }
    }
}

/// A rule that moves one derivative innermost and then rewrites the bare
/// factor. Returns `None` when the rule does not apply.
type Mover = Box<dyn Fn(&Registry, &Factor, Label) -> Expr>;
type MoveRule = fn(&Registry, &Factor) -> Option<(usize, Mover)>;

fn contracted_deriv(f: &Factor, slot: usize) -> Option<usize> {
    let s = f.slots[slot];
    let l = s.label()?;
    f.derivs.iter().rposition(|d| d.label() == Some(l) && d.kind() == s.kind().flip())
}

fn schouten_rule(_: &Registry, f: &Factor) -> Option<(usize, Mover)> {
    if &*f.sym != "Pab" {
        return None;
    }
    if let Some(q) = contracted_deriv(f, 0) {
        return Some((
            q,
            Box::new(|reg: &Registry, g: &Factor, _r: Label| {
                let m = g.slots[1];
                mono(reg, Coeff::one(), vec![fac("P", vec![m], vec![])]).add(&mono(
                    reg,
                    c_real(n_plus(-1)),
                    vec![fac("Tb", vec![], vec![m])],
                ))
            }),
        ));
    }
    if let Some(q) = contracted_deriv(f, 1) {
        return Some((
            q,
            Box::new(|reg: &Registry, g: &Factor, _r: Label| {
                let l = g.slots[0];
                mono(reg, Coeff::one(), vec![fac("P", vec![l], vec![])]).add(&mono(
                    reg,
                    c_real(n_plus(-1)),
                    vec![fac("T", vec![], vec![l])],
                ))
            }),
        ));
    }
    None
}

fn reeb_scalar_rule(_: &Registry, f: &Factor) -> Option<(usize, Mover)> {
    if &*f.sym != "P" {
        return None;
    }
    let q = f.derivs.iter().rposition(|d| *d == Slot::Reeb)?;
    Some((
        q,
        Box::new(|reg: &Registry, _g: &Factor, r: Label| {
            use Slot::*;
            let s = r + 1;
            let c = c_real(RatN::linear(2, 2).inv());
            mono(reg, c.clone(), vec![fac("A", vec![Anti(r), Anti(s)], vec![Hol(r), Hol(s)])]).add(&mono(
                reg,
                c,
                vec![fac("Ab", vec![Hol(r), Hol(s)], vec![Anti(r), Anti(s)])],
            ))
        }),
    ))
}

fn reeb_schouten_rule(_: &Registry, f: &Factor) -> Option<(usize, Mover)> {
    if &*f.sym != "Pab" {
        return None;
    }
    let q = f.derivs.iter().rposition(|d| *d == Slot::Reeb)?;
    Some((
        q,
        Box::new(|reg: &Registry, g: &Factor, r: Label| {
            // (n+2) ∇_0 P_{αβ̄} = in A_{αγ}A^γ_β̄ − i|A|² h + ∇^γ∇_β̄ A_{αγ} + ∇_α∇_γ A^γ_β̄ − trace
            use Slot::*;
            let (x, y, s) = (g.slots[0], g.slots[1], r + 1);
            let k = n_plus(2).inv();
            let tr = &k * &RatN::linear(2, 2).inv();
            let h = || fac("h", vec![], vec![x, y]);
            Expr::sum(
                [
                    mono(
                        reg,
                        c_imag(&RatN::n() * &k),
                        vec![fac("A", vec![], vec![x, Hol(r)]), fac("Ab", vec![], vec![Anti(r), y])],
                    ),
                    mono(
                        reg,
                        c_imag(-&k),
                        vec![
                            h(),
                            fac("A", vec![], vec![Hol(r), Hol(s)]),
                            fac("Ab", vec![], vec![Anti(r), Anti(s)]),
                        ],
                    ),
                    mono(reg, c_real(k.clone()), vec![fac("A", vec![Anti(r), y], vec![x, Hol(r)])]),
                    mono(reg, c_real(k.clone()), vec![fac("Ab", vec![x, Hol(r)], vec![Anti(r), y])]),
                    mono(
                        reg,
                        c_real(-&tr),
                        vec![h(), fac("A", vec![Anti(r), Anti(s)], vec![Hol(r), Hol(s)])],
                    ),
                    mono(
                        reg,
                        c_real(-&tr),
                        vec![h(), fac("Ab", vec![Hol(r), Hol(s)], vec![Anti(r), Anti(s)])],
                    ),
                ]
                .iter(),
            )
        }),
    ))
}

fn reeb_curvature_rule(_: &Registry, f: &Factor) -> Option<(usize, Mover)> {
    if &*f.sym != "Rm" {
        return None;
    }
    let q = f.derivs.iter().rposition(|d| *d == Slot::Reeb)?;
    Some((
        q,
        Box::new(|reg: &Registry, g: &Factor, r: Label| {
            use Slot::*;
            let [x, y, z, w] = [g.slots[0], g.slots[1], g.slots[2], g.slots[3]];
            Expr::sum(
                [
                    mono(
                        reg,
                        c_imag(RatN::one()),
                        vec![
                            fac("A", vec![], vec![x, Hol(r)]),
                            fac("Ab", vec![], vec![w, Anti(r)]),
                            fac("h", vec![], vec![z, y]),
                        ],
                    ),
                    mono(
                        reg,
                        c_imag(RatN::from_int(-1)),
                        vec![
                            fac("A", vec![], vec![Hol(r), z]),
                            fac("Ab", vec![], vec![y, Anti(r)]),
                            fac("h", vec![], vec![x, w]),
                        ],
                    ),
                    mono(reg, Coeff::one(), vec![fac("A", vec![y, w], vec![x, z])]),
                    mono(reg, Coeff::one(), vec![fac("Ab", vec![x, z], vec![y, w])]),
                ]
                .iter(),
            )
        }),
    ))
}

fn torsion_divergence_rule(
    _: &Registry,
    f: &Factor,
) -> Option<(usize, Mover)> {
    // ∇^β A_{αβ} = −(2i(n+1)/n) ∇_α P when pseudo-Einstein
    let sign = match &*f.sym {
        "A" => -1,
        "Ab" => 1,
        _ => return None,
    };
    for k in 0..2 {
        if let Some(q) = contracted_deriv(f, k) {
            return Some((
                q,
                Box::new(move |reg: &Registry, g: &Factor, _r: Label| {
                    let other = g.slots[1 - k];
                    let c = c_imag(&RatN::from_int(sign) * &(&RatN::linear(2, 2) / &RatN::n()));
                    mono(reg, c, vec![fac("P", vec![other], vec![])])
                }),
            ));
        }
    }
    None
}

fn cr_part_rule(kill_on: Kind) -> impl Fn(&Factor) -> Option<usize> {
    move |f: &Factor| f.derivs.iter().rposition(|d| d.kind() == kill_on)
}

pub struct Closure<'a> {
    reg: &'a Registry,
    constraint: Constraint,
}

impl<'a> Closure<'a> {
    pub fn new(reg: &'a Registry, constraint: Constraint) -> Self {
        Closure { reg, constraint }
    }

    pub fn registry(&self) -> &Registry {
        self.reg
    }

    /// Point substitutions of the constraint (no derivative moves).
    fn substitute(&self, e: &Expr) -> Expr {
        let reg = self.reg;
        match &self.constraint {
            Constraint::TorsionFree => {
                let kept: Vec<Term> = e
                    .terms()
                    .iter()
                    .filter(|t| !t.factors.iter().any(|f| &*f.sym == "A" || &*f.sym == "Ab"))
                    .cloned()
                    .collect();
                Expr::from_terms(reg, kept)
            }
            Constraint::PseudoEinstein => {
                let mut parts = vec![];
                for t in e.terms() {
                    match t.factors.iter().position(|f| &*f.sym == "Pab") {
                        Some(fi) => {
                            let f = &t.factors[fi];
                            let by = mono(
                                reg,
                                c_real(RatN::n().inv()),
                                vec![Factor::scalar("P"), fac("h", vec![], f.slots.clone())],
                            );
                            parts.push(replace_factor(reg, t, fi, &f.derivs.clone(), &by));
                        }
                        None => parts.push(Expr::from_terms(reg, vec![t.clone()])),
                    }
                }
                let out = Expr::sum(parts.iter());
                if out != *e {
                    self.substitute(&out)
                } else {
                    out
                }
            }
            _ => e.clone(),
        }
    }

    /// Split pluriharmonic placeholders into CR and anti-CR parts.
    pub fn prepare(&self, e: &Expr) -> Expr {
        match &self.constraint {
            Constraint::Pluriharmonic(names) => {
                let mut cur = e.clone();
                for n in names {
                    let h = Expr::scalar(self.reg, &format!("{}_h", n));
                    let a = Expr::scalar(self.reg, &format!("{}_a", n));
                    cur = cur.substitute(self.reg, n, &h.add(&a));
                }
                cur
            }
            _ => e.clone(),
        }
    }

    /// One pass of derivative-moving rewrites (Bianchi and constraint
    /// consequences). Each term is rewritten by at most one rule.
    fn rewrite_pass(&self, e: &Expr) -> Expr {
        let reg = self.reg;
        // For pseudo-Einstein forms the Reeb derivative of P is a tautology
        // of the torsion divergence rule, so only the latter is used.
        let rules: Vec<MoveRule> = if self.constraint == Constraint::PseudoEinstein {
            vec![schouten_rule, torsion_divergence_rule]
        } else {
            vec![schouten_rule, reeb_scalar_rule, reeb_schouten_rule, reeb_curvature_rule]
        };
        let phs: Vec<(String, Kind)> = match &self.constraint {
            Constraint::Pluriharmonic(v) => v
                .iter()
                .flat_map(|n| [(format!("{}_h", n), Kind::Anti), (format!("{}_a", n), Kind::Hol)])
                .collect(),
            _ => vec![],
        };
        let mut parts = vec![];
        'terms: for t in e.terms() {
            for (fi, f) in t.factors.iter().enumerate() {
                for (name, kind) in &phs {
                    if &*f.sym == name.as_str() {
                        if let Some(q) = cr_part_rule(*kind)(f) {
                            let (_, corr) = move_innermost(reg, t, fi, q);
                            parts.push(corr);
                            continue 'terms;
                        }
                    }
                }
                for rule in &rules {
                    if let Some((q, rhs)) = rule(reg, f) {
                        let (moved, corr) = move_innermost(reg, t, fi, q);
                        let g = &moved.factors[fi];
                        let inner = g.derivs.len() - 1;
                        let bare = Factor {
                            sym: g.sym.clone(),
                            derivs: vec![],
                            slots: g.slots.clone(),
                        };
                        let by = rhs(reg, &bare, fresh(&moved) + 8);
                        // the innermost derivative is consumed by the rule
                        let outer = g.derivs[..inner].to_vec();
                        parts.push(replace_factor(reg, &moved, fi, &outer, &by));
                        parts.push(corr);
                        continue 'terms;
                    }
                }
            }
            parts.push(Expr::from_terms(reg, vec![t.clone()]));
        }
        Expr::sum(parts.iter())
    }

    /// Full closure.
    pub fn close(&self, e: &Expr) -> Expr {
        let mut cur = self.prepare(e);
        let mut guard = 0;
        loop {
            let before = cur.clone();
            cur = expand_symbols(self.reg, &cur);
            cur = self.substitute(&cur);
            cur = normal_order(self.reg, &cur);
            cur = self.rewrite_pass(&cur);
            if cur == before {
                return cur;
            }
            guard += 1;
            assert!(guard < 200, "closure did not stabilize");
        }
    }

    pub fn is_zero(&self, e: &Expr) -> bool {
        self.close(e).is_zero()
    }
}
