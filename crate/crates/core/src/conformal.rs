//! Change of contact form `θ ↦ e^σ θ` at the level of densities.
//!
//! [`transform`] rewrites an expression in the hatted scale into unhatted
//! quantities and derivatives of `σ`. Base symbols use the transformation
//! laws of the torsion, the Schouten tensor and its trace. A hatted
//! derivative of a density of weight `(w, w')` adds `w∇σ` (or `w'∇̄σ`) and
//! one connection-difference term per slot; these per-slot terms are the
//! one-form rule extended to tensor products by the Leibniz rule. Reeb
//! derivatives are supported on scalars only.

use std::collections::BTreeMap;

use crate::closure::expand_symbols;
use crate::coeff::{Coeff, RatN};
use crate::error::{Error, Result};
use crate::expr::{Expr, Factor, Term};
use crate::index::{Kind, Label, Slot};
use crate::registry::{Registry, Weight};

/// Curvature quantities that must be expanded before transforming.
const DERIVED: &[&str] = &["R", "S", "Rm", "T", "Tb", "W", "Wb"];

struct Ctx<'a> {
    reg: &'a Registry,
    sigma: &'a str,
    next: Label,
}

impl Ctx<'_> {
    fn fresh(&mut self) -> Label {
        self.next += 1;
        self.next
    }

    fn mono(&self, c: Coeff, fs: Vec<Factor>) -> Expr {
        Expr::from_terms(self.reg, vec![Term::new(c, fs)])
    }

    fn ds(&self, derivs: Vec<Slot>) -> Factor {
        Factor::new(self.sigma, derivs, vec![])
    }

    /// `|∇σ|² = ∇_γσ ∇^γσ`.
    fn grad_sq(&mut self) -> Expr {
        let r = self.fresh();
        self.mono(Coeff::one(), vec![self.ds(vec![Slot::Hol(r)]), self.ds(vec![Slot::Anti(r)])])
    }

    /// `Δ_b σ`.
    fn lap(&mut self) -> Expr {
        let r = self.fresh();
        self.mono(Coeff::int(-1), vec![self.ds(vec![Slot::Anti(r), Slot::Hol(r)])])
            .add(&self.mono(Coeff::int(-1), vec![self.ds(vec![Slot::Hol(r), Slot::Anti(r)])]))
    }

    fn symbol(&mut self, f: &Factor) -> Result<Expr> {
        use Slot::*;
        let half = || Coeff::frac(1, 2);
        let plain = self.mono(Coeff::one(), vec![Factor::new(&f.sym, vec![], f.slots.clone())]);
        Ok(match (&*f.sym, f.slots.as_slice()) {
            ("A", [Hol(x), Hol(y)]) => plain
                .add(&self.mono(Coeff::i(), vec![self.ds(vec![Hol(*y), Hol(*x)])]))
                .sub(&self.mono(Coeff::i(), vec![self.ds(vec![Hol(*x)]), self.ds(vec![Hol(*y)])])),
            ("Ab", [Anti(x), Anti(y)]) => plain
                .sub(&self.mono(Coeff::i(), vec![self.ds(vec![Anti(*y), Anti(*x)])]))
                .add(&self.mono(Coeff::i(), vec![self.ds(vec![Anti(*x)]), self.ds(vec![Anti(*y)])])),
            ("Pab", [Hol(x), Anti(y)]) => {
                let g = self.grad_sq();
                let h = self.mono(Coeff::one(), vec![Factor::new("h", vec![], vec![Hol(*x), Anti(*y)])]);
                plain
                    .sub(&self.mono(half(), vec![self.ds(vec![Anti(*y), Hol(*x)])]))
                    .sub(&self.mono(half(), vec![self.ds(vec![Hol(*x), Anti(*y)])]))
                    .sub(&g.mul(self.reg, &h).scale(&half()))
            }
            ("P", []) => {
                let l = self.lap();
                let g = self.grad_sq();
                plain
                    .add(&l.scale(&half()))
                    .sub(&g.scale(&Coeff::real(&RatN::n() * &RatN::from_rat(crate::coeff::rat(1, 2)))))
            }
            ("h", _) => plain,
            // placeholders and test tensors are sections with no law of their own
            (name, _) if !DERIVED.contains(&name) => plain,
            _ => {
                return Err(Error::UnsupportedRank(
                    f.slots.len(),
                    format!("no transformation law for `{}`", f.sym),
                ))
            }
        })
    }

    /// `E` with the slot labelled `from` renamed to `to`.
    fn rename(&self, e: &Expr, from: Label, to: Label) -> Expr {
        let terms = e
            .terms()
            .iter()
            .map(|t| {
                let mut t = t.clone();
                let top = t.max_label().unwrap_or(0).max(from).max(to) + 1;
                t.rename_dummies_from(top);
                t.relabel(&BTreeMap::from([(from, to)]));
                t
            })
            .collect();
        Expr::from_terms(self.reg, terms)
    }

    /// Hatted derivative in direction `d` of `e`, a density of weight `w`
    /// whose free slots are `slots`.
    fn derivative(&mut self, d: Slot, e: &Expr, w: &Weight, slots: &[Slot]) -> Result<Expr> {
        use Slot::*;
        let reg = self.reg;
        let base = e.derive(reg, d);
        let mul = |a: &Expr, f: Vec<Factor>| a.mul(reg, &Expr::from_terms(reg, vec![Term::new(Coeff::one(), f)]));
        let mut out = base;
        match d {
            Hol(x) | Anti(x) => {
                let (same, other, wd) = match d {
                    Hol(_) => (Kind::Hol, Kind::Anti, &w.0),
                    _ => (Kind::Anti, Kind::Hol, &w.1),
                };
                out = out.add(&mul(e, vec![self.ds(vec![d])]).scale(&Coeff::real(wd.clone())));
                for s in slots {
                    let Some(l) = s.label() else { continue };
                    if s.kind() == same {
                        out = out.sub(&mul(e, vec![self.ds(vec![d])]));
                        let moved = self.rename(e, l, x);
                        out = out.sub(&mul(&moved, vec![self.ds(vec![Slot::new(same, l)])]));
                    } else if s.kind() == other {
                        let r = self.fresh();
                        let moved = self.rename(e, l, r);
                        let h = match d {
                            Hol(_) => Factor::new("h", vec![], vec![Hol(x), Anti(l)]),
                            _ => Factor::new("h", vec![], vec![Hol(l), Anti(x)]),
                        };
                        out = out.add(&mul(&moved, vec![self.ds(vec![Slot::new(same, r)]), h]));
                    }
                }
            }
            Reeb => {
                if !slots.is_empty() || w.0 != w.1 {
                    return Err(Error::UnsupportedRank(
                        slots.len(),
                        "Reeb derivative of a non-scalar under a change of contact form".into(),
                    ));
                }
                let r = self.fresh();
                let dh = e.derive(reg, Anti(r));
                let da = e.derive(reg, Hol(r));
                out = out
                    .add(&mul(&dh, vec![self.ds(vec![Hol(r)])]).scale(&Coeff::i()))
                    .sub(&mul(&da, vec![self.ds(vec![Anti(r)])]).scale(&Coeff::i()))
                    .add(&mul(e, vec![self.ds(vec![Reeb])]).scale(&Coeff::real(w.0.clone())));
            }
        }
        Ok(out)
    }

    fn factor(&mut self, f: &Factor) -> Result<Expr> {
        let decl = self.reg.get(&f.sym)?;
        let mut w = decl.weight.clone();
        let mut e = self.symbol(&Factor::new(&f.sym, vec![], f.slots.clone()))?;
        let mut slots = f.slots.clone();
        for d in f.derivs.iter().rev() {
            e = self.derivative(*d, &e, &w, &slots)?;
            match d {
                Slot::Reeb => {
                    w = (&w.0 - &RatN::one(), &w.1 - &RatN::one());
                }
                _ => slots.insert(0, *d),
            }
        }
        Ok(e)
    }
}

/// Give the Antiholomorphic half of every contraction internal to a factor
/// a fresh label; returns the opened factor and the pairs to close again.
fn open(f: &Factor, next: &mut Label) -> (Factor, Vec<(Label, Label)>) {
    let mut f = f.clone();
    let mut seen: BTreeMap<Label, usize> = BTreeMap::new();
    for s in f.all_slots() {
        if let Some(l) = s.label() {
            *seen.entry(l).or_default() += 1;
        }
    }
    let mut pairs = vec![];
    for (l, k) in seen {
        if k < 2 {
            continue;
        }
        *next += 1;
        let m = *next;
        pairs.push((m, l));
        for s in f.all_slots_mut() {
            if *s == Slot::Anti(l) {
                *s = Slot::Anti(m);
            }
        }
    }
    (f, pairs)
}

/// Express the hatted version of `e` in the original scale.
pub fn transform(reg: &Registry, e: &Expr, sigma: &str) -> Result<Expr> {
    let e = expand_symbols(reg, e);
    let mut parts = vec![];
    for t in e.terms() {
        let mut next = t.max_label().unwrap_or(0) + 1;
        let mut acc = Expr::constant(t.coeff.clone());
        let mut closing = vec![];
        for f in &t.factors {
            let (g, pairs) = open(f, &mut next);
            closing.extend(pairs);
            let mut cx = Ctx { reg, sigma, next: next + 64 };
            let h = cx.factor(&g)?;
            next = cx.next + 1;
            acc = acc.mul(reg, &h);
        }
        let closed: Vec<Term> = acc
            .terms()
            .iter()
            .map(|u| {
                let mut u = u.clone();
                u.rename_dummies_from(next + 1);
                u.relabel(&closing.iter().copied().collect());
                u
            })
            .collect();
        parts.push(Expr::from_terms(reg, closed));
    }
    Ok(Expr::sum(parts.iter()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::{Closure, Constraint};
    use crate::parse::parse;

    #[test]
    fn torsion_law() {
        let r = Registry::pseudohermitian();
        let a = parse(&r, "A[a,b]").unwrap();
        let want = parse(&r, "A[a,b] + i*D[b,a](sigma) - i*D[a](sigma)*D[b](sigma)").unwrap();
        assert_eq!(transform(&r, &a, "sigma").unwrap(), want);
    }

    #[test]
    fn scalar_derivative_law() {
        let r = Registry::pseudohermitian();
        let e = parse(&r, "D[a](f)").unwrap();
        let want = parse(&r, "D[a](f) - (n - 1)/2*f*D[a](sigma)").unwrap();
        assert_eq!(transform(&r, &e, "sigma").unwrap(), want);
        let e = parse(&r, "D[0](sigma)").unwrap();
        let want = parse(&r, "D[0](sigma) + i*D[a](sigma)*D[^a](sigma) - i*D[^a](sigma)*D[a](sigma)").unwrap();
        assert_eq!(transform(&r, &e, "sigma").unwrap(), want);
    }

    #[test]
    fn zero_factor_is_identity() {
        let r = Registry::pseudohermitian();
        for src in ["A[a,b]*D[^a](f)*D[^b](f)", "D[^a,a](P)", "Pab[a,~b]*D[^~b,c](sigma)"] {
            let e = parse(&r, src).unwrap();
            let t = transform(&r, &e, "g").unwrap();
            let back = t.substitute(&r, "g", &Expr::zero());
            assert_eq!(back, e, "{}", src);
        }
    }

    #[test]
    fn trace_commutes_with_transform() {
        let r = Registry::pseudohermitian();
        let cl = Closure::new(&r, Constraint::General);
        let lhs = transform(&r, &parse(&r, "D[^a](A[a,b])").unwrap(), "sigma").unwrap();
        let opened = transform(&r, &parse(&r, "D[~c](A[a,b])").unwrap(), "sigma").unwrap();
        // contract ~c with a by hand
        let closed: Vec<Term> = opened
            .terms()
            .iter()
            .map(|t| {
                let mut t = t.clone();
                t.rename_dummies_from(50);
                t.relabel(&BTreeMap::from([(2, 0)]));
                t
            })
            .collect();
        let rhs = Expr::from_terms(&r, closed);
        assert!(cl.close(&lhs.sub(&rhs)).is_zero());
    }

    #[test]
    fn levi_form_stays_parallel() {
        let r = Registry::pseudohermitian();
        let e = parse(&r, "D[c](h[a,~b])").unwrap();
        assert!(e.is_zero());
        let e = Expr::factor(&r, Factor::new("h", vec![], vec![Slot::Hol(0), Slot::Anti(1)]));
        let ctx_w = r.get("h").unwrap().weight.clone();
        let mut cx = Ctx { reg: &r, sigma: "sigma", next: 10 };
        let d = cx.derivative(Slot::Hol(2), &e, &ctx_w, &[Slot::Hol(0), Slot::Anti(1)]).unwrap();
        assert!(d.is_zero(), "{}", d);
    }

    #[test]
    fn curvature_tensor_is_rejected() {
        let r = Registry::pseudohermitian();
        let e = parse(&r, "Rm[a,~b,c,~d]").unwrap();
        assert!(matches!(transform(&r, &e, "sigma"), Err(Error::UnsupportedRank(..))));
    }
}
