//! CR tractor calculus in a fixed scale.
//!
//! A section of the standard tractor bundle is a triple `(σ, τ_α, ρ)`; the
//! middle slot carries one free holomorphic label, [`TractorSection::index`].
//! Further free labels picked up from derivatives ride along in all three
//! slots.

use std::time::Instant;

use crate::catalog::{Status, VerificationReport};
use crate::closure::{Closure, Constraint};
use crate::coeff::{Coeff, RatN};
use crate::dim1::close_at_one;
use crate::error::{Error, Result};
use crate::expr::{Expr, Factor};
use crate::index::{Label, Slot};
use crate::limit::limit_n;
use crate::ops::{critical_weight, expand_definition, parse_ops};
use crate::registry::Registry;

#[derive(Clone, Debug, PartialEq)]
pub struct TractorSection {
    pub top: Expr,
    pub mid: Expr,
    pub bottom: Expr,
    /// Label of the tractor index in the middle slot.
    pub index: Label,
    /// Offset `(w, w')`: the slots have weights `(w+1, w')`, `(w+1, w')`
    /// and `(w, w'-1)`.
    pub weight: (RatN, RatN),
}

/// Direction of a tractor derivative.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Hol(Label),
    Anti(Label),
    Reeb,
}

impl Direction {
    fn slot(self) -> Slot {
        match self {
            Direction::Hol(l) => Slot::Hol(l),
            Direction::Anti(l) => Slot::Anti(l),
            Direction::Reeb => Slot::Reeb,
        }
    }
}

fn mono(reg: &Registry, c: Coeff, fs: Vec<Factor>) -> Expr {
    Expr::from_terms(reg, vec![crate::expr::Term::new(c, fs)])
}

fn sym(reg: &Registry, name: &str, slots: Vec<Slot>) -> Expr {
    mono(reg, Coeff::one(), vec![Factor::new(name, vec![], slots)])
}

fn imag(r: RatN) -> Coeff {
    Coeff { re: RatN::zero(), im: r }
}

fn real(r: RatN) -> Coeff {
    Coeff::real(r)
}

impl TractorSection {
    pub fn zero(index: Label) -> Self {
        TractorSection {
            top: Expr::zero(),
            mid: Expr::zero(),
            bottom: Expr::zero(),
            index,
            weight: (RatN::zero(), RatN::zero()),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.top.is_zero() && self.mid.is_zero() && self.bottom.is_zero()
    }

    fn fresh(&self, d: Direction) -> Label {
        let m = [&self.top, &self.mid, &self.bottom]
            .iter()
            .filter_map(|e| e.max_label())
            .max()
            .unwrap_or(0);
        let d = d.slot().label().unwrap_or(0);
        m.max(d).max(self.index) + 1
    }

    /// `τ` with its tractor index renamed.
    fn tau(&self, reg: &Registry, to: Label) -> Expr {
        self.mid.rename_free(reg, self.index, to)
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> TractorSection {
        TractorSection {
            top: f(&self.top),
            mid: f(&self.mid),
            bottom: f(&self.bottom),
            index: self.index,
            weight: self.weight.clone(),
        }
    }

    pub fn add(&self, other: &TractorSection) -> TractorSection {
        let other = other.reindexed(self.index);
        TractorSection {
            top: self.top.add(&other.top),
            mid: self.mid.add(&other.mid),
            bottom: self.bottom.add(&other.bottom),
            index: self.index,
            weight: self.weight.clone(),
        }
    }

    fn reindexed(&self, to: Label) -> TractorSection {
        if to == self.index {
            return self.clone();
        }
        let reg = Registry::pseudohermitian();
        TractorSection {
            mid: self.tau(&reg, to),
            index: to,
            ..self.clone()
        }
    }
}

/// Tractor connection in direction `d`.
pub fn tractor_derivative(reg: &Registry, s: &TractorSection, d: Direction) -> TractorSection {
    let a = Slot::Hol(s.index);
    let g = s.fresh(d);
    let dv = |e: &Expr| e.derive(reg, d.slot());
    let (sigma, rho) = (&s.top, &s.bottom);
    // τ_γ contracted against a coupling with upper index γ
    let tau_g = s.tau(reg, g);
    let (top, mid, bottom) = match d {
        Direction::Hol(b) => {
            let top = dv(sigma).sub(&s.tau(reg, b));
            let mid = dv(&s.mid).add(&sigma.mul(reg, &sym(reg, "A", vec![a, Slot::Hol(b)])).scale(&imag(RatN::one())));
            let bottom = dv(rho)
                .sub(&sym(reg, "Pab", vec![Slot::Hol(b), Slot::Anti(g)]).mul(reg, &tau_g))
                .add(&sigma.mul(reg, &sym(reg, "T", vec![Slot::Hol(b)])));
            (top, mid, bottom)
        }
        Direction::Anti(b) => {
            let top = dv(sigma);
            let mid = dv(&s.mid)
                .add(&sigma.mul(reg, &sym(reg, "Pab", vec![a, Slot::Anti(b)])))
                .add(&rho.mul(reg, &sym(reg, "h", vec![a, Slot::Anti(b)])));
            let bottom = dv(rho)
                .add(
                    &sym(reg, "Ab", vec![Slot::Anti(g), Slot::Anti(b)])
                        .mul(reg, &tau_g)
                        .scale(&imag(RatN::one())),
                )
                .sub(&sigma.mul(reg, &sym(reg, "Tb", vec![Slot::Anti(b)])));
            (top, mid, bottom)
        }
        Direction::Reeb => {
            let p = sym(reg, "P", vec![]);
            let k = imag(RatN::linear(1, 2).inv());
            let i = imag(RatN::one());
            let top = dv(sigma).add(&p.mul(reg, sigma).scale(&k)).sub(&rho.scale(&i));
            let mid = dv(&s.mid)
                .sub(&sym(reg, "Pab", vec![a, Slot::Anti(g)]).mul(reg, &tau_g).scale(&i))
                .add(&p.mul(reg, &s.mid).scale(&k))
                .add(&sigma.mul(reg, &sym(reg, "T", vec![a])).scale(&imag(RatN::from_int(2))));
            let bottom = dv(rho)
                .add(&p.mul(reg, rho).scale(&k))
                .add(&sym(reg, "Tb", vec![Slot::Anti(g)]).mul(reg, &tau_g).scale(&imag(RatN::from_int(2))))
                .add(&sym(reg, "S", vec![]).mul(reg, sigma).scale(&i));
            (top, mid, bottom)
        }
    };
    TractorSection {
        top,
        mid,
        bottom,
        index: s.index,
        weight: s.weight.clone(),
    }
}

/// `∇^β∇_β` on tractors, with `β` a label not otherwise in use.
pub fn tractor_sublaplacian(reg: &Registry, s: &TractorSection) -> TractorSection {
    let b = s.fresh(Direction::Reeb) + 1;
    let once = tractor_derivative(reg, s, Direction::Hol(b));
    tractor_derivative(reg, &once, Direction::Anti(b))
}

/// The tractor-D operator on a scalar density `f` of weight `(w, w')`,
/// with tractor index `index`.
pub fn tractor_d(reg: &Registry, f: &Expr, w: &RatN, wp: &RatN, index: Label) -> Result<TractorSection> {
    if f.terms().iter().any(|t| !t.free().is_empty()) {
        return Err(Error::Invalid("tractor-D takes a scalar".into()));
    }
    let b = f.max_label().map_or(0, |m| m + 1).max(index + 1);
    let c = &(&RatN::n() + w) + wp;
    let top = f.scale(&real(w * &c));
    let mid = f.derive(reg, Slot::Hol(index)).scale(&real(c));
    let lap = f.derive(reg, Slot::Hol(b)).derive(reg, Slot::Anti(b));
    let reeb = f.derive(reg, Slot::Reeb).scale(&imag(w.clone()));
    let pc = w * &(&RatN::one() + &(&(wp - w) / &RatN::linear(1, 2)));
    let pf = sym(reg, "P", vec![]).mul(reg, f).scale(&real(pc));
    let bottom = lap.add(&reeb).add(&pf).neg();
    Ok(TractorSection {
        top,
        mid,
        bottom,
        index,
        weight: (w - &RatN::one(), wp.clone()),
    })
}

/// `−(∇^β∇_β + i(w−1)∇_0 + (w−1)(1 + (w'−w+1)/(n+2))P)` applied to
/// `𝔻_A f` for `f` of weight `(w, w')`.
pub fn paneitz_tractor(reg: &Registry, f: &Expr, w: &RatN, wp: &RatN) -> Result<TractorSection> {
    let x = tractor_d(reg, f, w, wp, 0)?;
    let w1 = w - &RatN::one();
    let lap = tractor_sublaplacian(reg, &x);
    let reeb = tractor_derivative(reg, &x, Direction::Reeb).map(|e| e.scale(&imag(w1.clone())));
    let pc = &w1 * &(&RatN::one() + &(&(&(wp - w) + &RatN::one()) / &RatN::linear(1, 2)));
    let p = sym(reg, "P", vec![]).scale(&real(pc));
    let pot = x.map(|e| p.mul(reg, e));
    Ok(lap.add(&reeb).add(&pot).map(|e| e.neg()))
}

/// `P₄ f` read off the bottom slot at the critical weight. The upper
/// slots must close to zero.
pub fn extract_paneitz(reg: &Registry) -> Result<Expr> {
    let f = Expr::scalar(reg, "f");
    let w = critical_weight();
    let s = paneitz_tractor(reg, &f, &w, &w)?;
    let c = Closure::new(reg, Constraint::General);
    for (name, e) in [("top", &s.top), ("middle", &s.mid)] {
        let r = c.close(e);
        if !r.is_zero() {
            return Err(Error::SideConditionFailed(format!("{} slot: {}", name, r)));
        }
    }
    Ok(s.bottom.scale(&real(RatN::from_int(4))))
}

/// Extracted operator minus the defining formula, closed at symbolic `n`.
pub fn extraction_residual(reg: &Registry) -> Result<Expr> {
    let got = extract_paneitz(reg)?;
    let want = expand_definition(reg, "P4", &[], Some(&Expr::scalar(reg, "f")))?;
    Ok(Closure::new(reg, Constraint::General).close(&got.sub(&want)))
}

/// The extracted operator against `C` in dimension three.
pub fn extraction_residual_at_one(reg: &Registry) -> Result<String> {
    let got = extract_paneitz(reg)?;
    let closed = Closure::new(reg, Constraint::General).close(&got);
    let at_one = limit_n(&closed, &crate::coeff::Rational::from_integer(1.into()))?;
    let c = parse_ops(reg, "C(f)")?;
    let c = limit_n(&c, &crate::coeff::Rational::from_integer(1.into()))?;
    Ok(close_at_one(reg, Constraint::General, &at_one.sub(&c))?.to_string())
}

/// Pushforwards of the pieces of the Fefferman-space Paneitz operator,
/// each already divided by four, as expressions in `u`.
pub const FEFFERMAN_LAPLACIAN_SQUARED: &str = "Delta_b(Delta_b(u))";
pub const FEFFERMAN_F: &str = "D[0,0](u) - 4*Im(D[^a](A[a,b]*D[^b](u))) \
    + 4*(Pab[a,~b] - P/n*h[a,~b])*D[^~b,^a](u) - 4*(n^2 - 1)/n*Re(D[^a](P*D[a](u))) \
    - 32*(n^2 - 1)/(n*(n + 2))*Re((D[a](P) - i*n/(2*(n + 1))*D[^b](A[a,b]))*D[^a](u))";
pub const FEFFERMAN_Q: &str = "(n + 1)^2/(n*(n + 2))*Delta_b(P) - 2/(n*(n + 2))*Im(D[^a,^b](A[a,b])) \
    - (n + 1)/n*(Pab[a,~b] - P/n*h[a,~b])*(Pab[^~b,^a] - P/n*h[^~b,^a]) - (n - 1)/n*A[a,b]*Ab[^a,^b] \
    + (n - 1)*(n + 1)^2/n^2*P^2";

/// Assemble `¼π_*(Δ² + F + (N−4)/2·Q)` with `N = 2n+2` and compare with
/// the CR Paneitz operator. A nonzero residual is reported, not repaired.
pub fn fefferman_assembly_check(reg: &Registry) -> Result<VerificationReport> {
    let start = Instant::now();
    let src = format!(
        "{} + {} + (n - 1)*({})*u - P4(u)",
        FEFFERMAN_LAPLACIAN_SQUARED, FEFFERMAN_F, FEFFERMAN_Q
    );
    let diff = parse_ops(reg, &src)?;
    let out = Closure::new(reg, Constraint::General).close(&diff);
    let residual = (!out.is_zero()).then(|| out.to_string());
    Ok(VerificationReport {
        id: "fefferman_assembly".into(),
        anchor: "\\frac{1}{4}\\pi_*\\left(\\Delta^2 + F + \\frac{N-4}{2}Q\\right)".into(),
        status: if residual.is_none() { Status::Verified } else { Status::Failed },
        residual,
        exact_value: None,
        constraints: "general".into(),
        dimension: "n".into(),
        terms: diff.len(),
        duration_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    fn reg() -> Registry {
        Registry::pseudohermitian()
    }

    fn section(r: &Registry, top: &str, mid: &str, bottom: &str) -> TractorSection {
        // label `a` parses to 0, the tractor index
        TractorSection {
            top: parse(r, top).unwrap(),
            mid: parse(r, mid).unwrap(),
            bottom: parse(r, bottom).unwrap(),
            index: 0,
            weight: (RatN::zero(), RatN::zero()),
        }
    }

    #[test]
    fn top_slot_of_holomorphic_derivative() {
        let r = reg();
        let s = section(&r, "sigma", "tau[a]", "g");
        let b = 5;
        let d = tractor_derivative(&r, &s, Direction::Hol(b));
        let want = Expr::scalar(&r, "sigma")
            .derive(&r, Slot::Hol(b))
            .sub(&parse(&r, "tau[a]").unwrap().rename_free(&r, 0, b));
        assert_eq!(d.top, want);
    }

    #[test]
    fn middle_slot_sees_the_bottom_through_the_levi_form() {
        let r = reg();
        let s = section(&r, "0", "0", "g");
        let d = tractor_derivative(&r, &s, Direction::Anti(5));
        let want = Expr::scalar(&r, "g").mul(&r, &sym(&r, "h", vec![Slot::Hol(0), Slot::Anti(5)]));
        assert_eq!(d.mid, want);
    }

    #[test]
    fn zero_is_parallel() {
        let r = reg();
        for d in [Direction::Hol(3), Direction::Anti(3), Direction::Reeb] {
            assert!(tractor_derivative(&r, &TractorSection::zero(0), d).is_zero());
        }
    }

    #[test]
    fn weight_with_vanishing_top_coefficient() {
        let r = reg();
        let f = Expr::scalar(&r, "f");
        let s = tractor_d(&r, &f, &RatN::zero(), &RatN::zero(), 0).unwrap();
        assert!(s.top.is_zero());
        assert!(!s.mid.is_zero());
    }

    #[test]
    fn constants_only_see_the_curvature() {
        let r = reg();
        let one = Expr::one();
        let w = RatN::from_int(1);
        let s = tractor_d(&r, &one, &w, &RatN::zero(), 0).unwrap();
        assert!(s.mid.is_zero());
        let p = &RatN::linear(1, 1) / &RatN::linear(1, 2);
        let want = sym(&r, "P", vec![]).scale(&real(-&p));
        assert_eq!(s.bottom, want);
    }

    #[test]
    fn vectors_are_rejected() {
        let r = reg();
        let v = parse(&r, "D[a](f)").unwrap();
        assert!(tractor_d(&r, &v, &RatN::zero(), &RatN::zero(), 7).is_err());
    }
}
