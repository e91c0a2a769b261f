//! Commutation of covariant derivatives for the Tanaka–Webster connection.
//!
//! For directions `a` (outer) and `b` (inner) acting on a factor `Y`,
//! [`commutator`] returns `∇_a∇_b Y − ∇_b∇_a Y`: one curvature term per
//! slot of `Y` plus the torsion term `−∇_{Tor(a,b)} Y`. Slots and
//! directions are lowered; see [`crate::index`].

use crate::coeff::Coeff;
use crate::expr::{Expr, Factor, Term};
use crate::index::{Label, Slot};
use crate::registry::Registry;

fn f(sym: &str, derivs: Vec<Slot>, slots: Vec<Slot>) -> Factor {
    Factor::new(sym, derivs, slots)
}

/// Replace the `p`-th slot (derivatives first, then symbol slots).
pub fn replace_slot(y: &Factor, p: usize, s: Slot) -> Factor {
    let mut y = y.clone();
    if p < y.derivs.len() {
        y.derivs[p] = s;
    } else {
        let k = p - y.derivs.len();
        y.slots[k] = s;
    }
    y
}

fn prepend(y: &Factor, d: Slot) -> Factor {
    let mut y = y.clone();
    y.derivs.insert(0, d);
    y
}

struct Acc<'a> {
    reg: &'a Registry,
    terms: Vec<Term>,
}

impl Acc<'_> {
    fn push(&mut self, c: Coeff, fs: Vec<Factor>) {
        self.terms.push(Term::new(c, fs));
    }
}

/// `∇_a∇_b Y − ∇_b∇_a Y`. Labels at or above `fresh` are free to use.
pub fn commutator(reg: &Registry, a: Slot, b: Slot, y: &Factor, fresh: Label) -> Expr {
    use Slot::*;
    let mut acc = Acc { reg, terms: vec![] };
    let one = Coeff::one;
    let neg = || Coeff::int(-1);
    let i = Coeff::i;
    let mi = || Coeff::i().scale(&crate::coeff::RatN::from_int(-1));
    let r = fresh;

    let slots: Vec<Slot> = y.all_slots().copied().collect();
    for (p, s) in slots.iter().enumerate() {
        match *s {
            Hol(l) => match (a, b) {
                (Hol(x), Anti(z)) => acc.push(
                    neg(),
                    vec![f("Rm", vec![], vec![Hol(l), Anti(r), Hol(x), Anti(z)]), replace_slot(y, p, Hol(r))],
                ),
                (Anti(x), Hol(z)) => acc.push(
                    one(),
                    vec![f("Rm", vec![], vec![Hol(l), Anti(r), Hol(z), Anti(x)]), replace_slot(y, p, Hol(r))],
                ),
                (Hol(x), Hol(z)) => {
                    acc.push(i(), vec![f("A", vec![], vec![Hol(l), Hol(x)]), replace_slot(y, p, Hol(z))]);
                    acc.push(mi(), vec![f("A", vec![], vec![Hol(l), Hol(z)]), replace_slot(y, p, Hol(x))]);
                }
                (Anti(x), Anti(z)) => {
                    acc.push(
                        mi(),
                        vec![
                            f("h", vec![], vec![Hol(l), Anti(x)]),
                            f("Ab", vec![], vec![Anti(r), Anti(z)]),
                            replace_slot(y, p, Hol(r)),
                        ],
                    );
                    acc.push(
                        i(),
                        vec![
                            f("h", vec![], vec![Hol(l), Anti(z)]),
                            f("Ab", vec![], vec![Anti(r), Anti(x)]),
                            replace_slot(y, p, Hol(r)),
                        ],
                    );
                }
                (Hol(x), Reeb) => acc.push(
                    neg(),
                    vec![f("A", vec![Anti(r)], vec![Hol(l), Hol(x)]), replace_slot(y, p, Hol(r))],
                ),
                (Reeb, Hol(z)) => acc.push(
                    one(),
                    vec![f("A", vec![Anti(r)], vec![Hol(l), Hol(z)]), replace_slot(y, p, Hol(r))],
                ),
                (Anti(x), Reeb) => acc.push(
                    one(),
                    vec![f("Ab", vec![Hol(l)], vec![Anti(r), Anti(x)]), replace_slot(y, p, Hol(r))],
                ),
                (Reeb, Anti(z)) => acc.push(
                    neg(),
                    vec![f("Ab", vec![Hol(l)], vec![Anti(r), Anti(z)]), replace_slot(y, p, Hol(r))],
                ),
                (Reeb, Reeb) => {}
            },
            Anti(l) => match (a, b) {
                (Hol(x), Anti(z)) => acc.push(
                    one(),
                    vec![f("Rm", vec![], vec![Hol(r), Anti(l), Hol(x), Anti(z)]), replace_slot(y, p, Anti(r))],
                ),
                (Anti(x), Hol(z)) => acc.push(
                    neg(),
                    vec![f("Rm", vec![], vec![Hol(r), Anti(l), Hol(z), Anti(x)]), replace_slot(y, p, Anti(r))],
                ),
                (Hol(x), Hol(z)) => {
                    acc.push(
                        i(),
                        vec![
                            f("h", vec![], vec![Hol(x), Anti(l)]),
                            f("A", vec![], vec![Hol(r), Hol(z)]),
                            replace_slot(y, p, Anti(r)),
                        ],
                    );
                    acc.push(
                        mi(),
                        vec![
                            f("h", vec![], vec![Hol(z), Anti(l)]),
                            f("A", vec![], vec![Hol(r), Hol(x)]),
                            replace_slot(y, p, Anti(r)),
                        ],
                    );
                }
                (Anti(x), Anti(z)) => {
                    acc.push(mi(), vec![f("Ab", vec![], vec![Anti(l), Anti(x)]), replace_slot(y, p, Anti(z))]);
                    acc.push(i(), vec![f("Ab", vec![], vec![Anti(l), Anti(z)]), replace_slot(y, p, Anti(x))]);
                }
                (Hol(x), Reeb) => acc.push(
                    one(),
                    vec![f("A", vec![Anti(l)], vec![Hol(r), Hol(x)]), replace_slot(y, p, Anti(r))],
                ),
                (Reeb, Hol(z)) => acc.push(
                    neg(),
                    vec![f("A", vec![Anti(l)], vec![Hol(r), Hol(z)]), replace_slot(y, p, Anti(r))],
                ),
                (Anti(x), Reeb) => acc.push(
                    neg(),
                    vec![f("Ab", vec![Hol(r)], vec![Anti(l), Anti(x)]), replace_slot(y, p, Anti(r))],
                ),
                (Reeb, Anti(z)) => acc.push(
                    one(),
                    vec![f("Ab", vec![Hol(r)], vec![Anti(l), Anti(z)]), replace_slot(y, p, Anti(r))],
                ),
                (Reeb, Reeb) => {}
            },
            Reeb => {}
        }
    }

    // torsion
    match (a, b) {
        (Hol(x), Anti(z)) => acc.push(mi(), vec![f("h", vec![], vec![Hol(x), Anti(z)]), prepend(y, Reeb)]),
        (Anti(x), Hol(z)) => acc.push(i(), vec![f("h", vec![], vec![Hol(z), Anti(x)]), prepend(y, Reeb)]),
        (Hol(x), Reeb) => acc.push(one(), vec![f("A", vec![], vec![Hol(x), Hol(r)]), prepend(y, Anti(r))]),
        (Reeb, Hol(z)) => acc.push(neg(), vec![f("A", vec![], vec![Hol(z), Hol(r)]), prepend(y, Anti(r))]),
        (Anti(x), Reeb) => acc.push(one(), vec![f("Ab", vec![], vec![Anti(x), Anti(r)]), prepend(y, Hol(r))]),
        (Reeb, Anti(z)) => acc.push(neg(), vec![f("Ab", vec![], vec![Anti(z), Anti(r)]), prepend(y, Hol(r))]),
        _ => {}
    }
    Expr::from_terms(acc.reg, acc.terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    fn comm(src_outer: Slot, src_inner: Slot, y: Factor) -> Expr {
        let r = Registry::pseudohermitian();
        commutator(&r, src_outer, src_inner, &y, 100)
    }

    #[test]
    fn scalar_mixed_commutator() {
        let r = Registry::pseudohermitian();
        // ∇_β̄∇_α f − ∇_α∇_β̄ f = i h_{αβ̄} ∇_0 f
        let got = comm(Slot::Anti(1), Slot::Hol(0), Factor::scalar("f"));
        let want = parse(&r, "i*h[a,~b]*D[0](f)").unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn scalar_reeb_commutator() {
        let r = Registry::pseudohermitian();
        let got = comm(Slot::Hol(0), Slot::Reeb, Factor::scalar("f"));
        let want = parse(&r, "A[a,b]*D[^b](f)").unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn holomorphic_scalar_commutator_vanishes() {
        assert!(comm(Slot::Hol(0), Slot::Hol(1), Factor::scalar("f")).is_zero());
    }

    #[test]
    fn one_form_mixed_commutator() {
        let r = Registry::pseudohermitian();
        // ∇_γ̄∇_β∇_α f − ∇_β∇_γ̄∇_α f = i∇_0∇_α f h_{βγ̄} + R_α^ρ_{βγ̄}∇_ρ f
        let y = Factor::new("f", vec![Slot::Hol(0)], vec![]);
        let got = comm(Slot::Anti(2), Slot::Hol(1), y);
        let want = parse(&r, "i*h[b,~c]*D[0,a](f) + Rm[a,^d,b,~c]*D[d](f)").unwrap();
        assert_eq!(got, want);
    }
}
