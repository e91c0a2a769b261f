//! Exterior forms in a coframe `(θ, θ¹, θ^1̄)`, stored by basis bitmask
//! (bit 0 is `θ`, bit 1 is `θ¹`, bit 2 is `θ^1̄`).

use std::collections::BTreeMap;
use std::fmt;

use crate::ring::{Elem, Model};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Form {
    model: Model,
    terms: BTreeMap<u8, Elem>,
}

/// Sign of `e_a ∧ e_b` relative to the sorted basis element.
fn wedge_sign(a: u8, b: u8) -> i64 {
    let mut swaps = 0;
    for i in 0..3 {
        if a & (1 << i) != 0 {
            swaps += (0..i).filter(|j| b & (1 << j) != 0).count();
        }
    }
    if swaps % 2 == 0 {
        1
    } else {
        -1
    }
}

pub const THETA: u8 = 0b001;
pub const THETA1: u8 = 0b010;
pub const THETA1BAR: u8 = 0b100;

impl Form {
    pub fn zero(model: Model) -> Form {
        Form {
            model,
            terms: BTreeMap::new(),
        }
    }

    pub fn basis(mask: u8, c: Elem) -> Form {
        let mut f = Form::zero(c.model());
        f.push(mask, c);
        f
    }

    pub fn function(c: Elem) -> Form {
        Form::basis(0, c)
    }

    fn push(&mut self, mask: u8, c: Elem) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&mask) {
            Some(old) => old.add(&c),
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(mask, sum);
        }
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn get(&self, mask: u8) -> Elem {
        self.terms.get(&mask).cloned().unwrap_or_else(|| Elem::zero(self.model))
    }

    pub fn terms(&self) -> impl Iterator<Item = (u8, &Elem)> {
        self.terms.iter().map(|(m, c)| (*m, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Form) -> Form {
        let mut f = self.clone();
        for (m, c) in &o.terms {
            f.push(*m, c.clone());
        }
        f
    }

    pub fn sub(&self, o: &Form) -> Form {
        self.add(&o.times(&Elem::int(self.model, -1)))
    }

    /// Multiply by a function.
    pub fn times(&self, c: &Elem) -> Form {
        let mut f = Form::zero(self.model);
        for (m, x) in &self.terms {
            f.push(*m, x.mul(c));
        }
        f
    }

    pub fn wedge(&self, o: &Form) -> Form {
        let mut f = Form::zero(self.model);
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                if a & b != 0 {
                    continue;
                }
                let s = Elem::int(self.model, wedge_sign(*a, *b));
                f.push(a | b, x.mul(y).mul(&s));
            }
        }
        f
    }

    /// Conjugation exchanges `θ¹` and `θ^1̄`.
    pub fn conj(&self) -> Form {
        let mut f = Form::zero(self.model);
        for (m, x) in &self.terms {
            let both = m & 0b110 == 0b110;
            let swapped = (m & THETA) | ((m & THETA1) << 1) | ((m & THETA1BAR) >> 1);
            let c = if both { x.conj().neg() } else { x.conj() };
            f.push(swapped, c);
        }
        f
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names = ["θ", "θ¹", "θ¹̄"];
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let b: Vec<&str> = (0..3).filter(|i| m & (1 << i) != 0).map(|i| names[i]).collect();
                if b.is_empty() {
                    format!("({})", c)
                } else {
                    format!("({}) {}", c, b.join("∧"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wedge_is_graded_commutative() {
        let m = Model::Sphere;
        let a = Form::basis(THETA, Elem::var(m, 0));
        let b = Form::basis(THETA1, Elem::var(m, 1));
        assert_eq!(a.wedge(&b), b.wedge(&a).times(&Elem::int(m, -1)));
        assert!(a.wedge(&a).is_zero());
        let c = Form::basis(THETA1BAR, Elem::one(m));
        assert!(a.wedge(&b).wedge(&c).wedge(&a).is_zero());
    }

    #[test]
    fn conjugation_is_an_involution() {
        let m = Model::Sphere;
        let f = Form::basis(THETA1 | THETA1BAR, Elem::var(m, 0)).add(&Form::basis(THETA1, Elem::var(m, 2)));
        assert_eq!(f.conj().conj(), f);
    }
}
