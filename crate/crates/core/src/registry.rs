//! Symbol declarations: slot kinds, weights, symmetries and conjugates.

use std::collections::BTreeMap;

use crate::coeff::{rat, RatN};
use crate::error::{Error, Result};
use crate::index::Kind;

pub type Weight = (RatN, RatN);

#[derive(Clone, Debug)]
pub struct SymbolDecl {
    pub name: String,
    pub slots: Vec<Kind>,
    pub weight: Weight,
    /// Every element of the slot symmetry group, identity first.
    pub symmetries: Vec<Vec<usize>>,
    /// Conjugate symbol and the slot permutation: slot `i` of the conjugate
    /// is the flipped slot `perm[i]` of the original.
    pub conj: (String, Vec<usize>),
    /// Covariantly constant (derivatives vanish).
    pub parallel: bool,
}

#[derive(Clone, Debug, Default)]
pub struct Registry {
    syms: BTreeMap<String, SymbolDecl>,
}

fn close_group(rank: usize, gens: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let id: Vec<usize> = (0..rank).collect();
    let mut group = vec![id];
    let mut i = 0;
    while i < group.len() {
        for g in gens {
            let h: Vec<usize> = (0..rank).map(|k| group[i][g[k]]).collect();
            if !group.contains(&h) {
                group.push(h);
            }
        }
        i += 1;
    }
    group
}

impl Registry {
    pub fn new() -> Self {
        Registry::default()
    }

    #[allow(clippy::too_many_arguments)]
    pub fn declare(
        &mut self,
        name: &str,
        slots: &[Kind],
        weight: Weight,
        generators: &[Vec<usize>],
        conj: &str,
        conj_perm: &[usize],
    ) {
        let symmetries = close_group(slots.len(), generators);
        self.syms.insert(
            name.to_string(),
            SymbolDecl {
                name: name.to_string(),
                slots: slots.to_vec(),
                weight,
                symmetries,
                conj: (conj.to_string(), conj_perm.to_vec()),
                parallel: false,
            },
        );
    }

    /// Real scalar of weight `(w, w)`.
    pub fn scalar(&mut self, name: &str, w: RatN) {
        self.declare(name, &[], (w.clone(), w), &[], name, &[]);
    }

    pub fn set_weight(&mut self, name: &str, w: Weight) -> Result<()> {
        let d = self
            .syms
            .get_mut(name)
            .ok_or_else(|| Error::UnknownSymbol(name.to_string()))?;
        d.weight = w;
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<&SymbolDecl> {
        self.syms
            .get(name)
            .ok_or_else(|| Error::UnknownSymbol(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.syms.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.syms.keys().map(|s| s.as_str())
    }

    /// Symbols of the pseudohermitian calculus.
    ///
    /// `A`/`Ab` torsion and its conjugate, `Pab` the CR Schouten tensor,
    /// `P`, `R` scalars, `T`/`Tb`, `W`/`Wb`, `S`, the curvature `Rm`, the
    /// Levi form `h`, a test one-form `tau`/`taub`, and the scalar
    /// placeholders. Each placeholder `x` comes with `x_h`/`x_a`, its CR and
    /// anti-CR parts, used by the pluriharmonic constraint.
    pub fn pseudohermitian() -> Self {
        use Kind::*;
        let z = || (RatN::zero(), RatN::zero());
        let m = |k: i64| (RatN::from_int(k), RatN::from_int(k));
        let mut r = Registry::new();
        r.declare("A", &[Hol, Hol], z(), &[vec![1, 0]], "Ab", &[0, 1]);
        r.declare("Ab", &[Anti, Anti], z(), &[vec![1, 0]], "A", &[0, 1]);
        r.declare("Pab", &[Hol, Anti], z(), &[], "Pab", &[1, 0]);
        r.declare(
            "Rm",
            &[Hol, Anti, Hol, Anti],
            m(1),
            &[vec![2, 1, 0, 3], vec![0, 3, 2, 1]],
            "Rm",
            &[1, 0, 3, 2],
        );
        r.declare("h", &[Hol, Anti], m(1), &[], "h", &[1, 0]);
        r.syms.get_mut("h").unwrap().parallel = true;
        r.declare("T", &[Hol], m(-1), &[], "Tb", &[0]);
        r.declare("Tb", &[Anti], m(-1), &[], "T", &[0]);
        r.declare("W", &[Hol], m(-1), &[], "Wb", &[0]);
        r.declare("Wb", &[Anti], m(-1), &[], "W", &[0]);
        r.declare("tau", &[Hol], m(-1), &[], "taub", &[0]);
        r.declare("taub", &[Anti], m(-1), &[], "tau", &[0]);
        r.scalar("P", RatN::from_int(-1));
        r.scalar("R", RatN::from_int(-1));
        r.scalar("S", RatN::from_int(-2));
        // critical weight -(n-1)/2
        let crit = &RatN::from_rat(rat(-1, 2)) * &RatN::linear(1, -1);
        for (name, w) in [
            ("sigma", RatN::zero()),
            ("f", crit.clone()),
            ("u", crit.clone()),
            ("v", crit.clone()),
            ("g", RatN::zero()),
        ] {
            r.scalar(name, w.clone());
            let hn = format!("{}_h", name);
            let an = format!("{}_a", name);
            r.declare(&hn, &[], (w.clone(), w.clone()), &[], &an, &[]);
            r.declare(&an, &[], (w.clone(), w.clone()), &[], &hn, &[]);
        }
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curvature_group_has_four_elements() {
        let r = Registry::pseudohermitian();
        assert_eq!(r.get("Rm").unwrap().symmetries.len(), 4);
        assert_eq!(r.get("A").unwrap().symmetries.len(), 2);
        assert_eq!(r.get("Pab").unwrap().symmetries.len(), 1);
    }
}
