//! Pseudohermitian structures on the models and the structure-equation
//! solver.
//!
//! Every structure is described against the model's fixed coframe
//! `(θ, θ¹, θ^1̄)` with dual frame `(T, Z, Zb)`, given explicitly as vector
//! fields in the ambient coordinates:
//!
//! ```text
//! sphere      T = (i/2)(z·∂z - zb·∂zb)   Z = ((1-i)/2)(zb2 ∂z1 - zb1 ∂z2)
//! heisenberg  T = ∂t                     Z = ∂z + (i/2) zb ∂t
//! ```
//!
//! On the sphere this is the contact form `i Σ (z dzb - zb dz)`, scaled so
//! that the Webster curvature is 1.

use crate::error::{ModelError, Result};
use crate::forms::{Form, THETA, THETA1, THETA1BAR};
use crate::ring::{gauss, gauss_frac, Elem, Gauss, Model};

/// Ambient vector field `Σ c_v ∂_v`.
fn base_field(model: Model, j: usize) -> Vec<(usize, Elem)> {
    let v = |k: usize| Elem::var(model, k);
    let c = |re: i64, im: i64, den: i64| Gauss::new(gauss_frac(re, den).re, gauss_frac(im, den).re);
    match (model, j) {
        (Model::Sphere, 0) => vec![
            (0, v(0).scale(&c(0, 1, 2))),
            (1, v(1).scale(&c(0, -1, 2))),
            (2, v(2).scale(&c(0, 1, 2))),
            (3, v(3).scale(&c(0, -1, 2))),
        ],
        (Model::Sphere, 1) => vec![(0, v(3).scale(&c(1, -1, 2))), (2, v(1).scale(&c(-1, 1, 2)))],
        (Model::Sphere, _) => vec![(1, v(2).scale(&c(1, 1, 2))), (3, v(0).scale(&c(-1, -1, 2)))],
        (Model::Heisenberg, 0) => vec![(2, Elem::one(model))],
        (Model::Heisenberg, 1) => vec![(0, Elem::one(model)), (2, v(1).scale(&c(0, 1, 2)))],
        (Model::Heisenberg, _) => vec![(1, Elem::one(model)), (2, v(0).scale(&c(0, -1, 2)))],
    }
}

/// `d` of the coframe elements.
pub fn coframe_differential(model: Model, j: usize) -> Form {
    let i = |s: i64| Elem::constant(model, gauss(0, s));
    match (model, j) {
        (_, 0) => Form::basis(THETA1 | THETA1BAR, i(1)),
        (Model::Sphere, 1) => Form::basis(THETA | THETA1, i(1)),
        (Model::Sphere, _) => Form::basis(THETA | THETA1BAR, i(-1)),
        (Model::Heisenberg, _) => Form::zero(model),
    }
}

/// Apply a coordinate frame field, including its action on the markers.
fn base_derive(model: Model, dsigma: &[Elem; 3], j: usize, f: &Elem) -> Elem {
    let mut out = Elem::zero(model);
    for (v, c) in base_field(model, j) {
        out = out.add(&f.partial(v).mul(&c));
    }
    if f.markers().iter().any(|k| *k != 0) {
        out = out.add(&f.marker_weighted().mul(&dsigma[j]));
    }
    out
}

#[derive(Clone, Debug)]
pub struct Structure {
    pub model: Model,
    /// Conformal factor: `θ = e^σ θ_0`; zero for the standard structure.
    pub sigma: Elem,
    /// Rows `θ, θ¹, θ^1̄` in the fixed coframe.
    pub coframe: [[Elem; 3]; 3],
    /// `frame[i][j]`: component of the `i`-th dual vector along the fixed
    /// frame field `j`.
    pub frame: [[Elem; 3]; 3],
    /// `ω₁¹` evaluated on the frame.
    pub omega: [Elem; 3],
    pub torsion: Elem,
    pub scalar: Elem,
    dsigma: [Elem; 3],
}

fn identity(model: Model) -> [[Elem; 3]; 3] {
    std::array::from_fn(|i| std::array::from_fn(|j| Elem::int(model, (i == j) as i64)))
}

fn zeros(model: Model) -> [Elem; 3] {
    std::array::from_fn(|_| Elem::zero(model))
}

/// Signed sum over permutations of `rows × cols`.
fn det(m: &[[Elem; 3]; 3], rows: &[usize], cols: &[usize]) -> Elem {
    let model = m[0][0].model();
    let perms: &[(&[usize], i64)] = match rows.len() {
        0 => &[(&[], 1)],
        1 => &[(&[0], 1)],
        2 => &[(&[0, 1], 1), (&[1, 0], -1)],
        _ => &[
            (&[0, 1, 2], 1),
            (&[1, 2, 0], 1),
            (&[2, 0, 1], 1),
            (&[0, 2, 1], -1),
            (&[2, 1, 0], -1),
            (&[1, 0, 2], -1),
        ],
    };
    let mut out = Elem::zero(model);
    for (p, s) in perms {
        let mut t = Elem::int(model, *s);
        for (r, c) in p.iter().enumerate() {
            t = t.mul(&m[rows[r]][cols[*c]]);
        }
        out = out.add(&t);
    }
    out
}

fn bits(mask: u8) -> Vec<usize> {
    (0..3).filter(|i| mask & (1 << i) != 0).collect()
}

impl Structure {
    fn raw(model: Model, sigma: Elem, coframe: [[Elem; 3]; 3], frame: [[Elem; 3]; 3], dsigma: [Elem; 3]) -> Self {
        Structure {
            model,
            sigma,
            coframe,
            frame,
            omega: zeros(model),
            torsion: Elem::zero(model),
            scalar: Elem::zero(model),
            dsigma,
        }
    }

    /// Derivative along the `i`-th frame vector (0 Reeb, 1 holomorphic,
    /// 2 antiholomorphic).
    pub fn derive(&self, i: usize, f: &Elem) -> Elem {
        let mut out = Elem::zero(self.model);
        for j in 0..3 {
            if !self.frame[i][j].is_zero() {
                out = out.add(&self.frame[i][j].mul(&base_derive(self.model, &self.dsigma, j, f)));
            }
        }
        out
    }

    /// Exterior derivative; forms are written in the fixed coframe.
    pub fn d(&self, f: &Form) -> Form {
        let mut out = Form::zero(self.model);
        for (mask, c) in f.terms() {
            let e = Form::basis(mask, Elem::one(self.model));
            for j in 0..3 {
                let dc = base_derive(self.model, &self.dsigma, j, c);
                out = out.add(&Form::basis(1 << j, dc).wedge(&e));
            }
            // d(e_a ∧ e_b ∧ …) by the Leibniz rule
            let bs = bits(mask);
            for (r, b) in bs.iter().enumerate() {
                let mut piece = Form::function(Elem::int(self.model, if r % 2 == 0 { 1 } else { -1 }));
                for (q, other) in bs.iter().enumerate() {
                    let factor = if q == r {
                        coframe_differential(self.model, *b)
                    } else {
                        Form::basis(1 << other, Elem::one(self.model))
                    };
                    piece = piece.wedge(&factor);
                }
                out = out.add(&piece.times(c));
            }
        }
        out
    }

    /// The `i`-th element of this structure's coframe.
    pub fn coframe_form(&self, i: usize) -> Form {
        (0..3).fold(Form::zero(self.model), |acc, j| acc.add(&Form::basis(1 << j, self.coframe[i][j].clone())))
    }

    pub fn theta(&self) -> Form {
        self.coframe_form(0)
    }

    pub fn omega_form(&self) -> Form {
        (0..3).fold(Form::zero(self.model), |acc, i| acc.add(&self.coframe_form(i).times(&self.omega[i])))
    }

    /// Components of a form against this structure's own coframe.
    pub fn components(&self, f: &Form) -> Form {
        let mut out = Form::zero(self.model);
        for target in 0u8..8 {
            let rows = bits(target);
            let mut c = Elem::zero(self.model);
            for (mask, x) in f.terms() {
                if mask.count_ones() as usize == rows.len() {
                    c = c.add(&x.mul(&det(&self.frame, &rows, &bits(mask))));
                }
            }
            out = out.add(&Form::basis(target, c));
        }
        out
    }

    /// Inverse of [`Structure::components`].
    pub fn from_components(&self, f: &Form) -> Form {
        let mut out = Form::zero(self.model);
        for (mask, x) in f.terms() {
            let piece = bits(mask)
                .iter()
                .fold(Form::function(x.clone()), |acc, i| acc.wedge(&self.coframe_form(*i)));
            out = out.add(&piece);
        }
        out
    }

    /// Solve `dθ¹ = θ¹∧ω + θ∧A θ^1̄` with `ω + ω̄ = 0`, then read `R`
    /// off `dω`.
    fn solve(mut self) -> Result<Self> {
        let dt1 = self.components(&self.d(&self.coframe_form(1)));
        let a = dt1.get(THETA | THETA1).neg();
        let c = dt1.get(THETA1 | THETA1BAR);
        if !a.add(&a.conj()).is_zero() {
            return Err(ModelError::SolverDegenerate(format!("Reeb part of ω is not imaginary: {}", a)));
        }
        self.omega = [a, c.conj().neg(), c];
        // the θ∧θ^1̄ coefficient is A^1_1̄ = A_1̄1̄
        self.torsion = dt1.get(THETA | THETA1BAR).conj();
        let dw = self.components(&self.d(&self.omega_form()));
        self.scalar = dw.get(THETA1 | THETA1BAR);
        if !self.scalar.is_real() {
            return Err(ModelError::SolverDegenerate(format!("scalar curvature is not real: {}", self.scalar)));
        }
        Ok(self)
    }

    /// Ratio of this structure's `θ∧dθ` to the standard one.
    pub fn volume_density(&self) -> Elem {
        let t = self.theta();
        let v = t.wedge(&self.d(&t)).get(0b111);
        v.scale(&gauss(0, -1))
    }

    /// Structure-equation residuals, each of which should vanish.
    pub fn residuals(&self) -> Vec<(&'static str, Form)> {
        let m = self.model;
        let (t, t1, t1b) = (self.coframe_form(0), self.coframe_form(1), self.coframe_form(2));
        let i = Elem::constant(m, gauss(0, 1));
        let w = self.omega_form();
        let div = crate::ops::evaluate(self, "D[^a](A[a,b])", &[]).unwrap_or_else(|_| Elem::zero(m));
        let mut duality = Form::zero(m);
        for a in 0..3 {
            for b in 0..3 {
                let mut s = Elem::int(m, -((a == b) as i64));
                for j in 0..3 {
                    s = s.add(&self.coframe[a][j].mul(&self.frame[b][j]));
                }
                duality = duality.add(&Form::function(s));
            }
        }
        vec![
            ("duality", duality),
            ("contact", self.d(&t).sub(&t1.wedge(&t1b).times(&i))),
            ("coframe", self.d(&t1).sub(&t1.wedge(&w)).sub(&t.wedge(&t1b).times(&self.torsion.conj()))),
            ("unitary", w.add(&w.conj())),
            (
                "connection",
                self.d(&w)
                    .sub(&t1.wedge(&t1b).times(&self.scalar))
                    .sub(&t1.wedge(&t).times(&div))
                    .add(&t1b.wedge(&t).times(&div.conj())),
            ),
        ]
    }

    /// `d(ω₁¹ + iRθ)`.
    pub fn trace_form_differential(&self) -> Form {
        let i = Elem::constant(self.model, gauss(0, 1));
        self.d(&self.omega_form().add(&self.theta().times(&self.scalar.mul(&i))))
    }
}

/// The standard structure of a model, solved from its coframe.
pub fn standard_structure(model: Model) -> Structure {
    Structure::raw(model, Elem::zero(model), identity(model), identity(model), zeros(model))
        .solve()
        .expect("standard coframes solve")
}

/// `θ̂ = e^σ θ` with the unitary coframe `θ̂¹ = e^{σ/2}(θ¹ + iσ¹θ)`.
pub fn conformal_structure(base: &Structure, sigma: &Elem) -> Result<Structure> {
    let m = base.model;
    if !sigma.is_real() {
        return Err(ModelError::NotReal(sigma.to_string()));
    }
    if sigma.markers().iter().any(|k| *k != 0) {
        return Err(ModelError::Unsupported("σ must be a polynomial".into()));
    }
    if !base.sigma.is_zero() {
        return Err(ModelError::Unsupported("the base must be a standard structure".into()));
    }
    if sigma.is_zero() {
        return Ok(base.clone());
    }
    let none = zeros(m);
    let ds: [Elem; 3] = std::array::from_fn(|j| base_derive(m, &none, j, sigma));
    let up = ds[2].clone(); // σ¹ = ∇^1σ = Zb σ
    let down = ds[1].clone();
    let i = |s: i64| gauss(0, s);
    let e = |k: i32| Elem::marker(m, k);
    let z = || Elem::zero(m);
    let coframe = [
        [e(2), z(), z()],
        [up.scale(&i(1)).shift(1), e(1), z()],
        [down.scale(&i(-1)).shift(1), z(), e(1)],
    ];
    let frame = [
        [e(-2), up.scale(&i(-1)).shift(-2), down.scale(&i(1)).shift(-2)],
        [z(), e(-1), z()],
        [z(), z(), e(-1)],
    ];
    Structure::raw(m, sigma.clone(), coframe, frame, ds).solve()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bracket_defect(model: Model) -> Vec<String> {
        // [e_a, e_b] = -Σ_c dθ^c(e_a, e_b) e_c on every coordinate
        let none = zeros(model);
        let mut bad = vec![];
        for v in 0..model.vars().len() {
            let x = Elem::var(model, v);
            for a in 0..3 {
                for b in (a + 1)..3 {
                    let ab = base_derive(model, &none, a, &base_derive(model, &none, b, &x));
                    let ba = base_derive(model, &none, b, &base_derive(model, &none, a, &x));
                    let mut lhs = ab.sub(&ba);
                    for c in 0..3 {
                        let k = coframe_differential(model, c).get((1 << a) | (1 << b));
                        lhs = lhs.add(&k.mul(&base_derive(model, &none, c, &x)));
                    }
                    if !lhs.is_zero() {
                        bad.push(format!("[{},{}] on {}: {}", a, b, model.vars()[v], lhs));
                    }
                }
            }
        }
        bad
    }

    #[test]
    fn coframe_differentials_match_the_vector_fields() {
        assert!(bracket_defect(Model::Sphere).is_empty(), "{:?}", bracket_defect(Model::Sphere));
        assert!(bracket_defect(Model::Heisenberg).is_empty());
    }

    #[test]
    fn frame_fields_are_tangent_to_the_sphere() {
        let s = standard_structure(Model::Sphere);
        let r = Elem::parse(Model::Sphere, "z1*zb1").unwrap();
        // z1 zb1 + z2 zb2 is constant, so derivatives of z1 zb1 and z2 zb2 cancel
        let q = Elem::parse(Model::Sphere, "1 - z1*zb1").unwrap();
        for i in 0..3 {
            assert_eq!(s.derive(i, &r), s.derive(i, &q).neg());
        }
    }

    #[test]
    fn standard_sphere() {
        let s = standard_structure(Model::Sphere);
        assert!(s.torsion.is_zero());
        assert_eq!(s.scalar, Elem::one(Model::Sphere));
        assert_eq!(s.omega[0].to_string(), "-i");
    }

    #[test]
    fn heisenberg_is_flat() {
        let s = standard_structure(Model::Heisenberg);
        assert!(s.torsion.is_zero() && s.scalar.is_zero());
        assert!(s.omega.iter().all(|w| w.is_zero()));
    }

    #[test]
    fn zero_factor_keeps_the_base() {
        let s = standard_structure(Model::Sphere);
        let t = conformal_structure(&s, &Elem::zero(Model::Sphere)).unwrap();
        assert_eq!(t.scalar, s.scalar);
    }

    #[test]
    fn complex_factor_is_rejected() {
        let s = standard_structure(Model::Sphere);
        let z = Elem::var(Model::Sphere, 0);
        assert!(matches!(conformal_structure(&s, &z), Err(ModelError::NotReal(_))));
    }
}
