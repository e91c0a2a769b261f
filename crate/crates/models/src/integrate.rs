//! Exact integration on the sphere against `θ∧dθ`.
//!
//! `|z1|²` is uniformly distributed on `S³`, so the average of
//! `|z1|^{2a} |z2|^{2c}` is the beta integral `a! c! / (a + c + 1)!`; every
//! other monomial averages to zero by phase symmetry. The standard contact
//! form satisfies `θ∧dθ = 8 dV` and `|S³| = 2π²`, so integrals are
//! rational multiples of `π²` with total volume `16π²`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

use crate::error::{ModelError, Result};
use crate::ring::{Elem, Gauss, Model, Mono};
use crate::structure::Structure;

/// `θ∧dθ` over the Riemannian volume form of the unit sphere.
pub const DENSITY: i64 = 8;

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Average of `z1^a zb1^b z2^c zb2^d` over the unit sphere.
pub fn average(m: &Mono) -> BigRational {
    let [a, b, c, d] = m.map(|x| x as u32);
    if a != b || c != d {
        return BigRational::zero();
    }
    BigRational::new(factorial(a) * factorial(c), factorial(a + c + 1))
}

/// `∫_0^1 s^a (1-s)^c ds` by expanding `(1-s)^c`; an independent route to
/// [`average`].
pub fn beta_by_expansion(a: u32, c: u32) -> BigRational {
    let mut sum = BigRational::zero();
    let mut binom = BigInt::one();
    for j in 0..=c {
        let sign = if j % 2 == 0 { 1 } else { -1 };
        sum += BigRational::new(&binom * sign, BigInt::from(a + j + 1));
        binom = binom * BigInt::from(c - j) / BigInt::from(j + 1);
    }
    sum
}

/// `∫ m θ∧dθ / π²` for the standard contact form.
pub fn moment(m: &Mono) -> BigRational {
    average(m) * BigRational::from_integer(BigInt::from(2 * DENSITY))
}

/// `∫ f θ∧dθ / π²` for the contact form of `s`.
pub fn integrate(f: &Elem, s: &Structure) -> Result<Gauss> {
    if s.model != Model::Sphere {
        return Err(ModelError::Integration("integrals are defined on the sphere only".into()));
    }
    let g = f.mul(&s.volume_density());
    let mut out = Gauss::zero();
    for (k, m, c) in g.terms() {
        if k != 0 {
            return Err(ModelError::Integration(format!("integrand keeps the marker e^({}σ/2)", k)));
        }
        out += c * Gauss::new(moment(m), BigRational::zero());
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct MomentEstimate {
    pub mono: Mono,
    pub exact: f64,
    pub estimate: Complex64,
}

impl MomentEstimate {
    /// Relative error for nonvanishing moments, absolute otherwise.
    pub fn error(&self) -> f64 {
        let dev = (self.estimate - Complex64::new(self.exact, 0.0)).norm();
        if self.exact == 0.0 {
            dev
        } else {
            dev / self.exact
        }
    }
}

#[derive(Clone, Debug)]
pub struct MonteCarlo {
    pub samples: usize,
    pub moments: Vec<MomentEstimate>,
    /// Extremes of `θ∧dθ` on orthonormal tangent frames.
    pub density_range: (f64, f64),
}

impl MonteCarlo {
    pub fn worst(&self) -> f64 {
        self.moments.iter().map(|m| m.error()).fold(0.0, f64::max)
    }

    pub fn passes(&self, tolerance: f64) -> bool {
        let d = DENSITY as f64;
        self.worst() < tolerance && (self.density_range.0 - d).abs() < 1e-9 && (self.density_range.1 - d).abs() < 1e-9
    }
}

fn monomials(max_degree: u16) -> Vec<Mono> {
    let mut out = vec![];
    for a in 0..=max_degree {
        for b in 0..=max_degree - a {
            for c in 0..=max_degree - a - b {
                for d in 0..=max_degree - a - b - c {
                    out.push([a, b, c, d]);
                }
            }
        }
    }
    out
}

/// `θ∧dθ` at `p` on an oriented orthonormal basis of `T_p S³`, with
/// `θ = 2 Σ (x dy - y dx)` in real coordinates `(x1, y1, x2, y2)`.
fn density_at(p: [f64; 4], rng: &mut StdRng) -> f64 {
    let theta = |v: &[f64; 4]| 2.0 * (p[0] * v[1] - p[1] * v[0] + p[2] * v[3] - p[3] * v[2]);
    let dtheta = |u: &[f64; 4], v: &[f64; 4]| 4.0 * (u[0] * v[1] - u[1] * v[0] + u[2] * v[3] - u[3] * v[2]);
    let dot = |u: &[f64; 4], v: &[f64; 4]| (0..4).map(|i| u[i] * v[i]).sum::<f64>();
    let mut basis: Vec<[f64; 4]> = vec![p];
    while basis.len() < 4 {
        let mut v: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        for b in &basis {
            let k = dot(&v, b);
            for i in 0..4 {
                v[i] -= k * b[i];
            }
        }
        let n = dot(&v, &v).sqrt();
        if n > 1e-6 {
            basis.push(v.map(|x| x / n));
        }
    }
    let (u, v, w) = (&basis[1], &basis[2], &basis[3]);
    let val = theta(u) * dtheta(v, w) - theta(v) * dtheta(u, w) + theta(w) * dtheta(u, v);
    val.abs()
}

/// Estimate every moment of total degree `≤ max_degree` from uniform
/// samples on `S³`.
pub fn monte_carlo(samples: usize, max_degree: u16, seed: u64) -> MonteCarlo {
    let mut rng = StdRng::seed_from_u64(seed);
    let monos = monomials(max_degree);
    let mut sums = vec![Complex64::new(0.0, 0.0); monos.len()];
    let n = max_degree as usize + 1;
    let mut density_range = (f64::INFINITY, f64::NEG_INFINITY);
    for k in 0..samples {
        let x: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let p = x.map(|v| v / r);
        let z = [
            Complex64::new(p[0], p[1]),
            Complex64::new(p[0], -p[1]),
            Complex64::new(p[2], p[3]),
            Complex64::new(p[2], -p[3]),
        ];
        let pows: Vec<Vec<Complex64>> = z
            .iter()
            .map(|zz| {
                let mut v = vec![Complex64::new(1.0, 0.0); n];
                for e in 1..n {
                    v[e] = v[e - 1] * zz;
                }
                v
            })
            .collect();
        for (s, m) in sums.iter_mut().zip(&monos) {
            *s += pows[0][m[0] as usize] * pows[1][m[1] as usize] * pows[2][m[2] as usize] * pows[3][m[3] as usize];
        }
        if k % 1000 == 0 {
            let d = density_at(p, &mut rng);
            density_range = (density_range.0.min(d), density_range.1.max(d));
        }
    }
    let moments = monos
        .into_iter()
        .zip(sums)
        .map(|(mono, s)| MomentEstimate {
            mono,
            exact: average(&mono).to_f64().unwrap_or(f64::NAN),
            estimate: s / samples as f64,
        })
        .collect();
    MonteCarlo {
        samples,
        moments,
        density_range,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::standard_structure;

    #[test]
    fn beta_integral_two_ways() {
        for a in 0..8 {
            for c in 0..8 {
                assert_eq!(average(&[a, a, c, c]), beta_by_expansion(a as u32, c as u32));
            }
        }
    }

    #[test]
    fn total_volume() {
        let s = standard_structure(Model::Sphere);
        let v = integrate(&Elem::one(Model::Sphere), &s).unwrap();
        assert_eq!(v, Gauss::new(BigRational::from_integer(16.into()), BigRational::zero()));
    }

    #[test]
    fn odd_monomials_vanish() {
        let s = standard_structure(Model::Sphere);
        let f = Elem::parse(Model::Sphere, "z1^2*zb1 + z2*zb1").unwrap();
        assert!(integrate(&f, &s).unwrap().is_zero());
    }

    #[test]
    fn relation_is_respected() {
        // |z1|² and |z2|² both average to one half
        let s = standard_structure(Model::Sphere);
        let a = integrate(&Elem::parse(Model::Sphere, "z1*zb1").unwrap(), &s).unwrap();
        let b = integrate(&Elem::parse(Model::Sphere, "z2*zb2").unwrap(), &s).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn heisenberg_has_no_integral() {
        let s = standard_structure(Model::Heisenberg);
        assert!(integrate(&Elem::one(Model::Heisenberg), &s).is_err());
    }

    #[test]
    fn small_monte_carlo_run() {
        let mc = monte_carlo(20_000, 2, 7);
        assert!(mc.worst() < 0.05, "{}", mc.worst());
        assert!(mc.passes(0.05));
    }
}
