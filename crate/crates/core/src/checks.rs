//! Verifications that are not a single `lhs = rhs` closure: divisibility
//! and limits in the dimension, and the tractor extraction.

use std::time::Instant;

use crate::catalog::{Status, VerificationReport};
use crate::closure::{Closure, Constraint};
use crate::coeff::{Coeff, RatN, Rational};
use crate::dim1::{reduce, Closure1};
use crate::error::{Error, Result};
use crate::limit::{limit_n, valuation};
use crate::ops::parse_ops;
use crate::registry::Registry;
use crate::tractor::{extract_paneitz, extraction_residual, extraction_residual_at_one, fefferman_assembly_check};

/// What a check found: a residual (if any), a value worth reporting, and
/// the size of the computation.
struct Found {
    residual: Option<String>,
    value: Option<String>,
    terms: usize,
}

pub struct Check {
    pub id: &'static str,
    pub anchor: &'static str,
    pub constraints: &'static str,
    pub dimension: &'static str,
    run: fn(&Registry) -> Result<Found>,
}

impl Check {
    pub fn run(&self, reg: &Registry) -> Result<VerificationReport> {
        let start = Instant::now();
        let f = (self.run)(reg)?;
        Ok(VerificationReport {
            id: self.id.into(),
            anchor: self.anchor.into(),
            status: if f.residual.is_none() { Status::Verified } else { Status::Failed },
            residual: f.residual,
            exact_value: f.value,
            constraints: self.constraints.into(),
            dimension: self.dimension.into(),
            terms: f.terms,
            duration_ms: start.elapsed().as_secs_f64() * 1e3,
        })
    }
}

fn one() -> Rational {
    Rational::from_integer(1.into())
}

fn divisible(reg: &Registry, src: &str, c: Constraint, order: i64) -> Result<Found> {
    let closed = Closure::new(reg, c).close(&parse_ops(reg, src)?);
    let v = valuation(&closed, &one());
    let ok = closed.is_zero() || v.is_some_and(|v| v >= order);
    Ok(Found {
        residual: (!ok).then(|| format!("vanishing order {:?} at n = 1: {}", v, closed)),
        value: v.map(|v| format!("vanishing order {} at n = 1", v)),
        terms: closed.len(),
    })
}

/// `k/(n-1)^m` times the closure of `src`, taken to `n = 1` and compared
/// with `target` in components.
fn limit(reg: &Registry, src: &str, m: i32, k: i64, c: Constraint, target: &str) -> Result<Found> {
    let closed = Closure::new(reg, c.clone()).close(&parse_ops(reg, src)?);
    let nm1 = RatN::linear(1, -1);
    let scale = (0..m).fold(RatN::from_int(k), |s, _| &s / &nm1);
    let lim = limit_n(&closed.scale(&Coeff::real(scale)), &one())?;
    let diff = reduce(reg, &lim)?.sub(&reduce(reg, &parse_ops(reg, target)?)?);
    let out = Closure1::new(reg, c).close(&diff);
    Ok(Found {
        residual: (!out.is_zero()).then(|| out.to_string()),
        value: None,
        terms: closed.len(),
    })
}

fn pluriharmonic_f() -> Constraint {
    Constraint::Pluriharmonic(vec!["f".into()])
}

pub static LIMITS: &[Check] = &[
    Check {
        id: "paneitz_pluriharmonic_divisible",
        anchor: "P_4f = (n-1)\\cdots \\text{ for } f\\in\\mathcal{P}",
        constraints: "pluriharmonic(f)",
        dimension: "n",
        run: |r| divisible(r, "P4(f)", pluriharmonic_f(), 1),
    },
    Check {
        id: "paneitz_of_one_divisible",
        anchor: "P_4(1) = (n-1)^2\\cdots \\text{ for pseudo-Einstein } \\theta",
        constraints: "pseudo-einstein",
        dimension: "n",
        run: |r| divisible(r, "P4(1)", Constraint::PseudoEinstein, 2),
    },
    Check {
        id: "q_crit_limit",
        anchor: "P_4^\\prime f = \\lim_{n\\to1} \\frac{2}{n-1}P_4f",
        constraints: "pluriharmonic(f)",
        dimension: "n → 1",
        run: |r| limit(r, "P4(f)", 1, 2, pluriharmonic_f(), "P4prime_crit(f)"),
    },
    Check {
        id: "q4prime_crit_limit",
        anchor: "Q_4^\\prime = \\lim_{n\\to 1}\\frac{4}{(n-1)^2}P_4(1)",
        constraints: "pseudo-einstein",
        dimension: "n → 1",
        run: |r| limit(r, "P4(1)", 2, 4, Constraint::PseudoEinstein, "Q4prime_crit"),
    },
];

fn found(e: &crate::Expr) -> Found {
    Found {
        residual: (!e.is_zero()).then(|| e.to_string()),
        value: None,
        terms: e.len(),
    }
}

pub static TRACTOR: &[Check] = &[
    Check {
        id: "tractor_upper_slots",
        anchor: "\\mathbb{D}^A\\mathbb{D}_A",
        constraints: "general",
        dimension: "n",
        run: |r| match extract_paneitz(r) {
            Ok(e) => Ok(Found {
                residual: None,
                value: None,
                terms: e.len(),
            }),
            Err(Error::SideConditionFailed(s)) => Ok(Found {
                residual: Some(s),
                value: None,
                terms: 0,
            }),
            Err(e) => Err(e),
        },
    },
    Check {
        id: "tractor_extraction",
        anchor: "P_4 f := \\Delta_b^2 f + n^2\\nabla_0^2 f",
        constraints: "general",
        dimension: "n",
        run: |r| Ok(found(&extraction_residual(r)?)),
    },
    Check {
        id: "tractor_dimension_three",
        anchor: "P_4f=Cf",
        constraints: "general",
        dimension: "1",
        run: |r| {
            let s = extraction_residual_at_one(r)?;
            Ok(Found {
                residual: (s != "0").then_some(s),
                value: None,
                terms: 0,
            })
        },
    },
];

/// The Fefferman-space assembly, reported with its residual.
pub fn fefferman(reg: &Registry) -> Result<VerificationReport> {
    fefferman_assembly_check(reg)
}

pub fn find(id: &str) -> Option<&'static Check> {
    LIMITS.iter().chain(TRACTOR).find(|c| c.id == id)
}
