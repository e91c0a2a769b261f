//! Shipped identity catalogs and the verification driver.
//!
//! An entry states `lhs = rhs` in the expression grammar (operators and
//! `hat(...)` available), a constraint list separated by `;`, and the
//! dimension: `n` closes at symbolic dimension, `1` specializes to
//! dimension three and closes in components.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::closure::{Closure, Constraint};
use crate::dim1::close_at_one_with;
use crate::error::{Error, Result};
use crate::ops::parse_ops;
use crate::registry::Registry;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub id: String,
    pub anchor: String,
    pub lhs: String,
    pub rhs: String,
    #[serde(default = "general")]
    pub constraints: String,
    #[serde(default = "symbolic")]
    pub dimension: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn general() -> String {
    "general".into()
}

fn symbolic() -> String {
    "n".into()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Verified,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub id: String,
    pub anchor: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_value: Option<String>,
    pub constraints: String,
    pub dimension: String,
    /// Terms in the expanded difference before closure.
    pub terms: usize,
    pub duration_ms: f64,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Verified
    }
}

fn load(src: &str) -> Vec<Entry> {
    serde_json::from_str(src).expect("shipped catalog is valid JSON")
}

pub fn identities() -> Vec<Entry> {
    load(include_str!("../catalog/identities.json"))
}

pub fn covariance() -> Vec<Entry> {
    load(include_str!("../catalog/covariance.json"))
}

fn find(cat: Vec<Entry>, id: &str) -> Result<Entry> {
    cat.into_iter()
        .find(|e| e.id == id)
        .ok_or_else(|| Error::UnknownIdentity(id.to_string()))
}

/// Close `lhs - rhs` and report.
pub fn verify(entry: &Entry) -> Result<VerificationReport> {
    let start = Instant::now();
    let reg = Registry::pseudohermitian();
    let diff = parse_ops(&reg, &format!("({}) - ({})", entry.lhs, entry.rhs))?;
    let cs = Constraint::parse_list(&entry.constraints)?;
    let residual = match entry.dimension.as_str() {
        "n" => {
            let [c] = cs.as_slice() else {
                return Err(Error::Invalid(format!(
                    "`{}`: one constraint at a time at symbolic dimension",
                    entry.id
                )));
            };
            let out = Closure::new(&reg, c.clone()).close(&diff);
            (!out.is_zero()).then(|| out.to_string())
        }
        "1" => {
            let out = close_at_one_with(&reg, &cs, &diff)?;
            (!out.is_zero()).then(|| out.to_string())
        }
        d => return Err(Error::Invalid(format!("unknown dimension `{}`", d))),
    };
    Ok(VerificationReport {
        id: entry.id.clone(),
        anchor: entry.anchor.clone(),
        status: if residual.is_none() { Status::Verified } else { Status::Failed },
        residual,
        exact_value: None,
        constraints: entry.constraints.clone(),
        dimension: entry.dimension.clone(),
        terms: diff.len(),
        duration_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

pub fn verify_identity(id: &str) -> Result<VerificationReport> {
    verify(&find(identities(), id)?)
}

pub fn verify_covariance(id: &str) -> Result<VerificationReport> {
    verify(&find(covariance(), id)?)
}
