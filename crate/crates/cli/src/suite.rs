//! Suite selection and execution.

use std::fmt;
use std::str::FromStr;

use crq_core::catalog::{self, Entry, VerificationReport};
use crq_core::checks::{self, Check};
use crq_core::Registry;
use crq_models::verify::ModelIdentity;
use crq_models::{ModelConfig, ModelError, MODEL_IDENTITIES};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Symbolic,
    Conformal,
    Tractor,
    Models,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Symbolic => "symbolic",
            Suite::Conformal => "conformal",
            Suite::Tractor => "tractor",
            Suite::Models => "models",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Suite as clap::ValueEnum>::from_str(s, true)
    }
}

/// One selectable verification.
pub enum Item {
    Catalog(Entry),
    Check(&'static Check),
    Fefferman,
    Model(&'static ModelIdentity),
}

impl Item {
    pub fn id(&self) -> &str {
        match self {
            Item::Catalog(e) => &e.id,
            Item::Check(c) => c.id,
            Item::Fefferman => "fefferman_assembly",
            Item::Model(m) => m.id,
        }
    }

    pub fn anchor(&self) -> &str {
        match self {
            Item::Catalog(e) => &e.anchor,
            Item::Check(c) => c.anchor,
            Item::Fefferman => FEFFERMAN_ANCHOR,
            Item::Model(m) => m.anchor,
        }
    }

    pub fn suite(&self) -> Suite {
        match self {
            Item::Catalog(e) if catalog::covariance().iter().any(|c| c.id == e.id) => Suite::Conformal,
            Item::Catalog(_) => Suite::Symbolic,
            Item::Check(c) if checks::LIMITS.iter().any(|l| l.id == c.id) => Suite::Symbolic,
            Item::Check(_) | Item::Fefferman => Suite::Tractor,
            Item::Model(_) => Suite::Models,
        }
    }
}

const FEFFERMAN_ANCHOR: &str = "\\frac{1}{4}\\pi_*\\left(\\Delta^2 + F + \\frac{N-4}{2}Q\\right)";

pub fn items(suite: Suite) -> Vec<Item> {
    let mut out = vec![];
    if matches!(suite, Suite::Symbolic | Suite::All) {
        out.extend(catalog::identities().into_iter().map(Item::Catalog));
        out.extend(checks::LIMITS.iter().map(Item::Check));
    }
    if matches!(suite, Suite::Conformal | Suite::All) {
        out.extend(catalog::covariance().into_iter().map(Item::Catalog));
    }
    if matches!(suite, Suite::Tractor | Suite::All) {
        out.extend(checks::TRACTOR.iter().map(Item::Check));
        out.push(Item::Fefferman);
    }
    if matches!(suite, Suite::Models | Suite::All) {
        out.extend(MODEL_IDENTITIES.iter().map(Item::Model));
    }
    out
}

#[derive(Debug)]
pub struct UnknownIdentity(pub String);

impl fmt::Display for UnknownIdentity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown identity `{}`", self.0)
    }
}

/// Items of `suite` whose id matches `filter`; a filter that matches
/// nothing is an unknown identity.
pub fn select(suite: Suite, filter: Option<&str>) -> Result<Vec<Item>, UnknownIdentity> {
    let all = items(suite);
    let Some(filter) = filter else {
        return Ok(all);
    };
    let pat = glob::Pattern::new(filter).map_err(|_| UnknownIdentity(filter.into()))?;
    let picked: Vec<Item> = all.into_iter().filter(|i| pat.matches(i.id())).collect();
    if picked.is_empty() {
        return Err(UnknownIdentity(filter.into()));
    }
    Ok(picked)
}

pub enum Outcome {
    Report(VerificationReport),
    /// The identity does not apply to the configured model.
    Skipped(String),
    Error(String),
}

impl Outcome {
    pub fn failed(&self) -> bool {
        match self {
            Outcome::Report(r) => !r.passed(),
            Outcome::Skipped(_) => false,
            Outcome::Error(_) => true,
        }
    }
}

fn run_one(item: &Item, cfg: &ModelConfig) -> Outcome {
    let reg = Registry::pseudohermitian();
    let r = match item {
        Item::Catalog(e) => catalog::verify(e).map_err(|e| e.to_string()),
        Item::Check(c) => c.run(&reg).map_err(|e| e.to_string()),
        Item::Fefferman => checks::fefferman(&reg).map_err(|e| e.to_string()),
        Item::Model(m) => match crq_models::verify_model_identity(m.id, cfg) {
            Err(ModelError::Unsupported(why)) => return Outcome::Skipped(why),
            r => r.map_err(|e| e.to_string()),
        },
    };
    match r {
        Ok(r) => Outcome::Report(r),
        Err(e) => Outcome::Error(e),
    }
}

/// Run `items` on a bounded pool; results come back in catalog order.
/// With `fail_fast`, items after the first failure are not started.
pub fn run(items: &[Item], cfg: &ModelConfig, jobs: usize, fail_fast: bool) -> Vec<Outcome> {
    if fail_fast {
        let mut out = vec![];
        for i in items {
            let o = run_one(i, cfg);
            let stop = o.failed();
            out.push(o);
            if stop {
                break;
            }
        }
        return out;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("thread pool");
    pool.install(|| items.par_iter().map(|i| run_one(i, cfg)).collect())
}
