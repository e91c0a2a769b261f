use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use crq_cli::report::{self, Format, Resolved};
use crq_cli::suite::{self, Suite};
use crq_models::{apply_operator, conformal_structure, standard_structure, Elem, Model, ModelConfig, Operator};
use serde::Deserialize;

#[derive(Parser)]
#[command(name = "crq", about = "Exact verification of pseudohermitian identities", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites.
    Verify(VerifyArgs),
    /// Apply an operator on a model and print the exact result.
    Apply(ApplyArgs),
    /// List identities with their anchors.
    List {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// JSON file with any of the fields below; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    suite: Option<Suite>,
    /// Identity id or glob pattern.
    #[arg(long)]
    identity: Option<String>,
    #[arg(long)]
    model: Option<String>,
    /// Conformal factor for the model suite.
    #[arg(long)]
    sigma: Option<String>,
    /// Test function for the energy identities.
    #[arg(long)]
    u: Option<String>,
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long)]
    form_degree: Option<usize>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    fail_fast: bool,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    suite: Option<Suite>,
    identity: Option<String>,
    model: Option<String>,
    sigma: Option<String>,
    u: Option<String>,
    degree: Option<usize>,
    form_degree: Option<usize>,
    format: Option<Format>,
    fail_fast: Option<bool>,
    jobs: Option<usize>,
}

#[derive(Args)]
struct ApplyArgs {
    /// One of Delta_b, nabla_0, P_alpha, C, P4, P4prime, Q_hirachi, Q4prime.
    #[arg(long)]
    op: String,
    #[arg(long, default_value = "sphere")]
    model: String,
    #[arg(long, default_value = "0")]
    f: String,
    #[arg(long)]
    sigma: Option<String>,
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {}", msg);
    ExitCode::from(2)
}

fn verify(a: VerifyArgs) -> ExitCode {
    let file = match &a.config {
        None => FileConfig::default(),
        Some(p) => match std::fs::read_to_string(p).map_err(|e| e.to_string()).and_then(|s| {
            serde_json::from_str::<FileConfig>(&s).map_err(|e| e.to_string())
        }) {
            Ok(c) => c,
            Err(e) => return fail(format!("config {}: {}", p.display(), e)),
        },
    };
    let defaults = ModelConfig::default();
    let cfg = Resolved {
        suite: a.suite.or(file.suite).unwrap_or(Suite::All),
        identity: a.identity.or(file.identity),
        model: a.model.or(file.model).unwrap_or_else(|| defaults.model.name().into()),
        sigma: a.sigma.or(file.sigma),
        u: a.u.or(file.u),
        degree: a.degree.or(file.degree).unwrap_or(defaults.degree),
        form_degree: a.form_degree.or(file.form_degree).unwrap_or(defaults.form_degree),
        fail_fast: a.fail_fast || file.fail_fast.unwrap_or(false),
    };
    let format = a.format.or(file.format).unwrap_or(Format::Text);
    let jobs = a
        .jobs
        .or(file.jobs)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let model = match Model::parse(&cfg.model) {
        Ok(m) => m,
        Err(e) => return fail(e),
    };
    let mcfg = ModelConfig {
        model,
        sigma: cfg.sigma.clone(),
        u: cfg.u.clone(),
        degree: cfg.degree,
        form_degree: cfg.form_degree,
    };
    for (name, src) in [("sigma", &cfg.sigma), ("u", &cfg.u)] {
        if let Some(src) = src {
            if let Err(e) = Elem::parse(model, src) {
                return fail(format!("{}: {}", name, e));
            }
        }
    }
    let items = match suite::select(cfg.suite, cfg.identity.as_deref()) {
        Ok(i) => i,
        Err(e) => return fail(e),
    };
    let outcomes = suite::run(&items, &mcfg, jobs, cfg.fail_fast);
    if let Err(e) = report::write(&mut io::stdout().lock(), format, &cfg, &items, &outcomes) {
        return fail(e);
    }
    if outcomes.iter().any(|o| o.failed()) {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}

fn apply(a: ApplyArgs) -> Result<Elem, String> {
    let model = Model::parse(&a.model).map_err(|e| e.to_string())?;
    let op = Operator::parse(&a.op).map_err(|e| e.to_string())?;
    let f = Elem::parse(model, &a.f).map_err(|e| format!("f: {}", e))?;
    let base = standard_structure(model);
    let s = match &a.sigma {
        None => base,
        Some(src) => {
            let sigma = Elem::parse(model, src).map_err(|e| format!("sigma: {}", e))?;
            conformal_structure(&base, &sigma).map_err(|e| e.to_string())?
        }
    };
    apply_operator(op, &f, &s).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Verify(a) => verify(a),
        Command::Apply(a) => match apply(a) {
            Ok(e) => {
                println!("{}", e);
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
        Command::List { suite, format } => match report::list(&mut io::stdout().lock(), format, &suite::items(suite)) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(e),
        },
    }
}
