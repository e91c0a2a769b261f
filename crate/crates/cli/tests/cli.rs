use std::process::{Command, Output};

fn crq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crq")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn verifies_a_symbolic_identity() {
    let o = crq(&["verify", "--suite", "symbolic", "--identity", "grahamlee"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("PASS grahamlee"));
}

#[test]
fn verifies_a_model_identity_with_a_factor() {
    let o = crq(&[
        "verify",
        "--suite",
        "models",
        "--identity",
        "qprime_total_invariance",
        "--sigma",
        "Re(z1)",
    ]);
    assert!(o.status.success(), "{}", stdout(&o));
}

#[test]
fn unknown_identity_is_rejected() {
    let o = crq(&["verify", "--suite", "symbolic", "--identity", "no_such_id"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown identity"));
    assert!(o.stdout.is_empty());
}

#[test]
fn failing_identity_sets_the_exit_status() {
    let o = crq(&["verify", "--suite", "models", "--identity", "energy_identity"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("residual:"));
}

#[test]
fn apply_examples() {
    for (args, want) in [
        (&["apply", "--op", "Q4prime", "--model", "sphere"][..], "1"),
        (&["apply", "--op", "P4", "--model", "sphere", "--f", "Re(z1*z2)"][..], "0"),
        (&["apply", "--op", "Delta_b", "--model", "heisenberg", "--f", "t"][..], "0"),
    ] {
        let o = crq(args);
        assert!(o.status.success());
        assert_eq!(stdout(&o).trim(), want, "{:?}", args);
    }
}

#[test]
fn apply_reports_bad_input() {
    for args in [
        &["apply", "--op", "P6"][..],
        &["apply", "--op", "P4", "--f", "z3"][..],
        &["apply", "--op", "P4", "--model", "torus"][..],
        &["apply", "--op", "Q4prime", "--sigma", "i*z1"][..],
    ] {
        let o = crq(args);
        assert_eq!(o.status.code(), Some(2), "{:?}", args);
        assert!(!o.stderr.is_empty());
    }
}

/// Records without the timing field, which is the only one allowed to vary.
fn canonical(o: &Output) -> Vec<serde_json::Value> {
    stdout(o)
        .lines()
        .map(|l| {
            let mut v: serde_json::Value = serde_json::from_str(l).unwrap();
            if let Some(m) = v.as_object_mut() {
                m.remove("duration");
            }
            v
        })
        .collect()
}

#[test]
fn json_reports_are_deterministic() {
    let args = ["verify", "--suite", "tractor", "--format", "json", "--jobs", "3"];
    let a = crq(&args);
    let b = crq(&args);
    assert_eq!(canonical(&a), canonical(&b));
    let recs = canonical(&a);
    assert!(recs[0].get("config").is_some());
    let ids: Vec<&str> = recs[1..].iter().map(|r| r["id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["tractor_upper_slots", "tractor_extraction", "tractor_dimension_three", "fefferman_assembly"]);
    for r in &recs[1..] {
        for k in ["anchor", "status"] {
            assert!(r.get(k).is_some(), "{}", k);
        }
    }
}

#[test]
fn config_file_is_read_and_flags_win() {
    let dir = std::env::temp_dir().join(format!("crq-config-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("run.json");
    std::fs::write(
        &path,
        r#"{"suite": "models", "identity": "torsion_law", "sigma": "z1*zb1", "format": "json"}"#,
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let o = crq(&["verify", "--config", p]);
    assert!(o.status.success(), "{}", stdout(&o));
    let recs = canonical(&o);
    assert_eq!(recs[0]["config"]["sigma"], "z1*zb1");
    let o = crq(&["verify", "--config", p, "--sigma", "Re(z1)", "--format", "text"]);
    assert!(stdout(&o).contains("\"sigma\":\"Re(z1)\""));
    std::fs::write(&path, r#"{"colour": "blue"}"#).unwrap();
    assert_eq!(crq(&["verify", "--config", p]).status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn glob_selects_several() {
    let o = crq(&["verify", "--suite", "symbolic", "--identity", "*_commutator", "--format", "json"]);
    assert!(o.status.success());
    assert_eq!(canonical(&o).len(), 1 + 4);
}

#[test]
fn list_covers_every_suite() {
    let o = crq(&["list", "--format", "json"]);
    let suites: std::collections::BTreeSet<String> = canonical(&o)
        .iter()
        .map(|r| r["suite"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(suites.len(), 4);
}
