use crq_core::catalog::{covariance, identities, verify};

fn run(entries: Vec<crq_core::catalog::Entry>) {
    let mut failed = vec![];
    for e in &entries {
        let r = verify(e).unwrap_or_else(|x| panic!("{}: {}", e.id, x));
        if !r.passed() {
            failed.push(format!("{}: {}", r.id, r.residual.unwrap_or_default()));
        }
    }
    assert!(failed.is_empty(), "{}", failed.join("\n"));
}

#[test]
fn identity_catalog_verifies() {
    run(identities());
}

#[test]
fn covariance_catalog_verifies() {
    run(covariance());
}
