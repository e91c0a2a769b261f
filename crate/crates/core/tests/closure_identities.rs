use crq_core::closure::{Closure, Constraint};
use crq_core::index::Kind;
use crq_core::parse::parse;
use crq_core::{RatN, Registry};

fn vanishes(reg: &Registry, c: Constraint, src: &str) {
    let e = parse(reg, src).unwrap();
    let out = Closure::new(reg, c).close(&e);
    assert!(out.is_zero(), "residual: {}", out);
}

#[test]
fn scalar_mixed_commutator() {
    let r = Registry::pseudohermitian();
    vanishes(&r, Constraint::General, "D[~b,a](f) - D[a,~b](f) - i*h[a,~b]*D[0](f)");
}

#[test]
fn reeb_commutator_on_functions() {
    let r = Registry::pseudohermitian();
    vanishes(&r, Constraint::General, "D[a,0](f) - D[0,a](f) - A[a,c]*D[^c](f)");
}

#[test]
fn reeb_commutator_on_one_forms() {
    let mut r = Registry::pseudohermitian();
    let w = (RatN::zero(), RatN::zero());
    r.declare("tau", &[Kind::Hol], w, &[], "taub", &[0]);
    r.declare("taub", &[Kind::Anti], (RatN::zero(), RatN::zero()), &[], "tau", &[0]);
    vanishes(
        &r,
        Constraint::General,
        "D[^b,0](tau[a]) - D[0,^b](tau[a]) - Ab[^c,^b]*D[c](tau[a]) - tau[c]*D[a](Ab[^c,^b])",
    );
}

#[test]
fn schouten_divergence() {
    let r = Registry::pseudohermitian();
    vanishes(&r, Constraint::General, "D[^a](Pab[a,~b]) - D[~b](P) - (n - 1)*Tb[~b]");
}

#[test]
fn reeb_derivative_of_scalar_curvature() {
    let r = Registry::pseudohermitian();
    vanishes(&r, Constraint::General, "D[0](R) - D[^a,^b](A[a,b]) - D[a,b](Ab[^a,^b])");
}

#[test]
fn sublaplacian_of_scalar_curvature() {
    let r = Registry::pseudohermitian();
    vanishes(
        &r,
        Constraint::General,
        "-(D[^a,a](R) + D[a,^a](R)) - 2*n*Im(D[^a,^b](A[a,b])) + 2*D[^a](D[a](R) - i*n*D[^b](A[a,b]))",
    );
}

#[test]
fn two_forms_of_the_fourth_order_operator() {
    let r = Registry::pseudohermitian();
    vanishes(
        &r,
        Constraint::General,
        "D[^a,a,^b,b](f) + D[^a,a,b,^b](f) + D[a,^a,^b,b](f) + D[a,^a,b,^b](f) + n^2*D[0,0](f) \
         - 2*i*n*D[b](Ab[^a,^b]*D[a](f)) + 2*i*n*D[^b](A[a,b]*D[^a](f)) \
         - 4*D[^a](D[a,b,^b](f) + i*n*A[a,b]*D[^b](f))",
    );
}

#[test]
fn divergence_of_the_hessian_trace_free_part() {
    let r = Registry::pseudohermitian();
    vanishes(
        &r,
        Constraint::General,
        "D[^~b](D[~b,a](u) - 1/n*D[^c,c](u)*h[a,~b]) - (n - 1)/n*(D[a,b,^b](u) + i*n*A[a,b]*D[^b](u))",
    );
}

#[test]
fn divergence_of_trace_free_ricci() {
    let r = Registry::pseudohermitian();
    vanishes(
        &r,
        Constraint::General,
        "D[^~b](Rm[c,^c,a,~b] - 1/n*R*h[a,~b]) - (n - 1)/n*(D[a](R) - i*n*D[^b](A[a,b]))",
    );
}

#[test]
fn pseudo_einstein_torsion_divergence() {
    let r = Registry::pseudohermitian();
    vanishes(&r, Constraint::PseudoEinstein, "D[a](R) - i*n*D[^b](A[a,b])");
}

#[test]
fn pluriharmonic_functions_have_trace_free_hessian() {
    let r = Registry::pseudohermitian();
    vanishes(
        &r,
        Constraint::Pluriharmonic(vec!["u".into()]),
        "D[~b,a](u) - 1/n*D[^c,c](u)*h[a,~b]",
    );
}

#[test]
fn nonzero_is_detected() {
    let r = Registry::pseudohermitian();
    let e = parse(&r, "D[~b,a](f)").unwrap();
    assert!(!Closure::new(&r, Constraint::General).close(&e).is_zero());
}

#[test]
fn perturbed_identities_leave_a_residual() {
    let r = Registry::pseudohermitian();
    for src in [
        "D[~b,a](f) - D[a,~b](f) + i*h[a,~b]*D[0](f)",
        "D[^a](Pab[a,~b]) - D[~b](P) - n*Tb[~b]",
        "D[0](R) - D[^a,^b](A[a,b])",
        "D[^a,a,^b,b](f) + D[^a,a,b,^b](f) + D[a,^a,^b,b](f) + D[a,^a,b,^b](f) + n^2*D[0,0](f) \
         - 2*i*n*D[b](Ab[^a,^b]*D[a](f)) + 2*i*n*D[^b](A[a,b]*D[^a](f)) \
         - 4*D[^a](D[a,b,^b](f) + i*(n+1)*A[a,b]*D[^b](f))",
        "D[^~b](D[~b,a](u) - 1/n*D[^c,c](u)*h[a,~b]) - (n - 2)/n*(D[a,b,^b](u) + i*n*A[a,b]*D[^b](u))",
    ] {
        let e = parse(&r, src).unwrap();
        assert!(!Closure::new(&r, Constraint::General).close(&e).is_zero(), "{}", src);
    }
}
