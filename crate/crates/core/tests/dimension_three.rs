use crq_core::closure::{Closure, Constraint};
use crq_core::coeff::{Coeff, RatN, Rational};
use crq_core::conformal::transform;
use crq_core::dim1::{close_at_one_with, reduce, Closure1};
use crq_core::limit::limit_n;
use crq_core::ops::parse_ops;
use crq_core::{Expr, Registry};

fn one() -> Rational {
    Rational::from_integer(1.into())
}

fn constraints(s: &str) -> Vec<Constraint> {
    Constraint::parse_list(s).unwrap()
}

/// `k/(n-1)^m` times the closure of `src` at symbolic n, taken to n = 1,
/// minus `target` evaluated at n = 1, closed in components.
fn limit_residual(src: &str, m: i32, k: i64, c: Constraint, target: &str) -> String {
    let r = Registry::pseudohermitian();
    let closed = Closure::new(&r, c.clone()).close(&parse_ops(&r, src).unwrap());
    let nm1 = RatN::linear(1, -1);
    let mut scale = RatN::from_int(k);
    for _ in 0..m {
        scale = &scale / &nm1;
    }
    let lim = limit_n(&closed.scale(&Coeff::real(scale)), &one()).unwrap();
    let want = parse_ops(&r, target).unwrap();
    let diff = reduce(&r, &lim).unwrap().sub(&reduce(&r, &want).unwrap());
    Closure1::new(&r, c).close(&diff).to_string()
}

#[test]
fn p_prime_limit_is_the_three_dimensional_formula() {
    let ph = Constraint::Pluriharmonic(vec!["f".into()]);
    assert_eq!(limit_residual("P4(f)", 1, 2, ph.clone(), "P4prime_crit(f)"), "0");
}

#[test]
fn half_torsion_term_does_not_match_the_limit() {
    let ph = Constraint::Pluriharmonic(vec!["f".into()]);
    let off = "P4prime_crit(f) + Im(D[^a,^b](A[a,b]))*f";
    assert_ne!(limit_residual("P4(f)", 1, 2, ph, off), "0");
}

#[test]
fn general_formula_specializes_to_the_three_dimensional_one() {
    let r = Registry::pseudohermitian();
    let ph = Constraint::Pluriharmonic(vec!["f".into()]);
    let diff = parse_ops(&r, "P4prime(f) - P4prime_crit(f)").unwrap();
    let lim = limit_n(&diff, &one()).unwrap();
    assert!(Closure1::new(&r, ph).close(&reduce(&r, &lim).unwrap()).is_zero());
}

#[test]
fn q_prime_limit_is_the_three_dimensional_formula() {
    assert_eq!(limit_residual("P4(1)", 2, 4, Constraint::PseudoEinstein, "Q4prime_crit"), "0");
    let r = Registry::pseudohermitian();
    let lim = limit_n(&parse_ops(&r, "Q4prime - Q4prime_crit").unwrap(), &one()).unwrap();
    assert!(reduce(&r, &lim).unwrap().is_zero());
}

#[test]
fn signed_form_of_p_prime() {
    let r = Registry::pseudohermitian();
    let e = parse_ops(&r, "P4prime_crit(u) - P4prime_signed(u)").unwrap();
    let both = close_at_one_with(&r, &constraints("pseudo-einstein; pluriharmonic(u)"), &e).unwrap();
    assert!(both.is_zero(), "{}", both);
    let one_only = close_at_one_with(&r, &constraints("pluriharmonic(u)"), &e).unwrap();
    assert!(!one_only.is_zero());
}

#[test]
fn sublaplacian_square_rewritten_with_p_alpha() {
    let r = Registry::pseudohermitian();
    let e = parse_ops(
        &r,
        "Delta_b(Delta_b(f)) - 2*Im(D[^b](A[a,b]*D[^a](f))) - 2*Re(D[^a](D[a,^b,b](f) + P_alpha[a](f)))",
    )
    .unwrap();
    let p = close_at_one_with(&r, &[Constraint::General], &e).unwrap();
    assert!(p.is_zero(), "{}", p);
}

#[test]
fn pseudo_einstein_p_prime_is_the_leading_part() {
    let r = Registry::pseudohermitian();
    let e = parse_ops(&r, "P4prime_crit(f) - P4prime_pe(f)").unwrap();
    assert!(close_at_one_with(&r, &[Constraint::PseudoEinstein], &e).unwrap().is_zero());
    assert!(!close_at_one_with(&r, &[Constraint::General], &e).unwrap().is_zero());
}

#[test]
fn energy_integrand() {
    // u P'u minus the energy density is a divergence; check the divergence form
    let r = Registry::pseudohermitian();
    let e = parse_ops(
        &r,
        "u*P4prime_signed(u) - 8*D[^b,b](u)*D[a,^a](u) - 4*R*D[a](u)*D[^a](u) \
         - 4*Re(D[^a](u*(2*D[a,^b,b](u) - R*D[a](u)))) + 8*Re(D[a](D[^a](u)*D[^b,b](u)))",
    )
    .unwrap();
    let p = close_at_one_with(&r, &[Constraint::General], &e).unwrap();
    assert!(p.is_zero(), "{}", p);
}

#[test]
fn cocycle() {
    let r = Registry::pseudohermitian();
    let cl = Closure::new(&r, Constraint::General);
    let sum = parse_ops(&r, "sigma + g").unwrap();
    for src in ["A[a,b]", "P", "D[a](R) - i*D[^b](A[a,b])"] {
        let x = parse_ops(&r, src).unwrap();
        let x = crq_core::closure::expand_symbols(&r, &x);
        let twice = transform(&r, &transform(&r, &x, "sigma").unwrap(), "g").unwrap();
        let once = transform(&r, &x, "sigma").unwrap().substitute(&r, "sigma", &sum);
        assert!(cl.close(&twice.sub(&once)).is_zero(), "{}", src);
    }
}

#[test]
fn zero_change_is_the_identity() {
    let r = Registry::pseudohermitian();
    for src in ["P4prime_crit(f)", "Q4prime_crit", "D(f)", "W[a]", "P4(f)", "U(f)"] {
        let x = parse_ops(&r, src).unwrap();
        let x = crq_core::closure::expand_symbols(&r, &x);
        let t = transform(&r, &x, "sigma").unwrap().substitute(&r, "sigma", &Expr::zero());
        let p = close_at_one_with(&r, &[Constraint::General], &t.sub(&x)).unwrap();
        assert!(p.is_zero(), "{}: {}", src, p);
    }
}
