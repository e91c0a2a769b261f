use crq_models::{
    apply_operator, conformal_structure, evaluate, pluriharmonic_basis, standard_structure, Elem, Model, Operator,
    Structure,
};

const FACTORS: [&str; 3] = ["Re(z1)", "Re(z1*z2)", "z1*zb1"];

fn hatted(src: &str) -> (Structure, Structure, Elem) {
    let base = standard_structure(Model::Sphere);
    let sigma = Elem::parse(Model::Sphere, src).unwrap();
    let s = conformal_structure(&base, &sigma).unwrap();
    (base, s, sigma)
}

#[test]
fn conformal_residuals_vanish() {
    for src in FACTORS {
        let (_, s, _) = hatted(src);
        for (name, r) in s.residuals() {
            assert!(r.is_zero(), "σ = {} {}: {}", src, name, r);
        }
    }
}

#[test]
fn torsion_law_with_unitary_rescaling() {
    for src in FACTORS {
        let (base, s, sigma) = hatted(src);
        let want = evaluate(
            &base,
            "A[a,b] + i*D[b,a](sigma) - i*D[a](sigma)*D[b](sigma)",
            &[("sigma", &sigma)],
        )
        .unwrap();
        assert_eq!(s.torsion.shift(2), want, "σ = {}", src);
    }
}

#[test]
fn general_q_prime_law_pointwise() {
    for src in FACTORS {
        let (base, s, sigma) = hatted(src);
        let lhs = apply_operator(Operator::Q4Prime, &sigma, &s).unwrap().shift(4);
        let rhs = evaluate(
            &base,
            "Q4prime_crit + P4prime_crit(sigma) + 16/3*Re(D[^a](sigma*W[a])) + 3*Q_hirachi*sigma + U(sigma)",
            &[("sigma", &sigma)],
        )
        .unwrap();
        assert_eq!(lhs, rhs, "σ = {}", src);
    }
}

#[test]
fn p_prime_law_pointwise() {
    for src in FACTORS {
        let (base, s, sigma) = hatted(src);
        let mut fs = pluriharmonic_basis(&base, 2).unwrap();
        fs.push(Elem::parse(Model::Sphere, "z1*zb1 + Re(z1^2*zb2)").unwrap());
        for f in fs {
            let lhs = apply_operator(Operator::P4Prime, &f, &s).unwrap().shift(4);
            let rhs = evaluate(
                &base,
                "P4prime_crit(f) + P4(f*sigma) - sigma*P4(f) - 16*Re(P_alpha[a](f)*D[^a](sigma))",
                &[("sigma", &sigma), ("f", &f)],
            )
            .unwrap();
            assert_eq!(lhs, rhs, "σ = {}, f = {}", src, f);
        }
    }
}

#[test]
fn q_prime_operator_law_for_pluriharmonic_factors() {
    for src in &FACTORS[..2] {
        let (base, s, sigma) = hatted(src);
        let lhs = apply_operator(Operator::Q4Prime, &sigma, &s).unwrap().shift(4);
        let rhs = evaluate(
            &base,
            "Q4prime_crit + P4prime_crit(sigma) + 1/2*P4(sigma^2)",
            &[("sigma", &sigma)],
        )
        .unwrap();
        assert_eq!(lhs, rhs, "σ = {}", src);
    }
}

#[test]
fn connection_form_closed_exactly_for_pluriharmonic_factors() {
    assert!(standard_structure(Model::Sphere).trace_form_differential().is_zero());
    for src in FACTORS {
        let (_, s, _) = hatted(src);
        let closed = s.trace_form_differential().is_zero();
        assert_eq!(closed, src != "z1*zb1", "σ = {}", src);
    }
}
