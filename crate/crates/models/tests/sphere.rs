use crq_models::ring::gauss;
use crq_models::{apply_operator, evaluate, pluriharmonic_basis, standard_structure, Elem, Model, Operator};

fn sphere(src: &str) -> Elem {
    Elem::parse(Model::Sphere, src).unwrap()
}

#[test]
fn q_prime_is_one() {
    let s = standard_structure(Model::Sphere);
    let q = apply_operator(Operator::Q4Prime, &Elem::zero(Model::Sphere), &s).unwrap();
    assert_eq!(q, Elem::one(Model::Sphere));
    let q = apply_operator(Operator::QHirachi, &Elem::zero(Model::Sphere), &s).unwrap();
    assert!(q.is_zero());
}

#[test]
fn p_prime_is_a_polynomial_in_the_sublaplacian() {
    let s = standard_structure(Model::Sphere);
    for f in pluriharmonic_basis(&s, 6).unwrap() {
        let lap = apply_operator(Operator::DeltaB, &f, &s).unwrap();
        let lap2 = apply_operator(Operator::DeltaB, &lap, &s).unwrap();
        let want = lap2.scale(&gauss(4, 0)).add(&lap.scale(&gauss(2, 0)));
        let got = apply_operator(Operator::P4Prime, &f, &s).unwrap();
        assert_eq!(got, want, "f = {}", f);
    }
}

#[test]
fn paneitz_kills_pluriharmonic_functions() {
    for m in [Model::Sphere, Model::Heisenberg] {
        let s = standard_structure(m);
        for f in pluriharmonic_basis(&s, 6).unwrap() {
            assert!(apply_operator(Operator::P4, &f, &s).unwrap().is_zero(), "{}", f);
        }
    }
}

#[test]
fn paneitz_sees_a_non_pluriharmonic_function() {
    let s = standard_structure(Model::Sphere);
    let f = sphere("z1*zb1");
    let p = apply_operator(Operator::P4, &f, &s).unwrap();
    assert!(!p.is_zero());
    assert!(!apply_operator(Operator::PAlpha, &f, &s).unwrap().is_zero());
}

#[test]
fn paneitz_equals_c_in_this_dimension() {
    let s = standard_structure(Model::Sphere);
    for src in ["z1*zb1", "z1^2*zb2 + z2^2*zb1", "z1*zb1*z2*zb2", "Im(z1^2*zb2^3)"] {
        let f = sphere(src);
        assert_eq!(
            apply_operator(Operator::P4, &f, &s).unwrap(),
            apply_operator(Operator::C, &f, &s).unwrap(),
            "{}",
            src
        );
    }
}

#[test]
fn sublaplacian_against_the_vector_fields() {
    // Δ_b f = -(Z Zb + Zb Z) f on functions: ω has no horizontal part here
    let s = standard_structure(Model::Sphere);
    for src in ["z1*zb1^2", "z2^3*zb1", "Re(z1*z2) + z1*zb2"] {
        let f = sphere(src);
        let direct = s.derive(1, &s.derive(2, &f)).add(&s.derive(2, &s.derive(1, &f))).neg();
        assert_eq!(apply_operator(Operator::DeltaB, &f, &s).unwrap(), direct, "{}", src);
    }
}

#[test]
fn structure_residuals_vanish() {
    for m in [Model::Sphere, Model::Heisenberg] {
        let s = standard_structure(m);
        for (name, r) in s.residuals() {
            assert!(r.is_zero(), "{:?} {}: {}", m, name, r);
        }
    }
}

#[test]
fn complex_argument_is_linear() {
    let s = standard_structure(Model::Sphere);
    let z = sphere("z1^2*zb2");
    let direct = apply_operator(Operator::DeltaB, &z, &s).unwrap();
    let split = apply_operator(Operator::DeltaB, &z.re(), &s)
        .unwrap()
        .add(&apply_operator(Operator::DeltaB, &z.im(), &s).unwrap().scale(&gauss(0, 1)));
    assert_eq!(direct, split);
    let e = evaluate(&s, "D[^a,a](f)", &[("f", &z.re())]).unwrap();
    assert!(!e.is_zero());
}
