use crq_models::forms::{Form, THETA, THETA1, THETA1BAR};
use crq_models::ring::gauss;
use crq_models::{apply_operator, conformal_structure, evaluate, standard_structure, Elem, Model, Operator, Structure};
use proptest::prelude::*;

fn poly(model: Model) -> impl Strategy<Value = Elem> {
    let nvars = model.vars().len();
    prop::collection::vec((prop::collection::vec(0u32..3, nvars), -3i64..4, -3i64..4), 1..4).prop_map(
        move |terms| {
            terms.into_iter().fold(Elem::zero(model), |acc, (exps, re, im)| {
                let m = exps
                    .iter()
                    .enumerate()
                    .fold(Elem::one(model), |m, (v, e)| m.mul(&Elem::var(model, v).pow(*e)));
                acc.add(&m.scale(&gauss(re, im)))
            })
        },
    )
}

fn sphere() -> impl Strategy<Value = Elem> {
    poly(Model::Sphere)
}

fn factor() -> impl Strategy<Value = Structure> {
    prop::sample::select(vec!["Re(z1)", "Im(z1*z2)", "z1*zb1", "Re(z2^2) + z2*zb2"]).prop_map(|src| {
        let base = standard_structure(Model::Sphere);
        conformal_structure(&base, &Elem::parse(Model::Sphere, src).unwrap()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn ring_axioms(a in sphere(), b in sphere(), c in sphere()) {
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn conjugation(a in sphere(), b in sphere()) {
        prop_assert_eq!(a.conj().conj(), a.clone());
        prop_assert_eq!(a.mul(&b).conj(), a.conj().mul(&b.conj()));
        prop_assert_eq!(a.re().add(&a.im().scale(&gauss(0, 1))), a.clone());
        prop_assert!(a.re().is_real() && a.im().is_real());
    }

    #[test]
    fn display_round_trips(a in sphere()) {
        prop_assert_eq!(Elem::parse(Model::Sphere, &a.to_string()).unwrap(), a);
    }

    #[test]
    fn frame_derivations_obey_leibniz(s in factor(), a in sphere(), b in sphere(), i in 0usize..3) {
        let lhs = s.derive(i, &a.mul(&b));
        let rhs = s.derive(i, &a).mul(&b).add(&a.mul(&s.derive(i, &b)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn d_squared_vanishes(s in factor(), a in sphere(), b in sphere(), c in sphere()) {
        let f = Form::function(a.clone());
        prop_assert!(s.d(&s.d(&f)).is_zero());
        let one = Form::basis(THETA, a)
            .add(&Form::basis(THETA1, b))
            .add(&Form::basis(THETA1BAR, c));
        prop_assert!(s.d(&s.d(&one)).is_zero());
    }

    #[test]
    fn components_invert(s in factor(), a in sphere(), b in sphere()) {
        let f = Form::basis(THETA | THETA1, a).add(&Form::basis(THETA1BAR, b));
        prop_assert_eq!(s.components(&s.from_components(&f)), f);
    }

    #[test]
    fn abstract_commutator_matches_the_frame(s in factor(), a in sphere()) {
        // on functions the horizontal commutator is -i times the Reeb derivative
        let f = a.re();
        let lhs = evaluate(&s, "D[a,^a](f) - D[^a,a](f)", &[("f", &f)]).unwrap();
        let frame = s.derive(1, &s.derive(2, &f)).sub(&s.derive(2, &s.derive(1, &f)));
        let conn = s.omega[1].mul(&s.derive(2, &f)).add(&s.omega[2].mul(&s.derive(1, &f)));
        prop_assert_eq!(&lhs, &frame.add(&conn));
        let reeb = evaluate(&s, "D[0](f)", &[("f", &f)]).unwrap().scale(&gauss(0, -1));
        prop_assert_eq!(lhs, reeb);
    }

    #[test]
    fn real_operators_stay_real(s in factor(), a in sphere()) {
        let f = a.re();
        for op in [Operator::DeltaB, Operator::C, Operator::P4, Operator::P4Prime] {
            prop_assert!(apply_operator(op, &f, &s).unwrap().is_real(), "{}", op.name());
        }
    }

    #[test]
    fn heisenberg_commutator(a in poly(Model::Heisenberg)) {
        let s = standard_structure(Model::Heisenberg);
        let bracket = s.derive(1, &s.derive(2, &a)).sub(&s.derive(2, &s.derive(1, &a)));
        prop_assert_eq!(bracket, s.derive(0, &a).scale(&gauss(0, -1)));
    }
}
