use proptest::prelude::*;

use crq_core::closure::{normal_order_by, Closure, Constraint, SwapOrder};
use crq_core::dim1::close_at_one;
use crq_core::expr::Expr;
use crq_core::limit::limit_n;
use crq_core::parse::parse;
use crq_core::coeff::Rational;
use crq_core::Registry;

/// A derivative letter before label names are chosen.
#[derive(Clone, Debug)]
enum Letter {
    Reeb,
    Lower { pair: usize, anti: bool },
    Upper { pair: usize, anti: bool },
}

#[derive(Clone, Debug)]
struct TermShape {
    coeff: (i64, i64),
    words: Vec<(String, Vec<Letter>)>,
}

fn letter(l: &Letter, names: &[String]) -> String {
    match l {
        Letter::Reeb => "0".into(),
        Letter::Lower { pair, anti: false } => names[*pair].clone(),
        Letter::Lower { pair, anti: true } => format!("~{}", names[*pair]),
        Letter::Upper { pair, anti: false } => format!("^{}", names[*pair]),
        Letter::Upper { pair, anti: true } => format!("^~{}", names[*pair]),
    }
}

fn render(shapes: &[TermShape], names: &[String]) -> String {
    let mut out = String::from("0");
    for t in shapes {
        let (re, im) = t.coeff;
        out.push_str(&format!(" + ({} + {}*i)", re, im));
        for (sym, word) in &t.words {
            if word.is_empty() {
                out.push_str(&format!("*{}", sym));
            } else {
                let w: Vec<String> = word.iter().map(|l| letter(l, names)).collect();
                out.push_str(&format!("*D[{}]({})", w.join(","), sym));
            }
        }
    }
    out
}

/// One term: up to two factors drawn from the weight-zero functions `sigma` and `g`, with every
/// index pair contracted somewhere in the term. Pair and Reeb counts fix
/// the weight, so they are shared by all terms of a sum.
fn term(npairs: usize, reeb: usize) -> impl Strategy<Value = TermShape> {
    (
        (-3i64..=3, -2i64..=2),
        1usize..=2,
        prop::collection::vec((any::<bool>(), any::<bool>(), any::<bool>(), any::<bool>()), npairs),
        any::<u64>(),
    )
        .prop_map(move |(coeff, nf, pairs, seed)| {
            let syms = ["sigma", "g"];
            let mut words: Vec<(String, Vec<Letter>)> =
                (0..nf).map(|k| (syms[(seed as usize >> k) & 1].to_string(), vec![])).collect();
            for (p, (anti, flip, lo, hi)) in pairs.into_iter().enumerate() {
                let (x, y) = (Letter::Lower { pair: p, anti }, Letter::Upper { pair: p, anti });
                let (x, y) = if flip { (y, x) } else { (x, y) };
                words[lo as usize % nf].1.push(x);
                words[hi as usize % nf].1.push(y);
            }
            if reeb == 1 {
                words[0].1.push(Letter::Reeb);
            }
            let mut s = seed;
            for (_, w) in words.iter_mut() {
                for i in (1..w.len()).rev() {
                    s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    w.swap(i, (s >> 33) as usize % (i + 1));
                }
            }
            TermShape { coeff, words }
        })
}

fn shapes(max_pairs: usize) -> impl Strategy<Value = Vec<TermShape>> {
    (0..=max_pairs, 0usize..=1).prop_flat_map(|(p, r)| prop::collection::vec(term(p, r), 1..=3))
}

fn label_names() -> impl Strategy<Value = Vec<String>> {
    prop::sample::subsequence(
        vec!["a", "b", "c", "d", "e", "j", "k", "l", "m", "p", "q", "r", "s", "t", "u", "v"],
        4,
    )
    .prop_shuffle()
    .prop_map(|v| v.into_iter().map(String::from).collect())
}

fn build(reg: &Registry, shapes: &[TermShape]) -> Expr {
    let names: Vec<String> = ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
    parse(reg, &render(shapes, &names)).unwrap()
}

fn one() -> Rational {
    Rational::from_integer(1.into())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_form_is_idempotent(s in shapes(3)) {
        let reg = Registry::pseudohermitian();
        let e = build(&reg, &s);
        prop_assert_eq!(Expr::from_terms(&reg, e.terms().to_vec()), e);
    }

    #[test]
    fn dummy_names_do_not_matter(s in shapes(3), names in label_names()) {
        let reg = Registry::pseudohermitian();
        let renamed = parse(&reg, &render(&s, &names)).unwrap();
        prop_assert_eq!(renamed, build(&reg, &s));
    }

    #[test]
    fn conjugation_is_an_involution(s in shapes(3)) {
        let reg = Registry::pseudohermitian();
        let e = build(&reg, &s);
        let back = e.conjugate(&reg).unwrap().conjugate(&reg).unwrap();
        prop_assert_eq!(back, e);
    }

    #[test]
    fn display_parses_back(s in shapes(3)) {
        let reg = Registry::pseudohermitian();
        let e = build(&reg, &s);
        prop_assert_eq!(parse(&reg, &e.to_string()).unwrap(), e);
    }

    #[test]
    fn sums_of_different_weight_are_rejected(s in shapes(2)) {
        let reg = Registry::pseudohermitian();
        let e = build(&reg, &s);
        prop_assume!(!e.is_zero() && e.signature(&reg).is_ok());
        let r = Expr::scalar(&reg, "R");
        prop_assert!(e.checked_add(&reg, &e.mul(&reg, &r)).is_err());
        prop_assert!(e.checked_add(&reg, &e.neg()).is_ok());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn swap_order_agrees_modulo_the_rewrite_rules(s in shapes(2)) {
        // Orders differ by curvature derivatives that only the Bianchi
        // rewrites identify, so compare after closing.
        let reg = Registry::pseudohermitian();
        let e = build(&reg, &s);
        let outer = normal_order_by(&reg, &e, SwapOrder::OuterFirst);
        let inner = normal_order_by(&reg, &e, SwapOrder::InnerFirst);
        let gap = Closure::new(&reg, Constraint::General).close(&outer.sub(&inner));
        prop_assert!(gap.is_zero(), "{}", gap);
    }

    #[test]
    fn closure_is_linear(a in shapes(2), b in shapes(2)) {
        let reg = Registry::pseudohermitian();
        let (x, y) = (build(&reg, &a), build(&reg, &b));
        let c = Closure::new(&reg, Constraint::General);
        let split = c.close(&x).add(&c.close(&y));
        prop_assert!(c.close(&x.add(&y)).sub(&split).is_zero());
    }

    #[test]
    fn symbolic_then_components_agrees_with_components(s in shapes(2)) {
        let reg = Registry::pseudohermitian();
        let e = build(&reg, &s);
        let direct = close_at_one(&reg, Constraint::General, &e).unwrap();
        let closed = Closure::new(&reg, Constraint::General).close(&e);
        let via = close_at_one(&reg, Constraint::General, &limit_n(&closed, &one()).unwrap()).unwrap();
        prop_assert!(direct.sub(&via).is_zero(), "{} vs {}", direct, via);
    }
}
