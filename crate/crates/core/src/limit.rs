//! Specialization of the dimension parameter.

use crate::coeff::{Coeff, RatN, Rational};
use crate::error::{Error, Result};
use crate::expr::Expr;

/// Evaluate every coefficient at `n = n0`. A coefficient with a pole there
/// is an error carrying the offending term.
pub fn limit_n(e: &Expr, n0: &Rational) -> Result<Expr> {
    for t in e.terms() {
        if let Err(order) = t.coeff.eval(n0) {
            let mut one = t.clone();
            one.coeff = Coeff::one();
            return Err(Error::PoleAtLimit {
                at: format!("{} in term {}", n0, one),
                order,
            });
        }
    }
    Ok(e.map_coeffs(|c| {
        let (re, im) = c.eval(n0).expect("checked above");
        Coeff {
            re: RatN::from_rat(re),
            im: RatN::from_rat(im),
        }
    }))
}

/// Least order of vanishing at `n0` over all coefficients; `None` for the
/// zero expression.
pub fn valuation(e: &Expr, n0: &Rational) -> Option<i64> {
    e.terms().iter().map(|t| t.coeff.valuation(n0)).min()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;
    use crate::Registry;

    fn one() -> Rational {
        Rational::from_integer(1.into())
    }

    #[test]
    fn removable_factor() {
        let r = Registry::pseudohermitian();
        let e = parse(&r, "(n - 1)/2*P").unwrap();
        assert!(limit_n(&e, &one()).unwrap().is_zero());
        assert_eq!(valuation(&e, &one()), Some(1));
    }

    #[test]
    fn simple_pole() {
        let r = Registry::pseudohermitian();
        let e = parse(&r, "1/(n - 1)*P").unwrap();
        assert!(matches!(limit_n(&e, &one()), Err(Error::PoleAtLimit { order: 1, .. })));
    }

    #[test]
    fn cancelled_pole() {
        let r = Registry::pseudohermitian();
        let e = parse(&r, "(n^2 - 1)/(n - 1)*P").unwrap();
        let want = parse(&r, "2*P").unwrap();
        assert_eq!(limit_n(&e, &one()).unwrap(), want);
    }
}
