//! Coefficients: rational functions of the dimension parameter `n`, adjoined
//! with the imaginary unit.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Univariate polynomial in `n`, coefficients lowest degree first, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly(Vec<Rational>);

impl Poly {
    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Poly(vec![c]);
        p.trim();
        p
    }

    /// The formal variable `n`.
    pub fn var() -> Self {
        Poly(vec![Rational::zero(), Rational::one()])
    }

    pub fn from_coeffs(c: Vec<Rational>) -> Self {
        let mut p = Poly(c);
        p.trim();
        p
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    fn trim(&mut self) {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn lead(&self) -> Rational {
        self.0.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.0.len() {
            0 => Some(Rational::zero()),
            1 => Some(self.0[0].clone()),
            _ => None,
        }
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        Poly::from_coeffs(self.0.iter().map(|x| x * c).collect())
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Quotient and remainder of Euclidean division.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.degree().unwrap();
        let mut rem = self.0.clone();
        if self.0.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![Rational::zero(); self.0.len() - dd];
        let lead = d.lead();
        for k in (0..q.len()).rev() {
            let c = &rem[k + dd] / &lead;
            if !c.is_zero() {
                for (j, dc) in d.0.iter().enumerate() {
                    rem[k + j] = &rem[k + j] - &c * dc;
                }
            }
            q[k] = c;
        }
        (Poly::from_coeffs(q), Poly::from_coeffs(rem))
    }

    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let l = self.lead();
        self.scale(&(Rational::one() / l))
    }

    /// Multiplicity of `x0` as a root.
    pub fn root_order(&self, x0: &Rational) -> usize {
        if self.is_zero() {
            return usize::MAX;
        }
        let lin = Poly(vec![-x0.clone(), Rational::one()]);
        let mut p = self.clone();
        let mut k = 0;
        loop {
            let (q, r) = p.div_rem(&lin);
            if !r.is_zero() {
                return k;
            }
            p = q;
            k += 1;
        }
    }

    fn fmt_with(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            let unit = a.is_one();
            match k {
                0 => write!(f, "{}", fmt_rat(&a))?,
                _ => {
                    if !unit {
                        write!(f, "{}*", fmt_rat(&a))?;
                    }
                    if k == 1 {
                        write!(f, "n")?;
                    } else {
                        write!(f, "n^{}", k)?;
                    }
                }
            }
        }
        Ok(())
    }

    fn n_terms(&self) -> usize {
        self.0.iter().filter(|c| !c.is_zero()).count()
    }
}

fn fmt_rat(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_with(f)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let len = self.0.len().max(o.0.len());
        let mut v = Vec::with_capacity(len);
        for k in 0..len {
            let a = self.0.get(k).cloned().unwrap_or_else(Rational::zero);
            let b = o.0.get(k).cloned().unwrap_or_else(Rational::zero);
            v.push(a + b);
        }
        Poly::from_coeffs(v)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly(self.0.iter().map(|c| -c).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        self + &(-o)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![Rational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                v[i + j] = &v[i + j] + a * b;
            }
        }
        Poly::from_coeffs(v)
    }
}

/// Element of the field of rational functions in `n`, kept reduced with a
/// monic denominator.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatN {
    num: Poly,
    den: Poly,
}

impl RatN {
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RatN::zero();
        }
        let g = num.gcd(&den);
        let (n, _) = num.div_rem(&g);
        let (d, _) = den.div_rem(&g);
        let l = d.lead();
        let inv = Rational::one() / l;
        RatN {
            num: n.scale(&inv),
            den: d.scale(&inv),
        }
    }

    pub fn zero() -> Self {
        RatN {
            num: Poly::zero(),
            den: Poly::constant(Rational::one()),
        }
    }

    pub fn one() -> Self {
        RatN::from_rat(Rational::one())
    }

    pub fn from_rat(c: Rational) -> Self {
        RatN {
            num: Poly::constant(c),
            den: Poly::constant(Rational::one()),
        }
    }

    pub fn from_int(c: i64) -> Self {
        RatN::from_rat(rat(c, 1))
    }

    pub fn n() -> Self {
        RatN {
            num: Poly::var(),
            den: Poly::constant(Rational::one()),
        }
    }

    /// `a*n + b`
    pub fn linear(a: i64, b: i64) -> Self {
        RatN::new(
            Poly::from_coeffs(vec![rat(b, 1), rat(a, 1)]),
            Poly::constant(Rational::one()),
        )
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.degree() == Some(0) && self.num == self.den
    }

    pub fn as_rational(&self) -> Option<Rational> {
        let n = self.num.as_constant()?;
        let d = self.den.as_constant()?;
        Some(n / d)
    }

    pub fn inv(&self) -> RatN {
        RatN::new(self.den.clone(), self.num.clone())
    }

    /// Value at `n = x0`; `Err(order)` carries the pole order when the reduced
    /// denominator vanishes there.
    pub fn eval(&self, x0: &Rational) -> Result<Rational, usize> {
        let d = self.den.eval(x0);
        if d.is_zero() {
            return Err(self.den.root_order(x0));
        }
        Ok(self.num.eval(x0) / d)
    }

    /// Order of vanishing of the numerator at `x0` minus that of the denominator.
    pub fn valuation(&self, x0: &Rational) -> i64 {
        if self.is_zero() {
            return i64::MAX;
        }
        self.num.root_order(x0) as i64 - self.den.root_order(x0) as i64
    }

    pub fn pow(&self, k: u32) -> RatN {
        let mut acc = RatN::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    fn is_simple(&self) -> bool {
        self.den.degree() == Some(0) && self.num.n_terms() <= 1
    }

    pub fn is_negative_leading(&self) -> bool {
        self.num.lead().is_negative()
    }
}

impl RatN {
    /// Numerator and denominator scaled to coprime integer coefficients,
    /// denominator with positive leading coefficient.
    pub fn integer_parts(&self) -> (Poly, Poly) {
        let mut l = BigInt::one();
        for c in self.num.coeffs().iter().chain(self.den.coeffs()) {
            l = l.lcm(c.denom());
        }
        let lr = Rational::from_integer(l);
        let n = self.num.scale(&lr);
        let d = self.den.scale(&lr);
        let mut g = BigInt::zero();
        for c in n.coeffs().iter().chain(d.coeffs()) {
            g = g.gcd(c.numer());
        }
        if g.is_zero() {
            return (n, d);
        }
        let gi = Rational::from_integer(g).recip();
        (n.scale(&gi), d.scale(&gi))
    }
}

impl fmt::Display for RatN {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.degree() == Some(0) {
            if self.num.n_terms() <= 1 {
                return write!(f, "{}", self.num);
            }
            return write!(f, "({})", self.num);
        }
        let (n, d) = self.integer_parts();
        let num = if n.n_terms() <= 1 && n.degree() == Some(0) {
            format!("{}", n)
        } else {
            format!("({})", n)
        };
        write!(f, "{}/({})", num, d)
    }
}

impl Add for &RatN {
    type Output = RatN;
    fn add(self, o: &RatN) -> RatN {
        if self.den == o.den {
            return RatN::new(&self.num + &o.num, self.den.clone());
        }
        RatN::new(
            &(&self.num * &o.den) + &(&o.num * &self.den),
            &self.den * &o.den,
        )
    }
}

impl Neg for &RatN {
    type Output = RatN;
    fn neg(self) -> RatN {
        RatN {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Sub for &RatN {
    type Output = RatN;
    fn sub(self, o: &RatN) -> RatN {
        self + &(-o)
    }
}

impl Mul for &RatN {
    type Output = RatN;
    fn mul(self, o: &RatN) -> RatN {
        if self.is_zero() || o.is_zero() {
            return RatN::zero();
        }
        RatN::new(&self.num * &o.num, &self.den * &o.den)
    }
}

impl Div for &RatN {
    type Output = RatN;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: &RatN) -> RatN {
        self * &o.inv()
    }
}

/// Gaussian rational function `re + i*im`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Coeff {
    pub re: RatN,
    pub im: RatN,
}

impl Coeff {
    pub fn zero() -> Self {
        Coeff {
            re: RatN::zero(),
            im: RatN::zero(),
        }
    }

    pub fn one() -> Self {
        Coeff::real(RatN::one())
    }

    pub fn i() -> Self {
        Coeff {
            re: RatN::zero(),
            im: RatN::one(),
        }
    }

    pub fn real(r: RatN) -> Self {
        Coeff {
            re: r,
            im: RatN::zero(),
        }
    }

    pub fn int(k: i64) -> Self {
        Coeff::real(RatN::from_int(k))
    }

    pub fn frac(a: i64, b: i64) -> Self {
        Coeff::real(RatN::from_rat(rat(a, b)))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn conj(&self) -> Coeff {
        Coeff {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    pub fn inv(&self) -> Coeff {
        let norm = &(&self.re * &self.re) + &(&self.im * &self.im);
        assert!(!norm.is_zero(), "inverse of zero coefficient");
        let c = self.conj();
        Coeff {
            re: &c.re / &norm,
            im: &c.im / &norm,
        }
    }

    pub fn scale(&self, r: &RatN) -> Coeff {
        Coeff {
            re: &self.re * r,
            im: &self.im * r,
        }
    }

    pub fn valuation(&self, x0: &Rational) -> i64 {
        self.re.valuation(x0).min(self.im.valuation(x0))
    }

    pub fn eval(&self, x0: &Rational) -> Result<(Rational, Rational), usize> {
        let re = self.re.eval(x0);
        let im = self.im.eval(x0);
        match (re, im) {
            (Ok(a), Ok(b)) => Ok((a, b)),
            (Err(a), Err(b)) => Err(a.max(b)),
            (Err(a), _) | (_, Err(a)) => Err(a),
        }
    }

    pub fn from_gaussian(re: Rational, im: Rational) -> Coeff {
        Coeff {
            re: RatN::from_rat(re),
            im: RatN::from_rat(im),
        }
    }

    /// Rational value when the coefficient is independent of `n`.
    pub fn as_gaussian(&self) -> Option<(Rational, Rational)> {
        Some((self.re.as_rational()?, self.im.as_rational()?))
    }

    /// Whether printing needs parentheses when used as a factor.
    pub fn is_atomic(&self) -> bool {
        (self.im.is_zero() && self.re.is_simple()) || (self.re.is_zero() && self.im.is_one())
    }

    /// Total order used only to make output deterministic.
    pub fn cmp_key(&self) -> String {
        self.to_string()
    }

    pub fn leading_negative(&self) -> bool {
        if self.re.is_zero() {
            self.im.is_negative_leading()
        } else {
            self.re.is_negative_leading()
        }
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{}", self.re),
            (true, false) => {
                if self.im.is_one() {
                    write!(f, "i")
                } else if (-&self.im).is_one() {
                    write!(f, "-i")
                } else {
                    write!(f, "{}*i", self.im)
                }
            }
            (false, false) => {
                if self.im.is_one() {
                    write!(f, "({} + i)", self.re)
                } else {
                    write!(f, "({} + {}*i)", self.re, self.im)
                }
            }
        }
    }
}

impl Add for &Coeff {
    type Output = Coeff;
    fn add(self, o: &Coeff) -> Coeff {
        Coeff {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }
}

impl Sub for &Coeff {
    type Output = Coeff;
    fn sub(self, o: &Coeff) -> Coeff {
        Coeff {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }
}

impl Neg for &Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        Coeff {
            re: -&self.re,
            im: -&self.im,
        }
    }
}

impl Mul for &Coeff {
    type Output = Coeff;
    fn mul(self, o: &Coeff) -> Coeff {
        Coeff {
            re: &(&self.re * &o.re) - &(&self.im * &o.im),
            im: &(&self.re * &o.im) + &(&self.im * &o.re),
        }
    }
}

impl Div for &Coeff {
    type Output = Coeff;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: &Coeff) -> Coeff {
        self * &o.inv()
    }
}

impl PartialOrd for Coeff {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Coeff {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_key().cmp(&other.cmp_key())
    }
}

/// Integer gcd helper used when printing rationals compactly.
pub fn int_gcd(a: &BigInt, b: &BigInt) -> BigInt {
    a.gcd(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_common_factor() {
        let nm1 = RatN::linear(1, -1);
        let x = &nm1 / &nm1;
        assert!(x.is_one());
        let q = &RatN::linear(1, 0) / &RatN::linear(2, 0);
        assert_eq!(q, RatN::from_rat(rat(1, 2)));
    }

    #[test]
    fn pole_detection() {
        let x = RatN::one().clone();
        let p = &x / &RatN::linear(1, -1);
        assert_eq!(p.eval(&rat(1, 1)), Err(1));
        let h = &RatN::linear(1, -1) / &RatN::from_int(2);
        assert_eq!(h.eval(&rat(1, 1)), Ok(rat(0, 1)));
        let sq = &RatN::linear(1, -1) * &RatN::linear(1, -1);
        assert_eq!(sq.valuation(&rat(1, 1)), 2);
    }

    #[test]
    fn gaussian_arithmetic() {
        let i = Coeff::i();
        assert_eq!(&i * &i, Coeff::int(-1));
        let z = &Coeff::int(1) + &i;
        let w = &z / &z;
        assert!(w.is_one());
        assert_eq!(z.conj(), &Coeff::int(1) - &i);
    }

    #[test]
    fn display_forms() {
        let c = &RatN::linear(1, -1) / &RatN::linear(2, 0);
        assert_eq!(c.to_string(), "(n - 1)/(2*n)");
        assert_eq!(Coeff::frac(-3, 2).to_string(), "-3/2");
        assert_eq!(Coeff::i().to_string(), "i");
    }
}
