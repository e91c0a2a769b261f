//! Exact function rings on the two models.
//!
//! On the sphere an element is a polynomial in `z1, zb1, z2, zb2` reduced by
//! `z2*zb2 -> 1 - z1*zb1`, so no reduced monomial contains both `z2` and
//! `zb2`. On the Heisenberg group it is a polynomial in `z, zb, t`. Either
//! ring is extended by formal markers `e^{kσ/2}` for one fixed real `σ`;
//! markers multiply by adding `k`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{ModelError, Result};

pub type Gauss = Complex<BigRational>;

pub fn gauss(re: i64, im: i64) -> Gauss {
    Complex::new(BigRational::from_integer(re.into()), BigRational::from_integer(im.into()))
}

pub fn gauss_frac(num: i64, den: i64) -> Gauss {
    Complex::new(BigRational::new(num.into(), den.into()), BigRational::zero())
}

pub fn gauss_i() -> Gauss {
    gauss(0, 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Model {
    Sphere,
    Heisenberg,
}

impl Model {
    pub fn vars(self) -> &'static [&'static str] {
        match self {
            Model::Sphere => &["z1", "zb1", "z2", "zb2"],
            Model::Heisenberg => &["z", "zb", "t"],
        }
    }

    fn conj_var(self, v: usize) -> usize {
        match (self, v) {
            (_, 0) => 1,
            (_, 1) => 0,
            (Model::Sphere, 2) => 3,
            (Model::Sphere, 3) => 2,
            _ => v,
        }
    }

    pub fn parse(name: &str) -> Result<Model> {
        match name {
            "sphere" => Ok(Model::Sphere),
            "heisenberg" => Ok(Model::Heisenberg),
            _ => Err(ModelError::UnknownModel(name.into())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Model::Sphere => "sphere",
            Model::Heisenberg => "heisenberg",
        }
    }
}

pub type Mono = [u16; 4];

/// Ring element: `Σ c · e^{kσ/2} · monomial`, keyed by `(k, monomial)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Elem {
    model: Model,
    terms: BTreeMap<(i32, Mono), Gauss>,
}

impl Elem {
    pub fn zero(model: Model) -> Elem {
        Elem {
            model,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(model: Model, c: Gauss) -> Elem {
        let mut e = Elem::zero(model);
        e.push(0, [0; 4], c);
        e
    }

    pub fn int(model: Model, k: i64) -> Elem {
        Elem::constant(model, gauss(k, 0))
    }

    pub fn one(model: Model) -> Elem {
        Elem::int(model, 1)
    }

    pub fn var(model: Model, v: usize) -> Elem {
        let mut m = [0; 4];
        m[v] = 1;
        let mut e = Elem::zero(model);
        e.push(0, m, gauss(1, 0));
        e
    }

    /// `e^{kσ/2}`.
    pub fn marker(model: Model, k: i32) -> Elem {
        let mut e = Elem::zero(model);
        e.push(k, [0; 4], gauss(1, 0));
        e
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &Mono, &Gauss)> {
        self.terms.iter().map(|((k, m), c)| (*k, m, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Markers that occur, ascending.
    pub fn markers(&self) -> Vec<i32> {
        let mut v: Vec<i32> = self.terms.keys().map(|(k, _)| *k).collect();
        v.dedup();
        v
    }

    pub fn as_constant(&self) -> Option<Gauss> {
        match self.terms.len() {
            0 => Some(Gauss::zero()),
            1 => {
                let ((k, m), c) = self.terms.iter().next()?;
                (*k == 0 && *m == [0; 4]).then(|| c.clone())
            }
            _ => None,
        }
    }

    fn push(&mut self, k: i32, m: Mono, c: Gauss) {
        if c.is_zero() {
            return;
        }
        if self.model == Model::Sphere && m[2] > 0 && m[3] > 0 {
            // z2^j zb2^j = (1 - z1 zb1)^j
            let j = m[2].min(m[3]);
            let mut rest = m;
            rest[2] -= j;
            rest[3] -= j;
            let mut binom = BigInt::one();
            for s in 0..=j {
                let mut mm = rest;
                mm[0] += s;
                mm[1] += s;
                let sign = if s % 2 == 0 { 1 } else { -1 };
                let w = Complex::new(BigRational::from_integer(&binom * sign), BigRational::zero());
                self.push(k, mm, &c * &w);
                binom = binom * BigInt::from(j - s) / BigInt::from(s + 1);
            }
            return;
        }
        let key = (k, m);
        let slot = self.terms.entry(key).or_insert_with(Gauss::zero);
        *slot = &*slot + &c;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, o: &Elem) -> Elem {
        let mut e = self.clone();
        for ((k, m), c) in &o.terms {
            e.push(*k, *m, c.clone());
        }
        e
    }

    pub fn sub(&self, o: &Elem) -> Elem {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Elem {
        self.scale(&gauss(-1, 0))
    }

    pub fn scale(&self, s: &Gauss) -> Elem {
        let mut e = Elem::zero(self.model);
        for ((k, m), c) in &self.terms {
            e.push(*k, *m, c * s);
        }
        e
    }

    pub fn mul(&self, o: &Elem) -> Elem {
        let mut e = Elem::zero(self.model);
        for ((k1, m1), c1) in &self.terms {
            for ((k2, m2), c2) in &o.terms {
                let mut m = [0; 4];
                for v in 0..4 {
                    m[v] = m1[v] + m2[v];
                }
                e.push(k1 + k2, m, c1 * c2);
            }
        }
        e
    }

    pub fn pow(&self, p: u32) -> Elem {
        (0..p).fold(Elem::one(self.model), |acc, _| acc.mul(self))
    }

    /// Multiply by `e^{kσ/2}`.
    pub fn shift(&self, k: i32) -> Elem {
        Elem {
            model: self.model,
            terms: self.terms.iter().map(|((k0, m), c)| ((k0 + k, *m), c.clone())).collect(),
        }
    }

    /// Complex conjugate; `σ` is real, so markers are fixed.
    pub fn conj(&self) -> Elem {
        let mut e = Elem::zero(self.model);
        for ((k, m), c) in &self.terms {
            let mut mm = [0; 4];
            for v in 0..self.model.vars().len() {
                mm[self.model.conj_var(v)] = m[v];
            }
            e.push(*k, mm, c.conj());
        }
        e
    }

    pub fn re(&self) -> Elem {
        self.add(&self.conj()).scale(&gauss_frac(1, 2))
    }

    pub fn im(&self) -> Elem {
        self.sub(&self.conj()).scale(&Complex::new(BigRational::zero(), BigRational::new((-1).into(), 2.into())))
    }

    pub fn is_real(&self) -> bool {
        *self == self.conj()
    }

    pub fn partial(&self, v: usize) -> Elem {
        let mut e = Elem::zero(self.model);
        for ((k, m), c) in &self.terms {
            if m[v] == 0 {
                continue;
            }
            let mut mm = *m;
            mm[v] -= 1;
            e.push(*k, mm, c * gauss(m[v] as i64, 0));
        }
        e
    }

    /// `Σ_j (k_j / 2) c_j e^{k_jσ/2} m_j`: the factor picked up by a
    /// derivation acting on the markers, before multiplying by `dσ`.
    pub fn marker_weighted(&self) -> Elem {
        let mut e = Elem::zero(self.model);
        for ((k, m), c) in &self.terms {
            e.push(*k, *m, c * gauss_frac(*k as i64, 2));
        }
        e
    }

    /// Total degree of the polynomial part.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(|(_, m)| m.iter().map(|x| *x as usize).sum()).max().unwrap_or(0)
    }

    pub fn parse(model: Model, src: &str) -> Result<Elem> {
        let mut p = Parser { src: src.as_bytes(), pos: 0, model };
        let e = p.sum()?;
        p.ws();
        if p.pos != p.src.len() {
            return Err(p.err("unexpected input"));
        }
        Ok(e)
    }
}

pub fn fmt_gauss(c: &Gauss) -> String {
    let r = |x: &BigRational| x.to_string();
    match (c.re.is_zero(), c.im.is_zero()) {
        (_, true) => r(&c.re),
        (true, false) if c.im.is_one() => "i".into(),
        (true, false) if (-&c.im).is_one() => "-i".into(),
        (true, false) => format!("{}*i", r(&c.im)),
        _ => {
            let sign = if c.im.is_negative() { "-" } else { "+" };
            let im = c.im.abs();
            if im.is_one() {
                format!("({} {} i)", r(&c.re), sign)
            } else {
                format!("({} {} {}*i)", r(&c.re), sign, r(&im))
            }
        }
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let vars = self.model.vars();
        let mut groups: Vec<String> = vec![];
        for k in self.markers() {
            let mut ts: Vec<(&Mono, &Gauss)> =
                self.terms.iter().filter(|((kk, _), _)| *kk == k).map(|((_, m), c)| (m, c)).collect();
            ts.sort_by_key(|(m, _)| (std::cmp::Reverse(m.iter().sum::<u16>()), std::cmp::Reverse(**m)));
            let mut s = String::new();
            for (i, (m, c)) in ts.iter().enumerate() {
                let mono: Vec<String> = (0..vars.len())
                    .filter(|v| m[*v] > 0)
                    .map(|v| if m[v] == 1 { vars[v].to_string() } else { format!("{}^{}", vars[v], m[v]) })
                    .collect();
                let neg = c.im.is_zero() && c.re.is_negative();
                let mag = if neg { -(*c).clone() } else { (*c).clone() };
                let cs = fmt_gauss(&mag);
                let body = match (mono.is_empty(), mag.is_one()) {
                    (true, _) => cs,
                    (false, true) => mono.join("*"),
                    (false, false) => format!("{}*{}", cs, mono.join("*")),
                };
                match (i, neg) {
                    (0, true) => s.push_str(&format!("-{}", body)),
                    (0, false) => s.push_str(&body),
                    (_, true) => s.push_str(&format!(" - {}", body)),
                    (_, false) => s.push_str(&format!(" + {}", body)),
                }
            }
            groups.push(if k == 0 { s } else { format!("exp({}*sigma/2)*({})", k, s) });
        }
        write!(f, "{}", groups.join(" + "))
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    model: Model,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> ModelError {
        ModelError::Parse(format!("{} at byte {}", msg, self.pos))
    }

    fn ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Elem> {
        let mut acc = self.signed()?;
        loop {
            if self.eat(b'+') {
                acc = acc.add(&self.signed()?);
            } else if self.eat(b'-') {
                acc = acc.sub(&self.signed()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn signed(&mut self) -> Result<Elem> {
        if self.eat(b'-') {
            Ok(self.signed()?.neg())
        } else {
            self.product()
        }
    }

    fn product(&mut self) -> Result<Elem> {
        let mut acc = self.power()?;
        loop {
            if self.eat(b'*') {
                acc = acc.mul(&self.power()?);
            } else if self.eat(b'/') {
                let d = self.power()?.as_constant().filter(|c| !c.is_zero());
                let d = d.ok_or_else(|| self.err("division by a non-constant"))?;
                acc = acc.scale(&(Gauss::one() / d));
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<Elem> {
        let base = self.atom()?;
        if self.eat(b'^') {
            self.ws();
            let n = self.integer().ok_or_else(|| self.err("expected an exponent"))?;
            let n = u32::try_from(n).map_err(|_| self.err("exponent too large"))?;
            return Ok(base.pow(n));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Option<BigInt> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).ok()?.parse().ok()
    }

    fn atom(&mut self) -> Result<Elem> {
        self.ws();
        if self.eat(b'(') {
            let e = self.sum()?;
            if !self.eat(b')') {
                return Err(self.err("expected `)`"));
            }
            return Ok(e);
        }
        self.ws();
        if let Some(n) = self.integer() {
            return Ok(Elem::constant(self.model, Complex::new(BigRational::from_integer(n), BigRational::zero())));
        }
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        if name.is_empty() {
            return Err(self.err("expected a term"));
        }
        if let Some(v) = self.model.vars().iter().position(|x| *x == name) {
            return Ok(Elem::var(self.model, v));
        }
        match name {
            "i" => Ok(Elem::constant(self.model, gauss_i())),
            "Re" | "Im" | "conj" => {
                if !self.eat(b'(') {
                    return Err(self.err("expected `(`"));
                }
                let e = self.sum()?;
                if !self.eat(b')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(match name {
                    "Re" => e.re(),
                    "Im" => e.im(),
                    _ => e.conj(),
                })
            }
            _ => Err(ModelError::Parse(format!("unknown name `{}` on the {}", name, self.model.name()))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_relation_is_applied() {
        let e = Elem::parse(Model::Sphere, "z1*zb1 + z2*zb2").unwrap();
        assert_eq!(e, Elem::one(Model::Sphere));
        let e = Elem::parse(Model::Sphere, "z2^2*zb2^3").unwrap();
        assert_eq!(e.to_string(), "z1^2*zb1^2*zb2 - 2*z1*zb1*zb2 + zb2");
    }

    #[test]
    fn real_and_imaginary_parts() {
        let m = Model::Sphere;
        let z = Elem::parse(m, "z1*z2").unwrap();
        let back = z.re().add(&z.im().scale(&gauss_i()));
        assert_eq!(back, z);
        assert!(z.re().is_real() && z.im().is_real());
        assert_eq!(Elem::parse(m, "Im(z1)").unwrap().to_string(), "-1/2*i*z1 + 1/2*i*zb1");
    }

    #[test]
    fn markers_add() {
        let m = Model::Heisenberg;
        let a = Elem::marker(m, 2).mul(&Elem::parse(m, "t").unwrap());
        let b = a.mul(&Elem::marker(m, -2));
        assert_eq!(b, Elem::parse(m, "t").unwrap());
        assert_eq!(a.to_string(), "exp(2*sigma/2)*(t)");
    }

    #[test]
    fn parse_errors() {
        assert!(Elem::parse(Model::Sphere, "z").is_err());
        assert!(Elem::parse(Model::Heisenberg, "t/z").is_err());
        assert!(Elem::parse(Model::Sphere, "(z1").is_err());
    }
}
