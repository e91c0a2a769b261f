//! Exact evaluation of calculus expressions on a model structure.
//!
//! An expression is specialized to dimension three and reduced to frame
//! components; a component `D[w](Y)` is then evaluated letter by letter
//! from the inside out with
//!
//! ```text
//! ∇_X Y = X(Y) - (p - q) ω₁¹(X) Y
//! ```
//!
//! where `p` and `q` count the holomorphic and antiholomorphic slots of `Y`.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use crq_core::dim1::{reduce, Comp, Poly1};
use crq_core::ops::parse_ops;
use crq_core::{Kind, Registry};

use crate::error::{ModelError, Result};
use crate::ring::{gauss, Elem, Gauss, Model};
use crate::structure::Structure;

fn registry() -> &'static Registry {
    static REG: OnceLock<Registry> = OnceLock::new();
    REG.get_or_init(Registry::pseudohermitian)
}

/// Reduced form of `src`, cached across calls.
fn reduced(src: &str) -> Result<Poly1> {
    static CACHE: OnceLock<Mutex<HashMap<String, Poly1>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(p) = cache.lock().expect("cache lock").get(src) {
        return Ok(p.clone());
    }
    let e = parse_ops(registry(), src)?;
    let p = reduce(registry(), &e)?;
    cache.lock().expect("cache lock").insert(src.to_string(), p.clone());
    Ok(p)
}

fn frame_index(k: Kind) -> usize {
    match k {
        Kind::Reeb => 0,
        Kind::Hol => 1,
        Kind::Anti => 2,
    }
}

fn balance(word: &[Kind], slots: &[Kind]) -> i64 {
    word.iter()
        .chain(slots)
        .map(|k| match k {
            Kind::Hol => 1,
            Kind::Anti => -1,
            Kind::Reeb => 0,
        })
        .sum()
}

struct Evaluator<'a> {
    s: &'a Structure,
    bind: &'a [(&'a str, &'a Elem)],
    cache: HashMap<Comp, Elem>,
}

impl Evaluator<'_> {
    fn base(&self, sym: &str) -> Result<Elem> {
        match sym {
            "R" => Ok(self.s.scalar.clone()),
            "A" => Ok(self.s.torsion.clone()),
            "Ab" => Ok(self.s.torsion.conj()),
            _ => self
                .bind
                .iter()
                .find(|(n, _)| *n == sym)
                .map(|(_, v)| (*v).clone())
                .ok_or_else(|| ModelError::Unbound(sym.to_string())),
        }
    }

    fn component(&mut self, c: &Comp) -> Result<Elem> {
        if let Some(v) = self.cache.get(c) {
            return Ok(v.clone());
        }
        let v = match c.word.split_first() {
            None => self.base(&c.sym)?,
            Some((first, rest)) => {
                let inner = Comp::new(&c.sym, rest.to_vec(), c.slots.clone());
                let y = self.component(&inner)?;
                let i = frame_index(*first);
                let bal = balance(rest, &c.slots);
                let conn = self.s.omega[i].mul(&y).scale(&gauss(bal, 0));
                self.s.derive(i, &y).sub(&conn)
            }
        };
        self.cache.insert(c.clone(), v.clone());
        Ok(v)
    }
}

/// Evaluate `src` (the expression grammar of the calculus) on `s`, with
/// real functions bound to the scalar placeholders.
pub fn evaluate(s: &Structure, src: &str, bind: &[(&str, &Elem)]) -> Result<Elem> {
    for (name, v) in bind {
        if !v.is_real() {
            return Err(ModelError::NotReal(format!("{} = {}", name, v)));
        }
    }
    let p = reduced(src)?;
    let mut ev = Evaluator {
        s,
        bind,
        cache: HashMap::new(),
    };
    let mut out = Elem::zero(s.model);
    for (fs, c) in p.terms() {
        let (re, im) = c
            .as_gaussian()
            .ok_or_else(|| ModelError::Unsupported(format!("coefficient {} depends on n", c)))?;
        let mut t = Elem::constant(s.model, Gauss::new(re, im));
        for f in fs {
            t = t.mul(&ev.component(f)?);
        }
        out = out.add(&t);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Operator {
    DeltaB,
    Nabla0,
    /// Coefficient against `θ¹`.
    PAlpha,
    C,
    P4,
    P4Prime,
    QHirachi,
    Q4Prime,
}

impl Operator {
    pub const ALL: [Operator; 8] = [
        Operator::DeltaB,
        Operator::Nabla0,
        Operator::PAlpha,
        Operator::C,
        Operator::P4,
        Operator::P4Prime,
        Operator::QHirachi,
        Operator::Q4Prime,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Operator::DeltaB => "Delta_b",
            Operator::Nabla0 => "nabla_0",
            Operator::PAlpha => "P_alpha",
            Operator::C => "C",
            Operator::P4 => "P4",
            Operator::P4Prime => "P4prime",
            Operator::QHirachi => "Q_hirachi",
            Operator::Q4Prime => "Q4prime",
        }
    }

    pub fn parse(name: &str) -> Result<Operator> {
        Operator::ALL
            .into_iter()
            .find(|o| o.name() == name)
            .ok_or_else(|| ModelError::UnknownOperator(name.to_string()))
    }

    pub fn takes_argument(self) -> bool {
        !matches!(self, Operator::QHirachi | Operator::Q4Prime)
    }

    fn source(self) -> &'static str {
        match self {
            Operator::DeltaB => "Delta_b(f)",
            Operator::Nabla0 => "D[0](f)",
            Operator::PAlpha => "P_alpha[a](f)",
            Operator::C => "C(f)",
            Operator::P4 => "P4(f)",
            Operator::P4Prime => "P4prime_crit(f)",
            Operator::QHirachi => "Q_hirachi",
            Operator::Q4Prime => "Q4prime_crit",
        }
    }
}

/// Apply `op` to `f`, complex-linearly; `f` is ignored by the curvature
/// quantities.
pub fn apply_operator(op: Operator, f: &Elem, s: &Structure) -> Result<Elem> {
    if !op.takes_argument() {
        return evaluate(s, op.source(), &[]);
    }
    let re = evaluate(s, op.source(), &[("f", &f.re())])?;
    let im = f.im();
    if im.is_zero() {
        return Ok(re);
    }
    let im = evaluate(s, op.source(), &[("f", &im)])?;
    Ok(re.add(&im.scale(&gauss(0, 1))))
}

/// `1` and the real and imaginary parts of the holomorphic monomials up to
/// `degree`, each checked to satisfy `P_α f = 0`.
pub fn pluriharmonic_basis(s: &Structure, degree: usize) -> Result<Vec<Elem>> {
    let m = s.model;
    let mut out = vec![Elem::one(m)];
    for d in 1..=degree {
        let monos: Vec<Elem> = match m {
            Model::Sphere => (0..=d)
                .rev()
                .map(|a| Elem::var(m, 0).pow(a as u32).mul(&Elem::var(m, 2).pow((d - a) as u32)))
                .collect(),
            Model::Heisenberg => vec![Elem::var(m, 0).pow(d as u32)],
        };
        for z in monos {
            out.push(z.re());
            out.push(z.im());
        }
    }
    for f in &out {
        let p = apply_operator(Operator::PAlpha, f, s)?;
        if !p.is_zero() {
            return Err(ModelError::SolverDegenerate(format!("P_alpha({}) = {}", f, p)));
        }
    }
    Ok(out)
}
