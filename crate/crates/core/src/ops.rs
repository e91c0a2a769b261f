//! Named differential operators and curvature quantities.
//!
//! Each entry is a template in the expression grammar; `#` is the argument.
//! Templates may call one another and are expanded hygienically, so the
//! argument's dummy labels never collide with the template's.

use crate::coeff::{rat, RatN};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::index::Slot;
use crate::parse::{expand_template, parse_with, Function, Functions};
use crate::registry::Registry;

pub struct OperatorDef {
    pub name: &'static str,
    /// Free index names, bound in order to the indices written at the call.
    pub indices: &'static [&'static str],
    pub template: &'static str,
    pub takes_argument: bool,
    /// The argument must have the critical weight `-(n-1)/2`.
    pub critical_argument: bool,
    pub about: &'static str,
}

const fn op(name: &'static str, template: &'static str, about: &'static str) -> OperatorDef {
    OperatorDef {
        name,
        indices: &[],
        template,
        takes_argument: true,
        critical_argument: false,
        about,
    }
}

const fn scalar(name: &'static str, template: &'static str, about: &'static str) -> OperatorDef {
    OperatorDef {
        name,
        indices: &[],
        template,
        takes_argument: false,
        critical_argument: false,
        about,
    }
}

pub const OPERATORS: &[OperatorDef] = &[
    op("Delta_b", "-(D[^a,a](#) + D[a,^a](#))", "sublaplacian"),
    op(
        "C",
        "Delta_b(Delta_b(#)) + n^2*D[0,0](#) - 2*i*n*D[b](Ab[^a,^b]*D[a](#)) + 2*i*n*D[^b](A[a,b]*D[^a](#))",
        "square of the sublaplacian corrected by the Reeb field",
    ),
    op(
        "C_div",
        "4*D[^a](D[a,b,^b](#) + i*n*A[a,b]*D[^b](#))",
        "divergence form of C",
    ),
    OperatorDef {
        name: "B",
        indices: &["a", "b"],
        template: "D[~b,a](#) - 1/n*D[^c,c](#)*h[a,~b]",
        takes_argument: true,
        critical_argument: false,
        about: "trace-free mixed Hessian B[a,~b]",
    },
    OperatorDef {
        name: "P_alpha",
        indices: &["a"],
        template: "D[a,b,^b](#) + i*n*A[a,b]*D[^b](#)",
        takes_argument: true,
        critical_argument: false,
        about: "third order operator P_alpha[a]",
    },
    OperatorDef {
        name: "T",
        indices: &["a"],
        template: "1/(n + 2)*(D[a](P) - i*D[^b](A[a,b]))",
        takes_argument: false,
        critical_argument: false,
        about: "T[a]",
    },
    OperatorDef {
        name: "W",
        indices: &["a"],
        template: "D[a](R) - i*D[^b](A[a,b])",
        takes_argument: false,
        critical_argument: false,
        about: "W[a]; vanishes for pseudo-Einstein forms in dimension three",
    },
    scalar(
        "S",
        "-1/n*(D[^a](T[a]) + D[a](Tb[^a]) + Pab[a,~b]*Pab[^~b,^a] - A[a,b]*Ab[^a,^b])",
        "S",
    ),
    scalar(
        "Q4",
        "2*(n + 1)^2/(n*(n + 2))*Delta_b(P) - 4/(n*(n + 2))*Im(D[^a,^b](A[a,b])) \
         - 2*(n - 1)/n*A[a,b]*Ab[^a,^b] - 2*(n + 1)/n*(Pab[a,~b]*Pab[^~b,^a] - P^2/n) \
         + 2*(n - 1)*(n + 1)^2/n^2*P^2",
        "Q-curvature paired with P4",
    ),
    OperatorDef {
        name: "P4",
        indices: &[],
        template: "Delta_b(Delta_b(#)) + D[0,0](#) - 4*Im(D[^a](A[a,b]*D[^b](#))) \
                   + 4*Re(D[~b]((Pab[^~b,^a] - P/n*h[^~b,^a])*D[a](#))) \
                   - 4*(n^2 - 1)/n*Re(D[^b](P*D[b](#))) + (n - 1)/2*Q4*#",
        takes_argument: true,
        critical_argument: true,
        about: "CR Paneitz operator",
    },
    op(
        "P4prime",
        "2*(n + 1)/n^2*Delta_b(Delta_b(#)) - 8/n*Im(D[^a](A[a,b]*D[^b](#))) \
         - 8*(n + 1)/n*Re(D[^a](P*D[a](#))) \
         + 16*(n + 1)/(n*(n + 2))*Re((D[a](P) - i*n/(2*(n + 1))*D[^b](A[a,b]))*D[^a](#)) + Q4*#",
        "P-prime operator on pluriharmonic functions, any dimension",
    ),
    op(
        "P4prime_crit",
        "4*Delta_b(Delta_b(#)) - 8*Im(D[^a](A[a,b]*D[^b](#))) - 4*Re(D[^a](R*D[a](#))) \
         + 8/3*Re((D[a](R) - i*D[^b](A[a,b]))*D[^a](#)) \
         + 2/3*(Delta_b(R) - 2*Im(D[^a,^b](A[a,b])))*#",
        "P-prime operator in dimension three",
    ),
    op(
        "P4prime_pe",
        "4*Delta_b(Delta_b(#)) - 8*Im(D[^a](A[a,b]*D[^b](#))) - 4*Re(D[^a](R*D[a](#)))",
        "P-prime operator for a pseudo-Einstein form in dimension three",
    ),
    op(
        "D",
        "4*Delta_b(Delta_b(#)) - 8*Im(D[^a](A[a,b]*D[^b](#))) - 4*Re(D[^a](R*D[a](#)))",
        "leading part of P4prime_crit",
    ),
    op(
        "P4prime_signed",
        "4*Re(D[^a](2*D[a,^b,b](#) - R*D[a](#)))",
        "manifestly signed P-prime operator",
    ),
    scalar(
        "Q4prime",
        "2/n^2*Delta_b(R) - 4/n*A[a,b]*Ab[^a,^b] + 1/n^2*R^2",
        "Q-prime curvature, any dimension",
    ),
    scalar(
        "Q4prime_crit",
        "2*Delta_b(R) - 4*A[a,b]*Ab[^a,^b] + R^2",
        "Q-prime curvature in dimension three",
    ),
    scalar(
        "Q_hirachi",
        "-4/3*D[^a](D[a](R) - i*D[^b](A[a,b]))",
        "Q-curvature of a three-dimensional pseudohermitian manifold",
    ),
    op(
        "U",
        "1/2*P4(#*#) - #*P4(#) - 16*Re(D[^a](#)*P_alpha[a](#))",
        "quadratic part of the transformed Q-prime curvature",
    ),
    op(
        "V",
        "4*Delta_b(Delta_b(#)) - 8*Im(D[^a](A[a,b]*D[^b](#))) - 4*Re(D[^a](R*D[a](#))) \
         + 8*Re(W[a]*D[^a](#))",
        "linear part of the transformed Q-prime curvature",
    ),
];

pub fn find(name: &str) -> Result<&'static OperatorDef> {
    OPERATORS
        .iter()
        .find(|d| d.name == name)
        .ok_or_else(|| Error::UnknownOperator(name.to_string()))
}

fn call(def: &'static OperatorDef) -> Function {
    Box::new(move |reg: &Registry, idx: &[Slot], arg: Option<Expr>| {
        if def.takes_argument != arg.is_some() {
            return Err(Error::Invalid(format!(
                "`{}` {} an argument",
                def.name,
                if def.takes_argument { "needs" } else { "takes no" }
            )));
        }
        expand_template(reg, Some(&functions()), def.template, def.indices, idx, arg)
    })
}

/// Operator table for the parser, including `hat`, the change of contact
/// form by `sigma`.
pub fn functions() -> Functions {
    let mut fs = Functions::new();
    for def in OPERATORS {
        fs.insert(def.name, call(def));
    }
    fs.insert(
        "hat",
        Box::new(|reg: &Registry, _idx: &[Slot], arg: Option<Expr>| {
            let e = arg.ok_or_else(|| Error::Invalid("`hat` needs an argument".into()))?;
            crate::conformal::transform(reg, &e, "sigma")
        }),
    );
    fs
}

/// Parse with every named operator available.
pub fn parse_ops(reg: &Registry, src: &str) -> Result<Expr> {
    parse_with(reg, &functions(), src)
}

/// The critical density weight `-(n-1)/2`.
pub fn critical_weight() -> RatN {
    &RatN::from_rat(rat(-1, 2)) * &RatN::linear(1, -1)
}

/// Expand a named operator applied to `arg`, checking the argument weight
/// where the operator is covariant only on one density bundle.
pub fn expand_definition(reg: &Registry, name: &str, idx: &[Slot], arg: Option<&Expr>) -> Result<Expr> {
    let def = find(name)?;
    if let (true, Some(a)) = (def.critical_argument, arg) {
        if let Some((w, _)) = a.signature(reg)? {
            let want = critical_weight();
            if w.0 != want || w.1 != want {
                return Err(Error::WeightMismatch(
                    crate::expr::fmt_weight(&(want.clone(), want)),
                    crate::expr::fmt_weight(&w),
                ));
            }
        }
    }
    call(def)(reg, idx, arg.cloned())
}
