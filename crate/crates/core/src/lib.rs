pub mod catalog;
pub mod checks;
pub mod closure;
pub mod conformal;
pub mod dim1;
pub mod coeff;
pub mod error;
pub mod expr;
pub mod index;
pub mod limit;
pub mod ops;
pub mod parse;
pub mod registry;
pub mod rules;
pub mod tractor;

pub use coeff::{Coeff, RatN};
pub use error::{Error, Result};
pub use expr::{Expr, Factor, Term};
pub use index::{Kind, Label, Slot};
pub use registry::Registry;
