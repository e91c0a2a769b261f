//! Exact models for the pseudohermitian calculus: the standard CR
//! three-sphere and the Heisenberg group, with conformal changes of contact
//! form solved from the structure equations.

pub mod error;
pub mod forms;
pub mod integrate;
pub mod ops;
pub mod ring;
pub mod structure;
pub mod verify;

pub use error::{ModelError, Result};
pub use forms::Form;
pub use integrate::integrate;
pub use ops::{apply_operator, evaluate, pluriharmonic_basis, Operator};
pub use ring::{Elem, Gauss, Model};
pub use structure::{conformal_structure, standard_structure, Structure};
pub use verify::{verify_model_identity, ModelConfig, MODEL_IDENTITIES};
