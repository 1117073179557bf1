//! Finite elements: quadrature, spaces, sparse storage, assembly and fields.

pub mod assembly;
pub mod field;
pub mod hct;
pub mod quadrature;
pub mod space;
pub mod sparse;

pub use assembly::*;
pub use field::*;
pub use space::{FunctionSpace, MixedSpace, PrismJet, SpaceKind};
pub use sparse::{CsrMatrix, SparseSystem};
