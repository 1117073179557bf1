//! Koiter's linear shell model, the scaled three-dimensional shell problem
//! and the thin-shell limit problems, discretized by finite elements on
//! structured meshes of a curvilinear parameter rectangle.

// `!(x > 0.0)` also rejects NaN; index loops mirror the tensor notation.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod checks;
pub mod error;
pub mod experiments;
pub mod fem;
pub mod geometry;
pub mod kinematics;
pub mod mesh;
pub mod solver;

pub use error::{Error, Result};
