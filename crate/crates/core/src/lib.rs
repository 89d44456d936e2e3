//! Exact computation of the unoriented C2-equivariant cobordism ring over F2,
//! truncated at a chosen degree.

pub mod context;
pub mod equivariant;
pub mod error;
pub mod extended;
pub mod fixed_points;
pub mod formal_group;
pub mod kernel;
pub mod omega;
pub mod stiefel_whitney;

pub use error::{Error, Result};
