//! Exact and Monte-Carlo evaluation of trace statistics of Haar-random
//! orthogonal and symplectic matrices, together with explicit bounds on
//! their distance from a Gaussian vector.

pub mod bounds;
pub mod detform;
pub mod error;
pub mod fredholm;
pub mod groups;
pub mod linalg;
pub mod moments;
pub mod sampling;
pub mod special;
pub mod symbols;

pub use error::{Error, Result};
pub use groups::{group_spec, GroupKind, GroupSpec, Variant};
