//! Explicit constants, theorem right-hand sides, pointwise bounds on the
//! characteristic function, and randomized checks of the auxiliary inequalities.

mod check;
mod l2;
mod lemmas;
mod pointwise;
mod theorem;

pub use check::{worst_of, Check, SuiteSummary};
pub use l2::{l2_distance_exact, L2Distance, L2Grid, L2_AGREEMENT};
pub use lemmas::*;
pub use pointwise::*;
pub use theorem::*;
