//! Exact rational scalars, vectors and matrices, the saturated-linear
//! activation, and hard attention.

mod attention;
mod linalg;
mod rat;

pub use attention::{attention, hardmax, score, Attended, ScoringKind};
pub(crate) use linalg::require_square;
pub use linalg::{affine, RatMat, RatVec};
pub use rat::{sigma, Rat};
