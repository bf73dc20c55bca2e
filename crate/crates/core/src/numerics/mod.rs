//! Adaptive-precision real and circle arithmetic.
//!
//! Every quantity in the construction is an enclosure with dyadic endpoints.
//! Comparisons either resolve rigorously or come back [`Decision::Undecided`].

mod circle;
mod decide;
mod dyadic;
mod real;

pub use circle::{circle_dist, dist_to_grid, dist_to_integers, CircleArc, CirclePoint};
pub use decide::{compare, decide, Decision, PrecisionLadder};
pub use dyadic::{Dyadic, ParseDyadicError, Round};
pub use real::{ratio, PrecisionReal};
