//! Continued fractions of `alpha`, the approximation function `p` and
//! finite-window witnesses for the constant `c_p`.

mod alpha;
mod profile;

use num_bigint::BigUint;
use thiserror::Error;

pub use alpha::{convergents, expand_alpha, Alpha, AlphaSpec, ContinuedFraction};
pub use profile::{build_p, estimate_c_p, estimate_c_p_at, p_by_enumeration, ApproximationProfile, CpEstimate};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiophantineError {
    #[error("cannot parse alpha: {0}")]
    Parse(String),
    #[error("`{0}` denotes a rational number")]
    RationalInput(String),
    #[error("alpha `{spec}` not certifiable at quotient {index}: {reason}")]
    NotCertifiable { spec: String, index: usize, reason: String },
    #[error("precision exhausted while computing p({q})")]
    PrecisionExhausted { q: BigUint },
}
