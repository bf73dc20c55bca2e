//! The digit sequence, finite-depth covers of the Cantor set, the
//! fair-coin measure and translate disjointness.

mod cover;
mod disjoint;
mod sequence;

use thiserror::Error;

use crate::diophantine::DiophantineError;

pub use cover::{cover, mu0_cdf, point_from_code, CantorCover, CylinderCode};
pub use disjoint::{
    difference_gap, min_dist_to_differences, separate_difference, verify_translate_disjointness,
    DifferenceSeparation, DisjointnessReport, PairSeparation,
};
pub use sequence::{build_digit_sequence, ConditionReport, DigitSequence, Provenance, MAX_DIGIT_BITS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CantorError {
    #[error(transparent)]
    Diophantine(#[from] DiophantineError),
    #[error("digit q_{index} would need {bits} bits")]
    DepthTooLarge { index: usize, bits: u64 },
    #[error("translates R^{n} C and R^{m} C not separated within the depth budget")]
    DisjointnessUndecided { n: i64, m: i64 },
    #[error("invalid digit sequence: {0}")]
    InvalidSequence(String),
}
