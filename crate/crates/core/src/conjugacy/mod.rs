//! The measure `μ`, the conjugacy `h` with `h_* Leb = μ`, and the map
//! `F = h^{-1} ∘ R ∘ h`.

mod checks;
mod descriptor;
mod measure;

use thiserror::Error;

use crate::cantor::CantorError;

pub use checks::{
    f_derivative_check, fundamental_domain_report, grid_point, pushforward_check, rotation_number_direct,
    rotation_number_estimate, DerivativeReport, DerivativeStage, FundamentalDomainReport, PushforwardCheck,
    RotationEstimate,
};
pub use descriptor::{ConjugacyDescriptor, Segment};
pub use measure::{assemble_mu, check_separated, raw_masses, Atom, MeasureParams, WeightedAtomMeasure};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConjugacyError {
    #[error(transparent)]
    Cantor(#[from] CantorError),
    #[error("{atoms} atoms exceed the budget of {limit}")]
    BudgetExceeded { atoms: usize, limit: usize },
    #[error("arcs of atoms {first:?} and {second:?} overlap")]
    AtomsOverlap { first: (i64, u64), second: (i64, u64) },
    #[error("inverse at x = {x} off by {error}, above tolerance")]
    ToleranceNotMet { x: f64, error: f64 },
}
