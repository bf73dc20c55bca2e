//! Build, persist, verify, and export constructions.

mod build;
mod config;
mod export;
mod file;
mod suites;

use serde_json::json;
use thiserror::Error;

use crate::cantor::CantorError;
use crate::conjugacy::ConjugacyError;
use crate::diophantine::DiophantineError;

pub use build::{build, build_cached, cache_dir, Construction, CACHE_ENV};
pub use config::BuildConfig;
pub use export::{export_csv, ExportKind};
pub use file::{atom_digest, inspect, load, load_str, save, to_json, DESCRIPTOR_VERSION};
pub use suites::{run_suites, Check, Status, Suite, VerificationReport};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Diophantine(#[from] DiophantineError),
    #[error(transparent)]
    Cantor(#[from] CantorError),
    #[error(transparent)]
    Conjugacy(#[from] ConjugacyError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("descriptor: {0}")]
    Format(String),
    #[error("descriptor version `{0}` not supported")]
    Version(String),
    #[error("regenerated atom table does not match the recorded digest")]
    DigestMismatch,
    #[error("unknown export `{0}` (expected phi, F, derivative, cdf)")]
    UnknownExport(String),
}

fn diophantine_code(e: &DiophantineError) -> (i32, &'static str) {
    match e {
        DiophantineError::Parse(_) => (2, "Parse"),
        DiophantineError::RationalInput(_) => (2, "RationalInput"),
        DiophantineError::NotCertifiable { .. } => (2, "NotCertifiable"),
        DiophantineError::PrecisionExhausted { .. } => (3, "PrecisionExhausted"),
    }
}

fn cantor_code(e: &CantorError) -> (i32, &'static str) {
    match e {
        CantorError::Diophantine(d) => diophantine_code(d),
        CantorError::DepthTooLarge { .. } => (1, "DepthTooLarge"),
        CantorError::DisjointnessUndecided { .. } => (3, "DisjointnessUndecided"),
        CantorError::InvalidSequence(_) => (1, "InvalidSequence"),
    }
}

impl HarnessError {
    /// Exit code and a stable error name: 1 failure, 2 usage, 3 undecided.
    pub fn classify(&self) -> (i32, &'static str) {
        match self {
            HarnessError::Config(_) => (2, "Config"),
            HarnessError::Diophantine(d) => diophantine_code(d),
            HarnessError::Cantor(c) => cantor_code(c),
            HarnessError::Conjugacy(c) => match c {
                ConjugacyError::Cantor(e) => cantor_code(e),
                ConjugacyError::BudgetExceeded { .. } => (1, "BudgetExceeded"),
                ConjugacyError::AtomsOverlap { .. } => (3, "AtomsOverlap"),
                ConjugacyError::ToleranceNotMet { .. } => (3, "ToleranceNotMet"),
            },
            HarnessError::Io(_) => (2, "Io"),
            HarnessError::Format(_) => (1, "Format"),
            HarnessError::Version(_) => (1, "Version"),
            HarnessError::DigestMismatch => (1, "DigestMismatch"),
            HarnessError::UnknownExport(_) => (2, "UnknownExport"),
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.classify().0
    }

    /// One-line machine-readable form.
    pub fn to_json(&self) -> String {
        let (code, kind) = self.classify();
        json!({ "error": kind, "exit_code": code, "message": self.to_string() }).to_string()
    }
}
