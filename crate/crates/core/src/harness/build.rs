//! The full pipeline from a config to a conjugacy.

use std::path::PathBuf;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use super::{file, BuildConfig, HarnessError};
use crate::cantor::{build_digit_sequence, DigitSequence};
use crate::cocycle::{choose_epsilon, CocycleStack, EpsilonChoice};
use crate::conjugacy::{assemble_mu, ConjugacyDescriptor, MeasureParams, WeightedAtomMeasure};
use crate::diophantine::{Alpha, ApproximationProfile};

/// Directory for cached descriptors; the only environment variable read.
pub const CACHE_ENV: &str = "FUNDOMAIN_CACHE_DIR";

#[derive(Clone, Debug)]
pub struct Construction {
    pub config: BuildConfig,
    pub alpha: Alpha,
    pub profile: ApproximationProfile,
    pub seq: DigitSequence,
    pub choices: Vec<EpsilonChoice>,
    pub stack: CocycleStack,
    pub conjugacy: ConjugacyDescriptor,
}

impl Construction {
    pub fn measure_params(&self, depth: usize) -> MeasureParams {
        measure_params(&self.config, depth)
    }

    /// The atom measure at another depth, from the same cocycle.
    pub fn measure_at(&self, depth: usize) -> Result<WeightedAtomMeasure, HarnessError> {
        Ok(assemble_mu(&self.stack, &self.seq, &self.measure_params(depth))?)
    }

    pub fn conjugacy_at(&self, depth: usize) -> Result<ConjugacyDescriptor, HarnessError> {
        let m = self.measure_at(depth)?;
        Ok(ConjugacyDescriptor::new(&self.alpha, m, self.config.tolerance.clone())?)
    }
}

pub(crate) fn measure_params(config: &BuildConfig, depth: usize) -> MeasureParams {
    let mut p = MeasureParams::new(depth, config.i_max);
    p.filler = config.filler.clone();
    p.max_atoms = config.max_atoms;
    p
}

/// Digits `q_0..q_{depth+2}`: enough for the cover at `depth` and one
/// finer level.
pub(crate) fn digit_sequence(config: &BuildConfig, profile: &ApproximationProfile) -> Result<DigitSequence, HarnessError> {
    let n = config.depth + 2;
    Ok(if config.alpha.is_golden() { DigitSequence::golden(n)? } else { build_digit_sequence(profile, n)? })
}

/// Everything up to, not including, the atom measure.
pub(crate) fn geometry(config: &BuildConfig) -> Result<(Alpha, ApproximationProfile, DigitSequence, Vec<EpsilonChoice>), HarnessError> {
    config.validate()?;
    let alpha = Alpha::new(config.alpha.clone())?;
    let ladder = config.ladder();
    let profile = ApproximationProfile::with_ladder(alpha.clone(), ladder.clone());
    let seq = digit_sequence(config, &profile)?;
    let choices = (1..=config.n_max)
        .into_par_iter()
        .map(|n| choose_epsilon(n, &alpha, &seq, config.d_max, &ladder))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((alpha, profile, seq, choices))
}

pub fn build(config: &BuildConfig) -> Result<Construction, HarnessError> {
    let (alpha, profile, seq, choices) = geometry(config)?;
    let stack = CocycleStack::from_choices(&alpha, &seq, choices.clone(), config.precision);
    let m = assemble_mu(&stack, &seq, &measure_params(config, config.depth))?;
    let conjugacy = ConjugacyDescriptor::new(&alpha, m, config.tolerance.clone())?;
    Ok(Construction { config: config.clone(), alpha, profile, seq, choices, stack, conjugacy })
}

pub fn cache_dir() -> Option<PathBuf> {
    std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from)
}

/// [`build`], reusing a descriptor stored under the cache directory when
/// one exists for the same config.
pub fn build_cached(config: &BuildConfig) -> Result<Construction, HarnessError> {
    let Some(dir) = cache_dir() else { return build(config) };
    let key = hex::encode(Sha256::digest(config.to_string().as_bytes()));
    let path = dir.join(format!("{key}.json"));
    if let Ok(text) = std::fs::read_to_string(&path) {
        if let Ok(c) = file::load_str(&text) {
            if c.config == *config {
                return Ok(c);
            }
        }
    }
    let c = build(config)?;
    std::fs::create_dir_all(&dir)?;
    std::fs::write(&path, file::to_json(&c)?)?;
    Ok(c)
}
