//! The JSON construction descriptor.

use std::collections::BTreeMap;
use std::path::Path;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::build::Construction;
use super::{BuildConfig, HarnessError};
use crate::cantor::{DigitSequence, Provenance};
use crate::cocycle::{CocycleStack, EpsilonChoice};
use crate::conjugacy::{assemble_mu, Atom, ConjugacyDescriptor, MeasureParams, WeightedAtomMeasure};
use crate::diophantine::{Alpha, ApproximationProfile};
use crate::numerics::{Dyadic, PrecisionReal};

pub const DESCRIPTOR_VERSION: &str = "fundomain-descriptor/1";

#[derive(Serialize, Deserialize)]
struct DigitsJson {
    provenance: Provenance,
    /// Decimal strings.
    q: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct LevelJson {
    n: u32,
    amplitude: Dyadic,
    #[serde(flatten)]
    choice: EpsilonChoice,
}

#[derive(Serialize, Deserialize)]
struct MeasureJson {
    depth: usize,
    i_max: i64,
    filler: Dyadic,
    mass_prec: u32,
    geometry_guard: u32,
    geometry_prec: u32,
    max_atoms: usize,
    t_hat: Dyadic,
    z: PrecisionReal,
    atom_count: usize,
    /// sha256 of the compact JSON atom array.
    atom_digest: String,
    /// `None` when elided; regenerated from the config on load.
    atoms: Option<Vec<Atom>>,
}

#[derive(Serialize, Deserialize)]
struct DescriptorJson {
    version: String,
    config: BTreeMap<String, String>,
    alpha: String,
    digits: DigitsJson,
    levels: Vec<LevelJson>,
    measure: MeasureJson,
}

pub fn atom_digest(atoms: &[Atom]) -> String {
    let bytes = serde_json::to_vec(atoms).expect("atoms serialize");
    hex::encode(Sha256::digest(&bytes))
}

fn describe(c: &Construction) -> DescriptorJson {
    let m = c.conjugacy.measure();
    let inline = m.atoms.len() <= c.config.inline_atoms;
    DescriptorJson {
        version: DESCRIPTOR_VERSION.to_string(),
        config: c.config.to_map(),
        alpha: c.alpha.spec().to_string(),
        digits: DigitsJson {
            provenance: c.seq.provenance(),
            q: c.seq.values().iter().map(BigUint::to_string).collect(),
        },
        levels: c
            .stack
            .levels()
            .iter()
            .zip(&c.choices)
            .map(|(l, ch)| LevelJson { n: l.n(), amplitude: l.amplitude().clone(), choice: ch.clone() })
            .collect(),
        measure: MeasureJson {
            depth: m.params.depth,
            i_max: m.params.i_max,
            filler: m.params.filler.clone(),
            mass_prec: m.params.mass_prec,
            geometry_guard: m.params.geometry_guard,
            geometry_prec: m.geometry_prec,
            max_atoms: m.params.max_atoms,
            t_hat: m.t_hat.clone(),
            z: m.z.clone(),
            atom_count: m.atoms.len(),
            atom_digest: atom_digest(&m.atoms),
            atoms: inline.then(|| m.atoms.clone()),
        },
    }
}

/// Pretty JSON with a trailing newline. Field order is fixed and maps are
/// sorted, so equal constructions give equal bytes.
pub fn to_json(c: &Construction) -> Result<String, HarnessError> {
    let mut s = serde_json::to_string_pretty(&describe(c)).map_err(|e| HarnessError::Format(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn save(c: &Construction, path: &Path) -> Result<(), HarnessError> {
    std::fs::write(path, to_json(c)?)?;
    Ok(())
}

pub fn load(path: &Path) -> Result<Construction, HarnessError> {
    load_str(&std::fs::read_to_string(path)?)
}

pub fn load_str(text: &str) -> Result<Construction, HarnessError> {
    let d: DescriptorJson = serde_json::from_str(text).map_err(|e| HarnessError::Format(e.to_string()))?;
    if d.version != DESCRIPTOR_VERSION {
        return Err(HarnessError::Version(d.version));
    }
    let config = BuildConfig::from_map(&d.config)?;
    let alpha = Alpha::parse(&d.alpha)?;
    if alpha.spec() != &config.alpha {
        return Err(HarnessError::Format("alpha differs from the config".into()));
    }
    let profile = ApproximationProfile::with_ladder(alpha.clone(), config.ladder());
    let q = d
        .digits
        .q
        .iter()
        .map(|s| s.parse::<BigUint>().map_err(|e| HarnessError::Format(format!("digit `{s}`: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let seq = DigitSequence::from_parts(q, d.digits.provenance)?;
    for (i, l) in d.levels.iter().enumerate() {
        if l.n != i as u32 + 1 {
            return Err(HarnessError::Format(format!("level {} out of order", l.n)));
        }
    }
    let choices: Vec<EpsilonChoice> = d.levels.into_iter().map(|l| l.choice).collect();
    let stack = CocycleStack::from_choices(&alpha, &seq, choices.clone(), config.precision);
    let mj = d.measure;
    let params = MeasureParams {
        depth: mj.depth,
        i_max: mj.i_max,
        filler: mj.filler,
        mass_prec: mj.mass_prec,
        geometry_guard: mj.geometry_guard,
        max_atoms: mj.max_atoms,
    };
    let atoms = match mj.atoms {
        Some(a) => a,
        None => {
            let fresh = assemble_mu(&stack, &seq, &params)?;
            if atom_digest(&fresh.atoms) != mj.atom_digest {
                return Err(HarnessError::DigestMismatch);
            }
            fresh.atoms
        }
    };
    if atoms.len() != mj.atom_count {
        return Err(HarnessError::Format(format!("{} atoms, header says {}", atoms.len(), mj.atom_count)));
    }
    let measure = WeightedAtomMeasure { params, t_hat: mj.t_hat, z: mj.z, atoms, geometry_prec: mj.geometry_prec };
    let conjugacy = ConjugacyDescriptor::new(&alpha, measure, config.tolerance.clone())?;
    Ok(Construction { config, alpha, profile, seq, choices, stack, conjugacy })
}

/// Short human-readable summary.
pub fn inspect(c: &Construction) -> BTreeMap<String, String> {
    let m = c.conjugacy.measure();
    let mut out = BTreeMap::new();
    out.insert("version".into(), DESCRIPTOR_VERSION.into());
    out.insert("alpha".into(), c.alpha.spec().to_string());
    out.insert("alpha.approx".into(), format!("{:.17}", c.alpha.enclosure(64).mid_f64()));
    out.insert("digits.provenance".into(), format!("{:?}", c.seq.provenance()));
    let bits: Vec<String> = c.seq.values().iter().map(|q| q.bits().to_string()).collect();
    out.insert("digits.bits".into(), bits.join(","));
    for (l, ch) in c.stack.levels().iter().zip(&c.choices) {
        out.insert(format!("level.{}.depth", l.n()), ch.depth.to_string());
        out.insert(format!("level.{}.epsilon", l.n()), format!("{:e}", ch.epsilon.to_f64()));
    }
    out.insert("measure.depth".into(), m.params.depth.to_string());
    out.insert("measure.i_max".into(), m.params.i_max.to_string());
    out.insert("measure.atoms".into(), m.atoms.len().to_string());
    out.insert("measure.z".into(), format!("{:.12}", m.z.mid_f64()));
    out.insert("measure.t_hat_log2".into(), m.t_hat.msb().map_or("-inf".into(), |e| e.to_string()));
    out.insert("measure.digest".into(), atom_digest(&m.atoms));
    out.insert("config.depth".into(), c.config.depth.to_string());
    out
}
