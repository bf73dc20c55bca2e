//! Flat `key = value [unit]` build configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::diophantine::AlphaSpec;
use crate::numerics::{Dyadic, PrecisionLadder};

use super::HarnessError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuildConfig {
    pub alpha: AlphaSpec,
    /// Cocycle levels.
    pub n_max: u32,
    /// Cylinder depth of the atom measure.
    pub depth: usize,
    /// Atom radius `|i| <= i_max`.
    pub i_max: i64,
    /// Depth budget for the disjointness search.
    pub d_max: usize,
    pub ladder: Vec<u32>,
    /// Bits for cocycle evaluation outside the measure.
    pub precision: u32,
    pub grid: usize,
    pub filler: Dyadic,
    pub tolerance: Dyadic,
    pub disjointness_range: u64,
    pub check_radius: i64,
    pub rotation_iters: u64,
    pub samples: usize,
    pub seed: u64,
    pub max_atoms: usize,
    /// Atom tables larger than this are elided from the descriptor and
    /// regenerated on load.
    pub inline_atoms: usize,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            alpha: AlphaSpec::Golden,
            n_max: 4,
            depth: 6,
            i_max: 32,
            d_max: 24,
            ladder: PrecisionLadder::default().rungs().to_vec(),
            precision: 256,
            grid: 1024,
            filler: Dyadic::pow2(-30),
            tolerance: Dyadic::pow2(-40),
            disjointness_range: 16,
            check_radius: 8,
            rotation_iters: 10_000,
            samples: 50,
            seed: 1,
            max_atoms: 1 << 22,
            inline_atoms: 1 << 16,
        }
    }
}

/// Key, unit, and whether the key is known.
const KEYS: &[(&str, &str)] = &[
    ("alpha", ""),
    ("n_max", "levels"),
    ("depth", "digits"),
    ("i_max", "rotations"),
    ("d_max", "digits"),
    ("ladder", "bits"),
    ("precision", "bits"),
    ("grid", "points"),
    ("filler", "mass"),
    ("tolerance", "circle"),
    ("disjointness_range", "rotations"),
    ("check_radius", "rotations"),
    ("rotation_iters", "iterations"),
    ("samples", "points"),
    ("seed", ""),
    ("max_atoms", "atoms"),
    ("inline_atoms", "atoms"),
];

fn unit_of(key: &str) -> Option<&'static str> {
    KEYS.iter().find(|(k, _)| *k == key).map(|(_, u)| *u)
}

/// `2^-30`, `2^5`, or any dyadic literal.
fn parse_dyadic(s: &str) -> Result<Dyadic, String> {
    if let Some(e) = s.strip_prefix("2^") {
        return e.parse::<i64>().map(Dyadic::pow2).map_err(|e| e.to_string());
    }
    s.parse::<Dyadic>().map_err(|e| e.0)
}

fn show_dyadic(d: &Dyadic) -> String {
    if d.mantissa() == &1.into() {
        format!("2^{}", d.exponent())
    } else {
        d.to_string()
    }
}

fn num<T: FromStr>(key: &str, v: &str) -> Result<T, HarnessError> {
    v.parse().map_err(|_| HarnessError::Config(format!("{key}: cannot parse `{v}`")))
}

impl BuildConfig {
    /// Set one key from its text value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), HarnessError> {
        let v = value.trim();
        match key {
            "alpha" => self.alpha = v.parse().map_err(|e: crate::diophantine::DiophantineError| HarnessError::from(e))?,
            "n_max" => self.n_max = num(key, v)?,
            "depth" => self.depth = num(key, v)?,
            "i_max" => self.i_max = num(key, v)?,
            "d_max" => self.d_max = num(key, v)?,
            "ladder" => {
                self.ladder = v.split(',').map(|r| num(key, r.trim())).collect::<Result<_, _>>()?;
            }
            "precision" => self.precision = num(key, v)?,
            "grid" => self.grid = num(key, v)?,
            "filler" => self.filler = parse_dyadic(v).map_err(|e| HarnessError::Config(format!("filler: {e}")))?,
            "tolerance" => self.tolerance = parse_dyadic(v).map_err(|e| HarnessError::Config(format!("tolerance: {e}")))?,
            "disjointness_range" => self.disjointness_range = num(key, v)?,
            "check_radius" => self.check_radius = num(key, v)?,
            "rotation_iters" => self.rotation_iters = num(key, v)?,
            "samples" => self.samples = num(key, v)?,
            "seed" => self.seed = num(key, v)?,
            "max_atoms" => self.max_atoms = num(key, v)?,
            "inline_atoms" => self.inline_atoms = num(key, v)?,
            _ => return Err(HarnessError::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// All keys and their text values, in file order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let ladder = self.ladder.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
        vec![
            ("alpha", self.alpha.to_string()),
            ("n_max", self.n_max.to_string()),
            ("depth", self.depth.to_string()),
            ("i_max", self.i_max.to_string()),
            ("d_max", self.d_max.to_string()),
            ("ladder", ladder),
            ("precision", self.precision.to_string()),
            ("grid", self.grid.to_string()),
            ("filler", show_dyadic(&self.filler)),
            ("tolerance", show_dyadic(&self.tolerance)),
            ("disjointness_range", self.disjointness_range.to_string()),
            ("check_radius", self.check_radius.to_string()),
            ("rotation_iters", self.rotation_iters.to_string()),
            ("samples", self.samples.to_string()),
            ("seed", self.seed.to_string()),
            ("max_atoms", self.max_atoms.to_string()),
            ("inline_atoms", self.inline_atoms.to_string()),
        ]
    }

    pub fn to_map(&self) -> BTreeMap<String, String> {
        self.entries().into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }

    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self, HarnessError> {
        let mut c = BuildConfig::default();
        for (k, v) in map {
            c.set(k, v)?;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn ladder(&self) -> PrecisionLadder {
        PrecisionLadder::new(self.ladder.clone())
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let positive = [
            ("n_max", self.n_max as u64),
            ("depth", self.depth as u64),
            ("i_max", self.i_max.max(0) as u64),
            ("d_max", self.d_max as u64),
            ("precision", self.precision as u64),
            ("grid", self.grid as u64),
            ("disjointness_range", self.disjointness_range),
            ("rotation_iters", self.rotation_iters),
            ("samples", self.samples as u64),
            ("max_atoms", self.max_atoms as u64),
        ];
        if let Some((k, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(HarnessError::Config(format!("{k} must be at least 1")));
        }
        if self.depth < 2 {
            return Err(HarnessError::Config("depth must be at least 2 for the refinement stages".into()));
        }
        if self.ladder.is_empty() || self.ladder.windows(2).any(|w| w[0] >= w[1]) {
            return Err(HarnessError::Config("ladder must be strictly increasing and non-empty".into()));
        }
        if !self.filler.is_positive() || self.filler >= Dyadic::one() {
            return Err(HarnessError::Config("filler must lie in (0, 1)".into()));
        }
        if !self.tolerance.is_positive() {
            return Err(HarnessError::Config("tolerance must be positive".into()));
        }
        // Every bump of φ_{n_max} must sit on a translate that carries atoms.
        if self.n_max >= 62 || self.i_max < 1i64 << self.n_max {
            return Err(HarnessError::Config(format!("i_max must be at least 2^n_max = 2^{}", self.n_max)));
        }
        if self.check_radius < 0 || self.check_radius > self.i_max {
            return Err(HarnessError::Config("check_radius must lie in [0, i_max]".into()));
        }
        Ok(())
    }
}

impl fmt::Display for BuildConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.entries() {
            match unit_of(k) {
                Some("") | None => writeln!(f, "{k} = {v}")?,
                Some(u) => writeln!(f, "{k} = {v} [{u}]")?,
            }
        }
        Ok(())
    }
}

impl FromStr for BuildConfig {
    type Err = HarnessError;

    /// Lines `key = value [unit]`; `#` starts a comment. Missing keys keep
    /// their defaults. A unit, when given, must match the key's.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut c = BuildConfig::default();
        for (no, raw) in s.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, rest) = line
                .split_once('=')
                .ok_or_else(|| HarnessError::Config(format!("line {}: expected `key = value`", no + 1)))?;
            let k = k.trim();
            let expected = unit_of(k).ok_or_else(|| HarnessError::Config(format!("line {}: unknown key `{k}`", no + 1)))?;
            let rest = rest.trim();
            let (value, unit) = match rest.strip_suffix(']').and_then(|r| r.rsplit_once('[')) {
                Some((v, u)) => (v.trim(), Some(u.trim())),
                None => (rest, None),
            };
            if let Some(u) = unit {
                if u != expected {
                    return Err(HarnessError::Config(format!("line {}: {k} is in [{expected}], not [{u}]", no + 1)));
                }
            }
            c.set(k, value)?;
        }
        c.validate()?;
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn defaults_round_trip() {
        let c = BuildConfig::default();
        let text = c.to_string();
        assert!(text.contains("n_max = 4 [levels]"));
        assert!(text.contains("filler = 2^-30 [mass]"));
        assert_eq!(text.parse::<BuildConfig>().unwrap(), c);
        assert_eq!(BuildConfig::from_map(&c.to_map()).unwrap(), c);
    }

    #[test]
    fn comments_units_and_errors() {
        let c: BuildConfig = "# test\nalpha = cf:2,1,3,1\ndepth = 4 [digits]  # shallow\n".parse().unwrap();
        assert_eq!(c.depth, 4);
        assert!(!c.alpha.is_golden());
        assert!("depth = 4 [bits]".parse::<BuildConfig>().is_err());
        assert!("bogus = 1".parse::<BuildConfig>().is_err());
        assert!("n_max = 0".parse::<BuildConfig>().is_err());
        assert!("tolerance = 0".parse::<BuildConfig>().is_err());
        assert!("ladder = 128,64".parse::<BuildConfig>().is_err());
        assert!("n_max = 6 [levels]".parse::<BuildConfig>().is_err());
        assert!(matches!("alpha = 0.5".parse::<BuildConfig>(), Err(HarnessError::Diophantine(_))));
    }

    proptest! {
        #[test]
        fn arbitrary_configs_round_trip(n in 1u32..8, d in 2usize..9, extra in 0i64..64, e in 1i64..60, seed in any::<u64>()) {
            let i = (1i64 << n) + extra;
            let c = BuildConfig {
                n_max: n,
                depth: d,
                i_max: i,
                check_radius: i.min(8),
                filler: Dyadic::pow2(-e),
                seed,
                ..BuildConfig::default()
            };
            prop_assert_eq!(c.to_string().parse::<BuildConfig>().unwrap(), c);
        }
    }
}
