//! Shared fixtures for the benchmarks.

use fundomain::harness::{build, BuildConfig, Construction};

/// A small golden construction that builds in well under a second.
pub fn small() -> Construction {
    build(&BuildConfig { depth: 4, i_max: 8, n_max: 3, check_radius: 4, ..BuildConfig::default() }).expect("small build")
}
