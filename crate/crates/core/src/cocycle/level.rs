//! One level `φ_n` of the cocycle: signed tent bumps on `2^(n+1)` rotated
//! copies of a neighbourhood of the Cantor set.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::cantor::{cover, difference_gap, separate_difference, CantorCover, CantorError, DigitSequence};
use crate::diophantine::Alpha;
use crate::numerics::{CircleArc, CirclePoint, Dyadic, PrecisionLadder, PrecisionReal, Round};

/// Significant bits kept in `ε_n`.
const EPSILON_BITS: u32 = 32;

/// `(3/4)^n`, exact.
pub fn amplitude(n: u32) -> Dyadic {
    Dyadic::new(BigInt::from(3).pow(n), -2 * n as i64)
}

/// Output of [`choose_epsilon`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpsilonChoice {
    pub depth: usize,
    pub epsilon: Dyadic,
    /// Smallest certified gap between the rotated covers at `depth`.
    pub gap: PrecisionReal,
}

/// Common depth at which the covers `R^t cover(d)`, `-2^n <= t < 2^n`,
/// separate, and `ε_n = gap/3` rounded down.
pub fn choose_epsilon(
    n: u32,
    alpha: &Alpha,
    seq: &DigitSequence,
    d_max: usize,
    ladder: &PrecisionLadder,
) -> Result<EpsilonChoice, CantorError> {
    let span = 1i64 << (n + 1);
    let mut depth = 0;
    for k in 1..span {
        match separate_difference(alpha, seq, k, d_max, ladder) {
            Some(s) => depth = depth.max(s.depth),
            None => return Err(CantorError::DisjointnessUndecided { n: -(span / 2), m: -(span / 2) + k }),
        }
    }
    // Covers are nested, so every difference stays separated at the common
    // depth; the gaps are re-certified there.
    let mut gap: Option<PrecisionReal> = None;
    for k in 1..span {
        let g = difference_gap(alpha, seq, k, depth, ladder);
        if !g.is_positive() {
            return Err(CantorError::DisjointnessUndecided { n: -(span / 2), m: -(span / 2) + k });
        }
        gap = Some(match gap {
            None => g,
            Some(b) => b.min(&g),
        });
    }
    let gap = gap.expect("at least one difference");
    let epsilon = Dyadic::div(gap.lo(), &Dyadic::from_int(3), EPSILON_BITS, Round::Down);
    Ok(EpsilonChoice { depth, epsilon, gap })
}

/// Geometry of `φ_n`.
#[derive(Clone, Debug)]
pub struct BumpLevel {
    n: u32,
    amplitude: Dyadic,
    cover: CantorCover,
    arcs: Vec<CircleArc>,
    epsilon: Dyadic,
    gap: PrecisionReal,
}

impl BumpLevel {
    pub fn new(n: u32, seq: &DigitSequence, choice: EpsilonChoice) -> Self {
        assert!(n >= 1, "levels start at 1");
        assert!(choice.epsilon.is_positive(), "epsilon must be positive");
        let cover = cover(seq, choice.depth, 64);
        let arcs = cover.arcs();
        BumpLevel { n, amplitude: amplitude(n), cover, arcs, epsilon: choice.epsilon, gap: choice.gap }
    }

    /// The same level with its cover ends enclosed at `prec` bits.
    pub fn refined(&self, prec: u32) -> Self {
        let cover = self.cover.refined(prec);
        let arcs = cover.arcs();
        BumpLevel { cover, arcs, ..self.clone() }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn amplitude(&self) -> &Dyadic {
        &self.amplitude
    }

    pub fn cover_depth(&self) -> usize {
        self.cover.depth()
    }

    pub fn cover(&self) -> &CantorCover {
        &self.cover
    }

    pub fn epsilon(&self) -> &Dyadic {
        &self.epsilon
    }

    pub fn gap(&self) -> &PrecisionReal {
        &self.gap
    }

    /// Translates run over `-2^n <= t < 2^n`.
    pub fn translate_range(&self) -> (i64, i64) {
        (-(1i64 << self.n), (1i64 << self.n) - 1)
    }

    /// Slope bound of the tent, `(3/4)^n / ε_n`.
    pub fn lipschitz(&self) -> f64 {
        self.amplitude.to_f64() / self.epsilon.to_f64()
    }

    /// Distance from `y` to the cover. Only arcs next to `y` in circular
    /// order can be nearest, so a handful of candidates suffice.
    pub fn dist_to_cover(&self, y: &CirclePoint, prec: u32) -> PrecisionReal {
        let lefts = self.cover.lefts();
        let n = lefts.len();
        let i0 = lefts.partition_point(|l| l.hi() <= y.rep().lo());
        let i1 = lefts.partition_point(|l| l.lo() <= y.rep().hi());
        let mut cands: Vec<usize> = vec![0, n - 1];
        let lo = i0.saturating_sub(2);
        let hi = (i1 + 1).min(n - 1);
        cands.extend(lo..=hi);
        cands.sort_unstable();
        cands.dedup();
        cands
            .into_iter()
            .map(|k| self.arcs[k].dist_to_point(y, prec))
            .reduce(|a, b| a.min(&b))
            .unwrap()
    }

    /// `f(y) = (3/4)^n · max(0, 1 - dist(y, cover)/ε_n)`.
    pub fn tent(&self, y: &CirclePoint, prec: u32) -> PrecisionReal {
        let d = self.dist_to_cover(y, prec);
        if d.lo() >= &self.epsilon {
            return PrecisionReal::zero();
        }
        let eps = PrecisionReal::exact(self.epsilon.clone());
        let r = PrecisionReal::one().sub(&d.div(&eps, prec).expect("epsilon > 0"), prec);
        r.clamp_nonneg().mul_dyadic(&self.amplitude, prec)
    }

    /// `φ_n(x)`: `-f(R^{-t}x)` near `R^t C` for `0 <= t < 2^n`, `+f(R^{-t}x)`
    /// for `-2^n <= t < 0`, zero elsewhere.
    pub fn value(&self, x: &CirclePoint, alpha: &PrecisionReal, prec: u32) -> PrecisionReal {
        let (t0, t1) = self.translate_range();
        let mut acc = PrecisionReal::zero();
        for t in t0..=t1 {
            let f = self.tent(&x.rotate(alpha, -t, prec), prec);
            if f.is_exact() && f.lo().is_zero() {
                continue;
            }
            acc = if t >= 0 { acc.sub(&f, prec) } else { acc.add(&f, prec) };
        }
        acc
    }
}

/// [`BumpLevel::value`] as a free function.
pub fn bump_value(level: &BumpLevel, x: &CirclePoint, alpha: &PrecisionReal, prec: u32) -> PrecisionReal {
    level.value(x, alpha, prec)
}
