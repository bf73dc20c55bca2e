//! The function `p` with `p(q)·dist(nα, (1/q)Z) >= 1` for all `1 <= n <= q`.

use std::collections::BTreeMap;
use std::sync::RwLock;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::alpha::{bits_of, convergents, expand_interval, Alpha};
use super::DiophantineError;
use crate::numerics::{dist_to_grid, dist_to_integers, PrecisionLadder, PrecisionReal};

/// `alpha` together with a lazily filled table of `p(q)`.
#[derive(Debug)]
pub struct ApproximationProfile {
    alpha: Alpha,
    ladder: PrecisionLadder,
    p_table: RwLock<BTreeMap<BigUint, BigUint>>,
}

impl Clone for ApproximationProfile {
    fn clone(&self) -> Self {
        ApproximationProfile {
            alpha: self.alpha.clone(),
            ladder: self.ladder.clone(),
            p_table: RwLock::new(self.p_table.read().unwrap().clone()),
        }
    }
}

impl ApproximationProfile {
    pub fn new(alpha: Alpha) -> Self {
        Self::with_ladder(alpha, PrecisionLadder::default())
    }

    /// The ladder rungs are used as guard bits on top of the precision the
    /// size of `q` already demands.
    pub fn with_ladder(alpha: Alpha, ladder: PrecisionLadder) -> Self {
        ApproximationProfile { alpha, ladder, p_table: RwLock::new(BTreeMap::new()) }
    }

    pub fn alpha(&self) -> &Alpha {
        &self.alpha
    }

    pub fn ladder(&self) -> &PrecisionLadder {
        &self.ladder
    }

    /// Snapshot of every tabulated `(q, p(q))`.
    pub fn table(&self) -> Vec<(BigUint, BigUint)> {
        self.p_table.read().unwrap().iter().map(|(q, p)| (q.clone(), p.clone())).collect()
    }

    /// Memoized `p(q)`. Concurrent fills of one key compute the same value.
    pub fn p(&self, q: &BigUint) -> Result<BigUint, DiophantineError> {
        assert!(!q.is_zero(), "p(q) needs q >= 1");
        if let Some(v) = self.p_table.read().unwrap().get(q) {
            return Ok(v.clone());
        }
        let v = self.compute_p(q)?;
        let mut t = self.p_table.write().unwrap();
        let stored = t.entry(q.clone()).or_insert_with(|| v.clone());
        debug_assert_eq!(*stored, v);
        Ok(stored.clone())
    }

    // p(q) = ceil(q / min_{n<=q} ||n q alpha||). The minimum of ||n beta|| over
    // 1 <= n <= q sits at the largest convergent denominator of beta that
    // does not exceed q.
    fn compute_p(&self, q: &BigUint) -> Result<BigUint, DiophantineError> {
        let qb = bits_of(q);
        let qi = BigInt::from(q.clone());
        for &guard in self.ladder.rungs() {
            // p(q) can be of size q^2 and must be pinned to an integer.
            let prec = 4 * qb + guard;
            let a = self.alpha.enclosure(prec + qb);
            let beta = a.mul_int(qi.clone(), prec + qb);
            let k = beta.floor_lo();
            if beta.hi().floor() != k {
                continue;
            }
            let kr = BigRational::from_integer(k);
            let lo = beta.lo().to_rational() - &kr;
            let hi = beta.hi().to_rational() - &kr;
            let ex = expand_interval(&lo, &hi, usize::MAX, |den| den > q);
            if ex.exhausted {
                continue;
            }
            let best = convergents(&ex.quotients)
                .into_iter()
                .map(|(_, den)| den)
                .filter(|den| den <= q)
                .max()
                .unwrap_or_else(BigUint::one);
            let n = BigInt::from(best * q);
            let d = dist_to_integers(&a.mul_int(n, prec + 2 * qb));
            if !d.is_positive() {
                continue;
            }
            let ratio = PrecisionReal::from_int(qi.clone()).div(&d, prec).expect("positive distance");
            if let Some(c) = ratio.ceil_certain() {
                return Ok(c.to_biguint().expect("p is positive"));
            }
        }
        Err(DiophantineError::PrecisionExhausted { q: q.clone() })
    }
}

/// `p(q)` for the profile's `alpha`, memoized in the profile.
pub fn build_p(profile: &ApproximationProfile, q: &BigUint) -> Result<BigUint, DiophantineError> {
    profile.p(q)
}

/// Direct evaluation of `max_{1<=n<=q} ceil(1 / dist(nα, (1/q)Z))`, one `n`
/// at a time. Costs `O(q)` interval evaluations; meant for small `q`.
pub fn p_by_enumeration(alpha: &Alpha, q: u64, prec: u32) -> Option<BigUint> {
    let qq = BigUint::from(q);
    let a = alpha.enclosure(prec + 64);
    let mut best = BigUint::one();
    for n in 1..=q {
        let x = a.mul_int(n, prec + 64);
        let d = dist_to_grid(&x, &qq, prec);
        let c = PrecisionReal::one().div(&d, prec)?.ceil_certain()?;
        best = best.max(c.to_biguint()?);
    }
    Some(best)
}

/// Finite-window witness for `c_p(x)`.
#[derive(Clone, Debug)]
pub struct CpEstimate {
    /// Running minimum of `p(q)·dist(x, (1/q)Z)` over the window.
    pub witness: PrecisionReal,
    /// A `q` whose value overlaps the minimum (the earliest such on ties).
    pub argmin: BigUint,
    pub window: Vec<BigUint>,
}

/// Minimum of `p(q)·dist(x, (1/q)Z)` over the `window` consecutive values
/// of `q` ending at `q_max`.
pub fn estimate_c_p(
    x: &PrecisionReal,
    profile: &ApproximationProfile,
    q_max: &BigUint,
    window: u64,
) -> Result<CpEstimate, DiophantineError> {
    assert!(*q_max >= BigUint::from(2u32), "q_max must be at least 2");
    let start = if *q_max > BigUint::from(window) { q_max - window + 1u32 } else { BigUint::one() };
    let mut qs = Vec::new();
    let mut q = start;
    while q <= *q_max {
        qs.push(q.clone());
        q += 1u32;
    }
    estimate_c_p_at(x, profile, &qs)
}

/// The same witness over an arbitrary list of `q` values.
pub fn estimate_c_p_at(
    x: &PrecisionReal,
    profile: &ApproximationProfile,
    qs: &[BigUint],
) -> Result<CpEstimate, DiophantineError> {
    assert!(!qs.is_empty(), "empty window");
    let mut best: Option<(PrecisionReal, BigUint)> = None;
    for q in qs {
        let p = profile.p(q)?;
        let prec = 128 + 2 * bits_of(q);
        let v = dist_to_grid(x, q, prec).mul_int(BigInt::from(p), prec);
        best = Some(match best {
            None => (v, q.clone()),
            Some((b, arg)) => {
                // Overlapping values keep the earlier q.
                if v.hi() < b.lo() {
                    (v.min(&b), q.clone())
                } else {
                    (b.min(&v), arg)
                }
            }
        });
    }
    let (witness, argmin) = best.unwrap();
    Ok(CpEstimate { witness, argmin, window: qs.to_vec() })
}
