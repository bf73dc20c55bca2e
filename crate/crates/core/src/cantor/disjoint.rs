//! Certified separation of rotated copies of the Cantor set.
//!
//! `R^n cover(d)` and `R^m cover(d)` are disjoint exactly when
//! `(m-n)α` stays farther than `t̂(d)` from every difference of two cover
//! left ends. Those differences are the sums `Σ_{j<=d} δ_j/q_j` with
//! `δ_j ∈ {-1, 0, 1}`, searched depth first with a branch-and-bound cut.

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use super::sequence::DigitSequence;
use super::CantorError;
use crate::diophantine::Alpha;
use crate::numerics::{dist_to_integers, Dyadic, PrecisionLadder, PrecisionReal, Round};

/// Separation found for one difference `k = m - n`.
#[derive(Clone, Debug, Serialize)]
pub struct DifferenceSeparation {
    pub k: i64,
    pub depth: usize,
    /// `min_s ||kα - s|| - t̂(depth)`, certified positive.
    pub gap: PrecisionReal,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairSeparation {
    pub n: i64,
    pub m: i64,
    pub depth: usize,
    pub gap: PrecisionReal,
}

#[derive(Clone, Debug, Serialize)]
pub struct DisjointnessReport {
    pub range: u64,
    pub d_max: usize,
    pub differences: Vec<DifferenceSeparation>,
    pub pairs: Vec<PairSeparation>,
    pub min_gap: PrecisionReal,
    pub max_depth_used: usize,
}

/// Enclosure of `min_{s ∈ S_d} ||x - s||` where `S_d` is the set of
/// differences of depth-`d` cover left ends.
pub fn min_dist_to_differences(x: &PrecisionReal, seq: &DigitSequence, d: usize, prec: u32) -> PrecisionReal {
    // rest[j] bounds Σ_{j<n<=d} 1/q_n from above.
    let mut rest = vec![Dyadic::zero(); d + 1];
    for j in (0..d).rev() {
        let inv = Dyadic::from_ratio(&BigInt::from(1), &seq.q(j + 1).clone().into(), prec, Round::Up);
        rest[j] = (&rest[j + 1] + &inv).round(prec, Round::Up);
    }
    let steps: Vec<PrecisionReal> = (1..=d)
        .map(|j| PrecisionReal::from_ratio(&BigInt::from(1), &seq.q(j).clone().into(), prec))
        .collect();
    let mut best: Option<PrecisionReal> = None;
    search(x, &steps, &rest, 0, PrecisionReal::zero(), prec, &mut best);
    best.expect("search visits at least one leaf")
}

fn search(
    x: &PrecisionReal,
    steps: &[PrecisionReal],
    rest: &[Dyadic],
    j: usize,
    s: PrecisionReal,
    prec: u32,
    best: &mut Option<PrecisionReal>,
) {
    let dist = dist_to_integers(&x.sub(&s, prec));
    if j == steps.len() {
        *best = Some(match best.take() {
            None => dist,
            Some(b) => b.min(&dist),
        });
        return;
    }
    if let Some(b) = best.as_ref() {
        if &(dist.lo() - &rest[j]) > b.hi() {
            return;
        }
    }
    let step = &steps[j];
    search(x, steps, rest, j + 1, s.clone(), prec, best);
    search(x, steps, rest, j + 1, s.add(step, prec), prec, best);
    search(x, steps, rest, j + 1, s.sub(step, prec), prec, best);
}

/// `min_s ||kα - s|| - t̂(d)` for one difference and depth, evaluated up
/// the precision ladder until its sign is certain.
pub fn difference_gap(
    alpha: &Alpha,
    seq: &DigitSequence,
    k: i64,
    d: usize,
    ladder: &PrecisionLadder,
) -> PrecisionReal {
    let mut last = None;
    for &guard in ladder.rungs() {
        let k_bits = 64 - k.unsigned_abs().leading_zeros();
        let prec = seq.geometry_precision(d, guard) + k_bits;
        let x = alpha.enclosure(prec + 64).mul_int(k, prec);
        let t = PrecisionReal::exact(seq.t_hat(d, prec));
        let g = min_dist_to_differences(&x, seq, d, prec).sub(&t, prec);
        if g.is_positive() || g.is_negative() {
            return g;
        }
        last = Some(g);
    }
    last.unwrap()
}

/// Smallest depth `<= d_max` at which difference `k` separates.
pub fn separate_difference(
    alpha: &Alpha,
    seq: &DigitSequence,
    k: i64,
    d_max: usize,
    ladder: &PrecisionLadder,
) -> Option<DifferenceSeparation> {
    assert!(k != 0, "a set always meets itself");
    let top = d_max.min(seq.len() - 1);
    (0..=top).find_map(|d| {
        let gap = difference_gap(alpha, seq, k, d, ladder);
        gap.is_positive().then_some(DifferenceSeparation { k, depth: d, gap })
    })
}

/// Certify `R^n C ∩ R^m C = ∅` for all `-range <= n < m <= range`.
pub fn verify_translate_disjointness(
    alpha: &Alpha,
    seq: &DigitSequence,
    range: u64,
    d_max: usize,
    ladder: &PrecisionLadder,
) -> Result<DisjointnessReport, CantorError> {
    assert!(range >= 1, "range must be at least 1");
    let ks: Vec<i64> = (1..=2 * range as i64).collect();
    let found: Vec<Option<DifferenceSeparation>> =
        ks.par_iter().map(|&k| separate_difference(alpha, seq, k, d_max, ladder)).collect();
    let r = range as i64;
    let mut differences = Vec::with_capacity(found.len());
    for (k, f) in ks.iter().zip(found) {
        match f {
            Some(s) => differences.push(s),
            None => return Err(CantorError::DisjointnessUndecided { n: -r, m: -r + k }),
        }
    }
    let mut pairs = Vec::new();
    for n in -r..=r {
        for m in n + 1..=r {
            let s = &differences[(m - n - 1) as usize];
            pairs.push(PairSeparation { n, m, depth: s.depth, gap: s.gap.clone() });
        }
    }
    let min_gap = differences.iter().map(|s| s.gap.clone()).reduce(|a, b| a.min(&b)).unwrap();
    let max_depth_used = differences.iter().map(|s| s.depth).max().unwrap();
    Ok(DisjointnessReport { range, d_max, differences, pairs, min_gap, max_depth_used })
}
