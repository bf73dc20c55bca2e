//! The summability constant `M` and the tails of `Σ_i exp(φ^{(i)})`.

use num_bigint::BigInt;
use serde::Serialize;

use crate::numerics::{Dyadic, PrecisionReal};

/// Terms below this are summed no further; the remainder is bounded.
const TERM_CUTOFF: f64 = 1e-15;

#[derive(Clone, Debug, Serialize)]
pub struct MBound {
    pub value: PrecisionReal,
    /// Number of explicitly summed terms.
    pub terms: usize,
    /// Bound used for the unsummed remainder.
    pub remainder: Dyadic,
}

/// `(3/2)^n · 3/4` as an exact dyadic.
fn decay_exponent(n: u32) -> Dyadic {
    Dyadic::new(BigInt::from(3).pow(n + 1), -(n as i64) - 2)
}

/// `2^{n+1} exp(-(3/4)(3/2)^n)`.
fn m_term(n: u32, prec: u32) -> PrecisionReal {
    PrecisionReal::exact(-&decay_exponent(n)).exp(prec).shl(n as i64 + 1)
}

/// Enclosure of `M = 1 + Σ_{n>=0} 2^{n+1} exp(-(3/4)(3/2)^n)`.
///
/// Once the ratio of consecutive terms is at most 1/2 it stays so (the
/// ratio `2 exp(-(3/8)(3/2)^n)` decreases), so the remainder after the
/// last summed term `t_N` is at most `2 t_{N+1}`.
pub fn bound_m(prec: u32) -> MBound {
    let mut sum = PrecisionReal::one();
    let mut n = 0u32;
    loop {
        let t = m_term(n, prec);
        let next = m_term(n + 1, prec);
        sum = sum.add(&t, prec);
        let ratio_ok = next.shl(1).hi() <= t.lo();
        if ratio_ok && next.hi().to_f64() < TERM_CUTOFF {
            let remainder = next.hi().shl(1);
            let value = PrecisionReal::new(sum.lo().clone(), (sum.hi() + &remainder).round(prec, crate::numerics::Round::Up));
            return MBound { value, terms: n as usize + 1, remainder };
        }
        n += 1;
    }
}

/// Number of `i` with `|i| > radius` in the dyadic block `2^n <= |i| < 2^{n+1}`.
fn block_count_beyond(n: u32, radius: u64) -> u64 {
    let lo = (1u64 << n).max(radius + 1);
    let hi = (1u64 << (n + 1)) - 1;
    if lo > hi {
        0
    } else {
        2 * (hi - lo + 1)
    }
}

/// Tail of the `M` series beyond `radius`: every `|i| > radius` in block
/// `n` contributes at most `exp(-(3/4)(3/2)^n)`.
pub fn m_block_tail(radius: u64, prec: u32) -> PrecisionReal {
    let mut sum = PrecisionReal::zero();
    let mut n = 0u32;
    loop {
        let count = block_count_beyond(n, radius);
        if count > 0 {
            let t = PrecisionReal::exact(-&decay_exponent(n)).exp(prec).mul_int(count, prec);
            sum = sum.add(&t, prec);
        }
        // Full blocks beyond n are the terms of the M series.
        let next = m_term(n + 1, prec);
        let halving = next.shl(1).hi() <= m_term(n, prec).lo();
        if count > 0 && halving && next.hi().to_f64() < TERM_CUTOFF {
            return sum.add(&PrecisionReal::new(Dyadic::zero(), next.hi().shl(1)), prec);
        }
        n += 1;
    }
}

/// Tail `Σ_{|i| > radius} exp(-4|i|(3/4)^{⌈log2 |i|⌉})`.
///
/// For a point of the Cantor set every level `l` with `2^l >= |i|` gives
/// `φ_l^{(i)} = -|i|(3/4)^l` and every other level is `<= 0`, so
/// `φ^{(i)} <= -|i| Σ_{l>=L} (3/4)^l = -4|i|(3/4)^L` with `L = ⌈log2 |i|⌉`.
/// The bound holds for the full, untruncated cocycle.
pub fn lemma_tail(radius: u64, prec: u32) -> PrecisionReal {
    assert!(radius >= 1, "radius must be positive");
    let mut sum = PrecisionReal::zero();
    // Block L holds 2^{L-1} < |i| <= 2^L.
    let mut l = 1u32;
    loop {
        let lo = ((1u64 << (l - 1)) + 1).max(radius + 1);
        let hi = 1u64 << l;
        if lo <= hi {
            // c = 4(3/4)^L; Σ_{i=lo}^{hi} e^{-ci} <= e^{-c lo} / (1 - e^{-c}).
            let c = Dyadic::new(BigInt::from(3).pow(l), 2 - 2 * l as i64);
            let first = PrecisionReal::exact(-(&c * &Dyadic::from_int(lo))).exp(prec);
            let q = PrecisionReal::exact(-&c).exp(prec);
            let denom = PrecisionReal::one().sub(&q, prec);
            let block = first.div(&denom, prec).expect("ratio below one").mul_int(2, prec);
            sum = sum.add(&block, prec);
            // Past L = 8 each block is far below half the previous one.
            if block.hi().to_f64() < 1e-30 && l > 8 {
                let rest = block.hi().clone();
                return PrecisionReal::new(sum.lo().clone(), (sum.hi() + &rest).round(prec, crate::numerics::Round::Up));
            }
        }
        l += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Oracle: plain f64 summation far past the cutoff.
    fn m_f64() -> f64 {
        1.0 + (0..40).map(|n| 2f64.powi(n + 1) * (-(0.75) * 1.5f64.powi(n)).exp()).sum::<f64>()
    }

    #[test]
    fn m_value() {
        let m = bound_m(128);
        assert!(m.value.lo().to_f64() > 1.0);
        let reference = m_f64();
        assert!(m.value.lo().to_f64() <= reference + 1e-12 && reference - 1e-12 <= m.value.hi().to_f64());
        assert!((m.value.mid_f64() - 6.9556).abs() < 1e-3, "{}", m.value);
        assert!(m.value.width_f64() < 1e-14);
        let first = 2.0 * (-0.75f64).exp();
        assert!((m_term(0, 128).mid_f64() - first).abs() < 1e-15);
    }

    #[test]
    fn block_tail_shrinks_and_matches_partial_sums() {
        let prev = m_block_tail(0, 128);
        let m = bound_m(128);
        // radius 0: all blocks, so M - 1 up to the remainder bounds.
        assert!((prev.mid_f64() - (m.value.mid_f64() - 1.0)).abs() < 1e-12);
        let mut last = prev.mid_f64();
        for r in [1u64, 3, 8, 16, 32, 64] {
            let t = m_block_tail(r, 128).mid_f64();
            assert!(t <= last);
            last = t;
        }
        assert!((m_block_tail(32, 128).mid_f64() - 0.2340).abs() < 1e-3);
    }

    #[test]
    fn lemma_tail_is_below_block_tail() {
        for r in [1u64, 4, 16, 32, 100] {
            let l = lemma_tail(r, 128);
            let b = m_block_tail(r, 128);
            assert!(l.hi() < b.lo(), "r={r}");
        }
        // Direct f64 summation of the same series.
        let direct: f64 = (33u64..5000)
            .map(|i| {
                let big_l = 64 - (i - 1).leading_zeros();
                2.0 * (-4.0 * i as f64 * 0.75f64.powi(big_l as i32)).exp()
            })
            .sum();
        let l = lemma_tail(32, 128);
        assert!((l.mid_f64() - direct).abs() <= 1e-3 * direct, "{} vs {direct}", l.mid_f64());
    }
}
