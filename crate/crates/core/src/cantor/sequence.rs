//! The digit sequence `q_0 = 1 < q_1 < ...` defining the Cantor set.

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::CantorError;
use crate::diophantine::ApproximationProfile;
use crate::numerics::{Dyadic, PrecisionReal, Round};

/// Integers in a built sequence may not exceed this many bits.
pub const MAX_DIGIT_BITS: u64 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// `q_k = 2^(3^k)`, the digits of the golden construction.
    GoldenFastPath,
    /// Minimal admissible multiples driven by `p`.
    GeneralConstruction,
}

/// `(q_0, ..., q_N)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigitSequence {
    q: Vec<BigUint>,
    provenance: Provenance,
}

/// Outcome of the four integer conditions on a sequence.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ConditionReport {
    pub starts_at_one: bool,
    pub divisibility: bool,
    pub ratio_at_most_third: bool,
    /// `2^n p(q_n) <= q_{n+1}` for every `n < N`; `None` if `p` could not
    /// be certified somewhere.
    pub p_condition: Option<bool>,
    /// Indices where the `p` condition fails.
    pub p_failures: Vec<usize>,
}

impl ConditionReport {
    pub fn all_hold(&self) -> bool {
        self.starts_at_one && self.divisibility && self.ratio_at_most_third && self.p_condition == Some(true)
    }
}

impl DigitSequence {
    /// Checks the three structural conditions and the size guard.
    pub fn from_parts(q: Vec<BigUint>, provenance: Provenance) -> Result<Self, CantorError> {
        let seq = DigitSequence { q, provenance };
        let r = seq.structural_conditions();
        if !(r.starts_at_one && r.divisibility && r.ratio_at_most_third) {
            return Err(CantorError::InvalidSequence(format!("{r:?}")));
        }
        Ok(seq)
    }

    /// `(1, 2^3, 2^9, ..., 2^(3^n))`.
    pub fn golden(n: usize) -> Result<Self, CantorError> {
        let mut q = vec![BigUint::one()];
        let mut e: u64 = 1;
        for k in 1..=n {
            e *= 3;
            if e > MAX_DIGIT_BITS {
                return Err(CantorError::DepthTooLarge { index: k, bits: e });
            }
            q.push(BigUint::one() << e as usize);
        }
        Ok(DigitSequence { q, provenance: Provenance::GoldenFastPath })
    }

    pub fn len(&self) -> usize {
        self.q.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.q.len() == 1
    }

    pub fn q(&self, n: usize) -> &BigUint {
        &self.q[n]
    }

    pub fn values(&self) -> &[BigUint] {
        &self.q
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn bits(&self, n: usize) -> u32 {
        self.q[n].bits() as u32
    }

    fn structural_conditions(&self) -> ConditionReport {
        let q = &self.q;
        ConditionReport {
            starts_at_one: q.first().is_some_and(One::is_one),
            divisibility: q.windows(2).all(|w| w[1].is_multiple_of(&w[0])),
            ratio_at_most_third: q.windows(2).all(|w| &w[0] * 3u32 <= w[1]),
            p_condition: None,
            p_failures: Vec::new(),
        }
    }

    /// All four conditions checked in exact integer arithmetic.
    pub fn check_conditions(&self, profile: &ApproximationProfile) -> ConditionReport {
        let mut r = self.structural_conditions();
        let mut ok = Some(true);
        for n in 0..self.len() {
            match profile.p(&self.q[n]) {
                Ok(p) => {
                    if (p << n) > self.q[n + 1] {
                        r.p_failures.push(n);
                        ok = Some(false);
                    }
                }
                Err(_) => {
                    ok = None;
                    break;
                }
            }
        }
        r.p_condition = ok;
        r
    }

    /// Exact `Σ_{d<n<=N} 1/q_n`.
    pub fn partial_tail(&self, d: usize) -> BigRational {
        let mut s = BigRational::zero();
        for n in d + 1..self.q.len() {
            s += BigRational::new(1.into(), self.q[n].clone().into());
        }
        s
    }

    /// Enclosure of the cylinder length `Σ_{n>d} 1/q_n`, using
    /// `Σ_{n>N} 1/q_n <= 1/(2 q_N)` for the unknown remainder.
    pub fn tail(&self, d: usize, prec: u32) -> PrecisionReal {
        assert!(d < self.len(), "tail({d}) needs q_{}", d + 1);
        let s = self.partial_tail(d);
        let last = BigRational::new(1.into(), (&self.q[self.len()] * 2u32).into());
        let lo = Dyadic::from_ratio(s.numer(), s.denom(), prec, Round::Down);
        let u = s + last;
        let hi = Dyadic::from_ratio(u.numer(), u.denom(), prec, Round::Up);
        PrecisionReal::new(lo, hi)
    }

    /// Dyadic upper bound `t̂(d)` for the cylinder length, built from the
    /// deepest digit upward so that `t̂(d) >= 1/q_{d+1} + t̂(d+1)` holds
    /// exactly. Covers built from it are nested.
    pub fn t_hat(&self, d: usize, prec: u32) -> Dyadic {
        assert!(d < self.len(), "t_hat({d}) needs q_{}", d + 1);
        let one = 1.into();
        let n = self.len();
        let mut t = Dyadic::from_ratio(&one, &(&self.q[n] * 2u32).into(), prec, Round::Up);
        for k in (d + 1..=n).rev() {
            let inv = Dyadic::from_ratio(&one, &self.q[k].clone().into(), prec, Round::Up);
            t = (&inv + &t).round(prec, Round::Up);
        }
        t
    }

    /// Working precision for geometry at depth `d`: the cylinder length is
    /// about `1/q_{d+1}`.
    pub fn geometry_precision(&self, d: usize, guard: u32) -> u32 {
        self.bits((d + 1).min(self.len())) + guard
    }
}

/// `q_{n+1}` is the smallest multiple of `q_n` with `q_{n+1} >= 3 q_n` and
/// `q_{n+1} >= 2^n p(q_n)`.
pub fn build_digit_sequence(profile: &ApproximationProfile, n: usize) -> Result<DigitSequence, CantorError> {
    assert!(n >= 1, "need at least one digit");
    let mut q = vec![BigUint::one()];
    for k in 0..n {
        let cur = &q[k];
        let p = profile.p(cur)?;
        let need = p << k;
        let (mult, rem) = need.div_rem(cur);
        let mult = if rem.is_zero() { mult } else { mult + 1u32 };
        let mult = mult.max(BigUint::from(3u32));
        let next = cur * mult;
        if next.bits() > MAX_DIGIT_BITS {
            return Err(CantorError::DepthTooLarge { index: k + 1, bits: next.bits() });
        }
        q.push(next);
    }
    Ok(DigitSequence { q, provenance: Provenance::GeneralConstruction })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diophantine::Alpha;

    #[test]
    fn golden_fast_path_digits() {
        let s = DigitSequence::golden(3).unwrap();
        let got: Vec<String> = s.values().iter().map(|v| v.to_string()).collect();
        assert_eq!(got, vec!["1", "8", "512", "134217728"]);
        assert_eq!(s.q(0), &BigUint::one());
    }

    #[test]
    fn general_golden_is_minimal_and_admissible() {
        let prof = ApproximationProfile::new(Alpha::golden());
        let s = build_digit_sequence(&prof, 6).unwrap();
        assert_eq!(s.q(1), &BigUint::from(3u32));
        let r = s.check_conditions(&prof);
        assert!(r.all_hold(), "{r:?}");
        // Minimality: dropping one multiple of q_n violates a condition.
        for n in 0..6 {
            let smaller = s.q(n + 1) - s.q(n);
            let p = prof.p(s.q(n)).unwrap();
            assert!(smaller < s.q(n) * 3u32 || smaller < (p << n));
        }
    }

    #[test]
    fn generic_alpha_sequence() {
        let prof = ApproximationProfile::new(Alpha::parse("cf:2,1,3,1").unwrap());
        let s = build_digit_sequence(&prof, 6).unwrap();
        assert!(s.check_conditions(&prof).all_hold());
    }

    #[test]
    fn tail_encloses_geometric_sum() {
        let s = DigitSequence::golden(4).unwrap();
        let t = s.tail(1, 128);
        // 2^-9 + 2^-27 + 2^-81 + ...
        let reference = 2f64.powi(-9) + 2f64.powi(-27) + 2f64.powi(-81);
        assert!((t.mid_f64() - reference).abs() < 1e-20);
        assert!(t.lo().to_f64() <= reference && reference <= t.hi().to_f64());
        assert!((s.tail(0, 64).mid_f64() - 0.127) .abs() < 1e-3);
    }

    #[test]
    fn invalid_sequences_are_rejected() {
        let v = |xs: &[u32]| xs.iter().map(|&x| BigUint::from(x)).collect::<Vec<_>>();
        assert!(DigitSequence::from_parts(v(&[1, 3, 9]), Provenance::GeneralConstruction).is_ok());
        assert!(DigitSequence::from_parts(v(&[1, 2, 8]), Provenance::GeneralConstruction).is_err());
        assert!(DigitSequence::from_parts(v(&[1, 3, 10]), Provenance::GeneralConstruction).is_err());
        assert!(DigitSequence::from_parts(v(&[2, 6]), Provenance::GeneralConstruction).is_err());
    }

    #[test]
    fn oversized_golden_depth_is_refused() {
        assert!(matches!(DigitSequence::golden(20), Err(CantorError::DepthTooLarge { .. })));
    }
}
