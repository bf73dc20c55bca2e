//! Depth-`d` covers of the Cantor set and the fair-coin measure on it.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::sequence::DigitSequence;
use crate::numerics::{CircleArc, CirclePoint, Dyadic, PrecisionReal};

/// Digits `(ε_1, ..., ε_d)`; the point is `Σ ε_n / q_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CylinderCode {
    digits: Vec<bool>,
}

impl CylinderCode {
    pub fn new(digits: Vec<bool>) -> Self {
        CylinderCode { digits }
    }

    /// Code of arc `index` in a depth-`d` cover, `ε_1` being the most
    /// significant bit.
    pub fn from_index(index: u64, d: usize) -> Self {
        assert!(d <= 63 && index < (1u64 << d), "index {index} out of range for depth {d}");
        CylinderCode { digits: (0..d).map(|j| (index >> (d - 1 - j)) & 1 == 1).collect() }
    }

    pub fn index(&self) -> u64 {
        self.digits.iter().fold(0, |acc, &b| (acc << 1) | b as u64)
    }

    pub fn depth(&self) -> usize {
        self.digits.len()
    }

    pub fn digits(&self) -> &[bool] {
        &self.digits
    }

    pub fn truncate(&self, d: usize) -> CylinderCode {
        CylinderCode { digits: self.digits[..d.min(self.digits.len())].to_vec() }
    }

    /// Exact `Σ_{n<=d} ε_n / q_n` as a numerator over `q_d`.
    pub fn numerator(&self, seq: &DigitSequence) -> BigUint {
        let d = self.depth();
        let qd = seq.q(d);
        let mut num = BigUint::zero();
        for (j, &e) in self.digits.iter().enumerate() {
            if e {
                num += qd / seq.q(j + 1);
            }
        }
        num
    }
}

impl fmt::Display for CylinderCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.digits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for CylinderCode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(format!("bad digit `{c}` in cylinder code")),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(CylinderCode::new)
    }
}

impl Serialize for CylinderCode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CylinderCode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// The `2^d` arcs `[Σ ε_n/q_n, Σ ε_n/q_n + t̂(d)]`, sorted left to right.
#[derive(Clone, Debug)]
pub struct CantorCover {
    depth: usize,
    q_d: BigUint,
    numerators: Vec<BigUint>,
    lefts: Vec<PrecisionReal>,
    t_hat: Dyadic,
    prec: u32,
}

impl CantorCover {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.numerators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.numerators.is_empty()
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// Upper bound on every cylinder length.
    pub fn t_hat(&self) -> &Dyadic {
        &self.t_hat
    }

    pub fn mass_per_cylinder(&self) -> Dyadic {
        Dyadic::pow2(-(self.depth as i64))
    }

    /// Exact left end of arc `k`.
    pub fn left_exact(&self, k: usize) -> BigRational {
        BigRational::new(self.numerators[k].clone().into(), self.q_d.clone().into())
    }

    /// Left end of arc `k`, exact when `q_d` is a power of two.
    pub fn left(&self, k: usize) -> &PrecisionReal {
        &self.lefts[k]
    }

    pub fn lefts(&self) -> &[PrecisionReal] {
        &self.lefts
    }

    pub fn code(&self, k: usize) -> CylinderCode {
        CylinderCode::from_index(k as u64, self.depth)
    }

    /// The same arcs with left ends recomputed at `prec` bits, if that is
    /// finer. `t̂` is kept, so the arcs themselves do not move.
    pub fn refined(&self, prec: u32) -> CantorCover {
        if prec <= self.prec {
            return self.clone();
        }
        let qi = BigInt::from(self.q_d.clone());
        let lefts = self.numerators.iter().map(|n| PrecisionReal::from_ratio(&BigInt::from(n.clone()), &qi, prec)).collect();
        CantorCover { lefts, prec, ..self.clone() }
    }

    pub fn arc(&self, k: usize) -> CircleArc {
        CircleArc::new(CirclePoint::new(self.lefts[k].clone()), PrecisionReal::exact(self.t_hat.clone()))
    }

    pub fn arcs(&self) -> Vec<CircleArc> {
        (0..self.len()).map(|k| self.arc(k)).collect()
    }

    /// Smallest certified gap between consecutive arcs (including the wrap
    /// from the last arc back to the first).
    pub fn min_internal_gap(&self) -> PrecisionReal {
        let n = self.len();
        let t = PrecisionReal::exact(self.t_hat.clone());
        let mut best: Option<PrecisionReal> = None;
        for k in 0..n {
            let next = if k + 1 < n {
                self.lefts[k + 1].clone()
            } else {
                self.lefts[0].add(&PrecisionReal::one(), self.prec)
            };
            let g = next.sub(&self.lefts[k], self.prec).sub(&t, self.prec);
            best = Some(match best {
                None => g,
                Some(b) => b.min(&g),
            });
        }
        best.unwrap()
    }
}

/// Depth-`d` cover with geometry at `bits(q_{d+1}) + guard` bits.
pub fn cover(seq: &DigitSequence, d: usize, guard: u32) -> CantorCover {
    assert!(d < seq.len(), "cover depth {d} needs q_{} in the sequence", d + 1);
    assert!(d <= 30, "cover depth {d} is too large to enumerate");
    let prec = seq.geometry_precision(d, guard);
    let q_d = seq.q(d).clone();
    let steps: Vec<BigUint> = (1..=d).map(|j| &q_d / seq.q(j)).collect();
    let mut numerators = vec![BigUint::zero()];
    for step in &steps {
        let mut next = Vec::with_capacity(numerators.len() * 2);
        for v in &numerators {
            next.push(v.clone());
            next.push(v + step);
        }
        numerators = next;
    }
    let qi = BigInt::from(q_d.clone());
    let lefts = numerators
        .iter()
        .map(|n| PrecisionReal::from_ratio(&BigInt::from(n.clone()), &qi, prec))
        .collect();
    CantorCover { depth: d, q_d, numerators, lefts, t_hat: seq.t_hat(d, prec), prec }
}

/// Enclosure `[Σ_{n<=d} ε_n/q_n, Σ_{n<=d} ε_n/q_n + t̂(d)]` of the point of
/// the Cantor set whose code begins with `code`.
pub fn point_from_code(seq: &DigitSequence, code: &CylinderCode, d: usize, prec: u32) -> CirclePoint {
    let c = code.truncate(d);
    assert_eq!(c.depth(), d, "code shorter than requested depth");
    let left = PrecisionReal::from_ratio(&c.numerator(seq).into(), &seq.q(d).clone().into(), prec);
    let t = seq.t_hat(d, prec);
    CirclePoint::new(PrecisionReal::new(left.lo().clone(), (left.hi() + &t).round(prec, crate::numerics::Round::Up)))
}

/// `μ0[0, x]` for the fair-coin law, with error at most `2^-d`.
pub fn mu0_cdf(seq: &DigitSequence, x: &CirclePoint, d: usize) -> PrecisionReal {
    assert!(d < seq.len(), "mu0_cdf depth {d} needs q_{}", d + 1);
    let prec = seq.geometry_precision(d, 64);
    let t: Vec<BigRational> = (0..=d).map(|j| seq.t_hat(j, prec).to_rational()).collect();
    let one = Dyadic::one();
    let lo = cdf_bounds(seq, &t, &x.rep().lo().to_rational(), d).0;
    let hi = if x.rep().hi() >= &one {
        one
    } else {
        cdf_bounds(seq, &t, &x.rep().hi().to_rational(), d).1
    };
    PrecisionReal::new(lo, hi)
}

// Descend through the cylinders containing x, adding the mass of every
// cylinder lying entirely to its left.
fn cdf_bounds(seq: &DigitSequence, t: &[BigRational], x: &BigRational, d: usize) -> (Dyadic, Dyadic) {
    let mut mass = Dyadic::zero();
    let mut l = BigRational::zero();
    if *x < BigRational::zero() {
        return (mass.clone(), mass);
    }
    for (j, tj) in t.iter().enumerate().take(d + 1).skip(1) {
        let half = Dyadic::pow2(-(j as i64));
        let right_child = &l + BigRational::new(1.into(), seq.q(j).clone().into());
        if *x >= right_child {
            mass = &mass + &half;
            l = right_child;
        } else if *x > &l + tj {
            mass = &mass + &half;
            return (mass.clone(), mass);
        }
    }
    if *x > &l + &t[d] {
        let m = &mass + &Dyadic::pow2(-(d as i64));
        return (m.clone(), m);
    }
    let top = &mass + &Dyadic::pow2(-(d as i64));
    (mass, top)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Decision;
    use proptest::prelude::*;

    fn golden() -> DigitSequence {
        DigitSequence::golden(6).unwrap()
    }

    #[test]
    fn depth_zero_is_one_arc() {
        let c = cover(&golden(), 0, 64);
        assert_eq!(c.len(), 1);
        assert_eq!(c.left(0), &PrecisionReal::zero());
        assert!((c.t_hat().to_f64() - 0.126953132).abs() < 1e-9);
    }

    #[test]
    fn golden_depth_one_arcs() {
        let c = cover(&golden(), 1, 64);
        assert_eq!(c.len(), 2);
        assert_eq!(c.left(1).mid_f64(), 0.125);
        // 2^-9 + 2^-27 + 2^-81 + ... summed directly.
        let oracle: f64 = [9, 27, 81].iter().map(|&e| 2f64.powi(-e)).sum();
        assert!((c.t_hat().to_f64() - oracle).abs() < 1e-15);
        assert!((oracle - 1.953133e-3).abs() < 1e-9);
    }

    #[test]
    fn arcs_are_disjoint_and_nested() {
        let s = golden();
        for d in 0..=5 {
            let c = cover(&s, d, 64);
            if d > 0 {
                assert!(c.min_internal_gap().is_positive(), "d={d}");
            }
            if d > 0 {
                let parent = cover(&s, d - 1, 64);
                for k in 0..c.len() {
                    let p = k >> 1;
                    let (l, pl) = (c.left_exact(k), parent.left_exact(p));
                    assert!(l >= pl);
                    assert!(l + c.t_hat().to_rational() <= pl + parent.t_hat().to_rational());
                }
            }
        }
    }

    #[test]
    fn general_sequence_cover() {
        let q = [1u32, 3, 42, 5292].iter().map(|&v| BigUint::from(v)).collect();
        let s = DigitSequence::from_parts(q, super::super::Provenance::GeneralConstruction).unwrap();
        let c = cover(&s, 2, 64);
        assert_eq!(c.len(), 4);
        assert!(c.min_internal_gap().is_positive());
        assert!(c.left(3).contains_rational(&BigRational::new(15.into(), 42.into())));
    }

    #[test]
    fn code_points() {
        let s = golden();
        let zero = point_from_code(&s, &"000".parse().unwrap(), 3, 256);
        assert_eq!(zero.rep().lo(), &Dyadic::zero());
        let p = point_from_code(&s, &"100".parse().unwrap(), 1, 256);
        assert_eq!(p.rep().lo().to_f64(), 0.125);
        assert!((p.rep().width_f64() - s.tail(1, 64).mid_f64()).abs() < 1e-15);
        let p = point_from_code(&s, &"11".parse().unwrap(), 2, 256);
        assert_eq!(p.rep().lo().to_f64(), 0.125 + 1.0 / 512.0);
    }

    #[test]
    fn mu0_landmarks() {
        let s = golden();
        let x = |v: f64| CirclePoint::from_dyadic(Dyadic::from_f64(v).unwrap());
        assert_eq!(mu0_cdf(&s, &x(0.0), 5).hi(), &Dyadic::pow2(-5));
        // Gap after the first depth-1 cylinder.
        let gap_mid = (cover(&s, 1, 64).t_hat().to_f64() + 0.125) / 2.0;
        assert_eq!(mu0_cdf(&s, &x(gap_mid), 5), PrecisionReal::exact(Dyadic::pow2(-1)));
        assert_eq!(mu0_cdf(&s, &x(0.5), 5), PrecisionReal::one());
    }

    #[test]
    fn codes_round_trip() {
        for d in 0..8 {
            for i in 0..(1u64 << d) {
                let c = CylinderCode::from_index(i, d);
                assert_eq!(c.index(), i);
                assert_eq!(c.to_string().parse::<CylinderCode>().unwrap(), c);
            }
        }
    }

    proptest! {
        #[test]
        fn mu0_monotone_and_within_one_cylinder(a in 0u32..1_000_000, b in 0u32..1_000_000) {
            let s = golden();
            let (a, b) = (a.min(b), a.max(b));
            let x = |v: u32| CirclePoint::from_dyadic(Dyadic::from_f64(v as f64 / 1_000_000.0 * 0.2).unwrap());
            let fa = mu0_cdf(&s, &x(a), 4);
            let fb = mu0_cdf(&s, &x(b), 4);
            prop_assert!(fa.lo() <= fb.lo() && fa.hi() <= fb.hi());
            prop_assert!(fa.width() <= Dyadic::pow2(-4));
            prop_assert_ne!(crate::numerics::compare(&fb, &fa), Decision::Less);
        }
    }
}
