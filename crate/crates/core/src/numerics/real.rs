//! Interval enclosures with dyadic endpoints.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use super::dyadic::{Dyadic, Round};

/// A certified enclosure `[lo, hi]` of a real number.
///
/// Every operation takes a precision `prec` (significant bits kept in each
/// endpoint) and rounds outward, so the true value stays inside.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrecisionReal {
    lo: Dyadic,
    hi: Dyadic,
}

impl PrecisionReal {
    /// Panics if `lo > hi`.
    pub fn new(lo: Dyadic, hi: Dyadic) -> Self {
        assert!(lo <= hi, "inverted enclosure: {lo:?} > {hi:?}");
        PrecisionReal { lo, hi }
    }

    pub fn exact(v: Dyadic) -> Self {
        PrecisionReal { lo: v.clone(), hi: v }
    }

    pub fn zero() -> Self {
        Self::exact(Dyadic::zero())
    }

    pub fn one() -> Self {
        Self::exact(Dyadic::one())
    }

    pub fn from_int<T: Into<BigInt>>(v: T) -> Self {
        Self::exact(Dyadic::from_int(v))
    }

    /// Enclosure of `n / d` (d != 0).
    pub fn from_ratio(n: &BigInt, d: &BigInt, prec: u32) -> Self {
        let (n, d) = if d.is_negative() { (-n, -d) } else { (n.clone(), d.clone()) };
        PrecisionReal {
            lo: Dyadic::from_ratio(&n, &d, prec, Round::Down),
            hi: Dyadic::from_ratio(&n, &d, prec, Round::Up),
        }
    }

    pub fn from_rational(r: &BigRational, prec: u32) -> Self {
        Self::from_ratio(r.numer(), r.denom(), prec)
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn width(&self) -> Dyadic {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> Dyadic {
        (&self.lo + &self.hi).shl(-1)
    }

    pub fn mid_f64(&self) -> f64 {
        self.mid().to_f64()
    }

    pub fn width_f64(&self) -> f64 {
        self.width().to_f64()
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, v: &Dyadic) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn contains_rational(&self, r: &BigRational) -> bool {
        &self.lo.to_rational() <= r && r <= &self.hi.to_rational()
    }

    /// `other ⊆ self`.
    pub fn encloses(&self, other: &PrecisionReal) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn overlaps(&self, other: &PrecisionReal) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn hull(&self, other: &PrecisionReal) -> PrecisionReal {
        PrecisionReal {
            lo: Dyadic::min(&self.lo, &other.lo),
            hi: Dyadic::max(&self.hi, &other.hi),
        }
    }

    /// Certainly `> 0`.
    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    /// Certainly `< 0`.
    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    /// Outward rounding of both endpoints to `prec` bits.
    pub fn round(&self, prec: u32) -> Self {
        PrecisionReal { lo: self.lo.round(prec, Round::Down), hi: self.hi.round(prec, Round::Up) }
    }

    /// Widen by `±eps` (eps ≥ 0).
    pub fn inflate(&self, eps: &Dyadic) -> Self {
        PrecisionReal { lo: &self.lo - eps, hi: &self.hi + eps }
    }

    pub fn add(&self, o: &PrecisionReal, prec: u32) -> Self {
        PrecisionReal {
            lo: (&self.lo + &o.lo).round(prec, Round::Down),
            hi: (&self.hi + &o.hi).round(prec, Round::Up),
        }
    }

    pub fn sub(&self, o: &PrecisionReal, prec: u32) -> Self {
        PrecisionReal {
            lo: (&self.lo - &o.hi).round(prec, Round::Down),
            hi: (&self.hi - &o.lo).round(prec, Round::Up),
        }
    }

    pub fn neg(&self) -> Self {
        PrecisionReal { lo: -&self.hi, hi: -&self.lo }
    }

    pub fn mul(&self, o: &PrecisionReal, prec: u32) -> Self {
        let p = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = p.iter().min().unwrap();
        let hi = p.iter().max().unwrap();
        PrecisionReal { lo: lo.round(prec, Round::Down), hi: hi.round(prec, Round::Up) }
    }

    pub fn mul_dyadic(&self, k: &Dyadic, prec: u32) -> Self {
        self.mul(&PrecisionReal::exact(k.clone()), prec)
    }

    pub fn mul_int<T: Into<BigInt>>(&self, k: T, prec: u32) -> Self {
        self.mul(&PrecisionReal::from_int(k), prec)
    }

    /// Multiply by `2^k`; exact.
    pub fn shl(&self, k: i64) -> Self {
        PrecisionReal { lo: self.lo.shl(k), hi: self.hi.shl(k) }
    }

    /// `None` when the divisor enclosure contains zero.
    pub fn div(&self, o: &PrecisionReal, prec: u32) -> Option<Self> {
        if o.lo.signum() <= 0 && o.hi.signum() >= 0 {
            return None;
        }
        let cands = [(&self.lo, &o.lo), (&self.lo, &o.hi), (&self.hi, &o.lo), (&self.hi, &o.hi)];
        let lo = cands.iter().map(|(a, b)| Dyadic::div(a, b, prec, Round::Down)).min().unwrap();
        let hi = cands.iter().map(|(a, b)| Dyadic::div(a, b, prec, Round::Up)).max().unwrap();
        Some(PrecisionReal { lo, hi })
    }

    pub fn div_int<T: Into<BigInt>>(&self, k: T, prec: u32) -> Self {
        self.div(&PrecisionReal::from_int(k), prec).expect("division by integer zero")
    }

    pub fn abs(&self) -> Self {
        if self.lo.signum() >= 0 {
            self.clone()
        } else if self.hi.signum() <= 0 {
            self.neg()
        } else {
            PrecisionReal { lo: Dyadic::zero(), hi: Dyadic::max(&-&self.lo, &self.hi) }
        }
    }

    /// Pointwise `max(self, 0)`.
    pub fn clamp_nonneg(&self) -> Self {
        PrecisionReal {
            lo: Dyadic::max(&self.lo, &Dyadic::zero()),
            hi: Dyadic::max(&self.hi, &Dyadic::zero()),
        }
    }

    /// Pointwise minimum of two reals.
    pub fn min(&self, o: &PrecisionReal) -> Self {
        PrecisionReal { lo: Dyadic::min(&self.lo, &o.lo), hi: Dyadic::min(&self.hi, &o.hi) }
    }

    /// Pointwise maximum of two reals.
    pub fn max(&self, o: &PrecisionReal) -> Self {
        PrecisionReal { lo: Dyadic::max(&self.lo, &o.lo), hi: Dyadic::max(&self.hi, &o.hi) }
    }

    /// Enclosure of `exp(self)`.
    pub fn exp(&self, prec: u32) -> Self {
        let lo = exp_point(&self.lo, prec).lo;
        let hi = exp_point(&self.hi, prec).hi;
        PrecisionReal { lo, hi }
    }

    /// Largest integer `n` with `n <= x` for every `x` in the enclosure.
    pub fn floor_lo(&self) -> BigInt {
        self.lo.floor()
    }

    /// `Some(n)` when every point of the enclosure has ceiling `n`.
    pub fn ceil_certain(&self) -> Option<BigInt> {
        let a = self.lo.ceil();
        (a == self.hi.ceil()).then_some(a)
    }
}

fn exp_point(x: &Dyadic, prec: u32) -> PrecisionReal {
    if x.is_zero() {
        return PrecisionReal::one();
    }
    if x.is_negative() {
        let e = exp_point(&-x, prec + 4);
        return PrecisionReal::one().div(&e, prec).expect("exp is positive");
    }
    // Reduce to |r| <= 2^-8, sum the Taylor series, then square back up.
    let msb = x.msb().unwrap();
    let k = (msb + 9).max(0);
    let r = x.shl(-k);
    let w = prec + 24 + k as u32;
    let rr = PrecisionReal::exact(r.clone());
    let mut sum = PrecisionReal::one();
    let mut term = PrecisionReal::one();
    let cutoff = Dyadic::pow2(-(w as i64) - 8);
    let mut j: u64 = 1;
    loop {
        term = term.mul(&rr, w).div_int(j, w);
        sum = sum.add(&term, w);
        if term.hi() < &cutoff {
            break;
        }
        j += 1;
    }
    // Remainder after the last included term is at most 2 * next term <= 2 * term * r.
    let rem = (&term.hi * &r).shl(1).round(w, Round::Up);
    let mut e = PrecisionReal { lo: sum.lo.clone(), hi: &sum.hi + &rem };
    for _ in 0..k {
        e = e.mul(&e, w);
    }
    e.round(prec)
}

impl fmt::Debug for PrecisionReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.17e}, {:.17e}]", self.lo.to_f64(), self.hi.to_f64())
    }
}

impl fmt::Display for PrecisionReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.12e} ± {:.2e}", self.mid_f64(), self.width_f64() / 2.0)
    }
}

/// Exact `n/d` when `d` is a power of two, an enclosure otherwise.
pub fn ratio(n: i64, d: i64, prec: u32) -> PrecisionReal {
    PrecisionReal::from_ratio(&BigInt::from(n), &BigInt::from(d), prec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn exp_of_one_encloses_e() {
        let e = PrecisionReal::one().exp(200);
        // e = 2.71828182845904523536028747135266249775724709369995...
        let lo = r(2718281828459045235, 1_000_000_000_000_000_000);
        let hi = r(2718281828459045236, 1_000_000_000_000_000_000);
        assert!(e.lo().to_rational() > lo && e.hi().to_rational() < hi);
        assert!(e.width() < Dyadic::pow2(-190));
    }

    #[test]
    fn exp_negative_and_large() {
        let x = PrecisionReal::from_int(-3);
        let e = x.exp(128);
        assert!((e.mid_f64() - (-3f64).exp()).abs() < 1e-15);
        let y = PrecisionReal::from_int(150).exp(128);
        assert!(((y.mid_f64() / 150f64.exp()) - 1.0).abs() < 1e-14);
        assert!(y.width_f64() / y.mid_f64() < 1e-30);
    }

    #[test]
    fn division_containing_zero_is_refused() {
        let a = PrecisionReal::one();
        let z = PrecisionReal::new(Dyadic::from_int(-1), Dyadic::one());
        assert!(a.div(&z, 64).is_none());
    }

    proptest! {
        // Exact rational arithmetic is the independent oracle.
        #[test]
        fn arithmetic_is_sound(a in -1000i64..1000, b in 1i64..1000, c in -1000i64..1000, d in 1i64..1000, prec in 8u32..80) {
            let x = PrecisionReal::from_ratio(&a.into(), &b.into(), prec);
            let y = PrecisionReal::from_ratio(&c.into(), &d.into(), prec);
            let (xr, yr) = (r(a, b), r(c, d));
            prop_assert!(x.contains_rational(&xr));
            prop_assert!(x.add(&y, prec).contains_rational(&(&xr + &yr)));
            prop_assert!(x.sub(&y, prec).contains_rational(&(&xr - &yr)));
            prop_assert!(x.mul(&y, prec).contains_rational(&(&xr * &yr)));
            if c != 0 {
                let q = x.div(&y, prec).unwrap();
                prop_assert!(q.contains_rational(&(&xr / &yr)));
            }
        }

        #[test]
        fn refinement_never_widens(a in -1000i64..1000, b in 1i64..1000, p in 8u32..100) {
            let coarse = PrecisionReal::from_ratio(&a.into(), &b.into(), p);
            let fine = PrecisionReal::from_ratio(&a.into(), &b.into(), p + 16);
            prop_assert!(coarse.encloses(&fine));
            let e1 = coarse.exp(p);
            let e2 = fine.exp(p + 16);
            prop_assert!(e1.overlaps(&e2));
            prop_assert!(e2.width() <= e1.width());
        }

        #[test]
        fn exp_matches_f64(x in -20.0f64..20.0) {
            let d = Dyadic::from_f64(x).unwrap();
            let e = PrecisionReal::exact(d).exp(100);
            let rel = (e.mid_f64() - x.exp()).abs() / x.exp();
            prop_assert!(rel < 1e-14);
        }
    }
}
