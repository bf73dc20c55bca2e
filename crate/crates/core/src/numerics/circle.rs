//! Points, arcs and distances on the circle `R/Z`.

use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Serialize};

use super::dyadic::Dyadic;
use super::real::PrecisionReal;

/// A point of `R/Z`, stored as an enclosure whose lower end lies in `[0, 1)`.
///
/// The upper end may reach past 1 when the enclosure straddles the wrap
/// point; every circle operation below treats such a point as the union of
/// the two pieces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CirclePoint {
    rep: PrecisionReal,
}

impl CirclePoint {
    pub fn new(x: PrecisionReal) -> Self {
        let n = x.floor_lo();
        if n == BigInt::from(0) {
            return CirclePoint { rep: x };
        }
        let shift = Dyadic::from_int(-n);
        CirclePoint { rep: PrecisionReal::new(x.lo() + &shift, x.hi() + &shift) }
    }

    pub fn from_dyadic(x: Dyadic) -> Self {
        Self::new(PrecisionReal::exact(x))
    }

    pub fn zero() -> Self {
        CirclePoint { rep: PrecisionReal::zero() }
    }

    pub fn rep(&self) -> &PrecisionReal {
        &self.rep
    }

    pub fn into_rep(self) -> PrecisionReal {
        self.rep
    }

    pub fn straddles_wrap(&self) -> bool {
        self.rep.hi() >= &Dyadic::one()
    }

    /// `R^k x = x + k·alpha`.
    pub fn rotate(&self, alpha: &PrecisionReal, k: i64, prec: u32) -> CirclePoint {
        if k == 0 {
            return self.clone();
        }
        CirclePoint::new(self.rep.add(&alpha.mul_int(k, prec), prec))
    }

    /// Translate by an arbitrary real.
    pub fn shift(&self, t: &PrecisionReal, prec: u32) -> CirclePoint {
        CirclePoint::new(self.rep.add(t, prec))
    }
}

/// Closed arc `[left, left + length]` on the circle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircleArc {
    left: CirclePoint,
    length: PrecisionReal,
}

impl CircleArc {
    /// Panics unless `0 <= length` and `length.hi < 1`.
    pub fn new(left: CirclePoint, length: PrecisionReal) -> Self {
        assert!(!length.lo().is_negative(), "negative arc length");
        assert!(length.hi() < &Dyadic::one(), "arc length must stay below 1");
        CircleArc { left, length }
    }

    pub fn left(&self) -> &CirclePoint {
        &self.left
    }

    pub fn length(&self) -> &PrecisionReal {
        &self.length
    }

    /// Distance from a point to the arc, using the upper length bound (the
    /// arc as a superset of every arc the enclosure describes).
    pub fn dist_to_point(&self, y: &CirclePoint, prec: u32) -> PrecisionReal {
        let half = self.length.hi().shl(-1);
        let center = self.left.rep().add(&PrecisionReal::exact(half.clone()), prec);
        let d = circle_dist(&CirclePoint::new(center), y, prec);
        d.sub(&PrecisionReal::exact(half), prec).clamp_nonneg()
    }

    /// Certified membership: `Some(true)` inside, `Some(false)` outside,
    /// `None` when the enclosures do not separate the point from the ends.
    pub fn contains(&self, y: &CirclePoint, prec: u32) -> Option<bool> {
        let d = self.dist_to_point(y, prec);
        if d.is_positive() {
            Some(false)
        } else if d.hi().is_zero() {
            Some(true)
        } else {
            None
        }
    }
}

/// `||t||`: distance from `t` to the nearest integer. Exact on dyadic
/// endpoints; never exceeds 1/2.
pub fn dist_to_integers(t: &PrecisionReal) -> PrecisionReal {
    let half = Dyadic::pow2(-1);
    let n = Dyadic::from_int((&t.mid() + &half).floor());
    let u = PrecisionReal::new(t.lo() - &n, t.hi() - &n);
    let a = u.abs();
    let one = Dyadic::one();
    // f(s) = min(s, 1 - s) is unimodal on [0, 1] with peak at 1/2.
    let f = |s: &Dyadic| Dyadic::min(s, &(&one - s));
    let lo = Dyadic::max(&Dyadic::min(&f(a.lo()), &f(a.hi())), &Dyadic::zero());
    let hi = if a.lo() <= &half && &half <= a.hi() {
        half
    } else {
        Dyadic::max(&f(a.lo()), &f(a.hi()))
    };
    PrecisionReal::new(lo, hi)
}

/// Enclosure of the circle metric `min(|a-b|, 1-|a-b|)`.
pub fn circle_dist(a: &CirclePoint, b: &CirclePoint, prec: u32) -> PrecisionReal {
    dist_to_integers(&b.rep().sub(a.rep(), prec))
}

/// Enclosure of `dist(x, (1/q)Z) = ||q x|| / q`.
pub fn dist_to_grid(x: &PrecisionReal, q: &BigUint, prec: u32) -> PrecisionReal {
    assert!(*q >= BigUint::from(1u32), "grid spacing needs q >= 1");
    let qi = BigInt::from(q.clone());
    let scaled = x.mul_int(qi.clone(), prec + q.bits() as u32);
    dist_to_integers(&scaled).div_int(qi, prec)
}
