//! The conjugacy `h` and the map `F = h^{-1} ∘ R ∘ h`.
//!
//! Each atom's mass is spread uniformly over its arc `[location, +t̂]` and
//! the filler uniformly over the gaps, so `h^{-1}`, the distribution
//! function of the measure, is piecewise linear with exact dyadic knots.

use num_bigint::BigInt;

use super::measure::{check_separated, WeightedAtomMeasure};
use super::ConjugacyError;
use crate::diophantine::Alpha;
use crate::numerics::{Dyadic, PrecisionReal};

/// One linear piece of the distribution function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub y0: Dyadic,
    pub y1: Dyadic,
    /// Distribution function at `y0` and `y1`.
    pub h0: PrecisionReal,
    pub h1: PrecisionReal,
    pub slope: PrecisionReal,
    /// Index into the measure's atoms, `None` for filler.
    pub atom: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct ConjugacyDescriptor {
    alpha: Alpha,
    alpha_enc: PrecisionReal,
    measure: WeightedAtomMeasure,
    segments: Vec<Segment>,
    geo_prec: u32,
    mass_prec: u32,
    tol: Dyadic,
}

fn clamp(v: PrecisionReal, len: &Dyadic) -> PrecisionReal {
    v.max(&PrecisionReal::zero()).min(&PrecisionReal::exact(len.clone()))
}

impl ConjugacyDescriptor {
    /// Lay out the segments of `measure`. Fails if two arcs meet.
    pub fn new(alpha: &Alpha, measure: WeightedAtomMeasure, tol: Dyadic) -> Result<Self, ConjugacyError> {
        check_separated(&measure)?;
        let gp = measure.geometry_prec;
        let mp = measure.params.mass_prec;
        let t = &measure.t_hat;
        let covered = t * &Dyadic::from_int(measure.atoms.len() as i64);
        let gap_total = &Dyadic::one() - &covered;
        if !gap_total.is_positive() {
            return Err(ConjugacyError::AtomsOverlap { first: (0, 0), second: (0, 0) });
        }
        let density = PrecisionReal::exact(measure.params.filler.clone())
            .div(&PrecisionReal::exact(gap_total), mp)
            .expect("positive gap length");
        let mut segments = Vec::with_capacity(2 * measure.atoms.len() + 1);
        let mut y = Dyadic::zero();
        let mut h = PrecisionReal::zero();
        let push_gap = |segments: &mut Vec<Segment>, y: &mut Dyadic, h: &mut PrecisionReal, to: &Dyadic| {
            if to > y {
                let len = to - &*y;
                let h1 = h.add(&density.mul_dyadic(&len, mp), mp);
                segments.push(Segment {
                    y0: y.clone(),
                    y1: to.clone(),
                    h0: h.clone(),
                    h1: h1.clone(),
                    slope: density.clone(),
                    atom: None,
                });
                *y = to.clone();
                *h = h1;
            }
        };
        let t_enc = PrecisionReal::exact(t.clone());
        for (idx, a) in measure.atoms.iter().enumerate() {
            push_gap(&mut segments, &mut y, &mut h, &a.location);
            let y1 = &a.location + t;
            let h1 = h.add(&a.mass, mp);
            let slope = a.mass.div(&t_enc, mp).expect("t̂ > 0");
            segments.push(Segment { y0: y.clone(), y1: y1.clone(), h0: h.clone(), h1: h1.clone(), slope, atom: Some(idx) });
            y = y1;
            h = h1;
        }
        push_gap(&mut segments, &mut y, &mut h, &Dyadic::one());
        Ok(ConjugacyDescriptor {
            alpha: alpha.clone(),
            alpha_enc: alpha.enclosure(gp + 128),
            measure,
            segments,
            geo_prec: gp,
            mass_prec: mp,
            tol,
        })
    }

    /// The identity conjugacy: no atoms, all mass is filler.
    pub fn identity(alpha: &Alpha, prec: u32) -> Self {
        let mut params = super::MeasureParams::new(0, 0);
        params.filler = Dyadic::one();
        params.mass_prec = prec;
        let m = WeightedAtomMeasure { params, t_hat: Dyadic::zero(), z: PrecisionReal::one(), atoms: vec![], geometry_prec: prec };
        Self::new(alpha, m, Dyadic::pow2(-40)).expect("identity layout")
    }

    pub fn alpha(&self) -> &Alpha {
        &self.alpha
    }

    pub fn measure(&self) -> &WeightedAtomMeasure {
        &self.measure
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn geometry_precision(&self) -> u32 {
        self.geo_prec
    }

    pub fn mass_precision(&self) -> u32 {
        self.mass_prec
    }

    pub fn tolerance(&self) -> &Dyadic {
        &self.tol
    }

    /// Value of the distribution function at the right end of `[0, 1]`.
    pub fn total(&self) -> &PrecisionReal {
        &self.segments.last().expect("at least one segment").h1
    }

    /// `h^{-1}(y)` for `y ⊂ [0, 1]`: the distribution function.
    pub fn cdf(&self, y: &PrecisionReal) -> PrecisionReal {
        let gp = self.geo_prec;
        let mp = self.mass_prec;
        let start = self.segments.partition_point(|s| &s.y1 <= y.lo()).min(self.segments.len() - 1);
        let mut out: Option<PrecisionReal> = None;
        for s in &self.segments[start..] {
            if &s.y0 > y.hi() {
                break;
            }
            let len = &s.y1 - &s.y0;
            let off = clamp(y.sub(&PrecisionReal::exact(s.y0.clone()), gp), &len);
            let v = s.h0.add(&off.mul(&s.slope, mp), mp);
            out = Some(match out {
                None => v,
                Some(o) => o.hull(&v),
            });
        }
        out.unwrap_or_else(|| self.total().clone())
    }

    /// `h(x)` for `x ⊂ [0, 1]`, by inverting the linear pieces.
    pub fn h(&self, x: &PrecisionReal) -> Result<PrecisionReal, ConjugacyError> {
        let gp = self.geo_prec;
        let start = self.segments.partition_point(|s| s.h1.hi() <= x.lo()).min(self.segments.len() - 1);
        let mut out: Option<PrecisionReal> = None;
        for s in &self.segments[start..] {
            if s.h0.lo() > x.hi() {
                break;
            }
            let len = &s.y1 - &s.y0;
            let off = x
                .sub(&s.h0, gp)
                .div(&s.slope, gp)
                .ok_or(ConjugacyError::ToleranceNotMet { x: x.mid().to_f64(), error: f64::INFINITY })?;
            let v = PrecisionReal::exact(s.y0.clone()).add(&clamp(off, &len), gp);
            out = Some(match out {
                None => v,
                Some(o) => o.hull(&v),
            });
        }
        let y = out.unwrap_or_else(PrecisionReal::one);
        let back = self.cdf(&y);
        let err = Dyadic::max(&(back.hi() - x.lo()), &(x.hi() - back.lo()));
        if err > self.tol {
            return Err(ConjugacyError::ToleranceNotMet { x: x.mid().to_f64(), error: err.to_f64() });
        }
        Ok(y)
    }

    /// Apply a map of `[0, 1)` to its degree-one lift at an exact point.
    fn lift_at<F>(&self, x: &Dyadic, f: F) -> Result<PrecisionReal, ConjugacyError>
    where
        F: Fn(&PrecisionReal) -> Result<PrecisionReal, ConjugacyError>,
    {
        let n = x.floor();
        let base = Dyadic::from_int(n);
        let frac = x - &base;
        Ok(f(&PrecisionReal::exact(frac))?.add(&PrecisionReal::exact(base), self.geo_prec))
    }

    /// Both lifts are increasing, so an interval maps into the hull of its
    /// endpoint images.
    fn lift<F>(&self, x: &PrecisionReal, f: F) -> Result<PrecisionReal, ConjugacyError>
    where
        F: Fn(&PrecisionReal) -> Result<PrecisionReal, ConjugacyError>,
    {
        let a = self.lift_at(x.lo(), &f)?;
        if x.is_exact() {
            return Ok(a);
        }
        let b = self.lift_at(x.hi(), &f)?;
        Ok(PrecisionReal::new(a.lo().clone(), b.hi().clone()))
    }

    /// Lift of `h` with `h̃(x + 1) = h̃(x) + 1`.
    pub fn h_lift(&self, x: &PrecisionReal) -> Result<PrecisionReal, ConjugacyError> {
        self.lift(x, |t| self.h(t))
    }

    /// Lift of `h^{-1}`.
    pub fn cdf_lift(&self, y: &PrecisionReal) -> PrecisionReal {
        self.lift(y, |t| Ok(self.cdf(t))).expect("cdf never fails")
    }

    /// `F̃(x) = h̃^{-1}(h̃(x) + α)`, a lift of `F`.
    pub fn f_lift(&self, x: &PrecisionReal) -> Result<PrecisionReal, ConjugacyError> {
        self.f_iterate(x, 1)
    }

    /// `F̃^n(x) = h̃^{-1}(h̃(x) + nα)`.
    pub fn f_iterate(&self, x: &PrecisionReal, n: i64) -> Result<PrecisionReal, ConjugacyError> {
        let bits = 64 - n.unsigned_abs().leading_zeros();
        let p = self.geo_prec + bits;
        let y = self.h_lift(x)?.add(&self.alpha_enc.mul_int(BigInt::from(n), p), p);
        Ok(self.cdf_lift(&y))
    }

    /// `F` on the circle, reduced to `[0, 1)`.
    pub fn f(&self, x: &PrecisionReal) -> Result<PrecisionReal, ConjugacyError> {
        let v = self.f_lift(x)?;
        let n = Dyadic::from_int(v.floor_lo());
        Ok(v.sub(&PrecisionReal::exact(n), self.geo_prec))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor::DigitSequence;
    use crate::cocycle::CocycleStack;
    use crate::conjugacy::{assemble_mu, MeasureParams};
    use crate::numerics::PrecisionLadder;
    use proptest::prelude::*;
    use std::sync::OnceLock;

    fn small() -> &'static ConjugacyDescriptor {
        static D: OnceLock<ConjugacyDescriptor> = OnceLock::new();
        D.get_or_init(|| {
            let a = Alpha::golden();
            let s = DigitSequence::golden(5).unwrap();
            let st = CocycleStack::build(&a, &s, 3, 4, &PrecisionLadder::default(), 256).unwrap();
            let m = assemble_mu(&st, &s, &MeasureParams::new(3, 8)).unwrap();
            ConjugacyDescriptor::new(&a, m, Dyadic::pow2(-40)).unwrap()
        })
    }

    fn dy(v: f64) -> PrecisionReal {
        PrecisionReal::exact(Dyadic::from_f64(v).unwrap())
    }

    #[test]
    fn endpoints_and_segments() {
        let d = small();
        assert_eq!(d.cdf(&PrecisionReal::zero()), PrecisionReal::zero());
        assert!(d.total().contains(&Dyadic::one()));
        assert!(d.cdf(&PrecisionReal::one()).contains(&Dyadic::one()));
        for w in d.segments().windows(2) {
            assert_eq!(w[0].y1, w[1].y0);
            assert!(w[0].h1 == w[1].h0);
        }
        assert_eq!(d.segments().iter().filter(|s| s.atom.is_some()).count(), d.measure().atoms.len());
    }

    #[test]
    fn identity_descriptor() {
        let a = Alpha::golden();
        let id = ConjugacyDescriptor::identity(&a, 128);
        for v in [0.0, 0.25, 0.7, 0.999] {
            assert!(id.cdf(&dy(v)).contains(&Dyadic::from_f64(v).unwrap()));
            assert!(id.h(&dy(v)).unwrap().contains(&Dyadic::from_f64(v).unwrap()));
        }
        let f = id.f(&dy(0.5)).unwrap().mid_f64();
        assert!((f - (0.5 + 0.6180339887498949 - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn f_moves_atom_arcs_along_the_orbit() {
        let d = small();
        let m = d.measure();
        let t = PrecisionReal::exact(m.t_hat.shl(-1));
        // Midpoint of the arc of atom (i, k) maps to the midpoint of (i+1, k).
        for a in m.atoms.iter().filter(|a| a.i < m.params.i_max).take(20) {
            let y = PrecisionReal::exact(a.location.clone()).add(&t, d.geometry_precision());
            let x = d.cdf(&y);
            let fx = d.f(&x).unwrap();
            let next = m.atoms.iter().find(|b| b.i == a.i + 1 && b.code == a.code).unwrap();
            let y2 = PrecisionReal::exact(next.location.clone()).add(&t, d.geometry_precision());
            let expect = d.cdf(&y2);
            assert!((fx.mid_f64() - expect.mid_f64()).abs() < 1e-30);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn h_and_cdf_are_inverse(v in 0.0f64..1.0) {
            let d = small();
            let x = dy(v);
            let y = d.h(&x).unwrap();
            let back = d.cdf(&y);
            prop_assert!((back.mid_f64() - v).abs() < 1e-12);
        }

        #[test]
        fn cdf_is_monotone(a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let d = small();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(d.cdf(&dy(lo)).lo() <= d.cdf(&dy(hi)).hi());
        }

        #[test]
        fn lift_has_degree_one(v in 0.0f64..1.0, n in -3i64..3) {
            let d = small();
            let x = dy(v);
            let shifted = x.add(&PrecisionReal::from_int(n), 128);
            let a = d.f_lift(&x).unwrap();
            let b = d.f_lift(&shifted).unwrap();
            prop_assert!((b.mid_f64() - a.mid_f64() - n as f64).abs() < 1e-12);
        }
    }
}
