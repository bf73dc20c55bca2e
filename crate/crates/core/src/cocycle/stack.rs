//! The truncated sum `φ = φ_1 + ... + φ_{n_max}` and its Birkhoff sums.

use rayon::prelude::*;

use super::level::{choose_epsilon, BumpLevel, EpsilonChoice};
use crate::cantor::{CantorError, DigitSequence};
use crate::diophantine::Alpha;
use crate::numerics::{CirclePoint, Dyadic, PrecisionLadder, PrecisionReal};

#[derive(Clone, Debug)]
pub struct CocycleStack {
    alpha: Alpha,
    alpha_enc: PrecisionReal,
    levels: Vec<BumpLevel>,
    prec: u32,
}

impl CocycleStack {
    /// Levels `1..=n_max`, each with its own separating depth and `ε_n`.
    pub fn build(
        alpha: &Alpha,
        seq: &DigitSequence,
        n_max: u32,
        d_max: usize,
        ladder: &PrecisionLadder,
        prec: u32,
    ) -> Result<Self, CantorError> {
        let choices = (1..=n_max)
            .into_par_iter()
            .map(|n| choose_epsilon(n, alpha, seq, d_max, ladder))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_choices(alpha, seq, choices, prec))
    }

    /// Rebuild from recorded per-level geometry.
    pub fn from_choices(alpha: &Alpha, seq: &DigitSequence, choices: Vec<EpsilonChoice>, prec: u32) -> Self {
        let levels =
            choices.into_iter().enumerate().map(|(i, c)| BumpLevel::new(i as u32 + 1, seq, c).refined(prec)).collect();
        CocycleStack { alpha: alpha.clone(), alpha_enc: alpha.enclosure(prec + 64), levels, prec }
    }

    pub fn levels(&self) -> &[BumpLevel] {
        &self.levels
    }

    pub fn n_max(&self) -> u32 {
        self.levels.len() as u32
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn alpha(&self) -> &Alpha {
        &self.alpha
    }

    pub fn alpha_enclosure(&self) -> &PrecisionReal {
        &self.alpha_enc
    }

    /// The same stack evaluated at another working precision.
    pub fn with_precision(&self, prec: u32) -> Self {
        let levels = self.levels.iter().map(|l| l.refined(prec)).collect();
        CocycleStack { alpha_enc: self.alpha.enclosure(prec + 64), levels, prec, ..self.clone() }
    }

    /// `Σ_{n > n_max} (3/4)^n = 3·(3/4)^{n_max}`.
    pub fn tail_bound(&self) -> Dyadic {
        &super::level::amplitude(self.n_max()) * &Dyadic::from_int(3)
    }

    /// `φ_n(x)` for one level.
    pub fn level_value(&self, n: u32, x: &CirclePoint) -> PrecisionReal {
        self.levels[n as usize - 1].value(x, &self.alpha_enc, self.prec)
    }

    /// `Σ_{n<=n_max} φ_n(x)` with no allowance for the missing levels.
    pub fn phi_truncated(&self, x: &CirclePoint) -> PrecisionReal {
        self.levels
            .iter()
            .map(|l| l.value(x, &self.alpha_enc, self.prec))
            .fold(PrecisionReal::zero(), |a, b| a.add(&b, self.prec))
    }

    /// Enclosure of the full `φ(x)`: the truncated sum `± tail_bound`.
    pub fn phi(&self, x: &CirclePoint) -> PrecisionReal {
        self.phi_truncated(x).inflate(&self.tail_bound())
    }

    fn sum_along<F>(&self, x: &CirclePoint, m: i64, f: F) -> PrecisionReal
    where
        F: Fn(&CirclePoint) -> PrecisionReal + Sync,
    {
        let idx: Vec<i64> = if m >= 0 { (0..m).collect() } else { (1..=-m).map(|i| -i).collect() };
        let vals: Vec<PrecisionReal> =
            idx.par_iter().map(|&i| f(&x.rotate(&self.alpha_enc, i, self.prec))).collect();
        let s = vals.iter().fold(PrecisionReal::zero(), |a, b| a.add(b, self.prec));
        if m >= 0 {
            s
        } else {
            s.neg()
        }
    }

    /// `φ^{(m)}` of the truncated sum.
    pub fn birkhoff_truncated(&self, x: &CirclePoint, m: i64) -> PrecisionReal {
        self.sum_along(x, m, |y| self.phi_truncated(y))
    }

    /// `φ^{(m)}(x)` for the full cocycle, widened by `|m|·tail_bound`.
    pub fn birkhoff(&self, x: &CirclePoint, m: i64) -> PrecisionReal {
        let slack = &self.tail_bound() * &Dyadic::from_int(m.unsigned_abs());
        self.birkhoff_truncated(x, m).inflate(&slack)
    }

    /// `φ_n^{(m)}(x)` for a single level.
    pub fn level_birkhoff(&self, n: u32, x: &CirclePoint, m: i64) -> PrecisionReal {
        self.sum_along(x, m, |y| self.level_value(n, y))
    }

    /// Truncated `φ^{(i)}(x)` for every `-radius <= i <= radius`, indexed
    /// by `i + radius`, from one pass over the orbit.
    pub fn orbit_sums(&self, x: &CirclePoint, radius: i64) -> Vec<PrecisionReal> {
        let js: Vec<i64> = (-radius..radius).collect();
        let vals: Vec<PrecisionReal> = js
            .par_iter()
            .map(|&j| self.phi_truncated(&x.rotate(&self.alpha_enc, j, self.prec)))
            .collect();
        let at = |j: i64| &vals[(j + radius) as usize];
        let r = radius as usize;
        let mut out = vec![PrecisionReal::zero(); 2 * r + 1];
        for i in 1..=radius {
            let k = (i + radius) as usize;
            out[k] = out[k - 1].add(at(i - 1), self.prec);
            let k = (radius - i) as usize;
            out[k] = out[k + 1].sub(at(-i), self.prec);
        }
        out
    }

    /// Slope bound of the truncated `φ`.
    pub fn lipschitz(&self) -> f64 {
        self.levels.iter().map(BumpLevel::lipschitz).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor::{point_from_code, CylinderCode};
    use crate::cocycle::amplitude;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn stack() -> (DigitSequence, CocycleStack) {
        let a = Alpha::golden();
        let s = DigitSequence::golden(8).unwrap();
        let st = CocycleStack::build(&a, &s, 4, 6, &PrecisionLadder::default(), 256).unwrap();
        (s, st)
    }

    fn sample_points(s: &DigitSequence, k: usize, seed: u64) -> Vec<CirclePoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..k)
            .map(|_| {
                let code = CylinderCode::new((0..6).map(|_| rng.gen()).collect());
                let p = point_from_code(s, &code, 6, 4096);
                CirclePoint::new(PrecisionReal::exact(p.rep().lo().clone()))
            })
            .collect()
    }

    #[test]
    fn phi_on_cantor_points_is_minus_partial_geometric_sum() {
        let (s, st) = stack();
        let expected = -(1..=4).map(|n| amplitude(n).to_f64()).sum::<f64>();
        for x in sample_points(&s, 5, 1) {
            let v = st.phi_truncated(&x);
            assert!((v.mid_f64() - expected).abs() < 1e-20);
            let full = st.phi(&x);
            assert!(full.contains(&Dyadic::from_f64(expected).unwrap()));
        }
        assert!(st.tail_bound().to_f64() - 3.0 * 0.75f64.powi(4) == 0.0);
    }

    #[test]
    fn birkhoff_zero_and_lemma_equality() {
        let (s, st) = stack();
        let xs = sample_points(&s, 3, 2);
        for x in &xs {
            assert_eq!(st.birkhoff_truncated(x, 0), PrecisionReal::zero());
            for n in 1..=4u32 {
                let amp = amplitude(n).to_f64();
                let r = 1i64 << n;
                for i in -r..=r {
                    let v = st.level_birkhoff(n, x, i);
                    assert!((v.mid_f64() + i.abs() as f64 * amp).abs() < 1e-20, "n={n} i={i}");
                    assert!(v.width_f64() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn cocycle_identity() {
        let (s, st) = stack();
        let x = &sample_points(&s, 1, 3)[0];
        // Perturb off the Cantor set so every level is active somewhere.
        let x = x.shift(&PrecisionReal::exact(Dyadic::pow2(-13)), 256);
        for (a, b) in [(3i64, 5i64), (-4, 7), (6, -9), (-2, -3)] {
            let lhs = st.birkhoff_truncated(&x, a + b);
            let ra = x.rotate(st.alpha_enclosure(), a, 256);
            let rhs = st.birkhoff_truncated(&x, a).add(&st.birkhoff_truncated(&ra, b), 256);
            assert!(lhs.overlaps(&rhs), "a={a} b={b}");
            assert!((lhs.mid_f64() - rhs.mid_f64()).abs() < 1e-40);
        }
    }

    #[test]
    fn orbit_sums_match_direct_birkhoff() {
        let (s, st) = stack();
        let x = sample_points(&s, 1, 4)[0].shift(&PrecisionReal::exact(Dyadic::pow2(-15)), 256);
        let sums = st.orbit_sums(&x, 12);
        for i in -12i64..=12 {
            let direct = st.birkhoff_truncated(&x, i);
            assert!(sums[(i + 12) as usize].overlaps(&direct), "i={i}");
        }
    }

    #[test]
    fn sup_norm_bound() {
        let (_, st) = stack();
        let three = Dyadic::from_int(3);
        for j in 0..4096 {
            let x = CirclePoint::from_dyadic(Dyadic::new(j.into(), -12));
            let v = st.phi(&x);
            assert!(v.hi() <= &three && v.lo() >= &-&three);
        }
    }
}
