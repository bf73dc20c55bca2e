//! Numerical checks of a built conjugacy.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::descriptor::ConjugacyDescriptor;
use super::ConjugacyError;
use crate::cocycle::{lemma_tail, m_block_tail, CocycleStack};
use crate::numerics::{CirclePoint, Dyadic, PrecisionReal};

/// Finite-difference derivative against `exp(φ(h(x)))` on one grid.
#[derive(Clone, Debug, Serialize)]
pub struct DerivativeStage {
    pub depth: usize,
    pub step: Dyadic,
    pub grid: usize,
    /// Upper bound of `max_j |FD(x_j) - exp(φ(h(x_j)))|`.
    pub max_gap: f64,
    pub worst_x: f64,
    /// Smallest lower bound of the predicted derivative.
    pub min_predicted: f64,
    /// Midpoint-rule integral of the predicted derivative.
    pub integral: f64,
}

/// Grid point `j` of `n`: the cell midpoint `(2j + 1)/(2n)` as a dyadic
/// when `n` is a power of two, else rounded.
pub fn grid_point(j: usize, n: usize) -> Dyadic {
    if n.is_power_of_two() {
        Dyadic::new((2 * j as i64 + 1).into(), -(n.trailing_zeros() as i64) - 1)
    } else {
        Dyadic::from_ratio(&(2 * j + 1).into(), &(2 * n).into(), 64, crate::numerics::Round::Down)
    }
}

/// One stage of the derivative comparison. `stack` supplies the truncated
/// cocycle the measure was built from.
pub fn f_derivative_check(
    desc: &ConjugacyDescriptor,
    stack: &CocycleStack,
    grid: usize,
    step: &Dyadic,
) -> Result<DerivativeStage, ConjugacyError> {
    let mp = desc.mass_precision();
    let gp = desc.geometry_precision();
    let st = stack.with_precision(mp);
    let two_s = PrecisionReal::exact(step.shl(1));
    let s = PrecisionReal::exact(step.clone());
    let rows: Vec<(PrecisionReal, PrecisionReal)> = (0..grid)
        .into_par_iter()
        .map(|j| {
            let x = PrecisionReal::exact(grid_point(j, grid));
            let fp = desc.f_lift(&x.add(&s, gp))?;
            let fm = desc.f_lift(&x.sub(&s, gp))?;
            let fd = fp.sub(&fm, gp).div(&two_s, mp).expect("step > 0");
            let y = desc.h(&x)?;
            let pred = st.phi_truncated(&CirclePoint::new(y)).exp(mp);
            Ok((fd, pred))
        })
        .collect::<Result<_, ConjugacyError>>()?;
    let mut max_gap = 0.0f64;
    let mut worst = 0usize;
    let mut min_pred = f64::INFINITY;
    let mut integral = 0.0;
    for (j, (fd, pred)) in rows.iter().enumerate() {
        let g = fd.sub(pred, mp).abs().hi().to_f64();
        if g > max_gap {
            max_gap = g;
            worst = j;
        }
        min_pred = min_pred.min(pred.lo().to_f64());
        integral += pred.mid_f64();
    }
    Ok(DerivativeStage {
        depth: desc.measure().params.depth,
        step: step.clone(),
        grid,
        max_gap,
        worst_x: grid_point(worst, grid).to_f64(),
        min_predicted: min_pred,
        integral: integral / grid as f64,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DerivativeReport {
    pub stages: Vec<DerivativeStage>,
    /// Whether `max_gap` strictly decreases from stage to stage.
    pub decreasing: bool,
}

impl DerivativeReport {
    pub fn new(stages: Vec<DerivativeStage>) -> Self {
        let decreasing = stages.windows(2).all(|w| w[1].max_gap < w[0].max_gap);
        DerivativeReport { stages, decreasing }
    }

    pub fn final_gap(&self) -> f64 {
        self.stages.last().map_or(f64::INFINITY, |s| s.max_gap)
    }
}

/// `|Leb(h^{-1} A) - μ(A)|` over random arcs `A`.
#[derive(Clone, Debug, Serialize)]
pub struct PushforwardCheck {
    pub arcs: usize,
    pub max_error: f64,
    /// Largest atom mass plus the filler: the most one arc end can cut.
    pub resolution: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FundamentalDomainReport {
    pub depth: usize,
    pub i_max: i64,
    pub check_radius: i64,
    /// `F^i C'_d`, `|i| <= check_radius`, are pairwise disjoint.
    pub disjoint: bool,
    pub min_image_gap: f64,
    /// `a_i = Leb(F^i C'_d)`, indexed by `i + i_max`.
    pub block_masses: Vec<f64>,
    /// `Σ_{|i|<=J} a_i` for `J = 0..=i_max`.
    pub coverage_by_radius: Vec<f64>,
    pub coverage: PrecisionReal,
    /// Lower bound on the coverage for the untruncated construction:
    /// `1 - filler - tail_certified`.
    pub coverage_lower: f64,
    /// Bound on the relative mass of `|i| > i_max`.
    pub tail_certified: PrecisionReal,
    /// Tail of the summability series beyond `i_max`.
    pub tail_budget: PrecisionReal,
    /// `max_i max(a_{i+1}/a_i, a_i/a_{i+1})`.
    pub ratio_bound: f64,
    pub pushforward: PushforwardCheck,
}

/// Measure `F^i C'_d` for the descriptor's atoms and compare with the
/// certified tail.
pub fn fundamental_domain_report(desc: &ConjugacyDescriptor, check_radius: i64, seed: u64) -> FundamentalDomainReport {
    let m = desc.measure();
    let mp = desc.mass_precision();
    let r = m.params.i_max;
    // Atom segments in circular order are the x-images of the rotated
    // covers. The x-gap between two kept images is the mass of the segments
    // between them; summing those keeps the sign even when the gap is below
    // the mass precision.
    let seg_mass = |s: &super::Segment| match s.atom {
        Some(idx) => m.atoms[idx].mass.clone(),
        None => s.slope.mul_dyadic(&(&s.y1 - &s.y0), mp),
    };
    let mut between: Option<PrecisionReal> = None;
    let mut wrap = PrecisionReal::zero();
    let mut gaps = Vec::new();
    for s in desc.segments() {
        let kept = s.atom.is_some_and(|idx| m.atoms[idx].i.abs() <= check_radius);
        if kept {
            if let Some(g) = between.take() {
                gaps.push(g);
            }
            between = Some(PrecisionReal::zero());
        } else {
            match between.as_mut() {
                Some(g) => *g = g.add(&seg_mass(s), mp),
                None => wrap = wrap.add(&seg_mass(s), mp),
            }
        }
    }
    if let Some(g) = between {
        gaps.push(g.add(&wrap, mp));
    }
    let disjoint = gaps.iter().all(PrecisionReal::is_positive);
    let min_gap = gaps.iter().map(|g| g.lo().to_f64()).fold(f64::INFINITY, f64::min);
    let blocks = m.block_masses();
    let block_f: Vec<f64> = blocks.iter().map(PrecisionReal::mid_f64).collect();
    let mut coverage_by_radius = Vec::with_capacity(r as usize + 1);
    let mut acc = block_f[r as usize];
    coverage_by_radius.push(acc);
    for j in 1..=r {
        acc += block_f[(r + j) as usize] + block_f[(r - j) as usize];
        coverage_by_radius.push(acc);
    }
    let coverage = blocks.iter().fold(PrecisionReal::zero(), |s, b| s.add(b, mp));
    let radius = r.max(1) as u64;
    let tail_certified = lemma_tail(radius, 128);
    let tail_budget = m_block_tail(radius, 128);
    let coverage_lower = 1.0 - m.params.filler.to_f64() - tail_certified.hi().to_f64();
    let ratio_bound = block_f.windows(2).map(|w| (w[1] / w[0]).max(w[0] / w[1])).fold(1.0, f64::max);
    FundamentalDomainReport {
        depth: m.params.depth,
        i_max: r,
        check_radius,
        disjoint,
        min_image_gap: min_gap,
        block_masses: block_f,
        coverage_by_radius,
        coverage,
        coverage_lower,
        tail_certified,
        tail_budget,
        ratio_bound,
        pushforward: pushforward_check(desc, 100, seed),
    }
}

/// Compare `Leb(h^{-1} A)` with the atom mass inside `A` for random arcs.
pub fn pushforward_check(desc: &ConjugacyDescriptor, arcs: usize, seed: u64) -> PushforwardCheck {
    let m = desc.measure();
    let mp = desc.mass_precision();
    let gp = desc.geometry_precision();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_error = 0.0f64;
    let max_atom = m.atoms.iter().map(|a| a.mass.hi().to_f64()).fold(0.0, f64::max);
    for _ in 0..arcs {
        let start = Dyadic::new(rng.gen::<u32>().into(), -32);
        let len = Dyadic::new(rng.gen_range(1u32..1 << 31).into(), -32);
        let end = &start + &len;
        let leb = desc
            .cdf_lift(&PrecisionReal::exact(end.clone()))
            .sub(&desc.cdf_lift(&PrecisionReal::exact(start.clone())), gp);
        let one = Dyadic::one();
        let inside = |y: &Dyadic| {
            let w = y + &one;
            (y >= &start && y < &end) || (w >= start && w < end)
        };
        let atoms = m.atoms.iter().filter(|a| inside(&a.location)).fold(PrecisionReal::zero(), |s, a| s.add(&a.mass, mp));
        max_error = max_error.max(leb.sub(&atoms, mp).abs().hi().to_f64());
    }
    PushforwardCheck { arcs, max_error, resolution: max_atom + m.params.filler.to_f64() }
}

#[derive(Clone, Debug, Serialize)]
pub struct RotationEstimate {
    pub iterations: u64,
    /// `(F̃^n(x0) - x0)/n`.
    pub value: PrecisionReal,
    /// `|value - ρ| < 1/n` for any circle homeomorphism.
    pub bound: f64,
}

/// Rotation number from `n` iterates of the lift. Uses
/// `F̃^n = h̃^{-1} ∘ (· + nα) ∘ h̃`, which holds exactly for the conjugate.
pub fn rotation_number_estimate(desc: &ConjugacyDescriptor, x0: &Dyadic, n: u64) -> Result<RotationEstimate, ConjugacyError> {
    assert!(n >= 1, "need at least one iterate");
    let gp = desc.geometry_precision();
    let x = PrecisionReal::exact(x0.clone());
    let fx = desc.f_iterate(&x, n as i64)?;
    let value = fx.sub(&x, gp).div_int(n, gp);
    Ok(RotationEstimate { iterations: n, value, bound: 1.0 / n as f64 })
}

/// The same estimate by composing `F̃` `n` times.
pub fn rotation_number_direct(desc: &ConjugacyDescriptor, x0: &Dyadic, n: u64) -> Result<RotationEstimate, ConjugacyError> {
    let gp = desc.geometry_precision();
    let x = PrecisionReal::exact(x0.clone());
    let mut y = x.clone();
    for _ in 0..n {
        y = desc.f_lift(&y)?;
    }
    let value = y.sub(&x, gp).div_int(n, gp);
    Ok(RotationEstimate { iterations: n, value, bound: 1.0 / n as f64 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor::DigitSequence;
    use crate::conjugacy::{assemble_mu, MeasureParams};
    use crate::diophantine::Alpha;
    use crate::numerics::PrecisionLadder;

    fn setup(d: usize, i_max: i64) -> (CocycleStack, ConjugacyDescriptor) {
        let a = Alpha::golden();
        let s = DigitSequence::golden(d + 2).unwrap();
        let st = CocycleStack::build(&a, &s, 3, 4, &PrecisionLadder::default(), 256).unwrap();
        let m = assemble_mu(&st, &s, &MeasureParams::new(d, i_max)).unwrap();
        let desc = ConjugacyDescriptor::new(&a, m, Dyadic::pow2(-40)).unwrap();
        (st, desc)
    }

    #[test]
    fn grid_points_are_cell_midpoints() {
        assert_eq!(grid_point(0, 1024).to_f64(), 0.5 / 1024.0);
        assert_eq!(grid_point(1023, 1024).to_f64(), 1023.5 / 1024.0);
        assert!((grid_point(1, 3).to_f64() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rotation_number_of_identity_and_conjugate() {
        let a = Alpha::golden();
        let golden = 0.6180339887498949;
        let id = ConjugacyDescriptor::identity(&a, 128);
        let e = rotation_number_estimate(&id, &Dyadic::zero(), 1000).unwrap();
        assert!((e.value.mid_f64() - golden).abs() <= 1e-3);
        let (_, desc) = setup(3, 6);
        let x0 = Dyadic::from_f64(0.3).unwrap();
        let e = rotation_number_estimate(&desc, &x0, 10_000).unwrap();
        assert!((e.value.mid_f64() - golden).abs() <= e.bound + e.value.width_f64());
        let direct = rotation_number_direct(&desc, &x0, 50).unwrap();
        let via = rotation_number_estimate(&desc, &x0, 50).unwrap();
        assert!((direct.value.mid_f64() - via.value.mid_f64()).abs() < 1e-12);
    }

    #[test]
    fn fundamental_domain_small() {
        let (_, desc) = setup(3, 6);
        let r = fundamental_domain_report(&desc, 4, 7);
        assert!(r.disjoint);
        assert!(r.min_image_gap > 0.0);
        assert!(r.coverage_by_radius.windows(2).all(|w| w[1] > w[0]));
        assert!(r.coverage.contains(&desc.measure().target_mass()));
        assert!(r.tail_certified.hi() < r.tail_budget.lo());
        assert!(r.pushforward.max_error <= r.pushforward.resolution);
        assert!(r.ratio_bound >= 1.0 && r.ratio_bound.is_finite());
    }

    #[test]
    fn derivative_matches_on_a_coarse_grid() {
        let (st, desc) = setup(3, 6);
        let stage = f_derivative_check(&desc, &st, 64, &Dyadic::pow2(-27)).unwrap();
        assert!(stage.min_predicted >= (-3.0f64).exp());
        assert!(stage.max_gap.is_finite());
    }
}
