//! The atomic approximation of `μ = Σ_i (exp∘φ^{(i)}∘R^{-i}) R^i_* μ0`,
//! normalized.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ConjugacyError;
use crate::cantor::{cover, CantorCover, CylinderCode, DigitSequence};
use crate::cocycle::CocycleStack;
use crate::numerics::{CirclePoint, Dyadic, PrecisionReal, Round};

/// Budgets for [`assemble_mu`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MeasureParams {
    /// Cylinder depth `d`.
    pub depth: usize,
    /// Rotation radius: atoms for `|i| <= i_max`.
    pub i_max: i64,
    /// Mass spread over the gaps between atoms so the CDF is strictly
    /// increasing.
    pub filler: Dyadic,
    /// Bits for masses and cocycle values.
    pub mass_prec: u32,
    /// Guard bits beyond the cylinder-length scale for atom locations.
    pub geometry_guard: u32,
    pub max_atoms: usize,
}

impl MeasureParams {
    pub fn new(depth: usize, i_max: i64) -> Self {
        MeasureParams {
            depth,
            i_max,
            filler: Dyadic::pow2(-30),
            mass_prec: 128 + 64 * depth as u32,
            geometry_guard: 128 + 64 * depth as u32,
            max_atoms: 1 << 22,
        }
    }
}

/// One atom: mass carried by the arc `R^i` of cylinder `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Atom {
    pub i: i64,
    pub code: CylinderCode,
    /// Left end of `R^i` of the cylinder, rounded to the geometry precision.
    pub location: Dyadic,
    /// Normalized mass.
    pub mass: PrecisionReal,
}

/// Normalized atoms sorted by location.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedAtomMeasure {
    pub params: MeasureParams,
    /// Length of every atom's arc.
    pub t_hat: Dyadic,
    /// Sum of unnormalized masses.
    pub z: PrecisionReal,
    pub atoms: Vec<Atom>,
    pub geometry_prec: u32,
}

impl WeightedAtomMeasure {
    /// Per-`i` total mass `a_i`, indexed by `i + i_max`.
    pub fn block_masses(&self) -> Vec<PrecisionReal> {
        let r = self.params.i_max;
        let p = self.params.mass_prec;
        let mut out = vec![PrecisionReal::zero(); (2 * r + 1) as usize];
        for a in &self.atoms {
            let s = &mut out[(a.i + r) as usize];
            *s = s.add(&a.mass, p);
        }
        out
    }

    pub fn total_mass(&self) -> PrecisionReal {
        let p = self.params.mass_prec;
        self.atoms.iter().fold(PrecisionReal::zero(), |s, a| s.add(&a.mass, p))
    }

    /// Expected total: `1 - filler`.
    pub fn target_mass(&self) -> Dyadic {
        &Dyadic::one() - &self.params.filler
    }
}

/// Unnormalized masses `exp(φ^{(i)}(x_k))·2^{-d}` for every atom, indexed
/// `[k][i + i_max]`, where `x_k` is the left end of cylinder `k` (a point
/// of the Cantor set).
pub fn raw_masses(stack: &CocycleStack, cov: &CantorCover, i_max: i64, prec: u32) -> Vec<Vec<PrecisionReal>> {
    let st = stack.with_precision(prec);
    let scale = cov.depth() as i64;
    (0..cov.len())
        .into_par_iter()
        .map(|k| {
            let x = CirclePoint::new(cov.left(k).clone());
            st.orbit_sums(&x, i_max).into_iter().map(|s| s.exp(prec).shl(-scale)).collect()
        })
        .collect()
}

/// Build the normalized atom measure at depth `d` and radius `i_max`.
pub fn assemble_mu(
    stack: &CocycleStack,
    seq: &DigitSequence,
    params: &MeasureParams,
) -> Result<WeightedAtomMeasure, ConjugacyError> {
    let d = params.depth;
    let count = (2 * params.i_max as usize + 1) << d;
    if count > params.max_atoms {
        return Err(ConjugacyError::BudgetExceeded { atoms: count, limit: params.max_atoms });
    }
    let cov = cover(seq, d, params.geometry_guard);
    let gp = cov.precision();
    let p = params.mass_prec;
    let raw = raw_masses(stack, &cov, params.i_max, p);
    let z = raw.iter().flatten().fold(PrecisionReal::zero(), |s, m| s.add(m, p));
    let scale = PrecisionReal::exact(&Dyadic::one() - &params.filler).div(&z, p).expect("Z > 0");
    let alpha = stack.alpha().enclosure(gp + 64);
    let mut atoms = Vec::with_capacity(count);
    for (k, row) in raw.iter().enumerate() {
        for (j, m) in row.iter().enumerate() {
            let i = j as i64 - params.i_max;
            let loc = CirclePoint::new(cov.left(k).clone()).rotate(&alpha, i, gp);
            atoms.push(Atom {
                i,
                code: cov.code(k),
                location: loc.rep().mid().round(gp, Round::Down),
                mass: m.mul(&scale, p),
            });
        }
    }
    let location_of = |a: &Atom| {
        // A location rounded up to 1 wraps to 0.
        if a.location >= Dyadic::one() {
            &a.location - &Dyadic::one()
        } else {
            a.location.clone()
        }
    };
    for a in &mut atoms {
        a.location = location_of(a);
    }
    atoms.sort_by(|a, b| a.location.cmp(&b.location).then(a.i.cmp(&b.i)).then(a.code.index().cmp(&b.code.index())));
    let measure = WeightedAtomMeasure { params: params.clone(), t_hat: cov.t_hat().clone(), z, atoms, geometry_prec: gp };
    check_separated(&measure)?;
    Ok(measure)
}

/// Consecutive arcs must leave a positive gap, and the last must end
/// before 1.
pub fn check_separated(m: &WeightedAtomMeasure) -> Result<(), ConjugacyError> {
    for w in m.atoms.windows(2) {
        if &w[0].location + &m.t_hat >= w[1].location {
            return Err(ConjugacyError::AtomsOverlap { first: (w[0].i, w[0].code.index()), second: (w[1].i, w[1].code.index()) });
        }
    }
    if let Some(last) = m.atoms.last() {
        if &last.location + &m.t_hat >= Dyadic::one() {
            return Err(ConjugacyError::AtomsOverlap { first: (last.i, last.code.index()), second: (0, 0) });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diophantine::Alpha;
    use crate::numerics::PrecisionLadder;

    fn build(d: usize, i_max: i64) -> (CocycleStack, DigitSequence, WeightedAtomMeasure) {
        let a = Alpha::golden();
        let s = DigitSequence::golden(d + 2).unwrap();
        let st = CocycleStack::build(&a, &s, 4, d, &PrecisionLadder::default(), 256).unwrap();
        let m = assemble_mu(&st, &s, &MeasureParams::new(d, i_max)).unwrap();
        (st, s, m)
    }

    #[test]
    fn atom_count_and_normalization() {
        let (_, _, m) = build(3, 8);
        assert_eq!(m.atoms.len(), 17 * 8);
        assert!(m.atoms.iter().all(|a| a.mass.is_positive()));
        let total = m.total_mass();
        assert!(total.contains(&m.target_mass()));
        assert!(total.width_f64() < 1e-60);
        // Z lies between the smallest integrand times the atom count and M.
        assert!(m.z.lo().to_f64() >= 1.0 && m.z.hi().to_f64() <= 6.96);
    }

    #[test]
    fn zero_block_is_the_base_measure() {
        let (_, _, m) = build(3, 8);
        let blocks = m.block_masses();
        let a0 = &blocks[8];
        // φ^{(0)} = 0, so the i = 0 block carries (1 - filler)/Z.
        let expect = PrecisionReal::exact(m.target_mass()).div(&m.z, 256).unwrap();
        assert!(a0.overlaps(&expect));
        assert!(blocks.iter().all(PrecisionReal::is_positive));
    }

    #[test]
    fn budget_is_enforced() {
        let a = Alpha::golden();
        let s = DigitSequence::golden(5).unwrap();
        let st = CocycleStack::build(&a, &s, 2, 4, &PrecisionLadder::default(), 128).unwrap();
        let mut p = MeasureParams::new(3, 4);
        p.max_atoms = 10;
        assert!(matches!(assemble_mu(&st, &s, &p), Err(ConjugacyError::BudgetExceeded { .. })));
    }
}
