//! Certified comparisons driven by a precision ladder.

use serde::{Deserialize, Serialize};

use super::real::PrecisionReal;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Less,
    Greater,
    /// Enclosures still overlap at the last rung. A verification failure,
    /// never a truth value.
    Undecided,
}

/// Increasing list of precisions (bits) to try before giving up.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrecisionLadder(Vec<u32>);

impl Default for PrecisionLadder {
    fn default() -> Self {
        PrecisionLadder(vec![64, 128, 256, 512])
    }
}

impl PrecisionLadder {
    /// Panics on an empty or non-increasing ladder.
    pub fn new(rungs: Vec<u32>) -> Self {
        assert!(!rungs.is_empty(), "empty precision ladder");
        assert!(rungs.windows(2).all(|w| w[0] < w[1]), "ladder must increase");
        assert!(rungs[0] > 0, "precision budget must be positive");
        PrecisionLadder(rungs)
    }

    pub fn rungs(&self) -> &[u32] {
        &self.0
    }

    pub fn max(&self) -> u32 {
        *self.0.last().unwrap()
    }

    /// The same ladder truncated at `budget` bits (at least one rung).
    pub fn capped(&self, budget: u32) -> Self {
        let mut r: Vec<u32> = self.0.iter().copied().filter(|&p| p <= budget).collect();
        if r.is_empty() {
            r.push(budget.max(1));
        }
        PrecisionLadder(r)
    }
}

/// Compare two enclosures once.
pub fn compare(a: &PrecisionReal, b: &PrecisionReal) -> Decision {
    if a.hi() < b.lo() {
        Decision::Less
    } else if a.lo() > b.hi() {
        Decision::Greater
    } else {
        Decision::Undecided
    }
}

/// Recompute both sides at each rung until their enclosures separate.
pub fn decide<F>(mut eval: F, ladder: &PrecisionLadder) -> Decision
where
    F: FnMut(u32) -> (PrecisionReal, PrecisionReal),
{
    for &prec in ladder.rungs() {
        let (a, b) = eval(prec);
        let d = compare(&a, &b);
        if d != Decision::Undecided {
            return d;
        }
    }
    Decision::Undecided
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::real::ratio;

    #[test]
    fn separates_distinct_rationals() {
        let d = decide(|p| (ratio(1, 3, p), ratio(1, 2, p)), &PrecisionLadder::default());
        assert_eq!(d, Decision::Less);
    }

    #[test]
    fn equal_quantities_never_separate() {
        for budget in [64, 128, 512] {
            let ladder = PrecisionLadder::default().capped(budget);
            let d = decide(|p| (ratio(2, 7, p), ratio(4, 14, p)), &ladder);
            assert_eq!(d, Decision::Undecided);
        }
    }

    #[test]
    fn answers_are_stable_across_budgets() {
        // 1/3 vs 1/3 + 2^-100: undecided at 64 bits, Less from 128 bits on.
        let close = |p: u32| {
            let a = ratio(1, 3, p);
            let b = a.add(&PrecisionReal::exact(crate::numerics::Dyadic::pow2(-100)), p);
            (ratio(1, 3, p), b)
        };
        assert_eq!(decide(close, &PrecisionLadder::new(vec![64])), Decision::Undecided);
        for budget in [128, 256, 512] {
            let ladder = PrecisionLadder::default().capped(budget);
            assert_eq!(decide(close, &ladder), Decision::Less);
        }
    }
}
