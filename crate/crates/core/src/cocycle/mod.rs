//! The cocycle `φ = Σ φ_n`: bump levels, Birkhoff sums and the
//! summability bounds.

mod bounds;
mod level;
mod stack;

pub use bounds::{bound_m, lemma_tail, m_block_tail, MBound};
pub use level::{amplitude, bump_value, choose_epsilon, BumpLevel, EpsilonChoice};
pub use stack::CocycleStack;
