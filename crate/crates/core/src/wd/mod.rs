//! Winner determination: exact and suboptimal allocation algorithms plus
//! range and reasonableness analysis.

mod algorithm;
mod analysis;
mod range;
mod solvers;

pub use algorithm::{AlgorithmProperty, AllocateFn, AllocationAlgorithm, CustomAlgorithm};
pub use analysis::{
    build_nonres_profile, build_strict_nonres_profile, check_reasonable, indifferent_to, sole_desirers,
    strictly_desires, verify_maximal_in_range, RangeViolation, ReasonablenessWitness,
};
pub use range::AllocationRange;
pub use solvers::{
    solve_affine, solve_greedy, solve_in_range, solve_optimal, solve_optimal_with_budget, solve_second_highest,
    solve_single_winner, DEFAULT_OPTIMAL_MAX_ITEMS, ENUMERATION_MAX_ALLOCATIONS,
};
