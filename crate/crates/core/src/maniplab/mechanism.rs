use num_rational::Ratio;

use crate::error::Result;
use crate::model::{weighted_sum, welfare_unchecked, Allocation, AffineWeights, Rational, TypeProfile, Valuation};
use crate::payments::{affine_utility_of, run_affine_based, run_vcg_based, utility_of, MechanismOutcome, PivotRule};
use crate::wd::AllocationAlgorithm;

/// A direct-revelation mechanism under analysis.
#[derive(Clone, Debug, PartialEq)]
pub enum Mechanism {
    VcgBased { alg: AllocationAlgorithm, pivot: PivotRule },
    AffineBased { alg: AllocationAlgorithm, weights: AffineWeights, pivot: PivotRule },
}

pub(crate) fn micros(a: crate::model::Amount) -> Rational {
    Ratio::from_integer(i128::from(a.micros()))
}

impl Mechanism {
    pub fn vcg(alg: AllocationAlgorithm, pivot: PivotRule) -> Self {
        Mechanism::VcgBased { alg, pivot }
    }

    pub fn alg(&self) -> &AllocationAlgorithm {
        match self {
            Mechanism::VcgBased { alg, .. } | Mechanism::AffineBased { alg, .. } => alg,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Mechanism::VcgBased { alg, pivot } => format!("vcg_based({}, {})", alg.name(), pivot.name()),
            Mechanism::AffineBased { alg, pivot, .. } => format!("affine_based({}, {})", alg.name(), pivot.name()),
        }
    }

    pub fn run(&self, declared: &TypeProfile, true_types: &TypeProfile) -> Result<MechanismOutcome> {
        match self {
            Mechanism::VcgBased { alg, pivot } => run_vcg_based(alg, declared, pivot, true_types),
            Mechanism::AffineBased { alg, weights, pivot } => run_affine_based(alg, declared, weights, pivot, true_types),
        }
    }

    /// Exact utility in micro-units of `agent` with `true_type` when the
    /// declarations are `declared`.
    pub fn utility(&self, true_type: &Valuation, agent: usize, declared: &TypeProfile) -> Result<Rational> {
        match self {
            Mechanism::VcgBased { alg, pivot } => Ok(micros(utility_of(true_type, agent, declared, alg, pivot)?)),
            Mechanism::AffineBased { alg, weights, pivot } => affine_utility_of(true_type, agent, declared, alg, weights, pivot),
        }
    }

    /// The part of the agent's utility that depends on the output, with the
    /// agent's true type substituted into `mixed`. Differences of this score
    /// are utility gains, since pivots ignore the agent's own declaration.
    pub(crate) fn score(&self, mixed: &TypeProfile, agent: usize, output: &Allocation) -> Rational {
        match self {
            Mechanism::VcgBased { .. } => micros(welfare_unchecked(mixed, output)),
            Mechanism::AffineBased { weights, .. } => {
                weighted_sum(weights, mixed, output, None) / weights.weight(agent).ratio()
            }
        }
    }
}
