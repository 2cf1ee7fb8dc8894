use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::range::AllocationRange;
use super::solvers;
use crate::error::{Error, Result};
use crate::model::{welfare_unchecked, AffineWeights, Allocation, Amount, TypeProfile};

/// What an algorithm claims about the quality of its output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmProperty {
    Exact,
    MaximalInRange,
    Heuristic,
}

pub type AllocateFn = dyn Fn(&TypeProfile) -> Result<Allocation> + Send + Sync;

/// A host-supplied allocation rule. It must be deterministic.
#[derive(Clone)]
pub struct CustomAlgorithm {
    name: String,
    property: AlgorithmProperty,
    func: Arc<AllocateFn>,
}

impl CustomAlgorithm {
    pub fn new(name: impl Into<String>, property: AlgorithmProperty, func: Arc<AllocateFn>) -> Self {
        CustomAlgorithm { name: name.into(), property, func }
    }
}

impl fmt::Debug for CustomAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomAlgorithm").field("name", &self.name).finish_non_exhaustive()
    }
}

impl PartialEq for CustomAlgorithm {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && Arc::ptr_eq(&self.func, &other.func)
    }
}

/// A named, deterministic map from declarations to allocations.
#[derive(Clone, Debug, PartialEq)]
pub enum AllocationAlgorithm {
    Optimal { max_items: usize },
    SingleWinner,
    SecondHighest,
    Greedy,
    InRange(AllocationRange),
    AffineMaximizer { weights: AffineWeights, range: Option<AllocationRange> },
    /// Best of `k(w)` and `k(v̲^i, w^{-i})` for every agent `i`, judged by `w`.
    LowestTypeClosure(Box<AllocationAlgorithm>),
    Custom(CustomAlgorithm),
}

impl AllocationAlgorithm {
    pub fn optimal() -> Self {
        AllocationAlgorithm::Optimal { max_items: solvers::DEFAULT_OPTIMAL_MAX_ITEMS }
    }

    /// Resolves the built-in names; `in_range:` needs a loaded range and is
    /// handled by the caller.
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "optimal" => Ok(Self::optimal()),
            "single_winner" => Ok(AllocationAlgorithm::SingleWinner),
            "second_highest" => Ok(AllocationAlgorithm::SecondHighest),
            "greedy" => Ok(AllocationAlgorithm::Greedy),
            other => match other.strip_prefix("lowest_type_closure:") {
                Some(inner) => Ok(AllocationAlgorithm::LowestTypeClosure(Box::new(Self::from_name(inner)?))),
                None => Err(Error::invalid(format!("unknown algorithm {other:?}"))),
            },
        }
    }

    pub fn name(&self) -> String {
        match self {
            AllocationAlgorithm::Optimal { .. } => "optimal".into(),
            AllocationAlgorithm::SingleWinner => "single_winner".into(),
            AllocationAlgorithm::SecondHighest => "second_highest".into(),
            AllocationAlgorithm::Greedy => "greedy".into(),
            AllocationAlgorithm::InRange(r) => format!("in_range[{}]", r.len()),
            AllocationAlgorithm::AffineMaximizer { .. } => "affine_maximizer".into(),
            AllocationAlgorithm::LowestTypeClosure(inner) => format!("lowest_type_closure:{}", inner.name()),
            AllocationAlgorithm::Custom(c) => c.name.clone(),
        }
    }

    pub fn property(&self) -> AlgorithmProperty {
        match self {
            AllocationAlgorithm::Optimal { .. } => AlgorithmProperty::Exact,
            AllocationAlgorithm::SingleWinner | AllocationAlgorithm::InRange(_) => AlgorithmProperty::MaximalInRange,
            AllocationAlgorithm::AffineMaximizer { range: None, .. } => AlgorithmProperty::Exact,
            AllocationAlgorithm::AffineMaximizer { range: Some(_), .. } => AlgorithmProperty::MaximalInRange,
            AllocationAlgorithm::LowestTypeClosure(inner) => match inner.property() {
                AlgorithmProperty::Exact => AlgorithmProperty::Exact,
                _ => AlgorithmProperty::Heuristic,
            },
            AllocationAlgorithm::SecondHighest | AllocationAlgorithm::Greedy => AlgorithmProperty::Heuristic,
            AllocationAlgorithm::Custom(c) => c.property,
        }
    }

    /// Steps charged when an appeal invokes this algorithm once on `n` agents.
    /// Base algorithms cost one step; a lowest-type closure costs `n + 1`
    /// invocations of its inner algorithm.
    pub fn invocation_cost(&self, n: usize) -> u64 {
        match self {
            AllocationAlgorithm::LowestTypeClosure(inner) => (n as u64 + 1) * inner.invocation_cost(n),
            _ => 1,
        }
    }

    pub fn allocate(&self, profile: &TypeProfile) -> Result<Allocation> {
        let alloc = match self {
            AllocationAlgorithm::Optimal { max_items } => solvers::solve_optimal_with_budget(profile, *max_items)?,
            AllocationAlgorithm::SingleWinner => solvers::solve_single_winner(profile),
            AllocationAlgorithm::SecondHighest => solvers::solve_second_highest(profile),
            AllocationAlgorithm::Greedy => solvers::solve_greedy(profile),
            AllocationAlgorithm::InRange(range) => solvers::solve_in_range(profile, range)?,
            AllocationAlgorithm::AffineMaximizer { weights, range } => {
                solvers::solve_affine(profile, weights, range.as_ref())?
            }
            AllocationAlgorithm::LowestTypeClosure(inner) => closure_allocate(inner, profile)?,
            AllocationAlgorithm::Custom(c) => {
                let alloc = (c.func)(profile)?;
                profile.check_allocation(&alloc)?;
                alloc
            }
        };
        Ok(alloc)
    }
}

fn closure_allocate(inner: &AllocationAlgorithm, profile: &TypeProfile) -> Result<Allocation> {
    let mut best = inner.allocate(profile)?;
    let mut best_welfare = welfare_unchecked(profile, &best);
    for agent in 0..profile.agents() {
        let candidate = inner.allocate(&profile.with_lowest(agent))?;
        let w: Amount = welfare_unchecked(profile, &candidate);
        if w > best_welfare {
            best = candidate;
            best_welfare = w;
        }
    }
    Ok(best)
}
