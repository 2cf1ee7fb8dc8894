use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Allocation, TypeProfile};

/// An explicit, non-empty set of allocations an algorithm may choose from.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct AllocationRange {
    allocations: Vec<Allocation>,
}

impl AllocationRange {
    pub fn new(mut allocations: Vec<Allocation>) -> Result<Self> {
        let Some(first) = allocations.first() else {
            return Err(Error::invalid("an allocation range must be non-empty"));
        };
        let n = first.agents();
        if allocations.iter().any(|a| a.agents() != n) {
            return Err(Error::invalid("range allocations disagree on the number of agents"));
        }
        allocations.sort();
        allocations.dedup();
        Ok(AllocationRange { allocations })
    }

    /// `{all items to agent i : i}`.
    pub fn single_winner(n: usize, m: usize) -> Self {
        let universe = crate::model::ItemSet::full(m);
        AllocationRange::new((0..n).map(|i| Allocation::all_to(n, i, universe)).collect())
            .expect("n >= 1")
    }

    /// Every allocation of `m` items to `n` agents.
    pub fn everything(n: usize, m: usize) -> Self {
        AllocationRange { allocations: Allocation::enumerate(n, m) }
    }

    pub fn allocations(&self) -> &[Allocation] {
        &self.allocations
    }

    pub fn contains(&self, alloc: &Allocation) -> bool {
        self.allocations.binary_search(alloc).is_ok()
    }

    pub fn len(&self) -> usize {
        self.allocations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.allocations.is_empty()
    }

    pub fn without(&self, alloc: &Allocation) -> Result<Self> {
        AllocationRange::new(self.allocations.iter().filter(|a| *a != alloc).cloned().collect())
    }

    pub(crate) fn check_profile(&self, profile: &TypeProfile) -> Result<()> {
        for a in &self.allocations {
            profile.check_allocation(a)?;
        }
        Ok(())
    }
}

impl<'de> Deserialize<'de> for AllocationRange {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let allocations = Vec::<Allocation>::deserialize(deserializer)?;
        AllocationRange::new(allocations).map_err(serde::de::Error::custom)
    }
}
