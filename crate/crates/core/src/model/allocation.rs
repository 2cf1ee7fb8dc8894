use std::fmt;

use serde::{Deserialize, Serialize};

use super::items::ItemSet;
use crate::error::{Error, Result};

/// One bundle per agent; bundles are pairwise disjoint.
///
/// The derived ordering compares bundles agent by agent and bitmask by
/// bitmask, which is the tie-breaking order used by every solver.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Allocation {
    bundles: Vec<ItemSet>,
}

impl Allocation {
    pub fn new(bundles: Vec<ItemSet>) -> Result<Self> {
        let mut seen = ItemSet::EMPTY;
        for (agent, bundle) in bundles.iter().enumerate() {
            if !seen.is_disjoint(*bundle) {
                return Err(Error::invalid(format!(
                    "bundle of agent {agent} overlaps an earlier bundle on {}",
                    seen.intersection(*bundle)
                )));
            }
            seen = seen.union(*bundle);
        }
        Ok(Allocation { bundles })
    }

    pub fn empty(n: usize) -> Self {
        Allocation { bundles: vec![ItemSet::EMPTY; n] }
    }

    /// All of `items` to `winner`.
    pub fn all_to(n: usize, winner: usize, items: ItemSet) -> Self {
        let mut bundles = vec![ItemSet::EMPTY; n];
        bundles[winner] = items;
        Allocation { bundles }
    }

    pub fn agents(&self) -> usize {
        self.bundles.len()
    }

    pub fn bundle(&self, agent: usize) -> ItemSet {
        self.bundles[agent]
    }

    pub fn bundles(&self) -> &[ItemSet] {
        &self.bundles
    }

    pub fn allocated(&self) -> ItemSet {
        self.bundles.iter().fold(ItemSet::EMPTY, |acc, b| acc.union(*b))
    }

    pub fn owner_of(&self, item: usize) -> Option<usize> {
        self.bundles.iter().position(|b| b.contains(item))
    }

    pub fn within(&self, m: usize) -> bool {
        self.allocated().within(m)
    }

    /// Every allocation of `m` items to `n` agents (each item to an agent or
    /// to nobody), sorted in tie-breaking order.
    pub fn enumerate(n: usize, m: usize) -> Vec<Allocation> {
        let choices = n + 1;
        let total = choices.pow(m as u32);
        let mut out = Vec::with_capacity(total);
        for code in 0..total {
            let mut rest = code;
            let mut bundles = vec![ItemSet::EMPTY; n];
            for item in 0..m {
                let owner = rest % choices;
                rest /= choices;
                if owner < n {
                    bundles[owner] = bundles[owner].with(item);
                }
            }
            out.push(Allocation { bundles });
        }
        out.sort();
        out
    }
}

impl<'de> Deserialize<'de> for Allocation {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let bundles = Vec::<ItemSet>::deserialize(deserializer)?;
        Allocation::new(bundles).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Allocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, b) in self.bundles.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{b}")?;
        }
        f.write_str("]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_overlap() {
        let a = ItemSet::from_items([0, 1]);
        let b = ItemSet::from_items([1]);
        assert!(Allocation::new(vec![a, b]).is_err());
        assert!(Allocation::new(vec![a, ItemSet::singleton(2)]).is_ok());
    }

    #[test]
    fn enumerate_counts_and_orders() {
        let all = Allocation::enumerate(2, 2);
        assert_eq!(all.len(), 9);
        assert_eq!(all[0], Allocation::empty(2));
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }
}
