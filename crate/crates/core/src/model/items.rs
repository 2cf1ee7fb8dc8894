use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported item universe.
pub const MAX_ITEMS: usize = 20;

/// A subset of the items `{0, .., m-1}`, stored as a bitmask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ItemSet(u32);

impl ItemSet {
    pub const EMPTY: ItemSet = ItemSet(0);

    pub const fn from_bits(bits: u32) -> Self {
        ItemSet(bits)
    }

    pub fn full(m: usize) -> Self {
        debug_assert!(m <= MAX_ITEMS);
        ItemSet(((1u64 << m) - 1) as u32)
    }

    pub fn singleton(item: usize) -> Self {
        debug_assert!(item < MAX_ITEMS);
        ItemSet(1 << item)
    }

    pub fn from_items<I: IntoIterator<Item = usize>>(items: I) -> Self {
        items.into_iter().fold(ItemSet::EMPTY, |acc, i| acc.with(i))
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, item: usize) -> bool {
        item < 32 && self.0 & (1 << item) != 0
    }

    pub fn with(self, item: usize) -> Self {
        ItemSet(self.0 | (1 << item))
    }

    pub fn without(self, item: usize) -> Self {
        ItemSet(self.0 & !(1 << item))
    }

    pub fn union(self, other: ItemSet) -> Self {
        ItemSet(self.0 | other.0)
    }

    pub fn intersection(self, other: ItemSet) -> Self {
        ItemSet(self.0 & other.0)
    }

    pub fn difference(self, other: ItemSet) -> Self {
        ItemSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: ItemSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: ItemSet) -> bool {
        self.0 & other.0 == 0
    }

    /// True if every item lies in `{0, .., m-1}`.
    pub fn within(self, m: usize) -> bool {
        self.is_subset(ItemSet::full(m))
    }

    pub fn items(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..32).filter(move |i| bits & (1 << i) != 0)
    }

    /// All subsets of `self`, in increasing bitmask order.
    pub fn subsets(self) -> impl Iterator<Item = ItemSet> {
        let mask = self.0;
        let mut next = Some(0u32);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == mask { None } else { Some((cur.wrapping_sub(mask)) & mask) };
            Some(ItemSet(cur))
        })
    }

    pub(crate) fn check_universe(m: usize) -> Result<()> {
        if m > MAX_ITEMS {
            return Err(Error::invalid(format!("{m} items exceeds the supported maximum of {MAX_ITEMS}")));
        }
        Ok(())
    }
}

impl fmt::Display for ItemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, item) in self.items().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{item}")?;
        }
        f.write_str("}")
    }
}
