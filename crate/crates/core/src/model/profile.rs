use serde::{Deserialize, Serialize};

use super::allocation::Allocation;
use super::currency::Amount;
use super::items::ItemSet;
use super::valuation::{lowest_type, Valuation};
use crate::error::{Error, Result};

/// One valuation per agent over a shared item universe.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawProfile", into = "RawProfile")]
pub struct TypeProfile {
    items: usize,
    valuations: Vec<Valuation>,
}

#[derive(Serialize, Deserialize)]
struct RawProfile {
    items: usize,
    valuations: Vec<Valuation>,
}

impl TryFrom<RawProfile> for TypeProfile {
    type Error = Error;
    fn try_from(raw: RawProfile) -> Result<Self> {
        TypeProfile::new(raw.items, raw.valuations)
    }
}

impl From<TypeProfile> for RawProfile {
    fn from(p: TypeProfile) -> Self {
        RawProfile { items: p.items, valuations: p.valuations }
    }
}

impl TypeProfile {
    pub fn new(items: usize, valuations: Vec<Valuation>) -> Result<Self> {
        ItemSet::check_universe(items)?;
        if valuations.is_empty() {
            return Err(Error::invalid("a profile needs at least one agent"));
        }
        if let Some(agent) = valuations.iter().position(|v| !v.fits(items)) {
            return Err(Error::invalid(format!(
                "valuation of agent {agent} does not fit a universe of {items} items"
            )));
        }
        Ok(TypeProfile { items, valuations })
    }

    pub fn items(&self) -> usize {
        self.items
    }

    pub fn universe(&self) -> ItemSet {
        ItemSet::full(self.items)
    }

    pub fn agents(&self) -> usize {
        self.valuations.len()
    }

    pub fn valuation(&self, agent: usize) -> &Valuation {
        &self.valuations[agent]
    }

    pub fn valuations(&self) -> &[Valuation] {
        &self.valuations
    }

    /// `(v, w^{-agent})`: this profile with one agent's valuation replaced.
    pub fn with_agent(&self, agent: usize, valuation: Valuation) -> Result<Self> {
        if agent >= self.agents() {
            return Err(Error::invalid(format!("agent {agent} out of range")));
        }
        if !valuation.fits(self.items) {
            return Err(Error::invalid("replacement valuation does not fit the item universe"));
        }
        let mut valuations = self.valuations.clone();
        valuations[agent] = valuation;
        Ok(TypeProfile { items: self.items, valuations })
    }

    /// `(v̲^agent, w^{-agent})`.
    pub fn with_lowest(&self, agent: usize) -> Self {
        let mut valuations = self.valuations.clone();
        valuations[agent] = lowest_type(self.items);
        TypeProfile { items: self.items, valuations }
    }

    pub fn same_shape(&self, other: &TypeProfile) -> bool {
        self.items == other.items && self.agents() == other.agents()
    }

    pub fn check_allocation(&self, alloc: &Allocation) -> Result<()> {
        if alloc.agents() != self.agents() {
            return Err(Error::invalid(format!(
                "allocation has {} bundles but the profile has {} agents",
                alloc.agents(),
                self.agents()
            )));
        }
        if !alloc.within(self.items) {
            return Err(Error::invalid("allocation uses items outside the universe"));
        }
        Ok(())
    }
}

/// `g(v, o) = Σ_i v^i(o_i)`.
pub fn welfare(profile: &TypeProfile, alloc: &Allocation) -> Result<Amount> {
    profile.check_allocation(alloc)?;
    Ok(welfare_unchecked(profile, alloc))
}

pub(crate) fn welfare_unchecked(profile: &TypeProfile, alloc: &Allocation) -> Amount {
    profile
        .valuations
        .iter()
        .zip(alloc.bundles())
        .map(|(v, b)| v.evaluate(*b))
        .sum()
}

/// `Σ_{j ≠ agent} w^j(o_j)`.
pub(crate) fn others_welfare(profile: &TypeProfile, alloc: &Allocation, agent: usize) -> Amount {
    profile
        .valuations
        .iter()
        .zip(alloc.bundles())
        .enumerate()
        .filter(|(j, _)| *j != agent)
        .map(|(_, (v, b))| v.evaluate(*b))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(x: i64) -> Amount {
        Amount::from_units(x)
    }

    fn two_item_profile() -> TypeProfile {
        let a1 = Valuation::table(vec![u(0), u(1), u(1), u(3)]).unwrap();
        let a2 = Valuation::additive(vec![u(2), u(2)]).unwrap();
        TypeProfile::new(2, vec![a1, a2]).unwrap()
    }

    #[test]
    fn welfare_sums_table_lookups() {
        let p = two_item_profile();
        let alloc = Allocation::new(vec![ItemSet::singleton(0), ItemSet::singleton(1)]).unwrap();
        assert_eq!(welfare(&p, &alloc).unwrap(), u(3));
        assert_eq!(welfare(&p, &Allocation::empty(2)).unwrap(), Amount::ZERO);
    }

    #[test]
    fn welfare_vickrey_winner() {
        let vals = [2_000_000_000, 1_700_000_000, 1_000_000_000]
            .map(|x| Valuation::additive(vec![Amount::from_micros(x)]).unwrap());
        let p = TypeProfile::new(1, vals.to_vec()).unwrap();
        let alloc = Allocation::all_to(3, 0, ItemSet::full(1));
        assert_eq!(welfare(&p, &alloc).unwrap(), Amount::from_micros(2_000_000_000));
    }

    #[test]
    fn welfare_rejects_dimension_mismatch() {
        let p = two_item_profile();
        assert!(matches!(welfare(&p, &Allocation::empty(3)), Err(Error::InvalidInput(_))));
        let outside = Allocation::new(vec![ItemSet::singleton(2), ItemSet::EMPTY]).unwrap();
        assert!(welfare(&p, &outside).is_err());
    }

    #[test]
    fn profile_rejects_mismatched_universe() {
        let v = Valuation::table(vec![u(0), u(1)]).unwrap();
        assert!(TypeProfile::new(2, vec![v]).is_err());
        assert!(TypeProfile::new(2, vec![]).is_err());
    }
}
