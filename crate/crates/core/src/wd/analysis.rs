use rayon::prelude::*;
use serde::Serialize;

use super::algorithm::AllocationAlgorithm;
use crate::error::{Error, Result};
use crate::model::{monotone_closure, welfare_unchecked, Allocation, Amount, ItemSet, TypeProfile, Valuation};

/// A grid profile whose output is beaten by another element of the realized
/// range.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RangeViolation {
    pub profile_index: usize,
    pub profile: TypeProfile,
    pub produced: Allocation,
    pub produced_welfare: Amount,
    pub better: Allocation,
    pub better_welfare: Amount,
}

/// Computes the range realized over `grid`, then checks that every grid
/// profile's output attains the range maximum. Returns the first violation in
/// grid order.
pub fn verify_maximal_in_range(alg: &AllocationAlgorithm, grid: &[TypeProfile]) -> Result<Option<RangeViolation>> {
    let outputs: Vec<Allocation> = grid.par_iter().map(|p| alg.allocate(p)).collect::<Result<_>>()?;
    let mut range = outputs.clone();
    range.sort();
    range.dedup();

    let found = grid.par_iter().zip(&outputs).enumerate().find_map_first(|(idx, (profile, produced))| {
        let produced_welfare = welfare_unchecked(profile, produced);
        let (better_welfare, better) = range
            .iter()
            .filter(|a| profile.check_allocation(a).is_ok())
            .map(|a| (welfare_unchecked(profile, a), a))
            .fold(None, |best: Option<(Amount, &Allocation)>, (w, a)| match best {
                Some((bw, _)) if bw >= w => best,
                _ => Some((w, a)),
            })?;
        (better_welfare > produced_welfare).then(|| RangeViolation {
            profile_index: idx,
            profile: profile.clone(),
            produced: produced.clone(),
            produced_welfare,
            better: better.clone(),
            better_welfare,
        })
    });
    Ok(found)
}

/// An item that only one agent desires, strictly, yet that agent does not get.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReasonablenessWitness {
    pub item: usize,
    pub agent: usize,
    pub profile: TypeProfile,
    pub allocation: Allocation,
}

/// Whether adding `item` strictly raises the agent's value of every bundle
/// that lacks it.
pub fn strictly_desires(v: &Valuation, m: usize, item: usize) -> bool {
    let rest = ItemSet::full(m).without(item);
    rest.subsets().all(|s| v.evaluate(s.with(item)) > v.evaluate(s))
}

/// Whether the agent never gains from `item`.
pub fn indifferent_to(v: &Valuation, m: usize, item: usize) -> bool {
    let rest = ItemSet::full(m).without(item);
    rest.subsets().all(|s| v.evaluate(s.with(item)) == v.evaluate(s))
}

/// `(agent, item)` pairs where the agent strictly desires the item and every
/// other agent is indifferent to it, in agent-major order.
pub fn sole_desirers(profile: &TypeProfile) -> Vec<(usize, usize)> {
    let m = profile.items();
    let mut out = Vec::new();
    for agent in 0..profile.agents() {
        for item in 0..m {
            let others_indifferent = (0..profile.agents())
                .filter(|&l| l != agent)
                .all(|l| indifferent_to(profile.valuation(l), m, item));
            if others_indifferent && strictly_desires(profile.valuation(agent), m, item) {
                out.push((agent, item));
            }
        }
    }
    out
}

/// Looks for an item whose only (strict) desirer does not receive it.
pub fn check_reasonable(alg: &AllocationAlgorithm, profile: &TypeProfile) -> Result<Option<ReasonablenessWitness>> {
    let allocation = alg.allocate(profile)?;
    Ok(sole_desirers(profile)
        .into_iter()
        .find(|&(agent, item)| !allocation.bundle(agent).contains(item))
        .map(|(agent, item)| ReasonablenessWitness {
            item,
            agent,
            profile: profile.clone(),
            allocation: allocation.clone(),
        }))
}

fn check_partition(partition: &Allocation, m: usize) -> Result<()> {
    if partition.agents() == 0 {
        return Err(Error::invalid("partition has no bundles"));
    }
    if let Some(agent) = partition.bundles().iter().position(|b| b.is_empty()) {
        return Err(Error::invalid(format!("partition bundle of agent {agent} is empty")));
    }
    if !partition.within(m) {
        return Err(Error::invalid("partition uses items outside the universe"));
    }
    Ok(())
}

/// One unit-value single-minded bid per agent on its partition bundle.
pub fn build_nonres_profile(partition: &Allocation, m: usize) -> Result<TypeProfile> {
    check_partition(partition, m)?;
    let vals = partition
        .bundles()
        .iter()
        .map(|b| Valuation::single_minded(*b, Amount::from_units(1)))
        .collect::<Result<_>>()?;
    TypeProfile::new(m, vals)
}

/// Like [`build_nonres_profile`], plus one micro-unit per owned item of the
/// agent's partition bundle: `v^i(x) = [x ⊇ s^i]·1 + |x ∩ s^i|·ε`.
///
/// Each item of `s^i` is then strictly desired by agent `i` alone, also when
/// `|s^i| > 1`, and the partition stays the unique welfare optimum when it
/// covers all items.
pub fn build_strict_nonres_profile(partition: &Allocation, m: usize) -> Result<TypeProfile> {
    check_partition(partition, m)?;
    let unit = Amount::from_units(1);
    let epsilon = Amount::from_micros(1);
    let vals = partition
        .bundles()
        .iter()
        .map(|b| {
            let table: Vec<Amount> = ItemSet::full(m)
                .subsets()
                .map(|x| {
                    let whole = if b.is_subset(x) { unit } else { Amount::ZERO };
                    whole + epsilon * x.intersection(*b).len() as i64
                })
                .collect();
            monotone_closure(&table)
        })
        .collect::<Result<_>>()?;
    TypeProfile::new(m, vals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wd::{solve_optimal, AllocationRange};

    fn ab_partition() -> Allocation {
        Allocation::new(vec![ItemSet::singleton(0), ItemSet::singleton(1)]).unwrap()
    }

    #[test]
    fn single_winner_is_unreasonable() {
        let p = build_nonres_profile(&ab_partition(), 2).unwrap();
        let witness = check_reasonable(&AllocationAlgorithm::SingleWinner, &p).unwrap().unwrap();
        assert_eq!((witness.agent, witness.item), (1, 1));
        assert!(check_reasonable(&AllocationAlgorithm::optimal(), &p).unwrap().is_none());
    }

    #[test]
    fn shared_items_make_check_vacuous() {
        let v = Valuation::additive(vec![Amount::from_units(1); 2]).unwrap();
        let p = TypeProfile::new(2, vec![v.clone(), v]).unwrap();
        assert!(sole_desirers(&p).is_empty());
        assert!(check_reasonable(&AllocationAlgorithm::SingleWinner, &p).unwrap().is_none());
    }

    #[test]
    fn nonres_profile_shape() {
        let p = build_nonres_profile(&ab_partition(), 2).unwrap();
        assert_eq!(p.agents(), 2);
        assert_eq!(p.valuation(0).evaluate(ItemSet::singleton(0)), Amount::from_units(1));
        let solo = build_nonres_profile(&Allocation::all_to(1, 0, ItemSet::full(3)), 3).unwrap();
        assert_eq!(solo.agents(), 1);
        assert!(build_nonres_profile(&Allocation::new(vec![ItemSet::EMPTY, ItemSet::singleton(0)]).unwrap(), 2).is_err());
    }

    /// Every ordered partition of up to four items into non-empty bundles.
    fn ordered_partitions(m: usize) -> Vec<Allocation> {
        (1..=m)
            .flat_map(|n| Allocation::enumerate(n, m))
            .filter(|a| a.allocated() == ItemSet::full(m) && a.bundles().iter().all(|b| !b.is_empty()))
            .collect()
    }

    #[test]
    fn optimum_of_nonres_profile_is_the_partition() {
        for m in 1..=4 {
            for p in ordered_partitions(m) {
                let prof = build_nonres_profile(&p, m).unwrap();
                assert_eq!(solve_optimal(&prof).unwrap(), p);
                let strict = build_strict_nonres_profile(&p, m).unwrap();
                assert_eq!(solve_optimal(&strict).unwrap(), p);
            }
        }
    }

    #[test]
    fn greedy_is_not_maximal_in_range() {
        let u = Amount::from_units;
        let sm = |items: &[usize], v: i64| Valuation::single_minded(ItemSet::from_items(items.iter().copied()), u(v)).unwrap();
        let conflict = TypeProfile::new(2, vec![sm(&[0, 1], 3), sm(&[0], 2), sm(&[1], 2)]).unwrap();
        let cheap = TypeProfile::new(2, vec![sm(&[0, 1], 1), sm(&[0], 2), sm(&[1], 2)]).unwrap();
        let grid = vec![conflict.clone(), cheap];
        let v = verify_maximal_in_range(&AllocationAlgorithm::Greedy, &grid).unwrap().unwrap();
        assert_eq!(v.profile_index, 0);
        assert_eq!(v.produced_welfare, u(3));
        assert_eq!(v.better_welfare, u(4));

        assert!(verify_maximal_in_range(&AllocationAlgorithm::SingleWinner, &grid).unwrap().is_none());
        assert!(verify_maximal_in_range(&AllocationAlgorithm::optimal(), &grid).unwrap().is_none());
        let r = AllocationRange::single_winner(3, 2);
        assert!(verify_maximal_in_range(&AllocationAlgorithm::InRange(r), &grid).unwrap().is_none());
    }
}
