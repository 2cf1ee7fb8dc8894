use serde::Serialize;

use super::mechanism::Mechanism;
use super::search::{find_manipulation, ManipulationWitness};
use crate::error::{Error, Result};
use crate::model::{Allocation, Amount, ItemSet, TypeProfile, Valuation};
use crate::payments::{MechanismOutcome, PivotRule};
use crate::wd::{
    build_nonres_profile, build_strict_nonres_profile, check_reasonable, AllocationAlgorithm, AllocationRange,
    ReasonablenessWitness,
};

pub const ALICE: usize = 0;
pub const BOB: usize = 1;

/// One item; Alice, Bob and Charlie value it at 2000, 1700 and 1000 units.
pub fn vickrey_profile() -> TypeProfile {
    let v = |x: i64| Valuation::additive(vec![Amount::from_units(x)]).expect("one item");
    TypeProfile::new(1, vec![v(2000), v(1700), v(1000)]).expect("valid profile")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VickreyDemo {
    pub profile: TypeProfile,
    pub vickrey: MechanismOutcome,
    pub vickrey_winner: Option<usize>,
    /// Amount the winner hands over, i.e. the negated payment.
    pub vickrey_price: Amount,
    pub second_highest: MechanismOutcome,
    pub second_highest_winner: Option<usize>,
    pub second_highest_price: Amount,
    /// Alice's best declaration, scanning 2500 down to 0 in steps of 500.
    pub alice_deviation: Option<ManipulationWitness>,
}

fn price(outcome: &MechanismOutcome) -> Amount {
    outcome.winner().map_or(Amount::ZERO, |w| -outcome.payments[w])
}

/// Declarations Alice may try: 2500, 2000, ..., 0 units.
pub fn alice_grid() -> Vec<Valuation> {
    (0..=5).rev().map(|k| Valuation::additive(vec![Amount::from_units(500 * k)]).expect("one item")).collect()
}

/// Truthful runs of the Vickrey auction and of the second-highest rule with
/// VCG payments, and Alice's best misreport under the latter.
pub fn demo_nonoptimal_vickrey() -> Result<VickreyDemo> {
    let profile = vickrey_profile();
    let vickrey_mech = Mechanism::vcg(AllocationAlgorithm::optimal(), PivotRule::ClarkeExact);
    let second_mech = Mechanism::vcg(AllocationAlgorithm::SecondHighest, PivotRule::ClarkeAlgorithmic);
    let vickrey = vickrey_mech.run(&profile, &profile)?;
    let second_highest = second_mech.run(&profile, &profile)?;
    let alice_deviation = find_manipulation(&second_mech, &profile, ALICE, &alice_grid())?;
    Ok(VickreyDemo {
        vickrey_winner: vickrey.winner(),
        vickrey_price: price(&vickrey),
        second_highest_winner: second_highest.winner(),
        second_highest_price: price(&second_highest),
        profile,
        vickrey,
        second_highest,
        alice_deviation,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NonresProfileKind {
    /// Unit single-minded bids on the partition bundles.
    SingleMinded,
    /// The same bids plus one micro-unit per owned item.
    PerItemTieBreak,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NonreasonableDemo {
    pub partition: Allocation,
    pub profile_kind: NonresProfileKind,
    pub allocation: Allocation,
    pub witness: Option<ReasonablenessWitness>,
}

/// Runs the range maximizer on a profile built to favour a partition the
/// range lacks, and reports an item whose only desirer goes without it.
pub fn demo_nonreasonable(range: &AllocationRange, partition: &Allocation) -> Result<NonreasonableDemo> {
    if range.contains(partition) {
        return Err(Error::precondition("the partition belongs to the range"));
    }
    let n = range.allocations()[0].agents();
    if partition.agents() != n {
        return Err(Error::invalid(format!("partition has {} bundles, range has {n} agents", partition.agents())));
    }
    let m = range
        .allocations()
        .iter()
        .map(|a| a.allocated())
        .chain([partition.allocated()])
        .fold(ItemSet::EMPTY, ItemSet::union)
        .bits();
    let m = (32 - m.leading_zeros()) as usize;
    let alg = AllocationAlgorithm::InRange(range.clone());
    let attempts = [
        (NonresProfileKind::SingleMinded, build_nonres_profile(partition, m)?),
        (NonresProfileKind::PerItemTieBreak, build_strict_nonres_profile(partition, m)?),
    ];
    let mut last = None;
    for (kind, profile) in attempts {
        let allocation = alg.allocate(&profile)?;
        let witness = check_reasonable(&alg, &profile)?;
        let done = witness.is_some();
        last = Some(NonreasonableDemo { partition: partition.clone(), profile_kind: kind, allocation, witness });
        if done {
            break;
        }
    }
    Ok(last.expect("two attempts"))
}

/// Ordered partitions of `m` items into `n` non-empty bundles.
pub fn covering_partitions(n: usize, m: usize) -> Vec<Allocation> {
    let full = ItemSet::full(m);
    Allocation::enumerate(n, m)
        .into_iter()
        .filter(|a| a.allocated() == full && a.bundles().iter().all(|b| !b.is_empty()))
        .collect()
}
