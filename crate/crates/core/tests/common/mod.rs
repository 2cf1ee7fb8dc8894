//! Generators shared by the integration, property and acceptance suites.
#![allow(dead_code)]

use mechlab::model::{monotone_closure, Amount, ItemSet, TypeProfile, Valuation};
use mechlab::second_chance::{Action, Appeal};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn u(x: i64) -> Amount {
    Amount::from_units(x)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Values are whole units in `0..=max`, which keeps welfare ties frequent.
pub fn random_valuation<R: Rng>(rng: &mut R, m: usize, max: i64) -> Valuation {
    let full = ItemSet::full(m);
    let nonempty = || full.subsets().filter(|s| !s.is_empty()).collect::<Vec<_>>();
    match rng.gen_range(0..4) {
        0 => {
            let table: Vec<Amount> = full
                .subsets()
                .map(|s| if s.is_empty() { Amount::ZERO } else { u(rng.gen_range(0..=max)) })
                .collect();
            monotone_closure(&table).unwrap()
        }
        1 => {
            let bundles = nonempty();
            let b = bundles[rng.gen_range(0..bundles.len())];
            Valuation::single_minded(b, u(rng.gen_range(0..=max))).unwrap()
        }
        2 => Valuation::additive((0..m).map(|_| u(rng.gen_range(0..=max))).collect()).unwrap(),
        _ => {
            let bundles = nonempty();
            let k = rng.gen_range(1..=3);
            let bids = (0..k)
                .map(|_| (bundles[rng.gen_range(0..bundles.len())], u(rng.gen_range(0..=max))))
                .collect();
            Valuation::xor(bids).unwrap()
        }
    }
}

pub fn random_profile<R: Rng>(rng: &mut R, m: usize, n: usize, max: i64) -> TypeProfile {
    TypeProfile::new(m, (0..n).map(|_| random_valuation(rng, m, max)).collect()).unwrap()
}

/// A cheap appeal that needs no algorithm call: decline, replace one
/// declaration, or replace the whole profile.
pub fn random_simple_appeal<R: Rng>(rng: &mut R, m: usize, n: usize, max: i64) -> Appeal {
    match rng.gen_range(0..3) {
        0 => Appeal::Decline,
        1 => Appeal::ReplaceOwn { agent: rng.gen_range(0..n), declaration: random_valuation(rng, m, max) },
        _ => Appeal::ReplaceProfile(random_profile(rng, m, n, max)),
    }
}

pub fn truthful_actions<R: Rng>(rng: &mut R, truth: &TypeProfile, max: i64, with_appeals: bool) -> Vec<Action> {
    let (m, n) = (truth.items(), truth.agents());
    truth
        .valuations()
        .iter()
        .map(|v| {
            let appeal = if with_appeals { random_simple_appeal(rng, m, n, max) } else { Appeal::Decline };
            Action::new(v.clone(), appeal)
        })
        .collect()
}

pub fn naked(p: &TypeProfile) -> Vec<Action> {
    p.valuations().iter().cloned().map(Action::naked).collect()
}

// proptest strategies

pub fn amount_units(max: i64) -> impl Strategy<Value = Amount> {
    (0..=max).prop_map(u)
}

pub fn bundle(m: usize) -> impl Strategy<Value = ItemSet> {
    (1u32..(1u32 << m)).prop_map(ItemSet::from_bits)
}

pub fn valuation(m: usize) -> impl Strategy<Value = Valuation> {
    let size = 1usize << m;
    prop_oneof![
        prop::collection::vec(0i64..=20, size).prop_map(|raw| {
            let table: Vec<Amount> = raw.iter().enumerate().map(|(k, &x)| if k == 0 { Amount::ZERO } else { u(x) }).collect();
            monotone_closure(&table).unwrap()
        }),
        (bundle(m), amount_units(20)).prop_map(|(b, x)| Valuation::single_minded(b, x).unwrap()),
        prop::collection::vec(amount_units(20), m).prop_map(|xs| Valuation::additive(xs).unwrap()),
        prop::collection::vec((bundle(m), amount_units(20)), 1..4).prop_map(|bids| Valuation::xor(bids).unwrap()),
    ]
}

/// Profiles with `m` in `1..=max_m` items and `n` in `1..=max_n` agents.
pub fn profile(max_m: usize, max_n: usize) -> impl Strategy<Value = TypeProfile> {
    (1..=max_m, 1..=max_n).prop_flat_map(|(m, n)| {
        prop::collection::vec(valuation(m), n).prop_map(move |vals| TypeProfile::new(m, vals).unwrap())
    })
}
