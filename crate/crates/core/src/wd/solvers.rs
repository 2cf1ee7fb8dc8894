use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::model::{
    weighted_sum, welfare_unchecked, AffineWeights, Allocation, Amount, ItemSet, Rational, TypeProfile,
};

use super::range::AllocationRange;

/// Default item cap for exact winner determination.
pub const DEFAULT_OPTIMAL_MAX_ITEMS: usize = 12;

/// Item cap for solvers that enumerate all `(n+1)^m` allocations.
pub const ENUMERATION_MAX_ALLOCATIONS: usize = 1 << 20;

/// Exact welfare maximization by dynamic programming over item subsets.
///
/// `best[i][R]` is the best welfare agents `i..n` can reach using items `R`.
/// Reconstruction picks, agent by agent, the smallest bitmask that still
/// reaches the optimum, which yields the lexicographically smallest optimal
/// allocation.
pub fn solve_optimal_with_budget(profile: &TypeProfile, max_items: usize) -> Result<Allocation> {
    let m = profile.items();
    let n = profile.agents();
    if m > max_items {
        return Err(Error::resource(format!("exact winner determination over {m} items"), max_items as u64));
    }
    let full = 1usize << m;
    let values: Vec<Vec<i64>> = profile
        .valuations()
        .iter()
        .map(|v| v.to_table(m).into_iter().map(Amount::micros).collect())
        .collect();

    let mut best = vec![vec![0i64; full]; n + 1];
    for i in (0..n).rev() {
        let (head, tail) = best.split_at_mut(i + 1);
        let (cur, next) = (&mut head[i], &tail[0]);
        for r in 0..full {
            let mut b = r;
            let mut top = i64::MIN;
            loop {
                top = top.max(values[i][b] + next[r ^ b]);
                if b == 0 {
                    break;
                }
                b = (b - 1) & r;
            }
            cur[r] = top;
        }
    }

    let mut remaining = full - 1;
    let mut bundles = Vec::with_capacity(n);
    for i in 0..n {
        let target = best[i][remaining];
        let chosen = ItemSet::from_bits(remaining as u32)
            .subsets()
            .map(|s| s.bits() as usize)
            .find(|&b| values[i][b] + best[i + 1][remaining ^ b] == target)
            .expect("dp optimum is attained by some bundle");
        bundles.push(ItemSet::from_bits(chosen as u32));
        remaining ^= chosen;
    }
    Allocation::new(bundles)
}

pub fn solve_optimal(profile: &TypeProfile) -> Result<Allocation> {
    solve_optimal_with_budget(profile, DEFAULT_OPTIMAL_MAX_ITEMS)
}

/// All items to the agent with the largest `v^i(S)`; ties to the smaller index.
pub fn solve_single_winner(profile: &TypeProfile) -> Allocation {
    let universe = profile.universe();
    let winner = (0..profile.agents())
        .max_by(|&a, &b| {
            let va = profile.valuation(a).evaluate(universe);
            let vb = profile.valuation(b).evaluate(universe);
            va.cmp(&vb).then(b.cmp(&a))
        })
        .unwrap_or(0);
    Allocation::all_to(profile.agents(), winner, universe)
}

/// All items to the agent ranked second by `v^i(S)` (ties by index); a single
/// agent wins outright.
pub fn solve_second_highest(profile: &TypeProfile) -> Allocation {
    let universe = profile.universe();
    let mut ranked: Vec<usize> = (0..profile.agents()).collect();
    ranked.sort_by(|&a, &b| {
        let va = profile.valuation(a).evaluate(universe);
        let vb = profile.valuation(b).evaluate(universe);
        vb.cmp(&va).then(a.cmp(&b))
    });
    let winner = if ranked.len() >= 2 { ranked[1] } else { ranked[0] };
    Allocation::all_to(profile.agents(), winner, universe)
}

#[derive(Clone, Copy, Debug)]
struct Atom {
    agent: usize,
    bundle: ItemSet,
    value: Amount,
}

/// Orders atoms by `value / sqrt(|bundle|)` descending, then larger value,
/// smaller agent, smaller bundle bitmask. Compared exactly via squares.
fn density_order(a: &Atom, b: &Atom) -> Ordering {
    let lhs = (a.value.micros() as i128).pow(2) * b.bundle.len() as i128;
    let rhs = (b.value.micros() as i128).pow(2) * a.bundle.len() as i128;
    rhs.cmp(&lhs)
        .then(b.value.cmp(&a.value))
        .then(a.agent.cmp(&b.agent))
        .then(a.bundle.cmp(&b.bundle))
}

/// Greedy set packing over atomic bids by bid density, at most one atom per
/// agent.
pub fn solve_greedy(profile: &TypeProfile) -> Allocation {
    let m = profile.items();
    let mut atoms: Vec<Atom> = profile
        .valuations()
        .iter()
        .enumerate()
        .flat_map(|(agent, v)| {
            v.atoms(m)
                .into_iter()
                .map(move |(bundle, value)| Atom { agent, bundle, value })
        })
        .collect();
    atoms.sort_by(density_order);

    let mut bundles = vec![ItemSet::EMPTY; profile.agents()];
    let mut served = vec![false; profile.agents()];
    let mut taken = ItemSet::EMPTY;
    for atom in atoms {
        if served[atom.agent] || !atom.bundle.is_disjoint(taken) {
            continue;
        }
        served[atom.agent] = true;
        bundles[atom.agent] = atom.bundle;
        taken = taken.union(atom.bundle);
    }
    Allocation::new(bundles).expect("greedy only accepts disjoint atoms")
}

/// Welfare argmax over an explicit range; ties to the smallest allocation.
pub fn solve_in_range(profile: &TypeProfile, range: &AllocationRange) -> Result<Allocation> {
    range.check_profile(profile)?;
    let mut best: Option<(Amount, &Allocation)> = None;
    for alloc in range.allocations() {
        let w = welfare_unchecked(profile, alloc);
        best = match best {
            Some((bw, ba)) if bw > w || (bw == w && ba <= alloc) => Some((bw, ba)),
            _ => Some((w, alloc)),
        };
    }
    Ok(best.expect("ranges are non-empty").1.clone())
}

/// Argmax of `g_a(w, ·)` over `range`, or over every allocation when no range
/// is given. Ties to the smallest allocation.
pub fn solve_affine(profile: &TypeProfile, weights: &AffineWeights, range: Option<&AllocationRange>) -> Result<Allocation> {
    weights.check_arity(profile)?;
    let owned;
    let candidates: &[Allocation] = match range {
        Some(r) => {
            r.check_profile(profile)?;
            r.allocations()
        }
        None => {
            let count = (profile.agents() + 1).checked_pow(profile.items() as u32);
            if count.is_none_or(|c| c > ENUMERATION_MAX_ALLOCATIONS) {
                return Err(Error::resource(
                    "affine maximization by enumeration",
                    ENUMERATION_MAX_ALLOCATIONS as u64,
                ));
            }
            owned = Allocation::enumerate(profile.agents(), profile.items());
            &owned
        }
    };
    let mut best: Option<(Rational, &Allocation)> = None;
    for alloc in candidates {
        let score = weighted_sum(weights, profile, alloc, None);
        best = match best {
            Some((bs, ba)) if bs > score || (bs == score && ba <= alloc) => Some((bs, ba)),
            _ => Some((score, alloc)),
        };
    }
    Ok(best.expect("non-empty candidate set").1.clone())
}
