use rayon::prelude::*;
use serde::Serialize;

use super::appeal::Action;
use super::meter::{Exhausted, StepMeter};
use crate::error::{Error, Result};
use crate::model::{welfare_unchecked, Allocation, Amount, TypeProfile, Valuation};
use crate::payments::{check_same_shape, vcg_payments_for, MechanismOutcome, PivotRule};
use crate::wd::AllocationAlgorithm;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AppealStatus {
    Declined,
    /// Ran out of steps; treated as declined.
    Aborted,
    /// Returned a profile on which the algorithm produced an output.
    Accepted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AppealRecord {
    pub agent: usize,
    pub status: AppealStatus,
    pub steps: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Candidate {
    /// `None` for the algorithm's output on the declarations.
    pub appealed_by: Option<usize>,
    pub allocation: Allocation,
    pub declared_welfare: Amount,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SecondChanceRun {
    pub outcome: MechanismOutcome,
    pub candidates: Vec<Candidate>,
    pub chosen: usize,
    pub appeals: Vec<AppealRecord>,
}

/// Profile of declarations carried by an action vector.
pub fn declarations(actions: &[Action], items: usize) -> Result<TypeProfile> {
    TypeProfile::new(items, actions.iter().map(|a| a.declaration.clone()).collect())
}

fn run_appeal(
    alg: &AllocationAlgorithm,
    agent: usize,
    action: &Action,
    declared: &TypeProfile,
    time_limit: u64,
) -> (AppealRecord, Option<Allocation>) {
    let mut meter = StepMeter::new(time_limit);
    let (status, output) = match action.appeal.evaluate(declared, &mut meter) {
        Err(Exhausted) => (AppealStatus::Aborted, None),
        Ok(None) => (AppealStatus::Declined, None),
        Ok(Some(profile)) => match alg.allocate(&profile) {
            Ok(o) => (AppealStatus::Accepted, Some(o)),
            Err(_) => (AppealStatus::Declined, None),
        },
    };
    (AppealRecord { agent, status, steps: meter.consumed() }, output)
}

/// The second chance mechanism: every agent's appeal is evaluated on the
/// declarations under a fresh step budget, the algorithm is run on each
/// returned profile, and the candidate with the highest declared welfare is
/// chosen (ties to the base output, then lower agent index). Payments follow
/// the VCG formula with the given pivot.
pub fn run_second_chance(
    alg: &AllocationAlgorithm,
    actions: &[Action],
    pivot: &PivotRule,
    time_limit: u64,
    true_types: &TypeProfile,
) -> Result<SecondChanceRun> {
    if actions.len() != true_types.agents() {
        return Err(Error::invalid("one action per agent is required"));
    }
    let declared = declarations(actions, true_types.items())?;
    check_same_shape(&declared, true_types)?;

    let base = alg.allocate(&declared)?;
    let evaluated: Vec<(AppealRecord, Option<Allocation>)> = if actions.iter().all(|a| a.appeal.is_decline()) {
        (0..actions.len())
            .map(|i| (AppealRecord { agent: i, status: AppealStatus::Declined, steps: 0 }, None))
            .collect()
    } else {
        actions
            .par_iter()
            .enumerate()
            .map(|(i, a)| run_appeal(alg, i, a, &declared, time_limit))
            .collect()
    };

    let mut candidates = vec![Candidate {
        appealed_by: None,
        declared_welfare: welfare_unchecked(&declared, &base),
        allocation: base,
    }];
    let mut appeals = Vec::with_capacity(evaluated.len());
    for (record, output) in evaluated {
        if let Some(allocation) = output {
            candidates.push(Candidate {
                appealed_by: Some(record.agent),
                declared_welfare: welfare_unchecked(&declared, &allocation),
                allocation,
            });
        }
        appeals.push(record);
    }
    let mut chosen = 0;
    for (k, c) in candidates.iter().enumerate() {
        if c.declared_welfare > candidates[chosen].declared_welfare {
            chosen = k;
        }
    }
    let allocation = candidates[chosen].allocation.clone();
    let payments = vcg_payments_for(&allocation, &declared, alg, pivot)?;
    let outcome = MechanismOutcome::assemble(allocation, payments, true_types)?;
    Ok(SecondChanceRun { outcome, candidates, chosen, appeals })
}

/// `g((v^i, w^{-i}), ô) + h^i(w^{-i})`, the second route to an agent's
/// utility under the second chance mechanism.
pub fn second_chance_utility(
    true_type: &Valuation,
    agent: usize,
    declared: &TypeProfile,
    chosen: &Allocation,
    alg: &AllocationAlgorithm,
    pivot: &PivotRule,
) -> Result<Amount> {
    declared.check_allocation(chosen)?;
    let mixed = declared.with_agent(agent, true_type.clone())?;
    Ok(welfare_unchecked(&mixed, chosen) + pivot.pivot(agent, declared, alg)?)
}

/// Best output under `w` among `alg(w)` and `alg(v̲^i, w^{-i})` for each `i`.
pub fn lowest_type_closure(alg: &AllocationAlgorithm) -> AllocationAlgorithm {
    AllocationAlgorithm::LowestTypeClosure(Box::new(alg.clone()))
}

/// The individually rational variant: the lowest-type closure of `alg`, with
/// `h^i(w^{-i}) = -g((v̲^i, w^{-i}), alg(v̲^i, w^{-i}))`.
pub fn run_second_chance_ir(
    alg: &AllocationAlgorithm,
    actions: &[Action],
    time_limit: u64,
    true_types: &TypeProfile,
) -> Result<SecondChanceRun> {
    let closure = lowest_type_closure(alg);
    let pivot = PivotRule::ClarkeWith(Box::new(alg.clone()));
    run_second_chance(&closure, actions, &pivot, time_limit, true_types)
}
