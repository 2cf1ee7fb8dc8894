use super::appeal::{score_candidate, Action, Appeal, BestOf};
use super::mechanism::run_second_chance;
use super::meter::{Exhausted, StepMeter};
use super::revision::{insert_own, opponents_of, RevisionFunction};
use crate::error::{Error, Result};
use crate::model::{Amount, TypeProfile, Valuation};
use crate::payments::PivotRule;
use crate::wd::AllocationAlgorithm;

/// The appeal that makes a truthful declaration feasibly dominant against an
/// appeal-independent revision function.
///
/// On input `w` it looks up the revised action `(w'^i, τ)` for the naked
/// opponents `w^{-i}`, then returns whichever of `w' = (w'^i, w^{-i})` and
/// `τ(w')` the algorithm maps to the better output for the true type.
#[derive(Clone, Debug, PartialEq)]
pub struct FeasiblyTruthfulAppeal {
    pub agent: usize,
    pub true_type: Valuation,
    pub revision: RevisionFunction,
    pub alg: AllocationAlgorithm,
}

impl FeasiblyTruthfulAppeal {
    pub(crate) fn evaluate(&self, input: &TypeProfile, meter: &mut StepMeter) -> Result<Option<TypeProfile>, Exhausted> {
        let opponents = opponents_of(input.valuations(), self.agent);
        let Some(revised) = self.revision.lookup_declarations(&opponents) else {
            return Ok(None);
        };
        let Ok(first) = input.with_agent(self.agent, revised.declaration.clone()) else {
            return Ok(None);
        };
        let first_score = score_candidate(&self.alg, self.agent, &self.true_type, input, &first, meter)?;
        if let Some(second) = revised.appeal.evaluate(&first, meter)? {
            let second_score = score_candidate(&self.alg, self.agent, &self.true_type, input, &second, meter)?;
            if let Some(s2) = second_score {
                if first_score.is_none_or(|s1| s2 > s1) {
                    return Ok(Some(second));
                }
            }
        }
        Ok(Some(first))
    }
}

pub fn build_feasibly_truthful_appeal(
    true_type: &Valuation,
    revision: &RevisionFunction,
    alg: &AllocationAlgorithm,
) -> Result<Appeal> {
    if !revision.is_appeal_independent() {
        return Err(Error::precondition("revision function is not appeal-independent"));
    }
    Ok(Appeal::FeasiblyTruthful(Box::new(FeasiblyTruthfulAppeal {
        agent: revision.agent(),
        true_type: true_type.clone(),
        revision: revision.clone(),
        alg: alg.clone(),
    })))
}

/// Appeals the d-bounded construction tries, in tie-break order.
///
/// The bounded family is lifted so that it also covers the owner's revised
/// declarations: for each declaration `d` in the revision function's range
/// we add `ReplaceOwn(i, d)` and `ReplaceOwn(i, d)` followed by every family
/// member.
pub fn lifted_family(revision: &RevisionFunction) -> Result<Vec<Appeal>> {
    let bound = revision.bound().ok_or_else(|| Error::precondition("revision function carries no d-bound"))?;
    let agent = revision.agent();
    let mut out = bound.family.clone();
    for declaration in revision.range_declarations() {
        let own = Appeal::ReplaceOwn { agent, declaration };
        out.push(own.clone());
        for tau in &bound.family {
            out.push(Appeal::Chain(vec![own.clone(), tau.clone()]));
        }
    }
    Ok(out)
}

pub fn build_d_bounded_appeal(
    true_type: &Valuation,
    revision: &RevisionFunction,
    alg: &AllocationAlgorithm,
) -> Result<Appeal> {
    let appeals = lifted_family(revision)?;
    let limit = revision.bound().map(|b| b.limit(revision.agents()));
    Ok(Appeal::BestOf(Box::new(BestOf {
        agent: revision.agent(),
        scoring: true_type.clone(),
        alg: alg.clone(),
        include_input: true,
        appeals,
        member_step_limit: limit,
    })))
}

/// A domain point where the revised action beats the tested action.
#[derive(Clone, Debug, PartialEq)]
pub struct RegretWitness {
    pub entry: usize,
    pub opponents: Vec<Action>,
    pub revised: Action,
    pub utility_action: Amount,
    pub utility_revised: Amount,
}

/// Checks feasible non-regret of `action` against every domain point of
/// `revision`, returning the first violation.
pub fn check_feasibly_dominant(
    action: &Action,
    revision: &RevisionFunction,
    alg: &AllocationAlgorithm,
    pivot: &PivotRule,
    time_limit: u64,
    true_type: &Valuation,
    items: usize,
) -> Result<Option<RegretWitness>> {
    let agent = revision.agent();
    for (k, entry) in revision.entries().iter().enumerate() {
        let with_action = insert_own(&entry.opponents, agent, action.clone());
        let with_revised = insert_own(&entry.opponents, agent, entry.revised.clone());
        let truths: Vec<Valuation> = insert_own(
            &entry.opponents.iter().map(|a| a.declaration.clone()).collect::<Vec<_>>(),
            agent,
            true_type.clone(),
        );
        let true_types = TypeProfile::new(items, truths)?;
        let u_action = run_second_chance(alg, &with_action, pivot, time_limit, &true_types)?.outcome.utilities[agent];
        let u_revised = run_second_chance(alg, &with_revised, pivot, time_limit, &true_types)?.outcome.utilities[agent];
        if u_revised > u_action {
            return Ok(Some(RegretWitness {
                entry: k,
                opponents: entry.opponents.clone(),
                revised: entry.revised.clone(),
                utility_action: u_action,
                utility_revised: u_revised,
            }));
        }
    }
    Ok(None)
}
