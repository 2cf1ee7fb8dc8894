use std::fmt;
use std::sync::Arc;

use super::construct::FeasiblyTruthfulAppeal;
use super::meter::{Exhausted, StepMeter};
use crate::model::{welfare_unchecked, Amount, TypeProfile, Valuation};
use crate::wd::AllocationAlgorithm;

pub type HostAppealFn = dyn Fn(&TypeProfile, &mut StepMeter) -> Result<Option<TypeProfile>, Exhausted> + Send + Sync;

/// An appeal implemented by the embedding application. It must be
/// deterministic and charge its own work to the meter it is handed.
#[derive(Clone)]
pub struct HostAppeal {
    name: String,
    func: Arc<HostAppealFn>,
}

impl HostAppeal {
    pub fn new(name: impl Into<String>, func: Arc<HostAppealFn>) -> Self {
        HostAppeal { name: name.into(), func }
    }
}

impl fmt::Debug for HostAppeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HostAppeal").field("name", &self.name).finish_non_exhaustive()
    }
}

impl PartialEq for HostAppeal {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && Arc::ptr_eq(&self.func, &other.func)
    }
}

/// Runs every member appeal on the input and returns the input profile whose
/// output scores best under `(scoring, input^{-agent})`.
#[derive(Clone, Debug, PartialEq)]
pub struct BestOf {
    pub agent: usize,
    pub scoring: Valuation,
    pub alg: AllocationAlgorithm,
    /// Whether the unmodified input competes as candidate zero.
    pub include_input: bool,
    pub appeals: Vec<Appeal>,
    /// Per-member step cap; a member exceeding it counts as declined.
    pub member_step_limit: Option<u64>,
}

/// A deterministic, metered, partial map from declaration profiles to
/// declaration profiles. `None` means the input is outside the appeal's
/// domain.
#[derive(Clone, Debug, PartialEq)]
pub enum Appeal {
    Decline,
    ReplaceOwn { agent: usize, declaration: Valuation },
    ReplaceProfile(TypeProfile),
    Table(Vec<(TypeProfile, TypeProfile)>),
    BestOf(Box<BestOf>),
    /// Applies each appeal to the previous one's output; any decline declines.
    Chain(Vec<Appeal>),
    FeasiblyTruthful(Box<FeasiblyTruthfulAppeal>),
    Host(HostAppeal),
}

impl Appeal {
    pub fn is_decline(&self) -> bool {
        matches!(self, Appeal::Decline)
    }

    /// Evaluates the appeal on `input`. Outputs whose shape differs from the
    /// input are treated as declines.
    pub fn evaluate(&self, input: &TypeProfile, meter: &mut StepMeter) -> Result<Option<TypeProfile>, Exhausted> {
        let out = self.evaluate_raw(input, meter)?;
        Ok(out.filter(|p| p.same_shape(input)))
    }

    fn evaluate_raw(&self, input: &TypeProfile, meter: &mut StepMeter) -> Result<Option<TypeProfile>, Exhausted> {
        match self {
            Appeal::Decline => Ok(None),
            Appeal::ReplaceOwn { agent, declaration } => Ok(input.with_agent(*agent, declaration.clone()).ok()),
            Appeal::ReplaceProfile(p) => Ok(Some(p.clone())),
            Appeal::Table(entries) => Ok(entries.iter().find(|(k, _)| k == input).map(|(_, v)| v.clone())),
            Appeal::BestOf(best) => best.evaluate(input, meter),
            Appeal::Chain(steps) => {
                let mut cur = input.clone();
                for step in steps {
                    match step.evaluate(&cur, meter)? {
                        Some(next) => cur = next,
                        None => return Ok(None),
                    }
                }
                Ok(Some(cur))
            }
            Appeal::FeasiblyTruthful(ft) => ft.evaluate(input, meter),
            Appeal::Host(h) => (h.func)(input, meter),
        }
    }

    /// Steps this appeal consumes on `input` with no budget pressure.
    pub fn measure(&self, input: &TypeProfile) -> u64 {
        let mut meter = StepMeter::unlimited();
        let _ = self.evaluate(input, &mut meter);
        meter.consumed()
    }
}

/// Runs `alg` on a candidate input and scores its output under
/// `(scoring, reference^{-agent})`, charging the invocation and `n`
/// valuation evaluations. Algorithm failures drop the candidate.
pub(crate) fn score_candidate(
    alg: &AllocationAlgorithm,
    agent: usize,
    scoring: &Valuation,
    reference: &TypeProfile,
    candidate: &TypeProfile,
    meter: &mut StepMeter,
) -> Result<Option<Amount>, Exhausted> {
    let n = reference.agents();
    meter.charge(alg.invocation_cost(n))?;
    let Ok(output) = alg.allocate(candidate) else {
        return Ok(None);
    };
    meter.charge(n as u64)?;
    let Ok(mixed) = reference.with_agent(agent, scoring.clone()) else {
        return Ok(None);
    };
    Ok(Some(welfare_unchecked(&mixed, &output)))
}

impl BestOf {
    fn evaluate(&self, input: &TypeProfile, meter: &mut StepMeter) -> Result<Option<TypeProfile>, Exhausted> {
        let mut candidates = Vec::with_capacity(self.appeals.len() + 1);
        if self.include_input {
            candidates.push(input.clone());
        }
        for member in &self.appeals {
            if let Some(p) = run_member(member, input, meter, self.member_step_limit)? {
                candidates.push(p);
            }
        }
        let mut best: Option<(Amount, TypeProfile)> = None;
        for cand in candidates {
            let Some(score) = score_candidate(&self.alg, self.agent, &self.scoring, input, &cand, meter)? else {
                continue;
            };
            if best.as_ref().is_none_or(|(s, _)| score > *s) {
                best = Some((score, cand));
            }
        }
        Ok(best.map(|(_, p)| p))
    }
}

/// Evaluates a member appeal, optionally under its own step cap. A member
/// that exceeds its own cap declines; running out of the parent's budget
/// aborts the parent.
pub(crate) fn run_member(
    member: &Appeal,
    input: &TypeProfile,
    meter: &mut StepMeter,
    limit: Option<u64>,
) -> Result<Option<TypeProfile>, Exhausted> {
    let Some(limit) = limit else {
        return member.evaluate(input, meter);
    };
    let available = meter.remaining();
    let mut child = StepMeter::new(limit.min(available));
    let result = member.evaluate(input, &mut child);
    meter.charge(child.consumed())?;
    match result {
        Ok(out) => Ok(out),
        Err(Exhausted) if limit <= available => Ok(None),
        Err(Exhausted) => Err(Exhausted),
    }
}

/// A declaration together with an appeal.
#[derive(Clone, Debug, PartialEq)]
pub struct Action {
    pub declaration: Valuation,
    pub appeal: Appeal,
}

impl Action {
    pub fn new(declaration: Valuation, appeal: Appeal) -> Self {
        Action { declaration, appeal }
    }

    /// Declaration with the empty appeal.
    pub fn naked(declaration: Valuation) -> Self {
        Action { declaration, appeal: Appeal::Decline }
    }

    pub fn is_truthful(&self, true_type: &Valuation) -> bool {
        &self.declaration == true_type
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Amount;

    fn u(x: i64) -> Amount {
        Amount::from_units(x)
    }

    fn single_item(values: &[i64]) -> TypeProfile {
        let vals = values.iter().map(|&x| Valuation::additive(vec![u(x)]).unwrap()).collect();
        TypeProfile::new(1, vals).unwrap()
    }

    #[test]
    fn combinators_transform_profiles() {
        let w = single_item(&[2000, 1700, 1000]);
        let mut meter = StepMeter::new(0);
        let own = Appeal::ReplaceOwn { agent: 0, declaration: Valuation::additive(vec![u(1500)]).unwrap() };
        assert_eq!(own.evaluate(&w, &mut meter).unwrap(), Some(single_item(&[1500, 1700, 1000])));
        assert_eq!(Appeal::Decline.evaluate(&w, &mut meter).unwrap(), None);

        let table = Appeal::Table(vec![(w.clone(), single_item(&[1, 2, 3]))]);
        assert_eq!(table.evaluate(&w, &mut meter).unwrap(), Some(single_item(&[1, 2, 3])));
        assert_eq!(table.evaluate(&single_item(&[0, 0, 0]), &mut meter).unwrap(), None);

        let wrong_shape = Appeal::ReplaceProfile(single_item(&[1, 2]));
        assert_eq!(wrong_shape.evaluate(&w, &mut meter).unwrap(), None);

        let chain = Appeal::Chain(vec![own.clone(), Appeal::ReplaceOwn { agent: 1, declaration: Valuation::zero(1) }]);
        assert_eq!(chain.evaluate(&w, &mut meter).unwrap(), Some(single_item(&[1500, 0, 1000])));
        assert_eq!(meter.consumed(), 0);
    }

    #[test]
    fn best_of_charges_and_picks() {
        let w = single_item(&[2000, 1700, 1000]);
        let best = Appeal::BestOf(Box::new(BestOf {
            agent: 0,
            scoring: w.valuation(0).clone(),
            alg: AllocationAlgorithm::SecondHighest,
            include_input: true,
            appeals: vec![Appeal::ReplaceOwn { agent: 0, declaration: Valuation::additive(vec![u(1500)]).unwrap() }],
            member_step_limit: None,
        }));
        // two candidates, each one invocation plus three evaluations
        assert_eq!(best.measure(&w), 8);
        let mut exact = StepMeter::new(8);
        assert_eq!(best.evaluate(&w, &mut exact).unwrap(), Some(single_item(&[1500, 1700, 1000])));
        let mut short = StepMeter::new(7);
        assert_eq!(best.evaluate(&w, &mut short), Err(Exhausted));
    }

    #[test]
    fn member_limit_declines_member_only() {
        let w = single_item(&[3, 2]);
        let costly = Appeal::BestOf(Box::new(BestOf {
            agent: 1,
            scoring: w.valuation(1).clone(),
            alg: AllocationAlgorithm::SingleWinner,
            include_input: true,
            appeals: vec![],
            member_step_limit: None,
        }));
        assert_eq!(costly.measure(&w), 3);
        let mut meter = StepMeter::new(100);
        assert_eq!(run_member(&costly, &w, &mut meter, Some(2)).unwrap(), None);
        assert_eq!(meter.consumed(), 1);
        let mut tight = StepMeter::new(2);
        assert_eq!(run_member(&costly, &w, &mut tight, Some(10)), Err(Exhausted));
    }
}
