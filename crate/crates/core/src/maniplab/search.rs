use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::grid::DeclarationGrid;
use super::mechanism::Mechanism;
use crate::error::{Error, Result};
use crate::model::{serialize_rational, to_amount, Allocation, Amount, Rational, TypeProfile, Valuation};

/// Profiles beyond this count are refused by [`certify_truthful_on_grid`].
pub const CERTIFY_MAX_PROFILES: usize = 1 << 22;

/// A profile where one agent gains by misreporting while the others are
/// truthful.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ManipulationWitness {
    pub agent: usize,
    pub true_type: Valuation,
    /// Truthful declarations, which are also the true types.
    pub profile: TypeProfile,
    pub deviation: Valuation,
    /// Utilities and gain in micro-units.
    #[serde(serialize_with = "serialize_rational")]
    pub truthful_utility: Rational,
    #[serde(serialize_with = "serialize_rational")]
    pub deviating_utility: Rational,
    #[serde(serialize_with = "serialize_rational")]
    pub gain: Rational,
}

impl ManipulationWitness {
    fn build(mech: &Mechanism, profile: &TypeProfile, agent: usize, deviation: &Valuation) -> Result<Self> {
        let true_type = profile.valuation(agent).clone();
        let truthful_utility = mech.utility(&true_type, agent, profile)?;
        let deviating_utility = mech.utility(&true_type, agent, &profile.with_agent(agent, deviation.clone())?)?;
        Ok(ManipulationWitness {
            agent,
            true_type,
            profile: profile.clone(),
            deviation: deviation.clone(),
            truthful_utility,
            deviating_utility,
            gain: deviating_utility - truthful_utility,
        })
    }

    /// The gain as a currency amount, when it is a whole number of micro-units.
    pub fn gain_amount(&self) -> Option<Amount> {
        to_amount(self.gain).ok()
    }

    /// Recomputes both utilities from scratch and checks the stated gain.
    pub fn replay(&self, mech: &Mechanism) -> Result<bool> {
        if self.profile.valuation(self.agent) != &self.true_type {
            return Ok(false);
        }
        let again = ManipulationWitness::build(mech, &self.profile, self.agent, &self.deviation)?;
        Ok(again == *self && self.gain > Rational::from_integer(0))
    }
}

/// The best deviation for `agent` among `deviations`, others truthful.
/// Ties go to the earliest deviation; `None` if nothing gains.
pub fn find_manipulation(
    mech: &Mechanism,
    profile: &TypeProfile,
    agent: usize,
    deviations: &[Valuation],
) -> Result<Option<ManipulationWitness>> {
    if agent >= profile.agents() {
        return Err(Error::invalid(format!("agent {agent} out of range")));
    }
    let alg = mech.alg();
    let base = mech.score(profile, agent, &alg.allocate(profile)?);
    let mut best: Option<(Rational, &Valuation)> = None;
    for dev in deviations {
        let output = alg.allocate(&profile.with_agent(agent, dev.clone())?)?;
        let gain = mech.score(profile, agent, &output) - base;
        if gain > Rational::from_integer(0) && best.as_ref().is_none_or(|(g, _)| gain > *g) {
            best = Some((gain, dev));
        }
    }
    best.map(|(_, dev)| ManipulationWitness::build(mech, profile, agent, dev)).transpose()
}

/// Exhaustive truthfulness check over every grid profile, agent and
/// deviation. Returns the best deviation at the first `(profile, agent)`
/// in grid order that admits a profitable one.
pub fn certify_truthful_on_grid(mech: &Mechanism, grid: &DeclarationGrid) -> Result<Option<ManipulationWitness>> {
    certify_with_limit(mech, grid, CERTIFY_MAX_PROFILES)
}

pub fn certify_with_limit(mech: &Mechanism, grid: &DeclarationGrid, limit: usize) -> Result<Option<ManipulationWitness>> {
    let count = grid.profile_count().filter(|&c| c <= limit).ok_or_else(|| Error::resource("grid profiles", limit as u64))?;
    let alg = mech.alg();
    // every deviation profile is itself a grid profile, so one output per
    // profile covers all comparisons
    let outputs: Vec<Allocation> = (0..count).into_par_iter().map(|k| alg.allocate(&grid.profile(k))).collect::<Result<_>>()?;
    let found = (0..count).into_par_iter().find_map_first(|k| {
        let profile = grid.profile(k);
        let mut digits = grid.digits(k);
        for agent in 0..grid.agents() {
            let own = digits[agent];
            let base = mech.score(&profile, agent, &outputs[k]);
            let mut best: Option<(Rational, usize)> = None;
            for d in 0..grid.candidates(agent).len() {
                digits[agent] = d;
                let gain = mech.score(&profile, agent, &outputs[grid.index(&digits)]) - base;
                if gain > Rational::from_integer(0) && best.is_none_or(|(g, _)| gain > g) {
                    best = Some((gain, d));
                }
            }
            digits[agent] = own;
            if let Some((_, d)) = best {
                return Some(ManipulationWitness::build(mech, &profile, agent, &grid.candidates(agent)[d]));
            }
        }
        None
    });
    found.transpose()
}

/// Samples `(profile, agent, deviation)` triples uniformly from the grid and
/// recomputes utilities directly through the payment rules. Returns the
/// first profitable sample.
pub fn random_replay(
    mech: &Mechanism,
    grid: &DeclarationGrid,
    samples: usize,
    seed: u64,
) -> Result<Option<ManipulationWitness>> {
    let count = grid.profile_count().ok_or_else(|| Error::resource("grid profiles", usize::MAX as u64))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<(usize, usize, usize)> = (0..samples)
        .map(|_| {
            let k = rng.gen_range(0..count);
            let agent = rng.gen_range(0..grid.agents());
            let d = rng.gen_range(0..grid.candidates(agent).len());
            (k, agent, d)
        })
        .collect();
    let found = draws.into_par_iter().find_map_first(|(k, agent, d)| {
        let profile = grid.profile(k);
        let dev = &grid.candidates(agent)[d];
        let run = || -> Result<Option<ManipulationWitness>> {
            let w = ManipulationWitness::build(mech, &profile, agent, dev)?;
            Ok((w.gain > Rational::from_integer(0)).then_some(w))
        };
        run().transpose()
    });
    found.transpose()
}
