//! Payment rules (VCG-based, Clarke pivots, affine-based) and utility
//! accounting.
//!
//! Payments flow from the mechanism to the agent: a negative payment means
//! the agent pays.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    others_welfare, to_amount, weighted_sum, welfare_unchecked, AffineWeights, Allocation, Amount, Rational,
    TypeProfile,
};
use crate::wd::{solve_affine, solve_optimal, AllocationAlgorithm};

/// The pivot term `h^i(w^{-i})`.
#[derive(Clone, Debug, PartialEq)]
pub enum PivotRule {
    Zero,
    /// `h^i = -g_opt(v̲^i, w^{-i})`.
    ClarkeExact,
    /// `h^i = -g((v̲^i, w^{-i}), k(v̲^i, w^{-i}))` with the mechanism's own `k`.
    ClarkeAlgorithmic,
    /// As [`PivotRule::ClarkeAlgorithmic`] but with a fixed algorithm.
    ClarkeWith(Box<AllocationAlgorithm>),
}

impl PivotRule {
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "zero" => Ok(PivotRule::Zero),
            "clarke_exact" => Ok(PivotRule::ClarkeExact),
            "clarke_algorithmic" => Ok(PivotRule::ClarkeAlgorithmic),
            other => match other.strip_prefix("clarke_with:") {
                Some(alg) => Ok(PivotRule::ClarkeWith(Box::new(AllocationAlgorithm::from_name(alg)?))),
                None => Err(Error::invalid(format!("unknown pivot rule {other:?}"))),
            },
        }
    }

    pub fn name(&self) -> String {
        match self {
            PivotRule::Zero => "zero".into(),
            PivotRule::ClarkeExact => "clarke_exact".into(),
            PivotRule::ClarkeAlgorithmic => "clarke_algorithmic".into(),
            PivotRule::ClarkeWith(alg) => format!("clarke_with:{}", alg.name()),
        }
    }

    /// `h^agent` for the VCG formula. Agent `agent`'s declaration is masked
    /// by the lowest type before anything is computed, so it cannot leak in.
    pub fn pivot(&self, agent: usize, declared: &TypeProfile, alg: &AllocationAlgorithm) -> Result<Amount> {
        let masked = declared.with_lowest(agent);
        self.pivot_on_masked(&masked, alg)
    }

    fn pivot_on_masked(&self, masked: &TypeProfile, alg: &AllocationAlgorithm) -> Result<Amount> {
        let reference = match self {
            PivotRule::Zero => return Ok(Amount::ZERO),
            PivotRule::ClarkeExact => solve_optimal(masked)?,
            PivotRule::ClarkeAlgorithmic => alg.allocate(masked)?,
            PivotRule::ClarkeWith(fixed) => fixed.allocate(masked)?,
        };
        Ok(-welfare_unchecked(masked, &reference))
    }

    /// `h^agent` for the affine formula, measured in weighted welfare.
    pub fn affine_pivot(
        &self,
        agent: usize,
        declared: &TypeProfile,
        alg: &AllocationAlgorithm,
        weights: &AffineWeights,
    ) -> Result<Rational> {
        let masked = declared.with_lowest(agent);
        let reference = match self {
            PivotRule::Zero => return Ok(Rational::from_integer(0)),
            PivotRule::ClarkeExact => solve_affine(&masked, weights, None)?,
            PivotRule::ClarkeAlgorithmic => alg.allocate(&masked)?,
            PivotRule::ClarkeWith(fixed) => fixed.allocate(&masked)?,
        };
        Ok(-weighted_sum(weights, &masked, &reference, None))
    }
}

/// Chosen output, payments, and utilities against the supplied true types.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MechanismOutcome {
    pub allocation: Allocation,
    pub payments: Vec<Amount>,
    pub utilities: Vec<Amount>,
}

impl MechanismOutcome {
    /// `u^i = v^i(o_i) + p^i`.
    pub fn assemble(allocation: Allocation, payments: Vec<Amount>, true_types: &TypeProfile) -> Result<Self> {
        true_types.check_allocation(&allocation)?;
        if payments.len() != true_types.agents() {
            return Err(Error::invalid("payment vector arity differs from the number of agents"));
        }
        let utilities = payments
            .iter()
            .enumerate()
            .map(|(i, p)| true_types.valuation(i).evaluate(allocation.bundle(i)) + *p)
            .collect();
        Ok(MechanismOutcome { allocation, payments, utilities })
    }

    pub fn winner(&self) -> Option<usize> {
        let winners: Vec<usize> = (0..self.allocation.agents())
            .filter(|&i| !self.allocation.bundle(i).is_empty())
            .collect();
        (winners.len() == 1).then(|| winners[0])
    }
}

/// VCG payments for a fixed output: `p^i = Σ_{j≠i} w^j(o) + h^i(w^{-i})`.
pub fn vcg_payments_for(
    output: &Allocation,
    declared: &TypeProfile,
    alg: &AllocationAlgorithm,
    pivot: &PivotRule,
) -> Result<Vec<Amount>> {
    declared.check_allocation(output)?;
    (0..declared.agents())
        .map(|i| Ok(others_welfare(declared, output, i) + pivot.pivot(i, declared, alg)?))
        .collect()
}

pub fn vcg_based_payments(alg: &AllocationAlgorithm, declared: &TypeProfile, pivot: &PivotRule) -> Result<Vec<Amount>> {
    let output = alg.allocate(declared)?;
    vcg_payments_for(&output, declared, alg, pivot)
}

/// `p^i = (1/a_i)(Σ_{j≠i, j>0} a_j w^j(o) + a_0(o) + h^i)`, exact in
/// micro-units or rejected.
pub fn affine_based_payments(
    alg: &AllocationAlgorithm,
    declared: &TypeProfile,
    weights: &AffineWeights,
    pivot: &PivotRule,
) -> Result<Vec<Amount>> {
    weights.check_arity(declared)?;
    let output = alg.allocate(declared)?;
    affine_payments_for(&output, declared, alg, weights, pivot)
}

pub fn affine_payments_for(
    output: &Allocation,
    declared: &TypeProfile,
    alg: &AllocationAlgorithm,
    weights: &AffineWeights,
    pivot: &PivotRule,
) -> Result<Vec<Amount>> {
    weights.check_arity(declared)?;
    declared.check_allocation(output)?;
    (0..declared.agents())
        .map(|i| {
            let inner = weighted_sum(weights, declared, output, Some(i)) + pivot.affine_pivot(i, declared, alg, weights)?;
            to_amount(inner / weights.weight(i).ratio()).map_err(|e| match e {
                Error::InvalidInput(msg) => Error::invalid(format!("payment of agent {i} is inexact: {msg}")),
                other => other,
            })
        })
        .collect()
}

/// `g((v^i, w^{-i}), k(w)) + h^i(w^{-i})`.
pub fn utility_of(
    true_type: &crate::model::Valuation,
    agent: usize,
    declared: &TypeProfile,
    alg: &AllocationAlgorithm,
    pivot: &PivotRule,
) -> Result<Amount> {
    let output = alg.allocate(declared)?;
    let mixed = declared.with_agent(agent, true_type.clone())?;
    Ok(welfare_unchecked(&mixed, &output) + pivot.pivot(agent, declared, alg)?)
}

/// `(1/a_i)(g_a((v^i, w^{-i}), k(w)) + h^i(w^{-i}))`, exactly.
pub fn affine_utility_of(
    true_type: &crate::model::Valuation,
    agent: usize,
    declared: &TypeProfile,
    alg: &AllocationAlgorithm,
    weights: &AffineWeights,
    pivot: &PivotRule,
) -> Result<Rational> {
    weights.check_arity(declared)?;
    let output = alg.allocate(declared)?;
    let mixed = declared.with_agent(agent, true_type.clone())?;
    let total = weighted_sum(weights, &mixed, &output, None) + pivot.affine_pivot(agent, declared, alg, weights)?;
    Ok(total / weights.weight(agent).ratio())
}

pub fn run_vcg_based(
    alg: &AllocationAlgorithm,
    declared: &TypeProfile,
    pivot: &PivotRule,
    true_types: &TypeProfile,
) -> Result<MechanismOutcome> {
    check_same_shape(declared, true_types)?;
    let output = alg.allocate(declared)?;
    let payments = vcg_payments_for(&output, declared, alg, pivot)?;
    MechanismOutcome::assemble(output, payments, true_types)
}

pub fn run_affine_based(
    alg: &AllocationAlgorithm,
    declared: &TypeProfile,
    weights: &AffineWeights,
    pivot: &PivotRule,
    true_types: &TypeProfile,
) -> Result<MechanismOutcome> {
    check_same_shape(declared, true_types)?;
    let output = alg.allocate(declared)?;
    let payments = affine_payments_for(&output, declared, alg, weights, pivot)?;
    MechanismOutcome::assemble(output, payments, true_types)
}

pub(crate) fn check_same_shape(declared: &TypeProfile, true_types: &TypeProfile) -> Result<()> {
    if !declared.same_shape(true_types) {
        return Err(Error::invalid("declared and true profiles differ in agents or items"));
    }
    Ok(())
}
