use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use super::model::{welfare_of, forcing_type, CmapInstance, CmapOutput, CmapType};
use super::solve::{solve_cmap_optimal, CmapAlgorithm};
use crate::error::{Error, Result};
use crate::model::{serialize_rational, Amount, Rational, MICROS_PER_UNIT};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegeneracyReport {
    pub optimal: CmapOutput,
    pub produced: CmapOutput,
    pub optimal_welfare: Amount,
    pub produced_welfare: Amount,
    /// `(g_opt - g_k) / (|g_opt| + 1)`, never negative.
    #[serde(serialize_with = "serialize_rational")]
    pub ratio: Rational,
    /// The same quotient with the numerator taken as `g_k - g_opt`.
    #[serde(serialize_with = "serialize_rational")]
    pub printed_ratio: Rational,
}

pub fn degeneracy_report(instance: &CmapInstance, alg: &CmapAlgorithm, v: &CmapType) -> Result<DegeneracyReport> {
    let optimal = solve_cmap_optimal(instance, v)?;
    let produced = alg.run(instance, v)?;
    let g_opt = welfare_of(v, &optimal);
    let g_k = welfare_of(v, &produced);
    let den = i128::from(g_opt.abs().micros()) + i128::from(MICROS_PER_UNIT);
    let ratio = Ratio::new(i128::from((g_opt - g_k).micros()), den);
    Ok(DegeneracyReport { optimal, produced, optimal_welfare: g_opt, produced_welfare: g_k, printed_ratio: -ratio, ratio })
}

pub fn degeneracy_ratio(instance: &CmapInstance, alg: &CmapAlgorithm, v: &CmapType) -> Result<Rational> {
    Ok(degeneracy_report(instance, alg, v)?.ratio)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EscalationStep {
    pub alpha: Amount,
    pub forced_type: CmapType,
    #[serde(flatten)]
    pub report: DegeneracyReport,
}

/// Forces the seed's optimal output ever harder and records how far the
/// algorithm falls behind on each forced type.
pub fn escalate_degeneracy(
    instance: &CmapInstance,
    alg: &CmapAlgorithm,
    seed: &CmapType,
    alphas: &[Amount],
) -> Result<Vec<EscalationStep>> {
    let seed_report = degeneracy_report(instance, alg, seed)?;
    if seed_report.produced_welfare >= seed_report.optimal_welfare {
        return Err(Error::precondition(format!(
            "{} is already optimal on the seed type; escalation needs a suboptimal start",
            alg.name()
        )));
    }
    let y = seed_report.optimal;
    alphas
        .par_iter()
        .map(|&alpha| {
            let z = forcing_type(seed, &y, alpha)?;
            let report = degeneracy_report(instance, alg, &z)?;
            Ok(EscalationStep { alpha, forced_type: z, report })
        })
        .collect()
}
