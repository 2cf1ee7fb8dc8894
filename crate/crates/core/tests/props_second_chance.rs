mod common;

use common::*;
use mechlab::model::{welfare, TypeProfile};
use mechlab::payments::{run_vcg_based, PivotRule};
use mechlab::second_chance::{
    declarations, run_second_chance, run_second_chance_ir, second_chance_utility, Action, Appeal, AppealStatus, BestOf,
    StepMeter,
};
use mechlab::wd::AllocationAlgorithm;
use proptest::prelude::*;
use rand::Rng;

fn algorithms() -> Vec<AllocationAlgorithm> {
    vec![
        AllocationAlgorithm::optimal(),
        AllocationAlgorithm::SingleWinner,
        AllocationAlgorithm::SecondHighest,
        AllocationAlgorithm::Greedy,
    ]
}

fn pivots() -> Vec<PivotRule> {
    vec![PivotRule::Zero, PivotRule::ClarkeExact, PivotRule::ClarkeAlgorithmic]
}

/// Simple appeals, sometimes wrapped in a best-of search that calls `alg`.
fn random_appeal(r: &mut impl Rng, truth: &TypeProfile, agent: usize, alg: &AllocationAlgorithm) -> Appeal {
    let (m, n) = (truth.items(), truth.agents());
    if r.gen_bool(0.3) {
        Appeal::BestOf(Box::new(BestOf {
            agent,
            scoring: truth.valuation(agent).clone(),
            alg: alg.clone(),
            include_input: r.gen_bool(0.5),
            appeals: (0..r.gen_range(0..4)).map(|_| random_simple_appeal(r, m, n, 20)).collect(),
            member_step_limit: None,
        }))
    } else {
        random_simple_appeal(r, m, n, 20)
    }
}

fn appealing_actions(r: &mut impl Rng, truth: &TypeProfile, alg: &AllocationAlgorithm) -> Vec<Action> {
    (0..truth.agents())
        .map(|i| Action::new(truth.valuation(i).clone(), random_appeal(r, truth, i, alg)))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn all_decline_reduces_to_vcg(truth in profile(3, 3), seed in any::<u64>()) {
        let declared = random_profile(&mut rng(seed), truth.items(), truth.agents(), 20);
        for alg in algorithms() {
            for pivot in pivots() {
                let run = run_second_chance(&alg, &naked(&declared), &pivot, 50, &truth).unwrap();
                prop_assert_eq!(run.outcome, run_vcg_based(&alg, &declared, &pivot, &truth).unwrap());
            }
        }
    }

    #[test]
    fn chosen_output_dominates(truth in profile(3, 3), seed in any::<u64>()) {
        let mut r = rng(seed);
        for alg in algorithms() {
            let actions = appealing_actions(&mut r, &truth, &alg);
            let run = run_second_chance(&alg, &actions, &PivotRule::ClarkeAlgorithmic, 10_000, &truth).unwrap();
            let chosen = welfare(&truth, &run.outcome.allocation).unwrap();
            prop_assert!(chosen >= welfare(&truth, &alg.allocate(&truth).unwrap()).unwrap());
            for c in &run.candidates {
                prop_assert!(chosen >= c.declared_welfare);
            }
        }
    }

    #[test]
    fn adding_an_appeal_never_hurts(truth in profile(3, 3), seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let mut r = rng(seed);
        let i = pick.index(truth.agents());
        for alg in algorithms() {
            let mut actions = appealing_actions(&mut r, &truth, &alg);
            actions[i].appeal = Appeal::Decline;
            let before = run_second_chance(&alg, &actions, &PivotRule::Zero, 10_000, &truth).unwrap();
            actions[i].appeal = random_appeal(&mut r, &truth, i, &alg);
            let after = run_second_chance(&alg, &actions, &PivotRule::Zero, 10_000, &truth).unwrap();
            prop_assert!(welfare(&truth, &after.outcome.allocation).unwrap() >= welfare(&truth, &before.outcome.allocation).unwrap());
        }
    }

    #[test]
    fn meter_is_exact(truth in profile(3, 3), seed in any::<u64>()) {
        let mut r = rng(seed);
        for alg in algorithms() {
            let appeal = random_appeal(&mut r, &truth, 0, &alg);
            let cost = appeal.measure(&truth);
            let unlimited = appeal.evaluate(&truth, &mut StepMeter::unlimited()).unwrap();
            let mut exact = StepMeter::new(cost);
            prop_assert_eq!(appeal.evaluate(&truth, &mut exact).unwrap(), unlimited);
            prop_assert_eq!(exact.consumed(), cost);
            if cost > 0 {
                prop_assert!(appeal.evaluate(&truth, &mut StepMeter::new(cost - 1)).is_err());

                let mut actions = naked(&truth);
                actions[0].appeal = appeal.clone();
                let starved = run_second_chance(&alg, &actions, &PivotRule::ClarkeAlgorithmic, cost - 1, &truth).unwrap();
                prop_assert_eq!(starved.appeals[0].status, AppealStatus::Aborted);
                let absent = run_second_chance(&alg, &naked(&truth), &PivotRule::ClarkeAlgorithmic, cost - 1, &truth).unwrap();
                prop_assert_eq!(starved.outcome, absent.outcome);
                let fed = run_second_chance(&alg, &actions, &PivotRule::ClarkeAlgorithmic, cost, &truth).unwrap();
                prop_assert_ne!(fed.appeals[0].status, AppealStatus::Aborted);
            }
        }
    }

    #[test]
    fn utility_identity(truth in profile(3, 3), seed in any::<u64>()) {
        let mut r = rng(seed);
        for alg in algorithms() {
            let mut actions = appealing_actions(&mut r, &truth, &alg);
            // some agents lie
            for a in actions.iter_mut() {
                if r.gen_bool(0.3) {
                    a.declaration = random_valuation(&mut r, truth.items(), 20);
                }
            }
            let declared = declarations(&actions, truth.items()).unwrap();
            for pivot in pivots() {
                let run = run_second_chance(&alg, &actions, &pivot, 10_000, &truth).unwrap();
                for i in 0..truth.agents() {
                    let direct = second_chance_utility(truth.valuation(i), i, &declared, &run.outcome.allocation, &alg, &pivot).unwrap();
                    prop_assert_eq!(direct, run.outcome.utilities[i]);
                }
            }
        }
    }

    #[test]
    fn ir_variant_is_individually_rational(truth in profile(3, 3), seed in any::<u64>()) {
        let mut r = rng(seed);
        for alg in algorithms() {
            let actions = appealing_actions(&mut r, &truth, &alg);
            let run = run_second_chance_ir(&alg, &actions, 10_000, &truth).unwrap();
            prop_assert!(run.outcome.utilities.iter().all(|x| !x.is_negative()));
        }
    }

    #[test]
    fn runs_are_deterministic(truth in profile(3, 4), seed in any::<u64>()) {
        let mut r = rng(seed);
        let alg = AllocationAlgorithm::Greedy;
        let actions = appealing_actions(&mut r, &truth, &alg);
        let a = run_second_chance(&alg, &actions, &PivotRule::ClarkeAlgorithmic, 10_000, &truth).unwrap();
        let b = run_second_chance(&alg, &actions, &PivotRule::ClarkeAlgorithmic, 10_000, &truth).unwrap();
        prop_assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}
