//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line and then
//! asserts, so `cargo test --test acceptance -- --nocapture` gives a summary.

mod common;

use std::time::Instant;

use common::*;
use mechlab::cmap::{escalate_degeneracy, samples, CmapAlgorithm, CmapInstance, CmapType};
use mechlab::io::parse_cmap;
use mechlab::maniplab::{
    certify_truthful_on_grid, covering_partitions, demo_nonoptimal_vickrey, demo_nonreasonable, random_replay,
    DeclarationGrid, Mechanism, ALICE, BOB,
};
use mechlab::model::{
    welfare, AffineWeights, Allocation, AllocationBonus, Amount, Rational, TypeProfile, Valuation, Weight,
};
use mechlab::payments::{affine_utility_of, run_affine_based, run_vcg_based, utility_of, PivotRule};
use mechlab::second_chance::{
    build_d_bounded_appeal, build_feasibly_truthful_appeal, check_feasibly_dominant, declarations, insert_own,
    lifted_family, run_second_chance, run_second_chance_ir, second_chance_utility, Action, Appeal, BestOf, DBound,
    RevisionFunction,
};
use mechlab::wd::{sole_desirers, AllocationAlgorithm, AllocationRange};
use rand::Rng;
use rayon::prelude::*;

fn verdict(id: &str, ok: bool, detail: String) {
    println!("{} criterion {id}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {id} failed: {detail}");
}

fn micros(x: Rational) -> String {
    format!("{} µu", x)
}

#[test]
fn criterion_01_vickrey_reproduction() {
    let start = Instant::now();
    let demo = demo_nonoptimal_vickrey().unwrap();
    let a = demo.vickrey_winner == Some(ALICE) && demo.vickrey_price == u(1700);
    let b = demo.second_highest_winner == Some(BOB) && demo.second_highest_price == u(1000);
    let witness = demo.alice_deviation.clone().expect("a profitable deviation exists");
    let mech = Mechanism::vcg(AllocationAlgorithm::SecondHighest, PivotRule::ClarkeAlgorithmic);
    let replays = witness.replay(&mech).unwrap();
    let gain = witness.gain_amount();
    // the required gain is 1000 units; the exact gain under the payment rule is 300
    let c = replays && gain == Some(u(1000));
    let elapsed = start.elapsed();
    let fast = elapsed.as_secs_f64() < 1.0;
    println!(
        "  (a) Vickrey winner {:?} pays {} units: {}",
        demo.vickrey_winner,
        demo.vickrey_price.to_decimal_string(),
        a
    );
    println!(
        "  (b) second-highest winner {:?} pays {} units: {}",
        demo.second_highest_winner,
        demo.second_highest_price.to_decimal_string(),
        b
    );
    println!(
        "  (c) Alice deviation gain {} (truthful {} → deviating {}), required 1000 units: {}",
        micros(witness.gain),
        micros(witness.truthful_utility),
        micros(witness.deviating_utility),
        c
    );
    verdict(
        "1",
        a && b && c && fast,
        format!("a={a} b={b} c={c} runtime={:.3}s", elapsed.as_secs_f64()),
    );
}

fn small_values() -> Vec<Amount> {
    (0..4).map(u).collect()
}

#[test]
fn criterion_02_vcg_grid_truthful() {
    let start = Instant::now();
    let grid = DeclarationGrid::monotone_tables(2, 3, &small_values()).unwrap();
    let mech = Mechanism::vcg(AllocationAlgorithm::optimal(), PivotRule::ClarkeExact);
    let found = certify_truthful_on_grid(&mech, &grid).unwrap();
    let replay = random_replay(&mech, &grid, 20_000, 11).unwrap();
    verdict(
        "2",
        found.is_none() && replay.is_none() && grid.profile_count() == Some(27_000),
        format!(
            "{} profiles grid-truthful, witness={:?}, random replay clean={}, {:.1}s",
            grid.profile_count().unwrap(),
            found.map(|w| w.gain),
            replay.is_none(),
            start.elapsed().as_secs_f64()
        ),
    );
}

#[test]
fn criterion_03_maximal_in_range_grid_truthful() {
    let grid = DeclarationGrid::monotone_tables(2, 3, &small_values()).unwrap();
    let all = Allocation::enumerate(3, 2);
    let mut r = rng(3);
    let mut ranges = vec![AllocationRange::single_winner(3, 2), AllocationRange::everything(3, 2)];
    for _ in 0..2 {
        let picks: Vec<Allocation> = all.iter().filter(|_| r.gen_bool(0.4)).cloned().collect();
        ranges.push(AllocationRange::new(picks).unwrap());
    }
    let mut clean = 0;
    for range in &ranges {
        let mech = Mechanism::vcg(AllocationAlgorithm::InRange(range.clone()), PivotRule::ClarkeAlgorithmic);
        if certify_truthful_on_grid(&mech, &grid).unwrap().is_none() {
            clean += 1;
        }
    }
    let sizes: Vec<usize> = ranges.iter().map(AllocationRange::len).collect();
    verdict("3", clean == ranges.len(), format!("{clean}/{} ranges grid-truthful (sizes {sizes:?})", ranges.len()));
}

#[test]
fn criterion_04_nonreasonable_witnesses() {
    let start = Instant::now();
    let mut checked = 0;
    let mut valid = 0;
    for m in 1..=4 {
        for n in 1..=m {
            let partitions = covering_partitions(n, m);
            let everything = AllocationRange::everything(n, m);
            let single = AllocationRange::single_winner(n, m);
            let results: Vec<bool> = partitions
                .par_iter()
                .flat_map_iter(|p| {
                    let mut ranges = vec![everything.without(p).unwrap()];
                    if !single.contains(p) {
                        ranges.push(single.clone());
                    }
                    ranges.into_iter().map(move |range| {
                        let demo = demo_nonreasonable(&range, p).unwrap();
                        let Some(w) = demo.witness else { return false };
                        range.contains(&demo.allocation)
                            && demo.allocation == w.allocation
                            && !w.allocation.bundle(w.agent).contains(w.item)
                            && sole_desirers(&w.profile).contains(&(w.agent, w.item))
                    })
                })
                .collect();
            checked += results.len();
            valid += results.iter().filter(|ok| **ok).count();
        }
    }
    verdict(
        "4",
        checked > 0 && valid == checked && start.elapsed().as_secs_f64() < 60.0,
        format!("{valid}/{checked} (partition, range) pairs yield valid witnesses, {:.1}s", start.elapsed().as_secs_f64()),
    );
}

#[test]
fn criterion_05_second_chance_welfare() {
    let algs = [AllocationAlgorithm::Greedy, AllocationAlgorithm::SingleWinner];
    let trials = 10_000u64;
    let failures: usize = (0..trials)
        .into_par_iter()
        .map(|seed| {
            let mut r = rng(seed);
            let alg = &algs[(seed % 2) as usize];
            let (m, n) = (r.gen_range(1..=3), r.gen_range(1..=4));
            let truth = random_profile(&mut r, m, n, 10);
            let actions = truthful_actions(&mut r, &truth, 10, true);
            let run = run_second_chance(alg, &actions, &PivotRule::ClarkeAlgorithmic, 1_000, &truth).unwrap();
            let base = welfare(&truth, &alg.allocate(&truth).unwrap()).unwrap();
            let dominates = welfare(&truth, &run.outcome.allocation).unwrap() >= base;
            let plain = run_second_chance(alg, &naked(&truth), &PivotRule::ClarkeAlgorithmic, 1_000, &truth).unwrap();
            let reduces = plain.outcome == run_vcg_based(alg, &truth, &PivotRule::ClarkeAlgorithmic, &truth).unwrap();
            usize::from(!dominates) + usize::from(!reduces)
        })
        .sum();
    verdict("5", failures == 0, format!("{trials} random action vectors, {failures} violations"));
}

fn algorithm_pool() -> Vec<AllocationAlgorithm> {
    vec![
        AllocationAlgorithm::optimal(),
        AllocationAlgorithm::Greedy,
        AllocationAlgorithm::SingleWinner,
        AllocationAlgorithm::SecondHighest,
    ]
}

fn pivot_pool() -> Vec<PivotRule> {
    vec![PivotRule::Zero, PivotRule::ClarkeExact, PivotRule::ClarkeAlgorithmic]
}

/// Distinct opponent declaration vectors, at most `size` of them.
fn opponent_keys(r: &mut impl Rng, m: usize, n: usize, size: usize) -> Vec<Vec<Valuation>> {
    let mut keys: Vec<Vec<Valuation>> = Vec::new();
    for _ in 0..size {
        let k: Vec<Valuation> = (0..n - 1).map(|_| random_valuation(r, m, 6)).collect();
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys
}

fn revision_algorithm(r: &mut impl Rng) -> (AllocationAlgorithm, PivotRule) {
    let algs = algorithm_pool();
    let pivots = pivot_pool();
    (algs[r.gen_range(0..algs.len())].clone(), pivots[r.gen_range(0..pivots.len())].clone())
}

fn cost_of_alg(alg: &AllocationAlgorithm, n: usize) -> u64 {
    alg.invocation_cost(n) + n as u64
}

#[test]
fn criterion_06_appeal_independent_revisions() {
    let cases = 120u64;
    let outcomes: Vec<(bool, bool, usize)> = (0..cases)
        .into_par_iter()
        .map(|seed| {
            let mut r = rng(1_000 + seed);
            let (m, n) = (r.gen_range(1..=3), r.gen_range(2..=3));
            let agent = r.gen_range(0..n);
            let (alg, pivot) = revision_algorithm(&mut r);
            let truth = random_valuation(&mut r, m, 6);
            let size = r.gen_range(1..=20);
            let keys = opponent_keys(&mut r, m, n, size);
            let entries: Vec<(Vec<Valuation>, Action)> = keys
                .into_iter()
                .map(|k| {
                    let declaration = random_valuation(&mut r, m, 6);
                    let appeal = if r.gen_bool(0.3) {
                        Appeal::BestOf(Box::new(BestOf {
                            agent,
                            scoring: declaration.clone(),
                            alg: alg.clone(),
                            include_input: r.gen_bool(0.5),
                            appeals: {
                                let k = r.gen_range(1..3);
                                (0..k).map(|_| random_simple_appeal(&mut r, m, n, 6)).collect()
                            },
                            member_step_limit: None,
                        }))
                    } else {
                        random_simple_appeal(&mut r, m, n, 6)
                    };
                    (k, Action::new(declaration, appeal))
                })
                .collect();
            let size = entries.len();
            let revision = RevisionFunction::appeal_independent(agent, n, entries).unwrap();
            let appeal = build_feasibly_truthful_appeal(&truth, &revision, &alg).unwrap();
            let action = Action::new(truth.clone(), appeal.clone());
            let dominant =
                check_feasibly_dominant(&action, &revision, &alg, &pivot, u64::MAX / 4, &truth, m).unwrap().is_none();

            let within_budget = revision.entries().iter().all(|e| {
                let opp: Vec<Valuation> = e.opponents.iter().map(|a| a.declaration.clone()).collect();
                let w = TypeProfile::new(m, insert_own(&opp, agent, truth.clone())).unwrap();
                let w1 = TypeProfile::new(m, insert_own(&opp, agent, e.revised.declaration.clone())).unwrap();
                appeal.measure(&w) <= 2 * cost_of_alg(&alg, n) + e.revised.appeal.measure(&w1)
            });
            (dominant, within_budget, size)
        })
        .collect();
    let regrets = outcomes.iter().filter(|o| !o.0).count();
    let over = outcomes.iter().filter(|o| !o.1).count();
    let max_domain = outcomes.iter().map(|o| o.2).max().unwrap();
    verdict(
        "6",
        regrets == 0 && over == 0,
        format!("{cases} revision functions (domain ≤ {max_domain}), {regrets} regret witnesses, {over} over budget"),
    );
}

/// Step bound for the d-bounded construction: with `L̂` the lifted family,
/// measured ≤ 2·(|L̂|+1)·max(cost(alg), member limit).
const D_BOUND_FACTOR: u64 = 2;

#[test]
fn criterion_07_d_bounded_revisions() {
    let cases = 120u64;
    let outcomes: Vec<(bool, bool)> = (0..cases)
        .into_par_iter()
        .map(|seed| {
            let mut r = rng(5_000 + seed);
            let (m, n) = (r.gen_range(1..=3), r.gen_range(2..=3));
            let d = r.gen_range(1..=2u32);
            let c = 4;
            let agent = r.gen_range(0..n);
            let (alg, pivot) = revision_algorithm(&mut r);
            let truth = random_valuation(&mut r, m, 6);
            let cap = (c * (n as u64).pow(d)) as usize;
            let family_size = r.gen_range(0..=cap.min(6));
            let family: Vec<Appeal> = (0..family_size)
                .map(|_| {
                    if r.gen_bool(0.3) {
                        Appeal::BestOf(Box::new(BestOf {
                            agent,
                            scoring: random_valuation(&mut r, m, 6),
                            alg: alg.clone(),
                            include_input: r.gen_bool(0.5),
                            appeals: vec![random_simple_appeal(&mut r, m, n, 6)],
                            member_step_limit: None,
                        }))
                    } else {
                        random_simple_appeal(&mut r, m, n, 6)
                    }
                })
                .collect();
            let size = r.gen_range(1..=10);
            let keys = opponent_keys(&mut r, m, n, size);
            let entries: Vec<(Vec<Valuation>, Action)> = keys
                .into_iter()
                .map(|k| {
                    let tau = if family.is_empty() || r.gen_bool(0.2) {
                        Appeal::Decline
                    } else {
                        family[r.gen_range(0..family.len())].clone()
                    };
                    (k, Action::new(random_valuation(&mut r, m, 6), tau))
                })
                .collect();
            let revision = RevisionFunction::appeal_independent(agent, n, entries)
                .unwrap()
                .with_d_bound(DBound { d, c, family })
                .unwrap();
            let appeal = build_d_bounded_appeal(&truth, &revision, &alg).unwrap();
            let action = Action::new(truth.clone(), appeal.clone());
            let dominant =
                check_feasibly_dominant(&action, &revision, &alg, &pivot, u64::MAX / 4, &truth, m).unwrap().is_none();

            let lifted = lifted_family(&revision).unwrap().len() as u64;
            let limit = revision.bound().unwrap().limit(n);
            let bound = D_BOUND_FACTOR * (lifted + 1) * cost_of_alg(&alg, n).max(limit);
            let within_budget = revision.entries().iter().all(|e| {
                let opp: Vec<Valuation> = e.opponents.iter().map(|a| a.declaration.clone()).collect();
                let w = TypeProfile::new(m, insert_own(&opp, agent, truth.clone())).unwrap();
                appeal.measure(&w) <= bound
            });
            (dominant, within_budget)
        })
        .collect();
    let regrets = outcomes.iter().filter(|o| !o.0).count();
    let over = outcomes.iter().filter(|o| !o.1).count();
    verdict(
        "7",
        regrets == 0 && over == 0,
        format!("{cases} d-bounded revision functions (d ∈ {{1,2}}, c = {D_BOUND_FACTOR}), {regrets} regret witnesses, {over} over budget"),
    );
}

#[test]
fn criterion_08_individual_rationality() {
    let algs = [AllocationAlgorithm::optimal(), AllocationAlgorithm::Greedy, AllocationAlgorithm::SingleWinner];
    let trials = 10_002u64;
    let violations: usize = (0..trials)
        .into_par_iter()
        .map(|seed| {
            let mut r = rng(20_000 + seed);
            let alg = &algs[(seed % 3) as usize];
            let (m, n) = (r.gen_range(1..=3), r.gen_range(1..=4));
            let truth = random_profile(&mut r, m, n, 10);
            let with_appeals = r.gen_bool(0.5);
            let actions = truthful_actions(&mut r, &truth, 10, with_appeals);
            let run = run_second_chance_ir(alg, &actions, 1_000, &truth).unwrap();
            run.outcome.utilities.iter().filter(|x| x.is_negative()).count()
        })
        .sum();
    verdict("8", violations == 0, format!("{trials} random truthful profiles, {violations} negative utilities"));
}

fn corpus() -> Vec<(String, CmapInstance, CmapType)> {
    let mut out: Vec<(String, CmapInstance, CmapType)> = vec![
        ("parallel_edges".into(), samples::parallel_edges(u(1), u(2)).0, samples::parallel_edges(u(1), u(2)).1),
    ];
    for (name, (i, t)) in [
        ("three_paths", samples::three_paths()),
        ("steiner_gap", samples::steiner_gap()),
        ("diamond", samples::diamond()),
    ] {
        out.push((name.into(), i, t));
    }
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data");
    for name in ["parallel_edges.json", "three_paths.json", "steiner_gap.json"] {
        let text = std::fs::read_to_string(dir.join(name)).unwrap();
        let (i, t) = parse_cmap(&text).unwrap();
        out.push((name.into(), i, t));
    }
    out
}

#[test]
fn criterion_09_degeneracy_escalation() {
    let alphas = [u(10), u(100), u(1000)];
    let (inst, seed) = samples::parallel_edges(u(1), u(2));
    let fixed = CmapAlgorithm::FirstFound { priority: vec![1] };
    let ratios: Vec<Rational> =
        escalate_degeneracy(&inst, &fixed, &seed, &alphas).unwrap().iter().map(|s| s.report.ratio).collect();
    let exact = ratios == [Rational::new(9, 2), Rational::new(99, 2), Rational::new(999, 2)];

    let mut sequences = 0;
    let mut increasing = 0;
    let mut escaped = Vec::new();
    for (name, inst, seed) in corpus() {
        let edges = inst.graph().map_or(0, |g| g.edges().len());
        let mut algs = vec![
            CmapAlgorithm::Heuristic,
            CmapAlgorithm::FirstFound { priority: vec![] },
            CmapAlgorithm::ShortestPathTree,
        ];
        algs.extend((0..edges).map(|e| CmapAlgorithm::FirstFound { priority: vec![e] }));
        for alg in algs {
            // optimal or inapplicable on this seed
            let Ok(steps) = escalate_degeneracy(&inst, &alg, &seed, &alphas) else { continue };
            // the escalation argument needs alg(z) ≠ y at every α
            if steps.iter().any(|s| s.report.produced == s.report.optimal) {
                escaped.push(format!("{name}/{}", alg.name()));
                continue;
            }
            sequences += 1;
            if steps.windows(2).all(|w| w[0].report.ratio < w[1].report.ratio) {
                increasing += 1;
            } else {
                println!("  not strictly increasing: {name} with {}", alg.name());
            }
        }
    }
    verdict(
        "9",
        exact && sequences > 0 && increasing == sequences,
        format!(
            "parallel-edge ratios {:?}; {increasing}/{sequences} corpus sequences strictly increasing; \
             cost-aware runs that reach the optimum on z (excluded): {escaped:?}",
            ratios.iter().map(|r| r.to_string()).collect::<Vec<_>>()
        ),
    );
}

#[test]
fn criterion_10_utility_identities() {
    let trials = 100_000u64;
    let weights = [1i64, 2, 4, 5];
    let failures: usize = (0..trials)
        .into_par_iter()
        .map(|seed| {
            let mut r = rng(90_000 + seed);
            let algs = algorithm_pool();
            let pivots = pivot_pool();
            let alg = &algs[r.gen_range(0..algs.len())];
            let pivot = &pivots[r.gen_range(0..pivots.len())];
            let (m, n) = (r.gen_range(1..=3), r.gen_range(1..=3));
            let truth = random_profile(&mut r, m, n, 10);
            let with_appeals = r.gen_bool(0.5);
            let mut actions = truthful_actions(&mut r, &truth, 10, with_appeals);
            for a in actions.iter_mut() {
                if r.gen_bool(0.4) {
                    a.declaration = random_valuation(&mut r, m, 10);
                }
            }
            let declared = declarations(&actions, m).unwrap();
            let i = r.gen_range(0..n);
            let mut bad = 0;

            let vcg = run_vcg_based(alg, &declared, pivot, &truth).unwrap();
            let direct = truth.valuation(i).evaluate(vcg.allocation.bundle(i)) + vcg.payments[i];
            let lemma = utility_of(truth.valuation(i), i, &declared, alg, pivot).unwrap();
            bad += usize::from(direct != lemma || vcg.utilities[i] != direct);

            let bonus = if r.gen_bool(0.5) {
                AllocationBonus::Zero
            } else {
                AllocationBonus::Constant { value: u(r.gen_range(0..5)) }
            };
            let agent_weights = (0..n).map(|_| Weight::integer(weights[r.gen_range(0..weights.len())]).unwrap()).collect();
            let a = AffineWeights::new(bonus, agent_weights).unwrap();
            let affine = run_affine_based(alg, &declared, &a, pivot, &truth).unwrap();
            let lemma = affine_utility_of(truth.valuation(i), i, &declared, alg, &a, pivot).unwrap();
            bad += usize::from(Rational::from_integer(affine.utilities[i].micros() as i128) != lemma);

            let unit = run_affine_based(alg, &declared, &AffineWeights::unit(n), pivot, &truth).unwrap();
            bad += usize::from(unit != vcg);

            let sc = run_second_chance(alg, &actions, pivot, 1_000, &truth).unwrap();
            let lemma =
                second_chance_utility(truth.valuation(i), i, &declared, &sc.outcome.allocation, alg, pivot).unwrap();
            bad += usize::from(sc.outcome.utilities[i] != lemma);
            bad
        })
        .sum();
    verdict("10", failures == 0, format!("{trials} fuzzed cases × 3 identities + unit-weight reduction, {failures} mismatches"));
}
