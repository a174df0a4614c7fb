mod common;

use common::{expected_issues, expected_utility, random_batch, random_injection, sort_issues};
use healsim::analyzer::Annotations;
use healsim::model::{ArchitectureModel, FailureKind, RepairOrder};
use healsim::planners::{plan_udriven, PlannerConfig, PlannerId};
use healsim::profiles::{
    generate_realistic, generate_synthetic, normalize_sizes, FailureProfileModel, FailureTrace, TraceLength,
};
use healsim::rules::RuleSet;
use healsim::sim::{run_simulation, SimulationConfig, Timeline};
use healsim::utility::{rule_impact, UtilityLedger};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn planner() -> impl Strategy<Value = PlannerId> {
    prop::sample::select(PlannerId::ALL.to_vec())
}

/// Reward of executing (gain, cost) pairs in order over `horizon`.
fn reward(rules: &[(f64, f64)], horizon: f64) -> f64 {
    let mut t = 0.0;
    rules
        .iter()
        .map(|&(g, c)| {
            t += c;
            g * (horizon - t)
        })
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn ledger_tracks_full_recomputation(seed in any::<u64>(), shops in 1usize..=10, batches in 1usize..40) {
        let mut model = ArchitectureModel::build(shops, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ledger = UtilityLedger::new(&model);
        let rules = RuleSet::default();
        for _ in 0..batches {
            let events = random_batch(&mut model, &mut rng, &rules);
            ledger.observe(&model, &events);
            prop_assert!((ledger.total() - expected_utility(&model)).abs() <= 1e-9);
        }
    }

    #[test]
    fn analyzer_matches_scan_within_work_bound(seed in any::<u64>(), shops in 1usize..=10, batches in 1usize..40) {
        let mut model = ArchitectureModel::build(shops, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ann = Annotations::new();
        let rules = RuleSet::default();
        for b in 0..batches {
            let events = random_batch(&mut model, &mut rng, &rules);
            let stored = ann.issue_count();
            let stats = ann.analyze(&events, &model, b as f64);
            prop_assert_eq!(stats.checks, stored);
            prop_assert!(stats.match_attempts <= 6 * events.len());
            let mut got: Vec<_> = ann.issues().map(|i| (i.kind, i.anchor)).collect();
            sort_issues(&mut got);
            prop_assert_eq!(got, expected_issues(&model));
        }
    }

    #[test]
    fn impact_equals_observed_difference(seed in any::<u64>(), shops in 1usize..=10, background in 0usize..4) {
        let mut model = ArchitectureModel::build(shops, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..background {
            random_injection(&mut model, &mut rng);
        }
        let rules = RuleSet::default();
        for kind in FailureKind::ALL {
            let Some(target) = model.select_target(kind, rng.random()) else { continue };
            let mut m = model.clone();
            m.inject_failure(kind, target, 0.0).unwrap();
            let before = expected_utility(&m);
            for action in rules.actions(&m, &common::issue(kind, target)) {
                let order = RepairOrder { action, failure: kind, target };
                let predicted = rule_impact(&m, &order).unwrap();
                let mut after = m.clone();
                after.apply_repair(&order, 0.0).unwrap();
                prop_assert_eq!(predicted, expected_utility(&after) - before);
            }
        }
    }

    #[test]
    fn udriven_choices_are_best_per_issue(seed in any::<u64>(), shops in 1usize..=10, failures in 1usize..30) {
        let mut model = ArchitectureModel::build(shops, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut events = Vec::new();
        for _ in 0..failures {
            events.extend(common::random_component_injection(&mut model, &mut rng));
        }
        let mut ann = Annotations::new();
        ann.analyze(&events, &model, 0.0);
        let rules = RuleSet::default();
        let plan = plan_udriven(&mut ann.clone(), &model, &rules, usize::MAX).unwrap();
        prop_assert_eq!(plan.len(), ann.issue_count());
        for r in &plan.rules {
            let issue = ann.issue(&r.issue).unwrap();
            for other in rules.instantiate(&model, issue).unwrap() {
                prop_assert!(other.utility_increase <= r.utility_increase);
                if other.utility_increase == r.utility_increase {
                    prop_assert!(other.cost >= r.cost);
                }
            }
        }
        // swapping neighbours never raises reward
        let jobs: Vec<(f64, f64)> = plan.rules.iter().map(|r| (r.utility_increase, r.cost)).collect();
        let horizon: f64 = jobs.iter().map(|j| j.1).sum();
        let base = reward(&jobs, horizon);
        for i in 1..jobs.len() {
            let mut swapped = jobs.clone();
            swapped.swap(i - 1, i);
            prop_assert!(reward(&swapped, horizon) <= base + 1e-9 * base.abs().max(1.0));
        }
    }

    #[test]
    fn timeline_reward_is_additive(steps in prop::collection::vec((0.0f64..50.0, -100.0f64..100.0), 1..30), split in 0.0f64..1.0) {
        let mut tl = Timeline::new(0.0, 10.0);
        let mut t = 0.0;
        for &(dt, u) in &steps {
            t += dt;
            tl.push(t, u);
        }
        let end = t + 5.0;
        // piecewise-constant integral, point by point
        let pts = tl.points();
        let mut area = 0.0;
        for (i, &(t0, u)) in pts.iter().enumerate() {
            let t1 = pts.get(i + 1).map_or(end, |p| p.0);
            area += u * (t1 - t0);
        }
        let whole = tl.reward(0.0, end);
        prop_assert!((whole - area).abs() <= 1e-6 * area.abs().max(1.0));
        let mid = split * end;
        let parts = tl.reward(0.0, mid) + tl.reward(mid, end);
        prop_assert!((whole - parts).abs() <= 1e-6 * whole.abs().max(1.0));
    }
}

fn small_trace(fgs: usize, runs: usize, iat: f64, seed: u64) -> FailureTrace {
    generate_synthetic(fgs, runs, iat, seed).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn simulation_is_deterministic_and_runs_never_overlap(
        seed in any::<u64>(),
        id in planner(),
        fgs in 1usize..20,
        runs in 1usize..8,
        likelihood in prop::sample::select(vec![1.0, 0.75, 0.5]),
    ) {
        let mut config = SimulationConfig::new(3, PlannerConfig::default_for(id), seed);
        config.likelihood = likelihood;
        let trace = small_trace(fgs, runs, 7.0, seed);
        let a = run_simulation(&config, &trace).unwrap();
        let b = run_simulation(&config, &trace).unwrap();
        prop_assert_eq!(&a, &b);
        for w in a.runs.windows(2) {
            prop_assert!(w[0].end_s() <= w[1].trigger_s);
        }
        for e in &a.executions {
            let run = &a.runs[e.run];
            prop_assert!(e.start_s >= run.trigger_s && e.end_s <= run.end_s());
        }
        prop_assert_eq!(a.injected + a.skipped, trace.density());
    }

    #[test]
    fn planning_delay_never_raises_reward(seed in any::<u64>(), id in planner(), fgs in 1usize..10, delay in 0.0f64..30.0) {
        // groups far enough apart that each is handled on its own
        let trace = small_trace(fgs, 4, 500.0, seed);
        let mut config = SimulationConfig::new(3, PlannerConfig::default_for(id), seed);
        let prompt = run_simulation(&config, &trace).unwrap();
        config.planning_delay_s = delay;
        let late = run_simulation(&config, &trace).unwrap();
        prop_assert!(late.reward() <= prompt.reward());
        prop_assert_eq!(late.final_utility, prompt.final_utility);
    }

    #[test]
    fn traces_are_deterministic_and_round_trip(seed in any::<u64>(), name in prop::sample::select(vec!["lri", "deug", "grid5000"])) {
        let model = FailureProfileModel::named(name, TraceLength::Short).unwrap();
        let a = generate_realistic(&model, seed, None).unwrap();
        prop_assert_eq!(&a, &generate_realistic(&model, seed, None).unwrap());
        let csv = a.to_csv();
        let back = FailureTrace::from_csv(&csv).unwrap();
        prop_assert_eq!(back.to_csv(), csv);
        prop_assert!(a.entries.windows(2).all(|w| w[0].time_s <= w[1].time_s));
        prop_assert!(a.entries.iter().all(|e| e.time_s >= 0.0 && e.time_s <= model.duration_s));
    }

    #[test]
    fn normalized_sizes_hit_the_target(sizes in prop::collection::vec(1usize..500, 1..60), target in 60usize..5_000) {
        let out = normalize_sizes(&sizes, target).unwrap();
        prop_assert_eq!(out.len(), sizes.len());
        prop_assert_eq!(out.iter().sum::<usize>(), target);
        prop_assert!(out.iter().all(|&s| s >= 1));
    }
}
