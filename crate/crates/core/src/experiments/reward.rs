use rayon::prelude::*;

use super::{mean_sd, ResultRow, TraceRef};
use crate::model::topology::SLOTS_PER_SHOP;
use crate::planners::{OracleConfig, OracleStrategy, PlannerConfig, PlannerId};
use crate::profiles::FailureTrace;
use crate::rules::RuleCosts;
use crate::sim::{run_simulation, PlanningTimeMode, SimulationConfig, SimulationResult};
use crate::Error;

#[derive(Debug, Clone, PartialEq)]
pub struct RewardSpec {
    pub shops: usize,
    pub planners: Vec<PlannerConfig>,
    pub traces: Vec<TraceRef>,
    /// Simulation seeds; each seeds the architecture and the success draws.
    pub seeds: Vec<u64>,
    pub likelihoods: Vec<f64>,
    pub k: usize,
    pub planning_time_mode: PlanningTimeMode,
    pub costs: RuleCosts,
    /// Seed for traces whose reference leaves it open.
    pub trace_seed: u64,
}

impl Default for RewardSpec {
    fn default() -> Self {
        RewardSpec {
            shops: 100,
            planners: PlannerId::ALL.into_iter().map(PlannerConfig::default_for).collect(),
            traces: Vec::new(),
            seeds: (0..10).collect(),
            likelihoods: vec![1.0],
            k: 100,
            planning_time_mode: PlanningTimeMode::Calibrated,
            costs: RuleCosts::default(),
            trace_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RewardOutcome {
    pub planner: PlannerId,
    pub trace: String,
    pub seed: u64,
    pub likelihood: f64,
    pub result: SimulationResult,
}

/// The planner as simulated. With calibrated planning time the search cost is
/// not observed, so the oracle uses its per-issue decomposition, which finds
/// the same optimum for rule sets satisfying the independence assumptions.
fn simulated_planner(planner: &PlannerConfig, mode: PlanningTimeMode) -> PlannerConfig {
    match (planner, mode) {
        (PlannerConfig::Oracle(cfg), PlanningTimeMode::Calibrated) => PlannerConfig::Oracle(OracleConfig {
            strategy: OracleStrategy::Decomposed,
            ..cfg.clone()
        }),
        _ => planner.clone(),
    }
}

/// Simulates every (trace, likelihood, planner, seed) combination in parallel.
pub fn run_reward(spec: &RewardSpec) -> Result<Vec<RewardOutcome>, Error> {
    let traces: Vec<(String, FailureTrace)> = spec
        .traces
        .iter()
        .map(|t| Ok((t.label(), t.load(spec.trace_seed)?)))
        .collect::<Result<_, Error>>()?;
    let mut jobs = Vec::new();
    for (ti, _) in traces.iter().enumerate() {
        for &likelihood in &spec.likelihoods {
            for planner in &spec.planners {
                for &seed in &spec.seeds {
                    jobs.push((ti, likelihood, planner, seed));
                }
            }
        }
    }
    jobs.into_par_iter()
        .map(|(ti, likelihood, planner, seed)| {
            let mut config = SimulationConfig::new(spec.shops, simulated_planner(planner, spec.planning_time_mode), seed);
            config.k = spec.k;
            config.likelihood = likelihood;
            config.costs = spec.costs;
            config.planning_time_mode = spec.planning_time_mode;
            let result = run_simulation(&config, &traces[ti].1)?;
            Ok(RewardOutcome {
                planner: planner.id(),
                trace: traces[ti].0.clone(),
                seed,
                likelihood,
                result,
            })
        })
        .collect()
}

type Metric = fn(&SimulationResult) -> f64;

/// Mean and standard deviation over seeds per (trace, likelihood, planner).
pub fn reward_rows(spec: &RewardSpec, outcomes: &[RewardOutcome]) -> Vec<ResultRow> {
    let mut rows = Vec::new();
    let mut groups: Vec<(&str, u64, PlannerId)> = Vec::new();
    for o in outcomes {
        let key = (o.trace.as_str(), o.likelihood.to_bits(), o.planner);
        if !groups.contains(&key) {
            groups.push(key);
        }
    }
    for (trace, lk, planner) in groups {
        let sel: Vec<&RewardOutcome> = outcomes
            .iter()
            .filter(|o| o.trace == trace && o.likelihood.to_bits() == lk && o.planner == planner)
            .collect();
        let likelihood = f64::from_bits(lk);
        let label = if likelihood == 1.0 {
            trace.to_string()
        } else {
            format!("{trace}-p{likelihood}")
        };
        let metrics: [(&str, Metric); 4] = [
            ("reward", |r| r.reward()),
            ("final_utility", |r| r.final_utility),
            ("runs", |r| r.runs.len() as f64),
            ("rules_failed", |r| r.rules_failed as f64),
        ];
        for (name, f) in metrics {
            let xs: Vec<f64> = sel.iter().map(|o| f(&o.result)).collect();
            let (value, stddev) = mean_sd(&xs);
            rows.push(ResultRow {
                experiment: if spec.likelihoods.len() > 1 { "likelihood" } else { "reward" }.into(),
                planner: planner.to_string(),
                components: spec.shops * SLOTS_PER_SHOP,
                trace: label.clone(),
                metric: name.into(),
                value,
                stddev,
            });
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_reward_grid() {
        let spec = RewardSpec {
            shops: 2,
            traces: vec!["synthetic:6x3@300".parse().unwrap()],
            seeds: vec![1, 2],
            likelihoods: vec![1.0, 0.5],
            ..RewardSpec::default()
        };
        let out = run_reward(&spec).unwrap();
        assert_eq!(out.len(), 2 * 3 * 2);
        assert!(out.iter().all(|o| o.result.unresolved == 0));
        let rows = reward_rows(&spec, &out);
        assert_eq!(rows.len(), 2 * 3 * 4);
        assert!(rows.iter().all(|r| r.experiment == "likelihood" && r.value.is_finite()));
        // deterministic across parallel runs
        assert_eq!(run_reward(&spec).unwrap(), out);
    }
}
