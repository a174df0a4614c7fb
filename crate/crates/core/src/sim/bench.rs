//! Wall-clock planning-time measurement.

use std::time::Instant;

use crate::analyzer::Annotations;
use crate::model::{ArchitectureModel, ChangeEvent};
use crate::planners::{PlanError, PlannerConfig};
use crate::rules::RuleSet;

/// Repetitions before the relative-spread stopping rule applies.
pub const MIN_REPS: usize = 30;

/// Default repetition cap.
pub const MAX_REPS: usize = 300;

const TARGET_REL_SD: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanningStats {
    pub mean_s: f64,
    pub sd_s: f64,
    pub reps: usize,
    /// Issues the planner saw.
    pub issues: usize,
    /// Rules in the resulting plan.
    pub planned: usize,
}

/// Times analysis plus planning of `changes` on `model`, each repetition on
/// fresh annotations. Stops once the relative standard deviation drops below
/// 5% after at least [`MIN_REPS`] repetitions, or after `max_reps`.
pub fn measure_planning_time(
    planner: &PlannerConfig,
    model: &ArchitectureModel,
    changes: &[ChangeEvent],
    rules: &RuleSet,
    k: usize,
    max_reps: usize,
) -> Result<PlanningStats, PlanError> {
    let max_reps = max_reps.max(1);
    let mut samples = Vec::with_capacity(max_reps.min(MAX_REPS));
    let (mut issues, mut planned) = (0, 0);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    while samples.len() < max_reps {
        let mut ann = Annotations::new();
        let started = Instant::now();
        ann.analyze(changes, model, 0.0);
        let plan = planner.plan(&mut ann, model, rules, k)?;
        let dt = started.elapsed().as_secs_f64();
        issues = ann.issue_count();
        planned = plan.len();
        std::hint::black_box(&plan);
        samples.push(dt);
        sum += dt;
        sum_sq += dt * dt;
        let n = samples.len() as f64;
        let mean = sum / n;
        let sd = (sum_sq / n - mean * mean).max(0.0).sqrt();
        if samples.len() >= MIN_REPS && sd < TARGET_REL_SD * mean {
            break;
        }
    }
    let n = samples.len() as f64;
    let mean = sum / n;
    let sd = (samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / n).sqrt();
    Ok(PlanningStats {
        mean_s: mean,
        sd_s: sd,
        reps: samples.len(),
        issues,
        planned,
    })
}
