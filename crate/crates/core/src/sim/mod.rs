//! Virtual-clock simulation of the MAPE-K loop over a failure trace.
//!
//! Failures hit the model at their trace times and lower utility at once.
//! A loop run starts whenever failure events are queued and no run is active:
//! it analyzes the queued changes, plans, then executes the plan rule by rule,
//! each rule occupying its cost in virtual time. Failures arriving meanwhile
//! are queued for the next run. A rule takes effect with the configured
//! success likelihood; a failed attempt still consumes its cost and leaves the
//! issue for a follow-up run.

mod bench;
mod timeline;

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use bench::{measure_planning_time, PlanningStats, MAX_REPS, MIN_REPS};
pub use timeline::Timeline;

use crate::analyzer::Annotations;
use crate::model::{
    splitmix64, ArchitectureModel, ChangeEvent, ElementRef, FailureKind, ModelError, RepairAction,
};
use crate::planners::{calibrated_planning_s, PlannerConfig};
use crate::profiles::{FailureTrace, TargetSelector, TraceEntry};
use crate::rules::{RuleCosts, RuleSet};
use crate::utility::{total_utility, UtilityLedger};
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanningTimeMode {
    /// Wall-clock analysis and planning time, mapped 1:1 to virtual seconds.
    Measured,
    /// Planning time from the fitted reference table.
    Calibrated,
}

impl PlanningTimeMode {
    pub fn as_str(self) -> &'static str {
        match self {
            PlanningTimeMode::Measured => "measured",
            PlanningTimeMode::Calibrated => "calibrated",
        }
    }
}

impl FromStr for PlanningTimeMode {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "measured" => Ok(PlanningTimeMode::Measured),
            "calibrated" => Ok(PlanningTimeMode::Calibrated),
            _ => Err(ModelError::Parse(format!("unknown planning time mode {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub shops: usize,
    pub planner: PlannerConfig,
    /// Most rules executed per run.
    pub k: usize,
    pub likelihood: f64,
    pub costs: RuleCosts,
    /// Seeds the architecture and the rule-success draws.
    pub seed: u64,
    pub planning_time_mode: PlanningTimeMode,
    /// Extra virtual seconds added to every run's planning time.
    pub planning_delay_s: f64,
    /// End of the reward window; the trace duration when unset.
    pub horizon_s: Option<f64>,
    /// Recompute total utility from scratch after every change.
    pub check_utility: bool,
}

impl SimulationConfig {
    pub fn new(shops: usize, planner: PlannerConfig, seed: u64) -> Self {
        SimulationConfig {
            shops,
            planner,
            k: 100,
            likelihood: 1.0,
            costs: RuleCosts::default(),
            seed,
            planning_time_mode: PlanningTimeMode::Calibrated,
            planning_delay_s: 0.0,
            horizon_s: None,
            check_utility: false,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.likelihood > 0.0 && self.likelihood <= 1.0) {
            return bad(format!("likelihood {} outside (0, 1]", self.likelihood));
        }
        if self.shops == 0 {
            return bad("at least one shop is required".into());
        }
        if self.k == 0 {
            return bad("k must be positive".into());
        }
        if self.planning_delay_s.is_nan() || self.planning_delay_s < 0.0 {
            return bad(format!("negative planning delay {}", self.planning_delay_s));
        }
        Ok(())
    }
}

/// One feedback-loop run.
#[derive(Debug, Clone, PartialEq)]
pub struct MapeRunRecord {
    pub run: usize,
    pub trigger_s: f64,
    /// Virtual analysis time.
    pub analyze_s: f64,
    /// Virtual planning time, including any configured delay.
    pub plan_s: f64,
    /// Virtual execution time.
    pub exec_s: f64,
    /// Queued changes analyzed (Δ).
    pub changes: usize,
    /// Unprocessed issues after analysis (Δ′).
    pub issues: usize,
    pub rules_ok: usize,
    pub rules_failed: usize,
}

impl MapeRunRecord {
    pub fn end_s(&self) -> f64 {
        self.trigger_s + self.analyze_s + self.plan_s + self.exec_s
    }
}

pub fn runs_to_csv(runs: &[MapeRunRecord]) -> String {
    let mut out = String::from("run,trigger_s,analyze_ms,plan_ms,exec_ms,issues,rules_ok,rules_failed\n");
    for r in runs {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.run,
            r.trigger_s,
            r.analyze_s * 1e3,
            r.plan_s * 1e3,
            r.exec_s * 1e3,
            r.issues,
            r.rules_ok,
            r.rules_failed
        );
    }
    out
}

/// One attempted rule execution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Execution {
    pub run: usize,
    pub start_s: f64,
    pub end_s: f64,
    pub action: RepairAction,
    pub failure: FailureKind,
    pub target: ElementRef,
    pub success: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub timeline: Timeline,
    pub runs: Vec<MapeRunRecord>,
    pub executions: Vec<Execution>,
    pub horizon_s: f64,
    pub initial_utility: f64,
    pub final_utility: f64,
    pub injected: usize,
    /// Trace entries with no eligible target.
    pub skipped: usize,
    pub rules_ok: usize,
    pub rules_failed: usize,
    pub unresolved: usize,
    /// Largest gap between the ledger and a full recomputation; zero unless checked.
    pub max_ledger_drift: f64,
}

impl SimulationResult {
    /// Reward over `[0, horizon]`.
    pub fn reward(&self) -> f64 {
        self.timeline.reward(0.0, self.horizon_s)
    }
}

pub struct Simulation {
    config: SimulationConfig,
    model: ArchitectureModel,
    ledger: UtilityLedger,
    annotations: Annotations,
    rules: RuleSet,
    rng: ChaCha8Rng,
    timeline: Timeline,
    runs: Vec<MapeRunRecord>,
    executions: Vec<Execution>,
    pending: Vec<ChangeEvent>,
    failures_pending: bool,
    injected: usize,
    skipped: usize,
    rules_ok: usize,
    rules_failed: usize,
    max_drift: f64,
}

impl Simulation {
    pub fn new(config: SimulationConfig) -> Result<Self, Error> {
        let model = ArchitectureModel::build(config.shops, config.seed);
        Self::with_model(config, model)
    }

    /// Simulation over a prepared model; `config.shops` is ignored.
    pub fn with_model(config: SimulationConfig, model: ArchitectureModel) -> Result<Self, Error> {
        config.validate()?;
        let ledger = UtilityLedger::new(&model);
        let rules = RuleSet {
            costs: config.costs,
            likelihood: config.likelihood,
        };
        Ok(Simulation {
            rng: ChaCha8Rng::seed_from_u64(splitmix64(config.seed ^ 0x5eed)),
            timeline: Timeline::new(0.0, ledger.total()),
            config,
            model,
            ledger,
            annotations: Annotations::new(),
            rules,
            runs: Vec::new(),
            executions: Vec::new(),
            pending: Vec::new(),
            failures_pending: false,
            injected: 0,
            skipped: 0,
            rules_ok: 0,
            rules_failed: 0,
            max_drift: 0.0,
        })
    }

    pub fn model(&self) -> &ArchitectureModel {
        &self.model
    }

    /// Runs the loop over `trace` until the trace is exhausted and no run is due.
    pub fn run(mut self, trace: &FailureTrace) -> Result<SimulationResult, Error> {
        let initial_utility = self.ledger.total();
        let entries = &trace.entries;
        let mut cursor = 0;
        let mut now = 0.0_f64;
        let mut retry = false;
        loop {
            if self.failures_pending || retry {
                let attempted = self.mape_run(now, entries, &mut cursor)?;
                now = self.runs.last().expect("run recorded").end_s();
                retry = attempted > 0 && self.annotations.issue_count() > 0;
                continue;
            }
            let Some(next) = entries.get(cursor) else { break };
            now = now.max(next.time_s);
            self.inject_until(now, entries, &mut cursor)?;
        }
        Ok(SimulationResult {
            horizon_s: self.config.horizon_s.unwrap_or(trace.duration_s),
            initial_utility,
            final_utility: self.ledger.total(),
            injected: self.injected,
            skipped: self.skipped,
            rules_ok: self.rules_ok,
            rules_failed: self.rules_failed,
            unresolved: self.annotations.issue_count(),
            max_ledger_drift: self.max_drift,
            timeline: self.timeline,
            runs: self.runs,
            executions: self.executions,
        })
    }

    fn record(&mut self, t: f64) {
        self.timeline.push(t, self.ledger.total());
        if self.config.check_utility {
            let drift = (self.ledger.total() - total_utility(&self.model)).abs();
            self.max_drift = self.max_drift.max(drift);
        }
    }

    fn inject_until(&mut self, t: f64, entries: &[TraceEntry], cursor: &mut usize) -> Result<(), Error> {
        while let Some(e) = entries.get(*cursor).filter(|e| e.time_s <= t) {
            *cursor += 1;
            self.inject(e)?;
        }
        Ok(())
    }

    fn inject(&mut self, entry: &TraceEntry) -> Result<(), Error> {
        let target = match entry.target {
            TargetSelector::Fixed(e) if self.model.is_eligible(entry.kind, e) => Some(e),
            TargetSelector::Fixed(e) => {
                let roll = splitmix64(e.to_string().bytes().fold(0, |h, b| h * 31 + b as u64));
                self.model.select_target(entry.kind, roll)
            }
            TargetSelector::Random(r) => self.model.select_target(entry.kind, r),
        };
        let Some(target) = target else {
            self.skipped += 1;
            return Ok(());
        };
        let events = self.model.inject_failure(entry.kind, target, entry.time_s)?;
        self.ledger.observe(&self.model, &events);
        self.record(entry.time_s);
        self.pending.extend(events);
        self.failures_pending = true;
        self.injected += 1;
        Ok(())
    }

    /// One loop run triggered at `t0`; returns the number of rules attempted.
    fn mape_run(&mut self, t0: f64, entries: &[TraceEntry], cursor: &mut usize) -> Result<usize, Error> {
        let changes = std::mem::take(&mut self.pending);
        self.failures_pending = false;

        let started = Instant::now();
        self.annotations.analyze(&changes, &self.model, t0);
        let analyze_wall = started.elapsed().as_secs_f64();
        let started = Instant::now();
        let plan = self
            .config
            .planner
            .plan(&mut self.annotations, &self.model, &self.rules, self.config.k)?;
        let plan_wall = started.elapsed().as_secs_f64();

        let issues = self.annotations.issue_count();
        let (analyze_s, plan_s) = match self.config.planning_time_mode {
            PlanningTimeMode::Measured => (analyze_wall, plan_wall),
            PlanningTimeMode::Calibrated => (
                0.0,
                calibrated_planning_s(self.config.planner.id(), self.model.live_component_count(), issues),
            ),
        };
        let plan_s = plan_s + self.config.planning_delay_s;

        let mut t = t0 + analyze_s + plan_s;
        self.inject_until(t, entries, cursor)?;
        let (mut ok, mut failed) = (0, 0);
        for rule in &plan.rules {
            let start = t;
            t += rule.cost;
            self.inject_until(t, entries, cursor)?;
            let success = self.rng.random::<f64>() < self.config.likelihood
                && match self.model.apply_repair(&rule.order(), t) {
                    Ok(events) => {
                        self.ledger.observe(&self.model, &events);
                        self.record(t);
                        self.annotations.delete_issue(&rule.issue);
                        self.pending.extend(events);
                        true
                    }
                    // the issue vanished since planning; the attempt is spent
                    Err(ModelError::StaleMatch(_)) => false,
                    Err(e) => return Err(e.into()),
                };
            if success {
                ok += 1;
            } else {
                failed += 1;
            }
            self.executions.push(Execution {
                run: self.runs.len(),
                start_s: start,
                end_s: t,
                action: rule.action,
                failure: rule.failure,
                target: rule.target,
                success,
            });
        }
        self.rules_ok += ok;
        self.rules_failed += failed;
        self.runs.push(MapeRunRecord {
            run: self.runs.len(),
            trigger_s: t0,
            analyze_s,
            plan_s,
            exec_s: t - (t0 + analyze_s + plan_s),
            changes: changes.len(),
            issues,
            rules_ok: ok,
            rules_failed: failed,
        });
        Ok(ok + failed)
    }
}

/// Runs one simulation of `config` over `trace`.
pub fn run_simulation(config: &SimulationConfig, trace: &FailureTrace) -> Result<SimulationResult, Error> {
    Simulation::new(config.clone())?.run(trace)
}
