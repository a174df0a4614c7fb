use super::ResultRow;
use crate::model::topology::SLOTS_PER_SHOP;
use crate::model::{ArchitectureModel, ChangeEvent};
use crate::planners::{PlannerConfig, PlannerId};
use crate::profiles::{generate_synthetic, TargetSelector};
use crate::rules::RuleSet;
use crate::sim::{measure_planning_time, PlanningStats, MAX_REPS};
use crate::Error;

#[derive(Debug, Clone, PartialEq)]
pub struct ScalabilitySpec {
    pub shops: Vec<usize>,
    pub fgs: Vec<usize>,
    pub planners: Vec<PlannerConfig>,
    /// Repetition cap per cell.
    pub max_reps: usize,
    /// Repetition cap for oracle cells.
    pub oracle_max_reps: usize,
    /// Largest group size the oracle is measured on.
    pub oracle_max_fgs: usize,
    pub k: usize,
    pub seed: u64,
}

impl Default for ScalabilitySpec {
    fn default() -> Self {
        ScalabilitySpec {
            shops: vec![1, 10, 100, 1_000],
            fgs: vec![1, 10, 100, 1_000],
            planners: PlannerId::ALL.into_iter().map(PlannerConfig::default_for).collect(),
            max_reps: MAX_REPS,
            oracle_max_reps: 5,
            oracle_max_fgs: 1_000,
            k: usize::MAX,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalabilityCell {
    pub planner: PlannerId,
    pub components: usize,
    pub fgs: usize,
    pub stats: PlanningStats,
}

/// Injects one synthetic group of `fgs` failures and returns the change events.
fn inject_group(model: &mut ArchitectureModel, fgs: usize, seed: u64) -> Result<Vec<ChangeEvent>, Error> {
    let trace = generate_synthetic(fgs, 1, 1.0, seed)?;
    let mut events = Vec::new();
    for e in &trace.entries {
        let TargetSelector::Random(r) = e.target else { continue };
        if let Some(t) = model.select_target(e.kind, r) {
            events.extend(model.inject_failure(e.kind, t, 0.0)?);
        }
    }
    Ok(events)
}

/// Measures every planner on every (architecture size, group size) cell.
///
/// Cells with more failures than components are skipped, as are oracle cells
/// above the oracle's size cap; each skip is reported as a notice.
pub fn run_scalability(spec: &ScalabilitySpec) -> Result<(Vec<ScalabilityCell>, Vec<String>), Error> {
    let rules = RuleSet::default();
    let mut cells = Vec::new();
    let mut notices = Vec::new();
    for &shops in &spec.shops {
        let components = shops * SLOTS_PER_SHOP;
        for &fgs in &spec.fgs {
            if fgs > components {
                notices.push(format!("skipped FGS {fgs} on {components} components"));
                continue;
            }
            let mut model = ArchitectureModel::build(shops, spec.seed);
            let events = inject_group(&mut model, fgs, spec.seed)?;
            // planners run one at a time so wall-clock measurements do not interfere
            for planner in &spec.planners {
                let id = planner.id();
                let reps = if id == PlannerId::Oracle {
                    if fgs > spec.oracle_max_fgs {
                        notices.push(format!("skipped oracle at FGS {fgs} on {components} components"));
                        continue;
                    }
                    spec.oracle_max_reps.min(spec.max_reps)
                } else {
                    spec.max_reps
                };
                let stats = measure_planning_time(planner, &model, &events, &rules, spec.k, reps)?;
                cells.push(ScalabilityCell {
                    planner: id,
                    components,
                    fgs,
                    stats,
                });
            }
        }
    }
    Ok((cells, notices))
}

pub fn scalability_rows(cells: &[ScalabilityCell]) -> Vec<ResultRow> {
    cells
        .iter()
        .map(|c| ResultRow {
            experiment: "scalability".into(),
            planner: c.planner.to_string(),
            components: c.components,
            trace: format!("synthetic-fgs{}", c.fgs),
            metric: "planning_ms".into(),
            value: c.stats.mean_s * 1e3,
            stddev: c.stats.sd_s * 1e3,
        })
        .collect()
}
