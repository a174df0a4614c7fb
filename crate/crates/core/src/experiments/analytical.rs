//! Pinned three-failure scenarios on a 100-shop architecture.
//!
//! Each scenario fixes the failing components, their criticality and the
//! reliabilities of their slot's component types, so that the utility impact
//! of every rule is known in advance. Planning time is calibrated.

use std::fmt;
use std::str::FromStr;

use crate::model::{ArchitectureModel, ElementRef, FailureKind};
use crate::planners::{calibrated_planning_s, PlannerConfig, PlannerId, StaticPolicy};
use crate::profiles::{FailureTrace, TargetSelector, TraceEntry};
use crate::rules::TemplateId;
use crate::sim::{PlanningTimeMode, Simulation, SimulationConfig, SimulationResult};
use crate::Error;

const SHOPS: usize = 100;
const HORIZON_S: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// Static picks a heavyweight redeployment where replacing pays off.
    Fig10a,
    /// Same final state, but static executes in a worse order.
    Fig10b,
    /// The oracle makes u-driven's decisions after a longer planning phase.
    Fig11,
    /// A second group arrives while the oracle is still busy with the first.
    Fig14,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [Scenario::Fig10a, Scenario::Fig10b, Scenario::Fig11, Scenario::Fig14];

    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::Fig10a => "fig10a",
            Scenario::Fig10b => "fig10b",
            Scenario::Fig11 => "fig11",
            Scenario::Fig14 => "fig14",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown scenario {s:?}")))
    }
}

/// A failing component: shop, slot, kind and criticality.
struct Pin {
    shop: usize,
    slot: usize,
    kind: FailureKind,
    criticality: f64,
    /// Reliability of the component's own type.
    reliability: f64,
    /// Reliabilities of the other two types of the slot.
    alternatives: [f64; 2],
}

const fn pin(shop: usize, slot: usize, kind: FailureKind, criticality: f64) -> Pin {
    Pin {
        shop,
        slot,
        kind,
        criticality,
        reliability: 1.0,
        alternatives: [0.5, 0.5],
    }
}

/// Rule impacts (criticality × reliability × connectivity):
/// CF3 on the persistence slot (connectivity 6), CF2 and CF1 on smaller slots.
fn pins(scenario: Scenario) -> Vec<Pin> {
    match scenario {
        // replace 60 / hw 30, restart 9, restart 4
        Scenario::Fig10a => vec![
            Pin {
                reliability: 0.5,
                alternatives: [1.0, 0.5],
                ..pin(0, 10, FailureKind::Cf3, 10.0)
            },
            pin(1, 0, FailureKind::Cf2, 3.0),
            pin(2, 2, FailureKind::Cf1, 2.0),
        ],
        // hw 30 (ratio 5), restart 28 (ratio 14), restart 8 (ratio 4)
        Scenario::Fig10b | Scenario::Fig11 | Scenario::Fig14 => vec![
            pin(0, 10, FailureKind::Cf3, 5.0),
            pin(1, 1, FailureKind::Cf2, 7.0),
            pin(2, 2, FailureKind::Cf1, 4.0),
        ],
    }
}

fn static_policy(scenario: Scenario) -> StaticPolicy {
    let mut policy = StaticPolicy::default();
    if scenario != Scenario::Fig10a {
        policy.rule_for[0] = TemplateId::Restart;
    }
    policy
}

/// Failure group, target and kind of each pinned failure.
type Targets = Vec<(usize, ElementRef, FailureKind)>;

fn build(scenario: Scenario) -> Result<(ArchitectureModel, Targets), Error> {
    let mut model = ArchitectureModel::build(SHOPS, 0);
    let mut targets = Vec::new();
    let groups = if scenario == Scenario::Fig14 { 2 } else { 1 };
    for group in 0..groups {
        for p in pins(scenario) {
            let id = model.shops()[p.shop + 3 * group].components[p.slot];
            model.set_criticality(id, p.criticality)?;
            let own = model.component(id).expect("pinned component").type_id;
            let others: Vec<_> = model.alternatives(p.slot).filter(|&t| t != own).collect();
            model.set_type_reliability(own, p.reliability)?;
            for (t, r) in others.into_iter().zip(p.alternatives) {
                model.set_type_reliability(t, r)?;
            }
            targets.push((group, ElementRef::Component(id), p.kind));
        }
    }
    model.refresh_design_profile();
    Ok((model, targets))
}

/// Arrival of the second group: halfway between the ends of u-driven's and
/// the oracle's first runs, which execute the same ten seconds of rules.
fn second_group_time(components: usize) -> f64 {
    let u = calibrated_planning_s(PlannerId::UDriven, components, 3);
    let o = calibrated_planning_s(PlannerId::Oracle, components, 3);
    10.0 + (u + o) / 2.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticalOutcome {
    pub scenario: Scenario,
    pub results: Vec<(PlannerId, SimulationResult)>,
    /// Arrival time of the second failure group, if any.
    pub second_group_s: Option<f64>,
}

impl AnalyticalOutcome {
    pub fn result(&self, planner: PlannerId) -> &SimulationResult {
        &self
            .results
            .iter()
            .find(|(p, _)| *p == planner)
            .expect("every planner is simulated")
            .1
    }
}

/// Replays `scenario` for all three planners.
pub fn run_analytical(scenario: Scenario) -> Result<AnalyticalOutcome, Error> {
    let (model, targets) = build(scenario)?;
    let second = (scenario == Scenario::Fig14).then(|| second_group_time(model.live_component_count()));
    let entries = targets
        .iter()
        .map(|&(group, target, kind)| TraceEntry {
            time_s: if group == 0 { 0.0 } else { second.expect("two groups") },
            kind,
            target: TargetSelector::Fixed(target),
        })
        .collect();
    let trace = FailureTrace {
        model: scenario.to_string(),
        fgs: "3".into(),
        iat: second.map_or_else(|| "-".into(), |t| t.to_string()),
        fet_s: 0.0,
        duration_s: HORIZON_S,
        seed: 0,
        groups: Vec::new(),
        entries,
    };
    let mut results = Vec::new();
    for id in PlannerId::ALL {
        let planner = match id {
            PlannerId::Static => PlannerConfig::Static(static_policy(scenario)),
            _ => PlannerConfig::default_for(id),
        };
        let mut config = SimulationConfig::new(SHOPS, planner, 0);
        config.planning_time_mode = PlanningTimeMode::Calibrated;
        config.check_utility = true;
        let result = Simulation::with_model(config, model.clone())?.run(&trace)?;
        results.push((id, result));
    }
    Ok(AnalyticalOutcome {
        scenario,
        results,
        second_group_s: second,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RepairAction;

    fn actions(o: &AnalyticalOutcome, p: PlannerId) -> Vec<(FailureKind, RepairAction)> {
        o.result(p).executions.iter().map(|e| (e.failure, e.action)).collect()
    }

    #[test]
    fn fig10a_decisions() {
        let o = run_analytical(Scenario::Fig10a).unwrap();
        let s = actions(&o, PlannerId::Static);
        let u = actions(&o, PlannerId::UDriven);
        assert_eq!(s[0], (FailureKind::Cf3, RepairAction::HwRedeploy));
        assert!(matches!(u[0], (FailureKind::Cf3, RepairAction::Replace { .. })));
        assert_eq!(s[1], (FailureKind::Cf1, RepairAction::LwRedeploy));
        assert_eq!(u[1], (FailureKind::Cf2, RepairAction::Restart));
        assert_eq!(u[2], (FailureKind::Cf1, RepairAction::Restart));
        assert_eq!(actions(&o, PlannerId::Oracle), u);
    }

    #[test]
    fn fig10b_orders() {
        let o = run_analytical(Scenario::Fig10b).unwrap();
        let kinds = |p| actions(&o, p).into_iter().map(|a| a.0).collect::<Vec<_>>();
        use FailureKind::*;
        assert_eq!(kinds(PlannerId::UDriven), vec![Cf2, Cf3, Cf1]);
        assert_eq!(kinds(PlannerId::Static), vec![Cf3, Cf1, Cf2]);
        let s = o.result(PlannerId::Static);
        let u = o.result(PlannerId::UDriven);
        assert_eq!(s.final_utility, u.final_utility);
        assert!(u.reward() > s.reward());
    }

    #[test]
    fn fig11_oracle_delayed() {
        let o = run_analytical(Scenario::Fig11).unwrap();
        assert_eq!(actions(&o, PlannerId::Oracle), actions(&o, PlannerId::UDriven));
        let u = o.result(PlannerId::UDriven);
        let or = o.result(PlannerId::Oracle);
        for (a, b) in u.executions.iter().zip(&or.executions) {
            assert!(b.end_s > a.end_s);
        }
        assert_eq!(u.final_utility, or.final_utility);
        assert!(u.reward() > or.reward());
    }

    #[test]
    fn fig14_oracle_misses_second_group() {
        let o = run_analytical(Scenario::Fig14).unwrap();
        let t2 = o.second_group_s.unwrap();
        let u = o.result(PlannerId::UDriven);
        let or = o.result(PlannerId::Oracle);
        assert!(u.runs[0].end_s() < t2 && or.runs[0].end_s() > t2);
        assert!(u.runs.iter().any(|r| r.trigger_s == t2));
        assert!(or.runs.iter().all(|r| r.trigger_s != t2));
        assert_eq!(u.unresolved + or.unresolved, 0);
    }

    #[test]
    fn scenario_names() {
        for s in Scenario::ALL {
            assert_eq!(s.as_str().parse::<Scenario>().unwrap(), s);
        }
        assert!("fig12".parse::<Scenario>().is_err());
    }
}
