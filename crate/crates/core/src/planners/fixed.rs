//! Static planning: a design-time rule per failure kind and a fixed issue order.

use super::{Plan, PlannerId};
use crate::analyzer::{Annotations, Issue};
use crate::model::{ArchitectureModel, ElementRef, FailureKind, RepairAction};
use crate::rules::{RuleMatch, RuleSet, TemplateId};

#[derive(Debug, Clone, PartialEq)]
pub struct StaticPolicy {
    /// Rule per failure kind, indexed CF1..CF4.
    pub rule_for: [TemplateId; 4],
    /// Priority of failure kinds, highest first.
    pub order: [FailureKind; 4],
}

impl Default for StaticPolicy {
    fn default() -> Self {
        StaticPolicy {
            rule_for: [
                TemplateId::LwRedeploy,
                TemplateId::Restart,
                TemplateId::HwRedeploy,
                TemplateId::RecreateConnector,
            ],
            order: [FailureKind::Cf3, FailureKind::Cf1, FailureKind::Cf2, FailureKind::Cf4],
        }
    }
}

impl StaticPolicy {
    fn index(kind: FailureKind) -> usize {
        match kind {
            FailureKind::Cf1 => 0,
            FailureKind::Cf2 => 1,
            FailureKind::Cf3 => 2,
            FailureKind::Cf4 => 3,
        }
    }

    pub fn template_for(&self, kind: FailureKind) -> TemplateId {
        self.rule_for[Self::index(kind)]
    }

    fn priority(&self, kind: FailureKind) -> usize {
        self.order.iter().position(|&k| k == kind).unwrap_or(self.order.len())
    }

    fn action(&self, model: &ArchitectureModel, issue: &Issue) -> RepairAction {
        match self.template_for(issue.kind) {
            TemplateId::Restart => RepairAction::Restart,
            TemplateId::LwRedeploy => RepairAction::LwRedeploy,
            TemplateId::HwRedeploy => RepairAction::HwRedeploy,
            TemplateId::RecreateConnector => RepairAction::RecreateConnector,
            TemplateId::Replace => {
                // first catalogued alternative, chosen without looking at reliabilities
                let alternative = match issue.anchor {
                    ElementRef::Component(id) => model.component(id).and_then(|c| {
                        model.alternatives(c.slot).find(|&t| t != c.type_id)
                    }),
                    _ => None,
                };
                alternative.map_or(RepairAction::HwRedeploy, |alternative| RepairAction::Replace { alternative })
            }
        }
    }
}

/// Plans without runtime utility computation: utility increases are the
/// architecture-wide design estimates fixed at build time.
pub fn plan_static(
    annotations: &mut Annotations,
    model: &ArchitectureModel,
    rules: &RuleSet,
    policy: &StaticPolicy,
    k: usize,
) -> Plan {
    let mut chosen: Vec<RuleMatch> = annotations
        .issues()
        .map(|issue| {
            let action = policy.action(model, issue);
            let estimate = match issue.kind {
                FailureKind::Cf4 => model.design_average_weight(),
                _ => model.design_average_u1(),
            };
            RuleMatch::new(issue, action, estimate, rules.costs.of(TemplateId::of(action)))
        })
        .collect();
    chosen.sort_by_key(|r| policy.priority(r.failure));
    chosen.truncate(k);
    annotations.set_best_rules(chosen.clone());
    Plan {
        planner: PlannerId::Static,
        instantiations: chosen.len(),
        rules: chosen,
    }
}
