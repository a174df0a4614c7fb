//! Adaptation rules: templates with static cost estimates and their matches.

use std::fmt;
use std::str::FromStr;

use crate::analyzer::Issue;
use crate::model::{
    action_applicable, ArchitectureModel, ChangeEvent, ElementRef, FailureKind, ModelError,
    RepairAction, RepairOrder,
};
use crate::utility::{rule_impact, MatchKey, UtilityError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TemplateId {
    Restart,
    LwRedeploy,
    HwRedeploy,
    Replace,
    RecreateConnector,
}

impl TemplateId {
    pub const ALL: [TemplateId; 5] = [
        TemplateId::Restart,
        TemplateId::LwRedeploy,
        TemplateId::HwRedeploy,
        TemplateId::Replace,
        TemplateId::RecreateConnector,
    ];

    pub fn of(action: RepairAction) -> TemplateId {
        match action {
            RepairAction::Restart => TemplateId::Restart,
            RepairAction::LwRedeploy => TemplateId::LwRedeploy,
            RepairAction::HwRedeploy => TemplateId::HwRedeploy,
            RepairAction::Replace { .. } => TemplateId::Replace,
            RepairAction::RecreateConnector => TemplateId::RecreateConnector,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TemplateId::Restart => "RESTART",
            TemplateId::LwRedeploy => "LW_REDEPLOY",
            TemplateId::HwRedeploy => "HW_REDEPLOY",
            TemplateId::Replace => "REPLACE",
            TemplateId::RecreateConnector => "RECREATE_CONNECTOR",
        }
    }
}

impl fmt::Display for TemplateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TemplateId {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TemplateId::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| ModelError::Parse(format!("unknown rule {s:?}")))
    }
}

/// Static execution-time estimates in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuleCosts {
    pub restart: f64,
    pub lw_redeploy: f64,
    pub hw_redeploy: f64,
    pub replace: f64,
    pub recreate_connector: f64,
}

impl Default for RuleCosts {
    fn default() -> Self {
        RuleCosts {
            restart: 2.0,
            lw_redeploy: 4.0,
            hw_redeploy: 6.0,
            replace: 10.0,
            recreate_connector: 1.0,
        }
    }
}

impl RuleCosts {
    pub fn of(&self, template: TemplateId) -> f64 {
        match template {
            TemplateId::Restart => self.restart,
            TemplateId::LwRedeploy => self.lw_redeploy,
            TemplateId::HwRedeploy => self.hw_redeploy,
            TemplateId::Replace => self.replace,
            TemplateId::RecreateConnector => self.recreate_connector,
        }
    }

    pub fn set(&mut self, template: TemplateId, cost: f64) {
        let slot = match template {
            TemplateId::Restart => &mut self.restart,
            TemplateId::LwRedeploy => &mut self.lw_redeploy,
            TemplateId::HwRedeploy => &mut self.hw_redeploy,
            TemplateId::Replace => &mut self.replace,
            TemplateId::RecreateConnector => &mut self.recreate_connector,
        };
        *slot = cost;
    }

    pub fn max(&self) -> f64 {
        TemplateId::ALL.into_iter().map(|t| self.of(t)).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuleTemplate {
    pub id: TemplateId,
    pub applicable_to: Vec<FailureKind>,
    pub cost: f64,
}

/// An applicable rule instantiated for one issue.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleMatch {
    pub template: TemplateId,
    pub action: RepairAction,
    pub issue: MatchKey,
    pub failure: FailureKind,
    pub target: ElementRef,
    pub utility_increase: f64,
    pub cost: f64,
    pub ratio: f64,
}

impl RuleMatch {
    pub fn new(issue: &Issue, action: RepairAction, utility_increase: f64, cost: f64) -> Self {
        RuleMatch {
            template: TemplateId::of(action),
            action,
            issue: issue.key(),
            failure: issue.kind,
            target: issue.anchor,
            utility_increase,
            cost,
            ratio: utility_increase / cost,
        }
    }

    pub fn order(&self) -> RepairOrder {
        RepairOrder {
            action: self.action,
            failure: self.failure,
            target: self.target,
        }
    }
}

/// Something that offers rule templates and can execute repairs; validated
/// against the rule assumptions before use.
pub trait RuleEngine {
    fn templates(&self) -> Vec<RuleTemplate>;

    fn execute(
        &self,
        model: &mut ArchitectureModel,
        order: &RepairOrder,
        time: f64,
    ) -> Result<Vec<ChangeEvent>, ModelError>;

    /// Probability that one execution takes effect.
    fn success_likelihood(&self) -> f64 {
        1.0
    }
}

/// The shipped repair rules.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleSet {
    pub costs: RuleCosts,
    pub likelihood: f64,
}

impl Default for RuleSet {
    fn default() -> Self {
        RuleSet {
            costs: RuleCosts::default(),
            likelihood: 1.0,
        }
    }
}

impl RuleSet {
    pub fn new(costs: RuleCosts) -> Self {
        RuleSet {
            costs,
            likelihood: 1.0,
        }
    }

    /// Concrete actions a template expands to for `issue`.
    pub fn actions(&self, model: &ArchitectureModel, issue: &Issue) -> Vec<RepairAction> {
        let mut out = Vec::with_capacity(6);
        self.actions_into(model, issue, &mut out);
        out
    }

    /// Like [`RuleSet::actions`], but fills a caller-owned buffer.
    pub fn actions_into(&self, model: &ArchitectureModel, issue: &Issue, out: &mut Vec<RepairAction>) {
        out.clear();
        for t in TemplateId::ALL {
            match t {
                TemplateId::Restart => out.push(RepairAction::Restart),
                TemplateId::LwRedeploy => out.push(RepairAction::LwRedeploy),
                TemplateId::HwRedeploy => out.push(RepairAction::HwRedeploy),
                TemplateId::RecreateConnector => out.push(RepairAction::RecreateConnector),
                TemplateId::Replace => {
                    if let ElementRef::Component(id) = issue.anchor {
                        if let Some(c) = model.component(id) {
                            out.extend(
                                model
                                    .alternatives(c.slot)
                                    .filter(|&t| t != c.type_id)
                                    .map(|alternative| RepairAction::Replace { alternative }),
                            );
                        }
                    }
                }
            }
        }
        out.retain(|&a| action_applicable(a, issue.kind));
    }

    /// Every applicable rule match for `issue`, with its locally computed impact.
    pub fn instantiate(&self, model: &ArchitectureModel, issue: &Issue) -> Result<Vec<RuleMatch>, UtilityError> {
        self.actions(model, issue)
            .into_iter()
            .map(|action| self.rule_match(model, issue, action))
            .collect()
    }

    /// The match of one concrete `action` for `issue`.
    pub fn rule_match(
        &self,
        model: &ArchitectureModel,
        issue: &Issue,
        action: RepairAction,
    ) -> Result<RuleMatch, UtilityError> {
        let order = RepairOrder {
            action,
            failure: issue.kind,
            target: issue.anchor,
        };
        let impact = rule_impact(model, &order)?;
        Ok(RuleMatch::new(issue, action, impact, self.costs.of(TemplateId::of(action))))
    }
}

impl RuleEngine for RuleSet {
    fn templates(&self) -> Vec<RuleTemplate> {
        TemplateId::ALL
            .into_iter()
            .map(|id| {
                let sample = match id {
                    TemplateId::Replace => RepairAction::Replace {
                        alternative: crate::model::ComponentTypeId(0),
                    },
                    TemplateId::Restart => RepairAction::Restart,
                    TemplateId::LwRedeploy => RepairAction::LwRedeploy,
                    TemplateId::HwRedeploy => RepairAction::HwRedeploy,
                    TemplateId::RecreateConnector => RepairAction::RecreateConnector,
                };
                RuleTemplate {
                    id,
                    applicable_to: FailureKind::ALL
                        .into_iter()
                        .filter(|&k| action_applicable(sample, k))
                        .collect(),
                    cost: self.costs.of(id),
                }
            })
            .collect()
    }

    fn execute(
        &self,
        model: &mut ArchitectureModel,
        order: &RepairOrder,
        time: f64,
    ) -> Result<Vec<ChangeEvent>, ModelError> {
        model.apply_repair(order, time)
    }

    fn success_likelihood(&self) -> f64 {
        self.likelihood
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyzer::Annotations;

    fn single_issue(kind: FailureKind) -> (ArchitectureModel, Issue) {
        let mut m = ArchitectureModel::build(1, 21);
        let target = if kind.targets_connector() {
            ElementRef::Connector(crate::model::ConnectorId(2))
        } else {
            ElementRef::Component(m.shops()[0].components[1])
        };
        let ev = m.inject_failure(kind, target, 0.0).unwrap();
        let mut ann = Annotations::new();
        ann.analyze(&ev, &m, 0.0);
        let issue = ann.issues().next().unwrap().clone();
        (m, issue)
    }

    #[test]
    fn applicable_sets() {
        let rules = RuleSet::default();
        let count = |kind| {
            let (m, issue) = single_issue(kind);
            rules.actions(&m, &issue).len()
        };
        // restart, lw, hw, two alternatives
        assert_eq!(count(FailureKind::Cf1), 5);
        assert_eq!(count(FailureKind::Cf2), 5);
        // hw, two alternatives
        assert_eq!(count(FailureKind::Cf3), 3);
        assert_eq!(count(FailureKind::Cf4), 1);
    }

    #[test]
    fn every_template_linked_to_a_failure() {
        for t in RuleSet::default().templates() {
            assert!(!t.applicable_to.is_empty(), "{} unlinked", t.id);
            assert!(t.cost > 0.0);
        }
    }

    #[test]
    fn ratio_is_increase_over_cost() {
        let (m, issue) = single_issue(FailureKind::Cf2);
        for r in RuleSet::default().instantiate(&m, &issue).unwrap() {
            assert_eq!(r.ratio, r.utility_increase / r.cost);
            assert!(r.utility_increase >= 0.0);
        }
    }

    #[test]
    fn template_names_parse() {
        for t in TemplateId::ALL {
            assert_eq!(t.as_str().parse::<TemplateId>().unwrap(), t);
        }
    }
}
