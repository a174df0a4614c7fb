//! Checks that a rule engine satisfies the independence assumptions that make
//! local impact prediction and ratio ordering exact.
//!
//! Every template is exercised on small synthetic models: once alone, and once
//! next to a second issue of every kind, both in the same shop and in another.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::analyzer::Annotations;
use crate::model::{ArchitectureModel, ElementRef, FailureKind, RepairOrder};
use crate::rules::{RuleEngine, RuleSet, TemplateId};
use crate::utility::{all_matches, rule_impact, MatchKey, Polarity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Assumption {
    /// Every rule is linked to a negative pattern.
    A1,
    /// Applying a rule resolves its issue.
    A2,
    /// No new negative matches.
    A3a,
    /// No other negative match removed.
    A3b,
    /// Other matches keep their utility.
    A4,
    /// Enabled positive matches lie within the rule's scope.
    A5,
}

impl fmt::Display for Assumption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub assumption: Assumption,
    pub template: TemplateId,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// (template, issue kind, context) combinations exercised.
    pub cases: usize,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violated(&self, a: Assumption) -> bool {
        self.violations.iter().any(|v| v.assumption == a)
    }

    fn flag(&mut self, assumption: Assumption, template: TemplateId, detail: String) {
        let dup = self
            .violations
            .iter()
            .any(|v| v.assumption == assumption && v.template == template);
        if !dup {
            self.violations.push(Violation {
                assumption,
                template,
                detail,
            });
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} cases checked", self.cases)?;
        if self.violations.is_empty() {
            return writeln!(f, "all assumptions hold");
        }
        for v in &self.violations {
            writeln!(f, "{} violated by {}: {}", v.assumption, v.template, v.detail)?;
        }
        Ok(())
    }
}

fn target_for(model: &ArchitectureModel, kind: FailureKind, shop: usize, slot: usize) -> ElementRef {
    if kind.targets_connector() {
        let k = model
            .connectors()
            .iter()
            .filter(|k| k.shop.index() == shop)
            .nth(slot % 25)
            .expect("shop has connectors");
        ElementRef::Connector(k.id)
    } else {
        ElementRef::Component(model.shops()[shop].components[slot])
    }
}

/// Elements a repair of `order` may legitimately touch.
fn scope(model: &ArchitectureModel, order: &RepairOrder, template: TemplateId) -> BTreeSet<ElementRef> {
    let mut s = BTreeSet::from([order.target]);
    if let (TemplateId::Replace, ElementRef::Component(id)) = (template, order.target) {
        if let Some(c) = model.component(id) {
            s.extend(c.connectors().map(ElementRef::Connector));
        }
    }
    s
}

fn snapshot(model: &ArchitectureModel) -> BTreeMap<MatchKey, f64> {
    all_matches(model).into_iter().collect()
}

pub fn validate_rule_set(engine: &dyn RuleEngine, seed: u64) -> ValidationReport {
    let mut report = ValidationReport::default();
    let templates = engine.templates();
    if engine.success_likelihood() < 1.0 {
        for t in &templates {
            report.flag(
                Assumption::A2,
                t.id,
                format!("succeeds with likelihood {}", engine.success_likelihood()),
            );
        }
    }
    let shipped = RuleSet::default();
    for t in &templates {
        if t.applicable_to.is_empty() {
            report.flag(Assumption::A1, t.id, "not linked to any negative pattern".into());
        }
        for &kind in &t.applicable_to {
            // alone, then with a second issue of every kind in the same and in another shop
            let mut contexts: Vec<Option<(FailureKind, usize)>> = vec![None];
            for other in FailureKind::ALL {
                contexts.push(Some((other, 0)));
                contexts.push(Some((other, 1)));
            }
            for ctx in contexts {
                let mut model = ArchitectureModel::build(2, seed);
                let target = target_for(&model, kind, 0, 10);
                let mut changes = model.inject_failure(kind, target, 0.0).expect("fresh target");
                if let Some((other, shop)) = ctx {
                    let t2 = target_for(&model, other, shop, 3);
                    if model.is_eligible(other, t2) {
                        changes.extend(model.inject_failure(other, t2, 0.0).expect("eligible"));
                    }
                }
                let mut ann = Annotations::new();
                ann.analyze(&changes, &model, 0.0);
                let issue = ann
                    .issues()
                    .find(|i| i.anchor == target)
                    .expect("issue detected")
                    .clone();
                for action in shipped
                    .actions(&model, &issue)
                    .into_iter()
                    .filter(|&a| TemplateId::of(a) == t.id)
                {
                    report.cases += 1;
                    let order = RepairOrder {
                        action,
                        failure: kind,
                        target,
                    };
                    check_case(engine, &model, &order, t.id, &mut report);
                }
            }
        }
    }
    report
}

fn check_case(
    engine: &dyn RuleEngine,
    model: &ArchitectureModel,
    order: &RepairOrder,
    template: TemplateId,
    report: &mut ValidationReport,
) {
    let before = snapshot(model);
    let predicted = rule_impact(model, order).ok();
    let scope = scope(model, order, template);
    let mut after_model = model.clone();
    let events = match engine.execute(&mut after_model, order, 1.0) {
        Ok(ev) => ev,
        Err(e) => {
            report.flag(Assumption::A2, template, format!("execution failed: {e}"));
            return;
        }
    };
    let mut scope = scope;
    for e in &events {
        if let crate::model::ChangeKind::ComponentReplaced { replacement, .. } = e.kind {
            scope.insert(ElementRef::Component(replacement));
        }
    }
    if after_model.is_affected(order.failure, order.target) {
        report.flag(Assumption::A2, template, format!("{} at {} persists", order.failure, order.target));
    }
    let after = snapshot(&after_model);
    let resolved = MatchKey {
        pattern: crate::utility::PatternId::for_failure(order.failure),
        anchor: order.target,
    };
    for (key, &u) in &after {
        let in_scope = scope.contains(&key.anchor);
        match before.get(key) {
            None if key.pattern.polarity() == Polarity::Negative => report.flag(
                Assumption::A3a,
                template,
                format!("new {:?} match at {}", key.pattern, key.anchor),
            ),
            None if !in_scope => report.flag(
                Assumption::A5,
                template,
                format!("enables {:?} at {} outside its scope", key.pattern, key.anchor),
            ),
            Some(&old) if old != u && !in_scope => report.flag(
                Assumption::A4,
                template,
                format!("changes {:?} at {} from {old} to {u}", key.pattern, key.anchor),
            ),
            _ => {}
        }
    }
    for key in before.keys() {
        if key.pattern.polarity() == Polarity::Negative
            && *key != resolved
            && !after.contains_key(key)
            && !scope.contains(&key.anchor)
        {
            report.flag(
                Assumption::A3b,
                template,
                format!("removes {:?} at {}", key.pattern, key.anchor),
            );
        }
    }
    let observed: f64 = after.values().sum::<f64>() - before.values().sum::<f64>();
    match predicted {
        Some(p) if (p - observed).abs() <= 1e-9 * observed.abs().max(1.0) => {}
        Some(p) => report.flag(
            Assumption::A4,
            template,
            format!("predicted impact {p} but observed {observed}"),
        ),
        None => report.flag(Assumption::A1, template, "impact undefined for its own issue".into()),
    }
}

/// Wraps a rule engine so every execution additionally throws exceptions on a
/// neighbouring component.
#[derive(Debug, Clone)]
pub struct ExceptionInjecting<E>(pub E);

impl<E: RuleEngine> RuleEngine for ExceptionInjecting<E> {
    fn templates(&self) -> Vec<crate::rules::RuleTemplate> {
        self.0.templates()
    }

    fn execute(
        &self,
        model: &mut ArchitectureModel,
        order: &RepairOrder,
        time: f64,
    ) -> Result<Vec<crate::model::ChangeEvent>, crate::model::ModelError> {
        let mut events = self.0.execute(model, order, time)?;
        let shop = match order.target {
            ElementRef::Component(id) => model.component(id).and_then(|c| c.shop),
            ElementRef::Connector(id) => model.connector(id).map(|k| k.shop),
            ElementRef::Shop(id) => Some(id),
        };
        if let Some(shop) = shop {
            let victim = model.shops()[shop.index()]
                .components
                .iter()
                .map(|&c| ElementRef::Component(c))
                .find(|&c| c != order.target && model.is_eligible(FailureKind::Cf2, c));
            if let Some(victim) = victim {
                events.extend(model.inject_failure(FailureKind::Cf2, victim, time)?);
            }
        }
        Ok(events)
    }

    fn success_likelihood(&self) -> f64 {
        self.0.success_likelihood()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ConnectorId;

    #[test]
    fn shipped_rules_pass() {
        let report = validate_rule_set(&RuleSet::default(), 3);
        assert!(report.passed(), "{report}");
        assert!(report.cases > 30);
    }

    #[test]
    fn exception_injecting_rule_violates_a3a() {
        let report = validate_rule_set(&ExceptionInjecting(RuleSet::default()), 3);
        assert!(report.violated(Assumption::A3a));
    }

    #[test]
    fn probabilistic_rules_flag_a2() {
        let rules = RuleSet {
            likelihood: 0.5,
            ..RuleSet::default()
        };
        let report = validate_rule_set(&rules, 3);
        assert!(report.violated(Assumption::A2));
        assert!(!report.violated(Assumption::A3a));
    }

    #[test]
    fn connector_helper_stays_in_shop() {
        let m = ArchitectureModel::build(2, 0);
        let ElementRef::Connector(ConnectorId(id)) = target_for(&m, FailureKind::Cf4, 1, 3) else {
            panic!("expected connector");
        };
        assert_eq!(m.connectors()[id as usize].shop.index(), 1);
    }
}
