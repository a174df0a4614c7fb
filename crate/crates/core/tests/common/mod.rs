//! Independent oracles and random schedules shared by the integration tests.

#![allow(dead_code)]

use healsim::analyzer::Issue;
use healsim::model::{
    ArchitectureModel, ChangeEvent, ConnectorState, ElementRef, FailureKind, LifecycleState, RepairOrder,
    EXCEPTION_THRESHOLD,
};
use healsim::rules::RuleSet;
use rand::Rng;

/// Total utility computed directly from component and connector state.
pub fn expected_utility(model: &ArchitectureModel) -> f64 {
    let mut total = 0.0;
    for shop in model.shops() {
        for &id in &shop.components {
            let c = model.component(id).unwrap();
            if c.state != LifecycleState::Started {
                continue;
            }
            let rel = model.component_type(c.type_id).unwrap().reliability;
            let u = c.criticality * rel * (c.required.len() + c.provided.len()) as f64;
            total += u;
            if c.failures.len() >= EXCEPTION_THRESHOLD {
                total -= u;
            }
        }
    }
    for k in model.connectors() {
        if k.state == ConnectorState::Crashed {
            let src = model.component(k.source).unwrap();
            total -= src.criticality * model.component_type(src.type_id).unwrap().reliability;
        }
    }
    total
}

/// Every current issue as `(kind, anchor)`, sorted.
pub fn expected_issues(model: &ArchitectureModel) -> Vec<(FailureKind, ElementRef)> {
    let mut out = Vec::new();
    for shop in model.shops() {
        for &id in &shop.components {
            let c = model.component(id).unwrap();
            let kind = match c.state {
                LifecycleState::Crashed => Some(FailureKind::Cf1),
                LifecycleState::Removed => Some(FailureKind::Cf3),
                LifecycleState::Started if c.failures.len() >= EXCEPTION_THRESHOLD => Some(FailureKind::Cf2),
                _ => None,
            };
            if let Some(kind) = kind {
                out.push((kind, ElementRef::Component(id)));
            }
        }
    }
    for k in model.connectors() {
        if k.state == ConnectorState::Crashed {
            out.push((FailureKind::Cf4, ElementRef::Connector(k.id)));
        }
    }
    sort_issues(&mut out);
    out
}

pub fn sort_issues(issues: &mut [(FailureKind, ElementRef)]) {
    issues.sort_by_key(|(k, e)| format!("{k:?}/{e:?}"));
}

pub fn issue(kind: FailureKind, anchor: ElementRef) -> Issue {
    Issue {
        id: 0,
        kind,
        anchor,
        utility_drop: 0.0,
        detected_at: 0.0,
    }
}

/// Injects a failure of a random kind at a random eligible target.
pub fn random_injection<R: Rng>(model: &mut ArchitectureModel, rng: &mut R) -> Vec<ChangeEvent> {
    let kind = FailureKind::ALL[rng.random_range(0..4)];
    match model.select_target(kind, rng.random()) {
        Some(t) => model.inject_failure(kind, t, 0.0).unwrap(),
        None => Vec::new(),
    }
}

/// Injects a crash, exception burst or removal at a random eligible component.
pub fn random_component_injection<R: Rng>(model: &mut ArchitectureModel, rng: &mut R) -> Vec<ChangeEvent> {
    let kind = FailureKind::COMPONENT[rng.random_range(0..3)];
    match model.select_target(kind, rng.random()) {
        Some(t) => model.inject_failure(kind, t, 0.0).unwrap(),
        None => Vec::new(),
    }
}

/// Repairs a random current issue with a random applicable action.
pub fn random_repair<R: Rng>(model: &mut ArchitectureModel, rng: &mut R, rules: &RuleSet) -> Vec<ChangeEvent> {
    let issues = expected_issues(model);
    if issues.is_empty() {
        return Vec::new();
    }
    let (kind, anchor) = issues[rng.random_range(0..issues.len())];
    let actions = rules.actions(model, &issue(kind, anchor));
    let action = actions[rng.random_range(0..actions.len())];
    let order = RepairOrder {
        action,
        failure: kind,
        target: anchor,
    };
    model.apply_repair(&order, 0.0).unwrap()
}

/// One batch of one to four random injections and repairs.
pub fn random_batch<R: Rng>(model: &mut ArchitectureModel, rng: &mut R, rules: &RuleSet) -> Vec<ChangeEvent> {
    let mut events = Vec::new();
    for _ in 0..rng.random_range(1..=4) {
        if rng.random_bool(0.6) {
            events.extend(random_injection(model, rng));
        } else {
            events.extend(random_repair(model, rng, rules));
        }
    }
    events
}
