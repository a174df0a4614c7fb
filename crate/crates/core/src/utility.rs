//! Pattern-based utility.
//!
//! Five local patterns are defined: the positive pattern for started components
//! and one negative pattern per critical failure kind. Total utility is the sum
//! of all match contributions; [`UtilityLedger`] maintains it incrementally from
//! change events, and [`rule_impact`] predicts a repair's effect locally.

use std::collections::HashMap;

use crate::model::{
    ArchitectureModel, ChangeEvent, Component, ComponentId, ConnectorId, ConnectorState,
    ElementRef, FailureKind, LifecycleState, RepairAction, RepairOrder, EXCEPTION_THRESHOLD,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PatternId {
    /// Started component deployed in a shop.
    StartedComponent,
    /// Crashed component (CF1).
    Crashed,
    /// Started component with at least five failures (CF2).
    Exceptions,
    /// Removed component (CF3).
    Removed,
    /// Crashed connector (CF4).
    ConnectorCrashed,
}

impl PatternId {
    pub const ALL: [PatternId; 5] = [
        PatternId::StartedComponent,
        PatternId::Crashed,
        PatternId::Exceptions,
        PatternId::Removed,
        PatternId::ConnectorCrashed,
    ];

    pub fn polarity(self) -> Polarity {
        match self {
            PatternId::StartedComponent => Polarity::Positive,
            _ => Polarity::Negative,
        }
    }

    /// The failure kind a negative pattern detects.
    pub fn failure_kind(self) -> Option<FailureKind> {
        match self {
            PatternId::StartedComponent => None,
            PatternId::Crashed => Some(FailureKind::Cf1),
            PatternId::Exceptions => Some(FailureKind::Cf2),
            PatternId::Removed => Some(FailureKind::Cf3),
            PatternId::ConnectorCrashed => Some(FailureKind::Cf4),
        }
    }

    pub fn for_failure(kind: FailureKind) -> PatternId {
        match kind {
            FailureKind::Cf1 => PatternId::Crashed,
            FailureKind::Cf2 => PatternId::Exceptions,
            FailureKind::Cf3 => PatternId::Removed,
            FailureKind::Cf4 => PatternId::ConnectorCrashed,
        }
    }

    pub fn anchors_connector(self) -> bool {
        self == PatternId::ConnectorCrashed
    }

    /// Patterns with a node that can be bound to `anchor`.
    pub fn anchored_at(anchor: ElementRef) -> &'static [PatternId] {
        match anchor {
            ElementRef::Component(_) => &PatternId::ALL[..4],
            ElementRef::Connector(_) => &PatternId::ALL[4..],
            ElementRef::Shop(_) => &[],
        }
    }

    pub fn negative() -> impl Iterator<Item = PatternId> {
        PatternId::ALL.into_iter().filter(|p| p.polarity() == Polarity::Negative)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    Positive,
    Negative,
}

/// Index key of a match: at most one match per pattern and anchor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MatchKey {
    pub pattern: PatternId,
    pub anchor: ElementRef,
}

/// Counts model elements inspected while matching.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct VisitCounter {
    pub visits: usize,
}

/// Criticality × reliability × connectivity of a component.
pub fn u1(model: &ArchitectureModel, component: &Component) -> f64 {
    component.criticality * model.reliability_of(component) * component.connectivity() as f64
}

/// Negation of [`u1`]; the sub-function of the exception pattern.
pub fn u2(model: &ArchitectureModel, component: &Component) -> f64 {
    -u1(model, component)
}

/// Utility lost while connector `id` is crashed: the source's share of one connector.
fn connector_share(model: &ArchitectureModel, id: ConnectorId, counter: &mut VisitCounter) -> f64 {
    let k = &model.connectors()[id.index()];
    let source = &model.components()[k.source.index()];
    counter.visits += 1;
    source.criticality * model.reliability_of(source)
}

/// Matches `pattern` at `anchor` and returns the match's utility contribution.
///
/// Only the anchor and its immediate neighbours are inspected.
pub fn match_at(
    model: &ArchitectureModel,
    pattern: PatternId,
    anchor: ElementRef,
    counter: &mut VisitCounter,
) -> Option<f64> {
    counter.visits += 1;
    match (pattern, anchor) {
        (PatternId::ConnectorCrashed, ElementRef::Connector(id)) => {
            let k = model.connector(id)?;
            (k.state == ConnectorState::Crashed).then(|| -connector_share(model, id, counter))
        }
        (PatternId::ConnectorCrashed, _) => None,
        (_, ElementRef::Component(id)) => {
            let c = model.component(id)?;
            c.shop?;
            match pattern {
                PatternId::StartedComponent => {
                    (c.state == LifecycleState::Started).then(|| u1(model, c))
                }
                PatternId::Exceptions => (c.state == LifecycleState::Started
                    && c.failures.len() >= EXCEPTION_THRESHOLD)
                    .then(|| u2(model, c)),
                // the loss of a crashed or removed component shows as the missing positive match
                PatternId::Crashed => (c.state == LifecycleState::Crashed).then_some(0.0),
                PatternId::Removed => (c.state == LifecycleState::Removed).then_some(0.0),
                PatternId::ConnectorCrashed => None,
            }
        }
        _ => None,
    }
}

/// Utility drop caused by an issue of `kind` at `anchor`.
pub fn issue_drop(model: &ArchitectureModel, kind: FailureKind, anchor: ElementRef) -> f64 {
    match anchor {
        ElementRef::Component(id) => model.component(id).map_or(0.0, |c| u1(model, c)),
        ElementRef::Connector(id) if kind == FailureKind::Cf4 => model
            .connector(id)
            .map_or(0.0, |_| connector_share(model, id, &mut VisitCounter::default())),
        _ => 0.0,
    }
}

/// Every match in the model, found by exhaustive search.
pub fn all_matches(model: &ArchitectureModel) -> Vec<(MatchKey, f64)> {
    let mut counter = VisitCounter::default();
    let mut out = Vec::new();
    let anchors = model
        .live_components()
        .map(|c| ElementRef::Component(c.id))
        .chain(model.connectors().iter().map(|k| ElementRef::Connector(k.id)));
    for anchor in anchors {
        for &pattern in PatternId::anchored_at(anchor) {
            if let Some(u) = match_at(model, pattern, anchor, &mut counter) {
                out.push((MatchKey { pattern, anchor }, u));
            }
        }
    }
    out
}

/// Total utility by full pattern search over the model.
pub fn total_utility(model: &ArchitectureModel) -> f64 {
    all_matches(model).iter().map(|(_, u)| u).sum()
}

/// Elements whose matches may change when the given events happen.
pub fn affected_anchors(model: &ArchitectureModel, events: &[ChangeEvent]) -> Vec<ElementRef> {
    let mut anchors = Vec::new();
    for e in events {
        for el in e.touched() {
            anchors.push(el);
            if let ElementRef::Component(id) = el {
                if let Some(c) = model.component(id) {
                    anchors.extend(c.connectors().map(ElementRef::Connector));
                }
            }
        }
    }
    anchors.sort_unstable();
    anchors.dedup();
    anchors
}

/// Incrementally maintained total utility with per-match cached contributions.
#[derive(Debug, Clone, Default)]
pub struct UtilityLedger {
    total: f64,
    contributions: HashMap<MatchKey, f64>,
}

impl UtilityLedger {
    /// Seeds the ledger with a full search.
    pub fn new(model: &ArchitectureModel) -> Self {
        let contributions: HashMap<MatchKey, f64> = all_matches(model).into_iter().collect();
        let mut keys: Vec<&MatchKey> = contributions.keys().collect();
        keys.sort_unstable();
        let total = keys.iter().map(|k| contributions[*k]).sum();
        UtilityLedger { total, contributions }
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn contribution(&self, key: &MatchKey) -> Option<f64> {
        self.contributions.get(key).copied()
    }

    pub fn len(&self) -> usize {
        self.contributions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contributions.is_empty()
    }

    /// Removes the cached utility of every deleted match and adds the utility of
    /// every new one. Returns the change.
    pub fn apply_delta(&mut self, new: &[(MatchKey, f64)], deleted: &[MatchKey]) -> f64 {
        let mut delta = 0.0;
        for key in deleted {
            if let Some(old) = self.contributions.remove(key) {
                delta -= old;
            }
        }
        for &(key, u) in new {
            if let Some(prev) = self.contributions.insert(key, u) {
                // a re-match replaces the old cached value
                delta -= prev;
            }
            delta += u;
        }
        self.total += delta;
        delta
    }

    /// Rematches around the elements touched by `events` (already applied to
    /// `model`) and folds the differences into the total.
    pub fn observe(&mut self, model: &ArchitectureModel, events: &[ChangeEvent]) -> f64 {
        let (new, deleted) = self.diff(model, events);
        self.apply_delta(&new, &deleted)
    }

    /// New and deleted matches around the elements touched by `events`.
    pub fn diff(&self, model: &ArchitectureModel, events: &[ChangeEvent]) -> (Vec<(MatchKey, f64)>, Vec<MatchKey>) {
        let mut counter = VisitCounter::default();
        let mut new = Vec::new();
        let mut deleted = Vec::new();
        for anchor in affected_anchors(model, events) {
            for &pattern in PatternId::anchored_at(anchor) {
                let key = MatchKey { pattern, anchor };
                let now = match_at(model, pattern, anchor, &mut counter);
                match (self.contributions.get(&key), now) {
                    (Some(_), None) => deleted.push(key),
                    (None, Some(u)) => new.push((key, u)),
                    (Some(&old), Some(u)) if old != u => {
                        deleted.push(key);
                        new.push((key, u));
                    }
                    _ => {}
                }
            }
        }
        (new, deleted)
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum UtilityError {
    #[error("the issue of {failure} at {target} is no longer present")]
    InvalidRuleMatch {
        failure: FailureKind,
        target: ElementRef,
    },
}

/// Locally predicted utility change of executing `order`.
///
/// Sums the absolute utility of the resolved negative match, the crashed
/// connectors a replacement recreates, and the positive matches the repair
/// enables, minus the positive match a replacement retires.
pub fn rule_impact(model: &ArchitectureModel, order: &RepairOrder) -> Result<f64, UtilityError> {
    let invalid = || UtilityError::InvalidRuleMatch {
        failure: order.failure,
        target: order.target,
    };
    if !model.is_affected(order.failure, order.target) {
        return Err(invalid());
    }
    let mut counter = VisitCounter::default();
    let pattern = PatternId::for_failure(order.failure);
    let resolved = match_at(model, pattern, order.target, &mut counter)
        .ok_or_else(invalid)?
        .abs();
    let ElementRef::Component(id) = order.target else {
        return Ok(resolved);
    };
    let c = model.component(id).ok_or_else(invalid)?;
    let started = match_at(model, PatternId::StartedComponent, order.target, &mut counter);
    Ok(match order.action {
        RepairAction::Replace { alternative } => {
            let rel = model
                .component_type(alternative)
                .map(|t| t.reliability)
                .ok_or_else(invalid)?;
            let recreated: f64 = crashed_connectors(model, id)
                .map(|k| connector_share(model, k, &mut counter))
                .sum();
            resolved + recreated - started.unwrap_or(0.0)
                + c.criticality * rel * c.connectivity() as f64
        }
        _ => resolved + if started.is_none() { u1(model, c) } else { 0.0 },
    })
}

fn crashed_connectors(model: &ArchitectureModel, id: ComponentId) -> impl Iterator<Item = ConnectorId> + '_ {
    model.components()[id.index()]
        .connectors()
        .filter(move |k| model.connectors()[k.index()].state == ConnectorState::Crashed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ComponentTypeId;

    fn comp(model: &ArchitectureModel, shop: usize, slot: usize) -> ComponentId {
        model.shops()[shop].components[slot]
    }

    /// Forces the component's u1 to `crit × rel × connectivity`.
    fn pin(model: &mut ArchitectureModel, id: ComponentId, crit: f64, rel: f64) {
        model.set_criticality(id, crit).unwrap();
        let t = model.component(id).unwrap().type_id;
        model.set_type_reliability(t, rel).unwrap();
    }

    #[test]
    fn u1_product() {
        let mut m = ArchitectureModel::build(1, 0);
        // slot 17 has two connectors in the fixed topology
        let id = comp(&m, 0, 17);
        assert_eq!(m.component(id).unwrap().connectivity(), 2);
        pin(&mut m, id, 2.0, 0.9);
        let c = m.component(id).unwrap();
        assert!((u1(&m, c) - 3.6).abs() < 1e-12);
        assert!((u2(&m, c) + 3.6).abs() < 1e-12);
    }

    #[test]
    fn shop_utility_sums_components() {
        let m = ArchitectureModel::build(1, 8);
        let expected: f64 = m.live_components().map(|c| u1(&m, c)).sum();
        assert_eq!(total_utility(&m), expected);
        assert_eq!(all_matches(&m).len(), 18);
    }

    #[test]
    fn empty_architecture_has_zero_utility() {
        let m = ArchitectureModel::build(0, 0);
        assert_eq!(total_utility(&m), 0.0);
    }

    #[test]
    fn cf2_lowers_total_by_u1() {
        let mut m = ArchitectureModel::build(1, 8);
        let before = total_utility(&m);
        let id = comp(&m, 0, 4);
        let drop = u1(&m, m.component(id).unwrap());
        m.inject_failure(FailureKind::Cf2, ElementRef::Component(id), 0.0).unwrap();
        assert_eq!(total_utility(&m), before - drop);
    }

    #[test]
    fn ledger_tracks_injection_and_repair() {
        let mut m = ArchitectureModel::build(2, 8);
        let mut ledger = UtilityLedger::new(&m);
        let before = ledger.total();
        let target = ElementRef::Component(comp(&m, 1, 2));
        let ev = m.inject_failure(FailureKind::Cf2, target, 0.0).unwrap();
        let delta = ledger.observe(&m, &ev);
        assert!(delta < 0.0);
        assert_eq!(ledger.total(), total_utility(&m));
        let order = RepairOrder {
            action: RepairAction::Restart,
            failure: FailureKind::Cf2,
            target,
        };
        let predicted = rule_impact(&m, &order).unwrap();
        let ev = m.apply_repair(&order, 1.0).unwrap();
        assert_eq!(ledger.observe(&m, &ev), predicted);
        assert_eq!(ledger.total(), before);
    }

    #[test]
    fn empty_delta_is_zero() {
        let m = ArchitectureModel::build(1, 1);
        let mut ledger = UtilityLedger::new(&m);
        assert_eq!(ledger.apply_delta(&[], &[]), 0.0);
        assert_eq!(ledger.observe(&m, &[]), 0.0);
    }

    #[test]
    fn single_new_negative_match_delta() {
        let m = ArchitectureModel::build(1, 1);
        let mut ledger = UtilityLedger::new(&m);
        let key = MatchKey {
            pattern: PatternId::Exceptions,
            anchor: ElementRef::Component(ComponentId(0)),
        };
        assert_eq!(ledger.apply_delta(&[(key, -5.4)], &[]), -5.4);
    }

    #[test]
    fn replace_impact_rewards_reliability() {
        let mut m = ArchitectureModel::build(100, 2);
        let id = comp(&m, 3, 17);
        pin(&mut m, id, 2.0, 0.7);
        let alt: ComponentTypeId = m.alternatives(17).nth(1).unwrap();
        m.set_type_reliability(alt, 0.95).unwrap();
        let target = ElementRef::Component(id);
        m.inject_failure(FailureKind::Cf3, target, 0.0).unwrap();
        let hw = rule_impact(
            &m,
            &RepairOrder {
                action: RepairAction::HwRedeploy,
                failure: FailureKind::Cf3,
                target,
            },
        )
        .unwrap();
        let replace = rule_impact(
            &m,
            &RepairOrder {
                action: RepairAction::Replace { alternative: alt },
                failure: FailureKind::Cf3,
                target,
            },
        )
        .unwrap();
        let conn = m.component(id).unwrap().connectivity() as f64;
        assert!((replace - hw - (0.95 - 0.70) * 2.0 * conn).abs() < 1e-12);
    }

    #[test]
    fn impact_of_missing_issue_is_rejected() {
        let m = ArchitectureModel::build(1, 2);
        let order = RepairOrder {
            action: RepairAction::Restart,
            failure: FailureKind::Cf1,
            target: ElementRef::Component(ComponentId(0)),
        };
        assert!(rule_impact(&m, &order).is_err());
    }

    #[test]
    fn matching_is_local() {
        for shops in [1, 10, 100] {
            let mut m = ArchitectureModel::build(shops, 3);
            m.inject_failure(FailureKind::Cf4, ElementRef::Connector(ConnectorId(0)), 0.0)
                .unwrap();
            for anchor in [
                ElementRef::Component(ComponentId(0)),
                ElementRef::Connector(ConnectorId(0)),
            ] {
                for &p in PatternId::anchored_at(anchor) {
                    let mut counter = VisitCounter::default();
                    match_at(&m, p, anchor, &mut counter);
                    assert!(counter.visits <= 2);
                }
            }
        }
    }

    #[test]
    fn sign_discipline() {
        let mut m = ArchitectureModel::build(2, 6);
        for (i, kind) in FailureKind::ALL.into_iter().enumerate() {
            let target = if kind.targets_connector() {
                ElementRef::Connector(ConnectorId(i as u32))
            } else {
                ElementRef::Component(comp(&m, 0, i))
            };
            m.inject_failure(kind, target, 0.0).unwrap();
        }
        for (key, u) in all_matches(&m) {
            match key.pattern.polarity() {
                Polarity::Positive => assert!(u >= 0.0),
                Polarity::Negative => assert!(u <= 0.0),
            }
        }
    }
}
