//! Event-driven incremental issue detection.
//!
//! [`Annotations`] holds the current issues keyed by `(pattern, anchor)` and the
//! ordered rule matches chosen by the last planning step. [`Annotations::analyze`]
//! first re-checks every stored issue and drops stale ones, then matches the
//! negative patterns only around the elements named by the change events.

use indexmap::IndexMap;

use crate::model::{ArchitectureModel, ChangeEvent, ElementRef, FailureKind};
use crate::rules::RuleMatch;
use crate::utility::{issue_drop, match_at, MatchKey, PatternId, VisitCounter};

/// An annotated match of a negative pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct Issue {
    pub id: u64,
    pub kind: FailureKind,
    pub anchor: ElementRef,
    pub utility_drop: f64,
    pub detected_at: f64,
}

impl Issue {
    pub fn key(&self) -> MatchKey {
        MatchKey {
            pattern: PatternId::for_failure(self.kind),
            anchor: self.anchor,
        }
    }

    /// Constant-time re-evaluation of the match.
    pub fn check(&self, model: &ArchitectureModel) -> bool {
        model.is_affected(self.kind, self.anchor)
    }
}

/// Work performed by one analysis step.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct AnalyzeStats {
    /// Stored issues re-checked.
    pub checks: usize,
    /// Local pattern-match attempts.
    pub match_attempts: usize,
    pub removed: usize,
    pub added: usize,
}

#[derive(Debug, Clone, Default)]
pub struct Annotations {
    issues: IndexMap<MatchKey, Issue>,
    best_rules: Vec<RuleMatch>,
    next_issue: u64,
}

impl Annotations {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn issues(&self) -> impl ExactSizeIterator<Item = &Issue> {
        self.issues.values()
    }

    pub fn issue_count(&self) -> usize {
        self.issues.len()
    }

    pub fn exists_issue(&self, key: &MatchKey) -> bool {
        self.issues.contains_key(key)
    }

    pub fn issue(&self, key: &MatchKey) -> Option<&Issue> {
        self.issues.get(key)
    }

    pub fn best_rules(&self) -> &[RuleMatch] {
        &self.best_rules
    }

    pub fn set_best_rules(&mut self, rules: Vec<RuleMatch>) {
        self.best_rules = rules;
    }

    /// Destroys the issue a successful repair handled.
    pub fn delete_issue(&mut self, key: &MatchKey) -> Option<Issue> {
        self.issues.shift_remove(key)
    }

    /// Updates the issue set after the changes `changes` were applied to `model`.
    pub fn analyze(&mut self, changes: &[ChangeEvent], model: &ArchitectureModel, time: f64) -> AnalyzeStats {
        let mut stats = AnalyzeStats {
            checks: self.issues.len(),
            ..AnalyzeStats::default()
        };
        let before = self.issues.len();
        self.issues.retain(|_, issue| issue.check(model));
        stats.removed = before - self.issues.len();

        let mut counter = VisitCounter::default();
        for change in changes {
            for anchor in change.touched() {
                for pattern in PatternId::anchored_at(anchor)
                    .iter()
                    .copied()
                    .filter(|p| p.failure_kind().is_some())
                {
                    let key = MatchKey { pattern, anchor };
                    if self.issues.contains_key(&key) {
                        continue;
                    }
                    stats.match_attempts += 1;
                    if match_at(model, pattern, anchor, &mut counter).is_some() {
                        let kind = pattern.failure_kind().expect("negative pattern");
                        self.issues.insert(
                            key,
                            Issue {
                                id: self.next_issue,
                                kind,
                                anchor,
                                utility_drop: issue_drop(model, kind, anchor),
                                detected_at: time,
                            },
                        );
                        self.next_issue += 1;
                        stats.added += 1;
                    }
                }
            }
        }
        stats
    }
}

/// Every issue in the model, found by matching all negative patterns everywhere.
pub fn issue_oracle(model: &ArchitectureModel) -> Vec<(MatchKey, FailureKind)> {
    let mut counter = VisitCounter::default();
    let anchors = model
        .live_components()
        .map(|c| ElementRef::Component(c.id))
        .chain(model.connectors().iter().map(|k| ElementRef::Connector(k.id)));
    let mut out = Vec::new();
    for anchor in anchors {
        for &pattern in PatternId::anchored_at(anchor) {
            if let Some(kind) = pattern.failure_kind() {
                if match_at(model, pattern, anchor, &mut counter).is_some() {
                    out.push((MatchKey { pattern, anchor }, kind));
                }
            }
        }
    }
    out.sort_unstable_by_key(|(k, _)| *k);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ConnectorId, RepairAction, RepairOrder};

    fn keys(ann: &Annotations) -> Vec<MatchKey> {
        let mut k: Vec<MatchKey> = ann.issues().map(Issue::key).collect();
        k.sort_unstable();
        k
    }

    fn oracle_keys(m: &ArchitectureModel) -> Vec<MatchKey> {
        issue_oracle(m).into_iter().map(|(k, _)| k).collect()
    }

    #[test]
    fn empty_changes_no_op() {
        let m = ArchitectureModel::build(1, 0);
        let mut ann = Annotations::new();
        let stats = ann.analyze(&[], &m, 0.0);
        assert_eq!(ann.issue_count(), 0);
        assert_eq!(stats, AnalyzeStats::default());
    }

    #[test]
    fn five_exceptions_yield_one_issue() {
        let mut m = ArchitectureModel::build(1, 0);
        let c = ElementRef::Component(m.shops()[0].components[5]);
        let ev = m.inject_failure(FailureKind::Cf2, c, 0.0).unwrap();
        assert_eq!(ev.len(), 5);
        let mut ann = Annotations::new();
        ann.analyze(&ev, &m, 0.0);
        assert_eq!(ann.issue_count(), 1);
        let issue = ann.issues().next().unwrap();
        assert_eq!(issue.kind, FailureKind::Cf2);
        assert_eq!(issue.anchor, c);
    }

    #[test]
    fn repaired_before_analysis_yields_nothing() {
        let mut m = ArchitectureModel::build(1, 0);
        let c = ElementRef::Component(m.shops()[0].components[2]);
        let mut changes = m.inject_failure(FailureKind::Cf1, c, 0.0).unwrap();
        changes.extend(
            m.apply_repair(
                &RepairOrder {
                    action: RepairAction::Restart,
                    failure: FailureKind::Cf1,
                    target: c,
                },
                1.0,
            )
            .unwrap(),
        );
        let mut ann = Annotations::new();
        ann.analyze(&changes, &m, 2.0);
        assert_eq!(ann.issue_count(), 0);
        assert!(oracle_keys(&m).is_empty());
    }

    #[test]
    fn three_injections_three_issues() {
        let mut m = ArchitectureModel::build(2, 1);
        let mut changes = Vec::new();
        for (slot, kind) in FailureKind::COMPONENT.into_iter().enumerate() {
            let c = ElementRef::Component(m.shops()[1].components[slot]);
            changes.extend(m.inject_failure(kind, c, 0.0).unwrap());
        }
        let mut ann = Annotations::new();
        ann.analyze(&changes, &m, 0.0);
        assert_eq!(ann.issue_count(), 3);
        assert_eq!(keys(&ann), oracle_keys(&m));
    }

    #[test]
    fn analyze_is_idempotent() {
        let mut m = ArchitectureModel::build(1, 1);
        let k = ElementRef::Connector(ConnectorId(3));
        let changes = m.inject_failure(FailureKind::Cf4, k, 0.0).unwrap();
        let mut ann = Annotations::new();
        ann.analyze(&changes, &m, 0.0);
        let first: Vec<Issue> = ann.issues().cloned().collect();
        ann.analyze(&changes, &m, 0.0);
        assert_eq!(ann.issues().cloned().collect::<Vec<_>>(), first);
    }

    #[test]
    fn stale_issue_removed() {
        let mut m = ArchitectureModel::build(1, 1);
        let c = ElementRef::Component(m.shops()[0].components[0]);
        let ev = m.inject_failure(FailureKind::Cf3, c, 0.0).unwrap();
        let mut ann = Annotations::new();
        ann.analyze(&ev, &m, 0.0);
        let alt = m.alternatives(0).nth(1).unwrap();
        let ev = m
            .apply_repair(
                &RepairOrder {
                    action: RepairAction::Replace { alternative: alt },
                    failure: FailureKind::Cf3,
                    target: c,
                },
                1.0,
            )
            .unwrap();
        let stats = ann.analyze(&ev, &m, 1.0);
        assert_eq!(stats.removed, 1);
        assert_eq!(ann.issue_count(), 0);
    }
}
