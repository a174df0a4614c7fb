//! Utility-driven planning: best rule per issue by utility increase, ties
//! broken by ratio; winners ordered by descending ratio.

use std::cmp::Ordering;

use super::{Plan, PlanError, PlannerId};
use crate::analyzer::Annotations;
use crate::model::ArchitectureModel;
use crate::rules::{RuleMatch, RuleSet};

/// Whether `new` replaces `old` as an issue's chosen rule.
pub fn prefer(new: &RuleMatch, old: &RuleMatch) -> bool {
    new.utility_increase > old.utility_increase
        || (new.utility_increase == old.utility_increase && new.ratio > old.ratio)
}


pub fn plan_udriven(
    annotations: &mut Annotations,
    model: &ArchitectureModel,
    rules: &RuleSet,
    k: usize,
) -> Result<Plan, PlanError> {
    let mut best: Vec<RuleMatch> = Vec::with_capacity(annotations.issue_count());
    let mut actions = Vec::new();
    let mut instantiations = 0;
    for issue in annotations.issues() {
        let mut chosen: Option<RuleMatch> = None;
        rules.actions_into(model, issue, &mut actions);
        for &action in &actions {
            let candidate = rules.rule_match(model, issue, action)?;
            instantiations += 1;
            if chosen.as_ref().is_none_or(|old| prefer(&candidate, old)) {
                chosen = Some(candidate);
            }
        }
        best.extend(chosen);
    }
    // stable, so equal ratios keep issue order
    best.sort_by(|a, b| b.ratio.partial_cmp(&a.ratio).unwrap_or(Ordering::Equal));
    best.truncate(k);
    annotations.set_best_rules(best.clone());
    Ok(Plan {
        planner: PlannerId::UDriven,
        rules: best,
        instantiations,
    })
}
