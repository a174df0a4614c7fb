//! Optimal planning by search over rule assignments and execution orders.
//!
//! The objective is lexicographic: final utility first, then reward over a
//! horizon long enough to execute any assignment. Reward of an ordered plan is
//! `Σ w_i (H - C_i)` where `C_i` is the completion time of rule `i`.

use super::{Plan, PlanError, PlannerId};
use crate::analyzer::Annotations;
use crate::model::ArchitectureModel;
use crate::rules::{RuleMatch, RuleSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleStrategy {
    /// Every assignment under every ordering.
    Enumerate,
    /// Coordinate search over assignments and adjacent-swap passes, each step
    /// re-evaluating the full objective.
    Exchange,
    /// Per-issue optimum sorted by ratio; exact when rules are independent.
    Decomposed,
    /// `Enumerate` up to the exhaustive limit, `Exchange` beyond it.
    Auto,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleConfig {
    pub strategy: OracleStrategy,
    pub exhaustive_limit: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            strategy: OracleStrategy::Auto,
            exhaustive_limit: 6,
        }
    }
}

/// Objective value of executing `rules` in order: (final utility gain, reward).
pub fn plan_objective<'a>(rules: impl IntoIterator<Item = &'a RuleMatch>, horizon: f64) -> (f64, f64) {
    let mut t = 0.0;
    let mut gain = 0.0;
    let mut reward = 0.0;
    for r in rules {
        t += r.cost;
        gain += r.utility_increase;
        reward += r.utility_increase * (horizon - t);
    }
    (gain, reward)
}

fn better(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 > b.0 || (a.0 == b.0 && a.1 > b.1)
}

struct Search<'a> {
    candidates: &'a [Vec<RuleMatch>],
    horizon: f64,
}

impl Search<'_> {
    fn eval(&self, order: &[usize], assign: &[usize]) -> (f64, f64) {
        plan_objective(order.iter().map(|&i| &self.candidates[i][assign[i]]), self.horizon)
    }

    fn enumerate(&self) -> (Vec<usize>, Vec<usize>) {
        let n = self.candidates.len();
        let mut order: Vec<usize> = (0..n).collect();
        let mut best = (order.clone(), vec![0; n], self.eval(&order, &vec![0; n]));
        let mut visit = |order: &[usize]| {
            let mut assign = vec![0; n];
            loop {
                let v = self.eval(order, &assign);
                if better(v, best.2) {
                    best = (order.to_vec(), assign.clone(), v);
                }
                // mixed-radix increment
                let mut i = 0;
                while i < n {
                    assign[i] += 1;
                    if assign[i] < self.candidates[i].len() {
                        break;
                    }
                    assign[i] = 0;
                    i += 1;
                }
                if i == n {
                    return;
                }
            }
        };
        // Heap's algorithm over orderings
        let mut c = vec![0; n];
        visit(&order);
        let mut i = 0;
        while i < n {
            if c[i] < i {
                if i % 2 == 0 {
                    order.swap(0, i);
                } else {
                    order.swap(c[i], i);
                }
                visit(&order);
                c[i] += 1;
                i = 0;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
        (best.0, best.1)
    }

    fn exchange(&self) -> (Vec<usize>, Vec<usize>) {
        let n = self.candidates.len();
        let mut order: Vec<usize> = (0..n).collect();
        let mut assign = vec![0; n];
        let mut best = self.eval(&order, &assign);
        loop {
            let mut improved = false;
            for i in 0..n {
                for c in 0..self.candidates[i].len() {
                    if c == assign[i] {
                        continue;
                    }
                    let prev = assign[i];
                    assign[i] = c;
                    let v = self.eval(&order, &assign);
                    if better(v, best) {
                        best = v;
                        improved = true;
                    } else {
                        assign[i] = prev;
                    }
                }
            }
            for j in 0..n.saturating_sub(1) {
                order.swap(j, j + 1);
                let v = self.eval(&order, &assign);
                if better(v, best) {
                    best = v;
                    improved = true;
                } else {
                    order.swap(j, j + 1);
                }
            }
            if !improved {
                return (order, assign);
            }
        }
    }

    fn decomposed(&self) -> (Vec<usize>, Vec<usize>) {
        let assign: Vec<usize> = self
            .candidates
            .iter()
            .map(|cands| {
                let mut best = 0;
                for (i, c) in cands.iter().enumerate().skip(1) {
                    let b = &cands[best];
                    if c.utility_increase > b.utility_increase
                        || (c.utility_increase == b.utility_increase && c.cost < b.cost)
                    {
                        best = i;
                    }
                }
                best
            })
            .collect();
        let mut order: Vec<usize> = (0..self.candidates.len()).collect();
        order.sort_by(|&a, &b| {
            self.candidates[b][assign[b]]
                .ratio
                .total_cmp(&self.candidates[a][assign[a]].ratio)
        });
        (order, assign)
    }
}

pub fn plan_oracle(
    annotations: &mut Annotations,
    model: &ArchitectureModel,
    rules: &RuleSet,
    config: &OracleConfig,
    k: usize,
) -> Result<Plan, PlanError> {
    let mut candidates = Vec::with_capacity(annotations.issue_count());
    for issue in annotations.issues() {
        let c = rules.instantiate(model, issue)?;
        if !c.is_empty() {
            candidates.push(c);
        }
    }
    let instantiations = candidates.iter().map(Vec::len).sum();
    let n = candidates.len();
    let strategy = match config.strategy {
        OracleStrategy::Auto if n <= config.exhaustive_limit => OracleStrategy::Enumerate,
        OracleStrategy::Auto => OracleStrategy::Exchange,
        OracleStrategy::Enumerate if n > config.exhaustive_limit => {
            return Err(PlanError::OracleTooLarge {
                issues: n,
                limit: config.exhaustive_limit,
            })
        }
        s => s,
    };
    let horizon: f64 = candidates
        .iter()
        .map(|c| c.iter().map(|r| r.cost).fold(0.0, f64::max))
        .sum();
    let search = Search {
        candidates: &candidates,
        horizon,
    };
    let (order, assign) = match strategy {
        _ if n == 0 => (Vec::new(), Vec::new()),
        OracleStrategy::Enumerate => search.enumerate(),
        OracleStrategy::Exchange => search.exchange(),
        OracleStrategy::Decomposed | OracleStrategy::Auto => search.decomposed(),
    };
    let mut chosen: Vec<RuleMatch> = order
        .iter()
        .map(|&i| candidates[i][assign[i]].clone())
        .collect();
    chosen.truncate(k);
    annotations.set_best_rules(chosen.clone());
    Ok(Plan {
        planner: PlannerId::Oracle,
        rules: chosen,
        instantiations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ElementRef, FailureKind};
    use crate::planners::plan_udriven;

    fn annotated(n: usize, seed: u64) -> (ArchitectureModel, Annotations) {
        let mut m = ArchitectureModel::build(2, seed);
        let mut changes = Vec::new();
        for i in 0..n {
            let c = ElementRef::Component(m.shops()[i / 18].components[i % 18]);
            changes.extend(m.inject_failure(FailureKind::COMPONENT[i % 3], c, 0.0).unwrap());
        }
        let mut ann = Annotations::new();
        ann.analyze(&changes, &m, 0.0);
        (m, ann)
    }

    fn objective(plan: &Plan, horizon: f64) -> (f64, f64) {
        plan_objective(&plan.rules, horizon)
    }

    #[test]
    fn strategies_agree_with_udriven() {
        for seed in 0..10 {
            let (m, mut ann) = annotated(4, seed);
            let rules = RuleSet::default();
            let u = plan_udriven(&mut ann, &m, &rules, 100).unwrap();
            let h = 1000.0;
            for strategy in [OracleStrategy::Enumerate, OracleStrategy::Exchange, OracleStrategy::Decomposed] {
                let cfg = OracleConfig {
                    strategy,
                    exhaustive_limit: 6,
                };
                let o = plan_oracle(&mut ann, &m, &rules, &cfg, 100).unwrap();
                let (a, b) = (objective(&o, h), objective(&u, h));
                assert_eq!(a.0, b.0, "{strategy:?} seed {seed}");
                assert!((a.1 - b.1).abs() < 1e-9 * b.1.abs().max(1.0), "{strategy:?} seed {seed}");
            }
        }
    }

    #[test]
    fn single_issue_same_choice() {
        for seed in 0..20 {
            let (m, mut ann) = annotated(1, seed);
            let rules = RuleSet::default();
            let u = plan_udriven(&mut ann, &m, &rules, 10).unwrap();
            let o = plan_oracle(&mut ann, &m, &rules, &OracleConfig::default(), 10).unwrap();
            assert_eq!(u.rules[0].utility_increase, o.rules[0].utility_increase);
            assert_eq!(u.rules[0].cost, o.rules[0].cost);
        }
    }

    #[test]
    fn enumerate_refuses_large_instances() {
        let (m, mut ann) = annotated(7, 1);
        let cfg = OracleConfig {
            strategy: OracleStrategy::Enumerate,
            exhaustive_limit: 6,
        };
        assert_eq!(
            plan_oracle(&mut ann, &m, &RuleSet::default(), &cfg, 10),
            Err(PlanError::OracleTooLarge { issues: 7, limit: 6 })
        );
    }

    #[test]
    fn exchange_handles_larger_instances() {
        let (m, mut ann) = annotated(30, 3);
        let rules = RuleSet::default();
        let u = plan_udriven(&mut ann, &m, &rules, 100).unwrap();
        let o = plan_oracle(&mut ann, &m, &rules, &OracleConfig::default(), 100).unwrap();
        let h = 10_000.0;
        assert_eq!(objective(&o, h).0, objective(&u, h).0);
        assert!((objective(&o, h).1 - objective(&u, h).1).abs() < 1e-6);
    }
}
