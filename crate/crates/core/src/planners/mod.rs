//! Planning strategies that turn the current issues into an ordered list of
//! rule matches of length at most `k`.

pub mod calibration;
mod fixed;
mod oracle;
mod udriven;
pub mod validate;

use std::fmt;
use std::str::FromStr;

use crate::analyzer::Annotations;
use crate::model::{ArchitectureModel, ModelError};
use crate::rules::{RuleMatch, RuleSet};
use crate::utility::UtilityError;

pub use calibration::calibrated_planning_s;
pub use fixed::{plan_static, StaticPolicy};
pub use oracle::{plan_objective, plan_oracle, OracleConfig, OracleStrategy};
pub use udriven::{plan_udriven, prefer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PlannerId {
    Static,
    UDriven,
    Oracle,
}

impl PlannerId {
    pub const ALL: [PlannerId; 3] = [PlannerId::Static, PlannerId::UDriven, PlannerId::Oracle];

    pub fn as_str(self) -> &'static str {
        match self {
            PlannerId::Static => "static",
            PlannerId::UDriven => "u-driven",
            PlannerId::Oracle => "oracle",
        }
    }
}

impl fmt::Display for PlannerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PlannerId {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "static" => Ok(PlannerId::Static),
            "u-driven" | "udriven" => Ok(PlannerId::UDriven),
            "oracle" | "solver" => Ok(PlannerId::Oracle),
            _ => Err(ModelError::Parse(format!("unknown planner {s:?}"))),
        }
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum PlanError {
    #[error("{issues} issues exceed the exhaustive limit of {limit}")]
    OracleTooLarge { issues: usize, limit: usize },
    #[error(transparent)]
    Utility(#[from] UtilityError),
}

/// Ordered rule matches chosen for one feedback-loop run.
#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub planner: PlannerId,
    pub rules: Vec<RuleMatch>,
    /// Rule matches instantiated while planning.
    pub instantiations: usize,
}

impl Plan {
    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

/// A planner configured with everything except the model state.
#[derive(Debug, Clone, PartialEq)]
pub enum PlannerConfig {
    Static(StaticPolicy),
    UDriven,
    Oracle(OracleConfig),
}

impl PlannerConfig {
    pub fn default_for(id: PlannerId) -> Self {
        match id {
            PlannerId::Static => PlannerConfig::Static(StaticPolicy::default()),
            PlannerId::UDriven => PlannerConfig::UDriven,
            PlannerId::Oracle => PlannerConfig::Oracle(OracleConfig::default()),
        }
    }

    pub fn id(&self) -> PlannerId {
        match self {
            PlannerConfig::Static(_) => PlannerId::Static,
            PlannerConfig::UDriven => PlannerId::UDriven,
            PlannerConfig::Oracle(_) => PlannerId::Oracle,
        }
    }

    /// Plans for the current issues and stores the result as the annotations' best rules.
    pub fn plan(
        &self,
        annotations: &mut Annotations,
        model: &ArchitectureModel,
        rules: &RuleSet,
        k: usize,
    ) -> Result<Plan, PlanError> {
        match self {
            PlannerConfig::Static(policy) => Ok(plan_static(annotations, model, rules, policy, k)),
            PlannerConfig::UDriven => plan_udriven(annotations, model, rules, k),
            PlannerConfig::Oracle(cfg) => plan_oracle(annotations, model, rules, cfg, k),
        }
    }
}
