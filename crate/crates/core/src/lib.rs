//! Discrete-event simulator of architecture-based self-healing.
//!
//! An architectural runtime model of a multi-shop marketplace is kept healthy
//! by a MAPE-K loop. Utility is defined by graph patterns and maintained
//! incrementally; three planners (utility-driven, static and an exhaustive
//! optimum) compete on failure traces drawn from synthetic and realistic
//! failure-profile models. Reward is the integral of utility over virtual time.

pub mod analyzer;
pub mod error;
pub mod experiments;
pub mod model;
pub mod planners;
pub mod profiles;
pub mod rules;
pub mod sim;
pub mod utility;

pub use error::Error;
