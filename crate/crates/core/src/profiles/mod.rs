//! Failure-profile models and deterministic failure traces.
//!
//! A model describes bursts of failures by three distributions: the failure
//! group size (FGS), the inter-arrival time between bursts (IAT) and the
//! exposure window (FET) over which one burst's failures spread. The realistic
//! presets are lognormal fits for the LRI, DEUG and Grid5000 systems; the
//! uniform, single and bigburst variants are derived from a Grid5000 trace.

mod dist;
mod generate;
mod trace;
mod variants;

use std::fmt;
use std::str::FromStr;

pub use dist::Dist;
pub use generate::{generate_realistic, generate_synthetic, normalize_sizes};
pub use trace::{FailureTrace, TargetSelector, TraceEntry};
pub use variants::{
    bootstrap_means, derive_bigburst_variant, derive_single_variant, derive_uniform_variant,
    BOOTSTRAP_RESAMPLES, TAIL_FGS_THRESHOLD, TAIL_IAT_THRESHOLD_S,
};

pub const HOUR: f64 = 3_600.0;
pub const DAY: f64 = 24.0 * HOUR;

/// Failure density of the reference Grid5000 short trace.
pub const REFERENCE_DENSITY: usize = 1_116;

/// Seed whose Grid5000 short trace has exactly the reference density.
pub const GRID5000_REFERENCE_SEED: u64 = 18_031;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ProfileError {
    #[error("invalid distribution parameters: {0}")]
    InvalidParameters(String),
    #[error("unknown failure profile model {0:?}")]
    UnknownModel(String),
    #[error("no base samples at or above the tail threshold {0}")]
    InsufficientTailSamples(f64),
    #[error("cannot spread {density} failures over {bursts} bursts")]
    DensityTooSmall { density: usize, bursts: usize },
    #[error("malformed trace: {0}")]
    MalformedTrace(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceLength {
    Short,
    Long,
}

impl FromStr for TraceLength {
    type Err = ProfileError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "short" => Ok(TraceLength::Short),
            "long" => Ok(TraceLength::Long),
            _ => Err(ProfileError::InvalidParameters(format!("trace length {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FailureProfileModel {
    pub name: String,
    pub fgs: Dist,
    pub iat: Dist,
    pub fet_s: f64,
    pub bursts: usize,
    pub duration_s: f64,
}

impl FailureProfileModel {
    pub fn validate(&self) -> Result<(), ProfileError> {
        self.fgs.validate()?;
        self.iat.validate()?;
        if !(self.fet_s >= 0.0 && self.duration_s > self.fet_s && self.bursts >= 1) {
            return Err(ProfileError::InvalidParameters(format!(
                "fet {} duration {} bursts {}",
                self.fet_s, self.duration_s, self.bursts
            )));
        }
        Ok(())
    }

    fn preset(name: &str, fgs: Dist, iat: Dist, fet_s: f64, bursts: usize, duration_s: f64) -> Self {
        FailureProfileModel {
            name: name.to_string(),
            fgs,
            iat,
            fet_s,
            bursts,
            duration_s,
        }
    }

    pub fn lri(length: TraceLength) -> Self {
        let (n, d) = match length {
            TraceLength::Short => (50, 41.2 * HOUR),
            TraceLength::Long => (1_355, 30.0 * DAY),
        };
        Self::preset(
            "lri",
            Dist::LogNormal { mu: 1.32, sigma: 0.77 },
            Dist::LogNormal { mu: -1.46, sigma: 1.28 },
            100.0,
            n,
            d,
        )
    }

    pub fn deug(length: TraceLength) -> Self {
        let (n, d) = match length {
            TraceLength::Short => (50, 21.4 * HOUR),
            TraceLength::Long => (2_843, 30.0 * DAY),
        };
        Self::preset(
            "deug",
            Dist::LogNormal { mu: 2.15, sigma: 0.70 },
            Dist::LogNormal { mu: -2.28, sigma: 1.35 },
            150.0,
            n,
            d,
        )
    }

    pub fn grid5000(length: TraceLength) -> Self {
        let (n, d) = match length {
            TraceLength::Short => (50, DAY),
            TraceLength::Long => (1_678, 30.0 * DAY),
        };
        Self::preset(
            "grid5000",
            Dist::LogNormal { mu: 1.88, sigma: 1.25 },
            Dist::LogNormal { mu: -1.39, sigma: 1.03 },
            250.0,
            n,
            d,
        )
    }

    /// Uniform variant with the reference parameters.
    pub fn uniform() -> Self {
        Self::preset(
            "uniform",
            Dist::Normal { mean: 22.85, sd: 20.68 },
            Dist::Constant(1_728.0),
            250.0,
            50,
            DAY,
        )
    }

    /// Single-failure variant with the reference parameters.
    pub fn single() -> Self {
        Self::preset("single", Dist::Constant(1.0), Dist::Constant(77.4), 0.0, REFERENCE_DENSITY, DAY)
    }

    /// Bigburst variant with the reference parameters.
    pub fn bigburst() -> Self {
        Self::preset(
            "bigburst",
            Dist::Normal { mean: 238.0, sd: 97.3 },
            Dist::Normal { mean: 3_521.4, sd: 5_418.6 },
            250.0,
            6,
            DAY,
        )
    }

    /// Fixed-size groups spaced evenly with no exposure window.
    pub fn synthetic(fgs: usize, runs: usize, iat_s: f64) -> Self {
        Self::preset(
            "synthetic",
            Dist::Constant(fgs as f64),
            Dist::Constant(iat_s),
            0.0,
            runs,
            runs as f64 * iat_s,
        )
    }

    /// Preset by name.
    pub fn named(name: &str, length: TraceLength) -> Result<Self, ProfileError> {
        match name.to_ascii_lowercase().as_str() {
            "lri" => Ok(Self::lri(length)),
            "deug" => Ok(Self::deug(length)),
            "grid5000" => Ok(Self::grid5000(length)),
            "uniform" => Ok(Self::uniform()),
            "single" => Ok(Self::single()),
            "bigburst" => Ok(Self::bigburst()),
            _ => Err(ProfileError::UnknownModel(name.to_string())),
        }
    }
}

impl fmt::Display for FailureProfileModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: FGS {} IAT {} FET {}s n={} duration {}s",
            self.name, self.fgs, self.iat, self.fet_s, self.bursts, self.duration_s
        )
    }
}

/// The reference Grid5000 short trace.
pub fn grid5000_reference_trace() -> FailureTrace {
    generate_realistic(&FailureProfileModel::grid5000(TraceLength::Short), GRID5000_REFERENCE_SEED, None)
        .expect("preset is valid")
}

/// Trace of a named model or variant, derived from the reference trace where needed.
pub fn named_trace(name: &str, length: TraceLength, seed: u64) -> Result<FailureTrace, ProfileError> {
    let base = || grid5000_reference_trace();
    let target = Some(REFERENCE_DENSITY);
    match name.to_ascii_lowercase().as_str() {
        "uniform" => generate_realistic(&derive_uniform_variant(&base(), seed)?, seed, target),
        "single" => generate_realistic(&derive_single_variant(&base()), seed, target),
        "bigburst" => generate_realistic(&derive_bigburst_variant(&base(), seed)?, seed, target),
        "grid5000" if length == TraceLength::Short && seed == GRID5000_REFERENCE_SEED => Ok(base()),
        _ => generate_realistic(&FailureProfileModel::named(name, length)?, seed, None),
    }
}
