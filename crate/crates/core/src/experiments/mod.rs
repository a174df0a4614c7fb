//! Experiment suites: planning-time scalability, reward comparisons over
//! failure traces, success-likelihood sweeps and pinned analytical scenarios.

mod analytical;
mod config;
mod reward;
mod scalability;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

pub use analytical::{run_analytical, AnalyticalOutcome, Scenario};
pub use config::parse_key_values;
pub use reward::{reward_rows, run_reward, RewardOutcome, RewardSpec};
pub use scalability::{run_scalability, scalability_rows, ScalabilityCell, ScalabilitySpec};

use crate::profiles::{generate_synthetic, named_trace, FailureTrace, TraceLength};
use crate::Error;

/// One line of a results table.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub experiment: String,
    pub planner: String,
    pub components: usize,
    pub trace: String,
    pub metric: String,
    pub value: f64,
    pub stddev: f64,
}

pub fn rows_to_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from("experiment,planner,components,trace,metric,value,stddev\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.experiment, r.planner, r.components, r.trace, r.metric, r.value, r.stddev
        );
    }
    out
}

/// Where a failure trace comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum TraceRef {
    /// A preset or variant: `grid5000`, `grid5000:long`, `single:7` (name, optional length, optional seed).
    Named { name: String, length: TraceLength, seed: Option<u64> },
    /// `synthetic:<fgs>x<runs>@<iat>`.
    Synthetic { fgs: usize, runs: usize, iat_s: f64 },
    /// A trace CSV on disk.
    File(PathBuf),
}

impl TraceRef {
    /// Loads or generates the trace; `seed` applies where the reference leaves it open.
    pub fn load(&self, seed: u64) -> Result<FailureTrace, Error> {
        match self {
            TraceRef::Named { name, length, seed: s } => {
                let s = match (s, name.as_str(), length) {
                    (Some(s), ..) => *s,
                    (None, "grid5000", TraceLength::Short) => crate::profiles::GRID5000_REFERENCE_SEED,
                    (None, ..) => seed,
                };
                Ok(named_trace(name, *length, s)?)
            }
            TraceRef::Synthetic { fgs, runs, iat_s } => Ok(generate_synthetic(*fgs, *runs, *iat_s, seed)?),
            TraceRef::File(p) => Ok(FailureTrace::from_csv(&std::fs::read_to_string(p)?)?),
        }
    }

    pub fn label(&self) -> String {
        match self {
            TraceRef::Named { name, length, seed } => {
                let len = match length {
                    TraceLength::Short => "short",
                    TraceLength::Long => "long",
                };
                match seed {
                    Some(s) => format!("{name}-{len}-{s}"),
                    None => format!("{name}-{len}"),
                }
            }
            TraceRef::Synthetic { fgs, runs, iat_s } => format!("synthetic-{fgs}x{runs}@{iat_s}"),
            TraceRef::File(p) => p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "trace".into()),
        }
    }
}

impl FromStr for TraceRef {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || Error::Config(format!("bad trace reference {s:?}"));
        if let Some(rest) = s.strip_prefix("synthetic:") {
            let (fgs, rest) = rest.split_once('x').ok_or_else(bad)?;
            let (runs, iat) = rest.split_once('@').ok_or_else(bad)?;
            return Ok(TraceRef::Synthetic {
                fgs: fgs.parse().map_err(|_| bad())?,
                runs: runs.parse().map_err(|_| bad())?,
                iat_s: iat.parse().map_err(|_| bad())?,
            });
        }
        if s.ends_with(".csv") {
            return Ok(TraceRef::File(PathBuf::from(s)));
        }
        let mut parts = s.split(':');
        let name = parts.next().filter(|n| !n.is_empty()).ok_or_else(bad)?.to_ascii_lowercase();
        let mut length = TraceLength::Short;
        let mut seed = None;
        for p in parts {
            match p.parse::<TraceLength>() {
                Ok(l) => length = l,
                Err(_) => seed = Some(p.parse().map_err(|_| bad())?),
            }
        }
        Ok(TraceRef::Named { name, length, seed })
    }
}

/// Least-squares line through `(x, y)`: `(slope, intercept, r²)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, my - slope * mx, r2)
}

/// Slope of `ln y` over `ln x`.
pub fn loglog_exponent(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    linear_fit(&lx, &ly).0
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let sd = if xs.len() > 1 {
        (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (m, sd)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fits() {
        let (s, i, r2) = linear_fit(&[1.0, 2.0, 3.0], &[3.0, 5.0, 7.0]);
        assert!((s - 2.0).abs() < 1e-12 && (i - 1.0).abs() < 1e-12 && (r2 - 1.0).abs() < 1e-12);
        let e = loglog_exponent(&[1.0, 10.0, 100.0], &[2.0, 200.0, 20_000.0]);
        assert!((e - 2.0).abs() < 1e-12);
    }

    #[test]
    fn trace_refs() {
        assert_eq!(
            "synthetic:10x4@1728".parse::<TraceRef>().unwrap(),
            TraceRef::Synthetic { fgs: 10, runs: 4, iat_s: 1_728.0 }
        );
        assert_eq!(
            "grid5000:long:3".parse::<TraceRef>().unwrap(),
            TraceRef::Named { name: "grid5000".into(), length: TraceLength::Long, seed: Some(3) }
        );
        assert!(matches!("t.csv".parse::<TraceRef>().unwrap(), TraceRef::File(_)));
        assert!("synthetic:10".parse::<TraceRef>().is_err());
        let g = "grid5000".parse::<TraceRef>().unwrap().load(99).unwrap();
        assert_eq!(g.density(), crate::profiles::REFERENCE_DENSITY);
    }
}
