use std::fmt::Write as _;
use std::fmt;
use std::str::FromStr;

use super::ProfileError;
use crate::model::{ElementRef, FailureKind};

/// How an entry picks its target when injected into a live model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetSelector {
    /// Resolved uniformly over eligible elements at injection time.
    Random(u64),
    Fixed(ElementRef),
}

impl fmt::Display for TargetSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetSelector::Random(r) => write!(f, "r:{r}"),
            TargetSelector::Fixed(e) => write!(f, "{e}"),
        }
    }
}

impl FromStr for TargetSelector {
    type Err = ProfileError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ProfileError::MalformedTrace(format!("bad target selector {s:?}"));
        match s.strip_prefix("r:") {
            Some(r) => r.parse().map(TargetSelector::Random).map_err(|_| bad()),
            None => s.parse().map(TargetSelector::Fixed).map_err(|_| bad()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub time_s: f64,
    pub kind: FailureKind,
    pub target: TargetSelector,
}

/// Time-sorted failure entries sampled from a failure-profile model.
#[derive(Debug, Clone, PartialEq)]
pub struct FailureTrace {
    pub model: String,
    pub fgs: String,
    pub iat: String,
    pub fet_s: f64,
    pub duration_s: f64,
    pub seed: u64,
    /// `(start time, size)` of every burst.
    pub groups: Vec<(f64, usize)>,
    pub entries: Vec<TraceEntry>,
}

impl FailureTrace {
    /// Total number of failures.
    pub fn density(&self) -> usize {
        self.entries.len()
    }

    pub fn group_sizes(&self) -> Vec<usize> {
        self.groups.iter().map(|g| g.1).collect()
    }

    /// Gaps between consecutive burst starts.
    pub fn inter_arrival_times(&self) -> Vec<f64> {
        self.groups.windows(2).map(|w| w[1].0 - w[0].0).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# model={}", self.model);
        let _ = writeln!(out, "# fgs={}", self.fgs);
        let _ = writeln!(out, "# iat={}", self.iat);
        let _ = writeln!(out, "# fet_s={}", self.fet_s);
        let _ = writeln!(out, "# bursts={}", self.groups.len());
        let _ = writeln!(out, "# duration_s={}", self.duration_s);
        let _ = writeln!(out, "# seed={}", self.seed);
        let _ = writeln!(out, "# density={}", self.density());
        let groups: Vec<String> = self.groups.iter().map(|(t, n)| format!("{t:.6}:{n}")).collect();
        let _ = writeln!(out, "# groups={}", groups.join(";"));
        out.push_str("time_s,cf_kind,target_selector\n");
        for e in &self.entries {
            let _ = writeln!(out, "{:.6},{},{}", e.time_s, e.kind, e.target);
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, ProfileError> {
        let bad = |m: String| ProfileError::MalformedTrace(m);
        let mut trace = FailureTrace {
            model: String::new(),
            fgs: String::new(),
            iat: String::new(),
            fet_s: 0.0,
            duration_s: 0.0,
            seed: 0,
            groups: Vec::new(),
            entries: Vec::new(),
        };
        let mut density = None;
        let mut header_seen = false;
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            if let Some(meta) = line.strip_prefix('#') {
                let (k, v) = meta
                    .trim()
                    .split_once('=')
                    .ok_or_else(|| bad(format!("bad header line {line:?}")))?;
                let num = |v: &str| v.parse::<f64>().map_err(|_| bad(format!("bad {k} {v:?}")));
                match k {
                    "model" => trace.model = v.to_string(),
                    "fgs" => trace.fgs = v.to_string(),
                    "iat" => trace.iat = v.to_string(),
                    "fet_s" => trace.fet_s = num(v)?,
                    "duration_s" => trace.duration_s = num(v)?,
                    "seed" => trace.seed = v.parse().map_err(|_| bad(format!("bad seed {v:?}")))?,
                    "density" => density = Some(num(v)? as usize),
                    "groups" if !v.is_empty() => {
                        for g in v.split(';') {
                            let (t, n) = g.split_once(':').ok_or_else(|| bad(format!("bad group {g:?}")))?;
                            let n = n.parse().map_err(|_| bad(format!("bad group {g:?}")))?;
                            trace.groups.push((num(t)?, n));
                        }
                    }
                    _ => {}
                }
                continue;
            }
            if !header_seen {
                if line != "time_s,cf_kind,target_selector" {
                    return Err(bad(format!("unexpected column header {line:?}")));
                }
                header_seen = true;
                continue;
            }
            let mut cols = line.split(',');
            let (Some(t), Some(k), Some(s), None) = (cols.next(), cols.next(), cols.next(), cols.next()) else {
                return Err(bad(format!("bad row {line:?}")));
            };
            trace.entries.push(TraceEntry {
                time_s: t.parse().map_err(|_| bad(format!("bad time {t:?}")))?,
                kind: k.parse().map_err(|_| bad(format!("bad kind {k:?}")))?,
                target: s.parse()?,
            });
        }
        if density.is_some_and(|d| d != trace.entries.len()) {
            return Err(bad("density does not match the entry count".into()));
        }
        if trace.entries.windows(2).any(|w| w[1].time_s < w[0].time_s) {
            return Err(bad("entries are not time-sorted".into()));
        }
        Ok(trace)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ComponentId;

    fn sample() -> FailureTrace {
        FailureTrace {
            model: "test".into(),
            fgs: "2".into(),
            iat: "10".into(),
            fet_s: 0.0,
            duration_s: 20.0,
            seed: 3,
            groups: vec![(0.0, 2), (10.0, 1)],
            entries: vec![
                TraceEntry {
                    time_s: 0.0,
                    kind: FailureKind::Cf1,
                    target: TargetSelector::Random(99),
                },
                TraceEntry {
                    time_s: 0.0,
                    kind: FailureKind::Cf3,
                    target: TargetSelector::Fixed(ElementRef::Component(ComponentId(4))),
                },
                TraceEntry {
                    time_s: 10.5,
                    kind: FailureKind::Cf2,
                    target: TargetSelector::Random(7),
                },
            ],
        }
    }

    #[test]
    fn csv_round_trip() {
        let t = sample();
        let csv = t.to_csv();
        assert!(csv.contains("# density=3\n"));
        assert!(csv.contains("10.500000,CF2,r:7\n"));
        let back = FailureTrace::from_csv(&csv).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.to_csv(), csv);
    }

    #[test]
    fn rejects_inconsistent_density() {
        let csv = sample().to_csv().replace("# density=3", "# density=4");
        assert!(FailureTrace::from_csv(&csv).is_err());
    }

    #[test]
    fn rejects_unsorted() {
        let mut t = sample();
        t.entries.swap(0, 2);
        assert!(FailureTrace::from_csv(&t.to_csv()).is_err());
    }
}
