use std::fmt::Write as _;

/// Piecewise-constant utility over virtual time.
///
/// Each breakpoint `(t, u)` holds utility `u` from `t` until the next
/// breakpoint; the last value extends forever.
#[derive(Debug, Clone, PartialEq)]
pub struct Timeline {
    points: Vec<(f64, f64)>,
}

impl Timeline {
    pub fn new(t0: f64, utility: f64) -> Self {
        Timeline {
            points: vec![(t0, utility)],
        }
    }

    /// Appends a breakpoint. A breakpoint at the time of the previous one
    /// replaces its value.
    ///
    /// # Panics
    /// When `t` lies before the last breakpoint.
    pub fn push(&mut self, t: f64, utility: f64) {
        let last = self.points.last_mut().expect("timeline is never empty");
        assert!(t >= last.0, "breakpoint at {t} precedes {}", last.0);
        if t == last.0 {
            last.1 = utility;
            let n = self.points.len();
            if n > 1 && self.points[n - 2].1 == utility {
                self.points.pop();
            }
        } else if utility != last.1 {
            self.points.push((t, utility));
        }
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn start(&self) -> f64 {
        self.points[0].0
    }

    pub fn last_time(&self) -> f64 {
        self.points.last().expect("non-empty").0
    }

    pub fn final_utility(&self) -> f64 {
        self.points.last().expect("non-empty").1
    }

    /// Utility in effect at `t`; before the first breakpoint, its value.
    pub fn utility_at(&self, t: f64) -> f64 {
        let i = self.points.partition_point(|p| p.0 <= t);
        self.points[i.saturating_sub(1)].1
    }

    /// Exact integral of utility over `[t0, t1]`.
    pub fn reward(&self, t0: f64, t1: f64) -> f64 {
        if t1 <= t0 {
            return 0.0;
        }
        let mut total = 0.0;
        let mut t = t0;
        let mut u = self.utility_at(t0);
        let first = self.points.partition_point(|p| p.0 <= t0);
        for &(bt, bu) in &self.points[first..] {
            if bt >= t1 {
                break;
            }
            total += u * (bt - t);
            t = bt;
            u = bu;
        }
        total + u * (t1 - t)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("time_s,utility\n");
        for (t, u) in &self.points {
            let _ = writeln!(out, "{t},{u}");
        }
        out
    }
}
