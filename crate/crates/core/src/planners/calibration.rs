//! Planning-time model fitted to reference measurements.
//!
//! Reference planning times (milliseconds) were measured for four architecture
//! sizes and four failure-group sizes. Lookups interpolate linearly in log-log
//! space over the group size within a size row, then over the architecture
//! size between rows, extrapolating from the nearest two points at the edges.

use super::PlannerId;

/// Architecture sizes of the reference rows.
pub const COMPONENT_ROWS: [f64; 4] = [18.0, 180.0, 1_800.0, 18_000.0];

/// Failure-group sizes of the reference columns.
pub const FGS_COLUMNS: [f64; 4] = [1.0, 10.0, 100.0, 1_000.0];

/// `[static, u-driven, solver]` planning time in ms per row and column.
pub const PLANNING_MS: [[Option<[f64; 3]>; 4]; 4] = [
    [Some([0.76, 0.89, 5.02]), Some([10.37, 14.36, 55.68]), None, None],
    [
        Some([0.68, 0.89, 5.01]),
        Some([9.71, 13.58, 59.07]),
        Some([14.22, 17.70, 219.54]),
        None,
    ],
    [
        Some([0.61, 0.74, 4.83]),
        Some([10.60, 13.47, 58.24]),
        Some([13.82, 26.65, 211.09]),
        Some([54.50, 60.09, 3_216.60]),
    ],
    [
        Some([0.65, 0.71, 4.90]),
        Some([10.14, 13.87, 71.93]),
        Some([21.80, 26.38, 271.51]),
        Some([127.80, 171.31, 3_611.95]),
    ],
];

fn column(planner: PlannerId) -> usize {
    match planner {
        PlannerId::Static => 0,
        PlannerId::UDriven => 1,
        PlannerId::Oracle => 2,
    }
}

/// Linear interpolation (or extrapolation) of `y` at `x` through the two
/// points of `pts` bracketing `x`.
fn interpolate(pts: &[(f64, f64)], x: f64) -> f64 {
    debug_assert!(!pts.is_empty());
    if pts.len() == 1 {
        return pts[0].1;
    }
    let i = pts
        .windows(2)
        .position(|w| x <= w[1].0)
        .unwrap_or(pts.len() - 2);
    let ((x0, y0), (x1, y1)) = (pts[i], pts[i + 1]);
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

/// Reference planning time for one row, in ln(ms), at ln(fgs).
fn row_log_ms(row: usize, planner: PlannerId, log_fgs: f64) -> f64 {
    let pts: Vec<(f64, f64)> = FGS_COLUMNS
        .iter()
        .zip(PLANNING_MS[row].iter())
        .filter_map(|(&fgs, cell)| cell.map(|c| (fgs.ln(), c[column(planner)].ln())))
        .collect();
    interpolate(&pts, log_fgs)
}

/// Calibrated planning time in seconds for `issues` issues on an architecture
/// with `components` live components. Zero issues cost nothing.
pub fn calibrated_planning_s(planner: PlannerId, components: usize, issues: usize) -> f64 {
    if issues == 0 {
        return 0.0;
    }
    let log_fgs = (issues as f64).ln();
    let rows: Vec<(f64, f64)> = COMPONENT_ROWS
        .iter()
        .enumerate()
        .map(|(r, &n)| (n.ln(), row_log_ms(r, planner, log_fgs)))
        .collect();
    let log_n = (components.max(1) as f64).ln();
    interpolate(&rows, log_n).exp() / 1_000.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_reference_cells() {
        for (r, &n) in COMPONENT_ROWS.iter().enumerate() {
            for (c, &fgs) in FGS_COLUMNS.iter().enumerate() {
                let Some(cell) = PLANNING_MS[r][c] else { continue };
                for p in PlannerId::ALL {
                    let got = calibrated_planning_s(p, n as usize, fgs as usize) * 1_000.0;
                    let want = cell[column(p)];
                    assert!((got - want).abs() < 1e-9 * want, "{p} {n} {fgs}: {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn solver_slowest_everywhere() {
        for n in [18, 500, 1_800, 18_000] {
            for fgs in [1, 3, 10, 40, 100, 400, 1_000] {
                let s = calibrated_planning_s(PlannerId::Oracle, n, fgs);
                assert!(s > calibrated_planning_s(PlannerId::UDriven, n, fgs));
                assert!(s > calibrated_planning_s(PlannerId::Static, n, fgs));
            }
        }
    }

    #[test]
    fn zero_issues_free() {
        assert_eq!(calibrated_planning_s(PlannerId::Oracle, 1_800, 0), 0.0);
    }

    #[test]
    fn reference_solver_delay() {
        let s = calibrated_planning_s(PlannerId::Oracle, 1_800, 1_000);
        assert!((s - 3.2166).abs() < 1e-9);
    }
}
