//! Trend checks on the result tables of the built-in cases.

use serde::Serialize;

use super::{column, consecutive_ratios, penalty_energies, strictly_decreasing, CaseRun, ResultRow, ShellKind};
use crate::error::Result;
use crate::solver::SolverSettings;

/// Smallest factor of decrease of ErrLK over the elliptic sweep.
pub const ELLIPTIC_MIN_DROP: f64 = 10.0;
/// Band for consecutive decade ratios of Err3DK in the generalized case.
pub const GENERALIZED_RATIO_BAND: (f64, f64) = (2.0, 10.0);
/// Smallest decade ratio of ErrLK in the flexural case.
pub const FLEXURAL_MIN_RATIO: f64 = 20.0;
/// Largest relative energy change between relative penalties 1e6 and 1e8.
pub const SATURATION_TOL: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendLine {
    pub what: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendCheck {
    pub case: String,
    pub lines: Vec<TrendLine>,
}

impl TrendCheck {
    pub fn passed(&self) -> bool {
        !self.lines.is_empty() && self.lines.iter().all(|l| l.passed)
    }
}

fn fmt(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(", ")
}

fn decreasing(
    rows: &[ResultRow],
    name: &str,
    get: impl Fn(&ResultRow) -> Option<f64>,
) -> (TrendLine, Option<Vec<f64>>) {
    match column(rows, get) {
        Some(v) => (
            TrendLine {
                what: format!("{name} strictly decreasing"),
                passed: strictly_decreasing(&v),
                detail: fmt(&v),
            },
            Some(v),
        ),
        None => {
            let missing: Vec<String> = rows
                .iter()
                .filter(|r| !r.is_ok())
                .map(|r| format!("eps {:e}: {}", r.eps, r.status))
                .collect();
            (
                TrendLine {
                    what: format!("{name} strictly decreasing"),
                    passed: false,
                    detail: format!("missing values; {}", missing.join("; ")),
                },
                None,
            )
        }
    }
}

/// Relative energy change of the penalized flexural limit between
/// relative penalties `1e6` and `1e8`.
pub fn penalty_saturation(run: &CaseRun, settings: &SolverSettings) -> Result<(f64, f64, f64)> {
    let space = super::koiter_space(&run.case)?;
    let forms = super::case_forms(&run.case, &space, &crate::fem::assembly::default_surface_rule())?;
    let e = penalty_energies(&forms, &[1e6, 1e8], settings)?;
    let (a, b) = (e[0].1, e[1].1);
    Ok((a, b, (a - b).abs() / b.abs()))
}

/// Monotone-decrease and rate checks of one case.
pub fn check_trends(run: &CaseRun, settings: &SolverSettings) -> TrendCheck {
    let rows = &run.rows;
    let mut lines = Vec::new();
    match run.case.kind {
        ShellKind::EllipticMembrane => {
            let (l, lk) = decreasing(rows, "ErrLK", |r| r.err_lk);
            lines.push(l);
            lines.push(decreasing(rows, "Err3DK", |r| r.err_3dk).0);
            lines.push(decreasing(rows, "Err3DL", |r| r.err_3dl).0);
            let drop = lk.as_ref().map(|v| v[0] / v[v.len() - 1]);
            lines.push(TrendLine {
                what: format!("ErrLK drops by at least {ELLIPTIC_MIN_DROP}x"),
                passed: drop.is_some_and(|d| d >= ELLIPTIC_MIN_DROP),
                detail: drop.map_or("missing values".into(), |d| format!("{d:.3}x")),
            });
        }
        ShellKind::GeneralizedMembrane => {
            let (l, k) = decreasing(rows, "Err3DK", |r| r.err_3dk);
            lines.push(l);
            let ratios = k.as_ref().map(|v| consecutive_ratios(v));
            let (lo, hi) = GENERALIZED_RATIO_BAND;
            lines.push(TrendLine {
                what: format!("Err3DK decade ratios in [{lo}, {hi}]"),
                passed: ratios.as_ref().is_some_and(|r| r.iter().all(|x| (lo..=hi).contains(x))),
                detail: ratios.map_or("missing values".into(), |r| fmt(&r)),
            });
        }
        ShellKind::Flexural => {
            let (l, lk) = decreasing(rows, "ErrLK", |r| r.err_lk);
            lines.push(l);
            lines.push(decreasing(rows, "Err3DK", |r| r.err_3dk).0);
            let ratios = lk.as_ref().map(|v| consecutive_ratios(v));
            lines.push(TrendLine {
                what: format!("ErrLK decade ratios at least {FLEXURAL_MIN_RATIO}"),
                passed: ratios
                    .as_ref()
                    .is_some_and(|r| r.iter().all(|x| *x >= FLEXURAL_MIN_RATIO)),
                detail: ratios.map_or("missing values".into(), |r| fmt(&r)),
            });
            lines.push(match penalty_saturation(run, settings) {
                Ok((a, b, rel)) => TrendLine {
                    what: format!("penalty saturation below {SATURATION_TOL}"),
                    passed: rel < SATURATION_TOL,
                    detail: format!("energy {a:.6e} at 1e6, {b:.6e} at 1e8, relative change {rel:.3e}"),
                },
                Err(e) => TrendLine {
                    what: format!("penalty saturation below {SATURATION_TOL}"),
                    passed: false,
                    detail: e.to_string(),
                },
            });
        }
    }
    TrendCheck {
        case: run.case.name.clone(),
        lines,
    }
}
