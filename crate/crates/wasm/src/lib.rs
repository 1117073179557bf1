//! Browser bindings: a geometry check, a single Koiter solve returning the
//! deformed mesh, and a coarse thickness sweep as CSV.
//!
//! Everything runs single-threaded. Meshes are capped so a call stays
//! interactive.

use koiter::checks::geometry_check;
use koiter::experiments::export::{export_table, vertex_displacements};
use koiter::experiments::{case_by_name, run_case, RunOptions, ShellCase};
use koiter::geometry::{BuiltinChart, Chart};
use koiter::solver::SolverSettings;
use serde_json::json;
use wasm_bindgen::prelude::*;

pub const MAX_SURFACE_CELLS: usize = 24;
pub const MAX_SAMPLE_POINTS: usize = 2000;

fn err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

fn small_case(name: &str, n: usize) -> Result<ShellCase, String> {
    let mut case = case_by_name(name).ok_or_else(|| format!("unknown case {name:?}"))?;
    if n == 0 || n > MAX_SURFACE_CELLS {
        return Err(format!("mesh size must be in 1..={MAX_SURFACE_CELLS}, got {n}"));
    }
    case.mesh.n1 = n;
    case.mesh.n2 = n;
    Ok(case)
}

fn surface_options(keep_fields: bool) -> RunOptions {
    RunOptions {
        solver: SolverSettings::default(),
        skip_3d: true,
        keep_fields,
    }
}

/// JSON report of the chart identities at `points` random points.
pub fn geometry_report(chart: &str, points: usize, seed: u64) -> Result<String, String> {
    let c = BuiltinChart::by_name(chart).ok_or_else(|| format!("unknown chart {chart:?}"))?;
    let report = geometry_check(&c, points.min(MAX_SAMPLE_POINTS), seed);
    serde_json::to_string(&report).map_err(|e| e.to_string())
}

/// Koiter solution of a built-in case at one thickness as JSON with
/// `points` (undeformed, flattened xyz), `displacement` (flattened xyz),
/// `triangles` (flattened vertex indices) and the table row.
pub fn koiter_mesh(case: &str, eps: f64, n: usize) -> Result<String, String> {
    let mut case = small_case(case, n)?;
    case.eps_list = vec![eps];
    let run = run_case(&case, &surface_options(true)).map_err(|e| e.to_string())?;
    let row = &run.rows[0];
    let field = run.fields[0]
        .koiter
        .as_ref()
        .ok_or_else(|| format!("solve failed: {}", row.status))?;
    let mesh = field.space.mesh();
    let u = vertex_displacements(field, &case.chart).map_err(|e| e.to_string())?;
    let points: Vec<f64> = mesh
        .vertices
        .iter()
        .flat_map(|&y| {
            let p = case.chart.point(y);
            [p.x, p.y, p.z]
        })
        .collect();
    let displacement: Vec<f64> = u.iter().flat_map(|v| [v.x, v.y, v.z]).collect();
    let triangles: Vec<usize> = mesh.triangles.iter().flatten().copied().collect();
    serde_json::to_string(&json!({
        "points": points,
        "displacement": displacement,
        "triangles": triangles,
        "row": row,
    }))
    .map_err(|e| e.to_string())
}

/// Surface-only sweep of a built-in case as CSV.
pub fn sweep_table(case: &str, eps: &[f64], n: usize) -> Result<String, String> {
    let mut case = small_case(case, n)?;
    if !eps.is_empty() {
        case.eps_list = eps.to_vec();
    }
    let run = run_case(&case, &surface_options(false)).map_err(|e| e.to_string())?;
    export_table(&run.rows).map_err(|e| e.to_string())
}

#[wasm_bindgen(js_name = geometryCheck)]
pub fn geometry_check_js(chart: &str, points: u32, seed: u32) -> Result<String, JsError> {
    geometry_report(chart, points as usize, seed as u64).map_err(err)
}

#[wasm_bindgen(js_name = solveKoiter)]
pub fn solve_koiter_js(case: &str, eps: f64, n: u32) -> Result<String, JsError> {
    koiter_mesh(case, eps, n as usize).map_err(err)
}

#[wasm_bindgen(js_name = sweepCsv)]
pub fn sweep_csv_js(case: &str, eps: Vec<f64>, n: u32) -> Result<String, JsError> {
    sweep_table(case, &eps, n as usize).map_err(err)
}
