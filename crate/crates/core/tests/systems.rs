//! Symmetry, definiteness and solver residuals of the assembled systems on
//! coarse meshes of the built-in cases.

use koiter::experiments::{
    case_by_name, case_forms, koiter_space, limit_membrane_space, volume_space, MeshResolution, ShellCase, ShellKind,
};
use koiter::fem::assembly::{
    assemble_3d_scaled, assemble_limit_membrane, default_prism_rule, default_surface_rule, koiter_from_forms,
    limit_flexural_from_forms, penalty_scale,
};
use koiter::fem::sparse::SparseSystem;
use koiter::solver::{solve_system_unchecked, SolverSettings, DIRECT_TOL};

const SYMMETRY_TOL: f64 = 1e-9;

fn coarse(name: &str) -> ShellCase {
    let mut case = case_by_name(name).unwrap();
    case.mesh = MeshResolution {
        n1: 8,
        n2: 8,
        n1_3d: 4,
        n2_3d: 4,
        layers: 2,
    };
    case
}

/// Every system the sweep would assemble at `eps`, with a label.
fn systems(case: &ShellCase, eps: f64) -> Vec<(String, SparseSystem)> {
    let rule = default_surface_rule();
    let space = koiter_space(case).unwrap();
    let forms = case_forms(case, &space, &rule).unwrap();
    let mut out = vec![(
        "koiter".to_string(),
        koiter_from_forms(&forms, eps, case.scaling.koiter_load_factor(eps)).unwrap(),
    )];
    match case.kind {
        ShellKind::EllipticMembrane => {
            let ls = limit_membrane_space(case).unwrap();
            out.push((
                "limit".into(),
                assemble_limit_membrane(&case.chart, case.lame, case.limit_load(), &ls, &rule).unwrap(),
            ));
        }
        ShellKind::Flexural => {
            let p = case.penalty() * penalty_scale(&forms).unwrap();
            out.push(("limit".into(), limit_flexural_from_forms(&forms, p).unwrap()));
        }
        ShellKind::GeneralizedMembrane => {}
    }
    let vs = volume_space(case).unwrap();
    let body = case.scaling.body_force(case.body_force, eps);
    let traction = case.scaling.surface_force(case.surface_force, eps).map(|h| h / eps);
    let v = assemble_3d_scaled(&case.chart, case.lame, eps, body, traction, &vs, &default_prism_rule()).unwrap();
    out.push(("3d".into(), v.system));
    out
}

#[test]
fn assembled_matrices_are_symmetric_and_definite() {
    for (name, eps) in [("elliptic", 5e-3), ("generalized", 1e-4), ("flexural", 1e-2)] {
        let case = coarse(name);
        for (what, s) in systems(&case, eps) {
            let asym = s.matrix.asymmetry();
            assert!(asym <= SYMMETRY_TOL, "{name} {what}: asymmetry {asym:e}");
            // Cholesky fails with NotPositiveDefinite otherwise
            let (x, _) =
                solve_system_unchecked(&s, &SolverSettings::default()).unwrap_or_else(|e| panic!("{name} {what}: {e}"));
            let energy: f64 = x.iter().zip(&s.rhs).map(|(x, b)| x * b).sum();
            assert!(energy > 0.0, "{name} {what}");
        }
    }
}

#[test]
fn membrane_case_residuals_meet_the_contract() {
    for (name, eps) in [("elliptic", 5e-3), ("elliptic", 6.25e-4), ("generalized", 1e-6)] {
        let case = coarse(name);
        for (what, s) in systems(&case, eps) {
            let (_, report) = solve_system_unchecked(&s, &SolverSettings::default()).unwrap();
            assert!(
                report.residual <= DIRECT_TOL,
                "{name} {what} eps {eps}: {:e}",
                report.residual
            );
        }
    }
}

#[test]
fn unit_load_residual_on_plate() {
    // a clamped flat plate has no membrane-bending coupling, so the Koiter system is well conditioned
    let mut case = coarse("elliptic");
    case.chart = koiter::geometry::BuiltinChart::plane();
    case.kind = ShellKind::Flexural;
    let rule = default_surface_rule();
    let space = koiter_space(&case).unwrap();
    let forms = case_forms(&case, &space, &rule).unwrap();
    let s = koiter_from_forms(&forms, 0.1, 1.0).unwrap();
    let (_, report) = solve_system_unchecked(&s, &SolverSettings::default()).unwrap();
    assert!(report.residual <= DIRECT_TOL, "{:e}", report.residual);
}
