//! The sweep pipeline on coarse meshes: tables, failure rows, determinism.

use koiter::experiments::export::{export_table, parse_table, CSV_HEADER};
use koiter::experiments::{case_by_name, run_case, MeshResolution, RunOptions, ShellCase};
use koiter::Error;

fn coarse(name: &str, eps: &[f64]) -> ShellCase {
    let mut case = case_by_name(name).unwrap();
    case.mesh = MeshResolution {
        n1: 6,
        n2: 6,
        n1_3d: 3,
        n2_3d: 3,
        layers: 2,
    };
    case.eps_list = eps.to_vec();
    case
}

fn options() -> RunOptions {
    RunOptions {
        solver: Default::default(),
        skip_3d: false,
        keep_fields: false,
    }
}

#[test]
fn rows_follow_the_eps_list_and_fill_the_right_columns() {
    let run = run_case(&coarse("generalized", &[1e-3, 1e-2]), &options()).unwrap();
    let eps: Vec<f64> = run.rows.iter().map(|r| r.eps).collect();
    assert_eq!(eps, vec![1e-3, 1e-2]);
    for r in &run.rows {
        assert!(r.is_ok(), "{}", r.status);
        // no limit problem for the generalized membrane shell
        assert!(r.err_lk.is_none() && r.err_3dl.is_none());
        assert!(r.err_3dk.is_some_and(|e| e.is_finite() && e >= 0.0));
    }
    let run = run_case(&coarse("elliptic", &[5e-3]), &options()).unwrap();
    let r = &run.rows[0];
    assert!(r.err_lk.is_some() && r.err_3dk.is_some() && r.err_3dl.is_some());
    assert_eq!(r.norm_lk.as_deref(), r.norm_3d.as_deref());
}

#[test]
fn thickness_past_the_focal_surface_fails_its_row_only() {
    // the ellipsoid's smallest principal radius of curvature is below 0.02
    let run = run_case(&coarse("elliptic", &[8e-2, 5e-3]), &options()).unwrap();
    assert!(run.rows[0].status.starts_with("failed"), "{}", run.rows[0].status);
    assert!(run.rows[0].status.contains("curvature"), "{}", run.rows[0].status);
    assert!(run.rows[0].err_lk.is_some(), "the Koiter part still runs");
    assert!(run.rows[1].is_ok());
}

#[test]
fn table_round_trips_and_is_deterministic() {
    let case = coarse("flexural", &[1e-2, 1e-3]);
    let a = export_table(&run_case(&case, &options()).unwrap().rows).unwrap();
    let b = export_table(&run_case(&case, &options()).unwrap().rows).unwrap();
    assert_eq!(a.as_bytes(), b.as_bytes());
    assert!(a.starts_with(&CSV_HEADER.join(",")));
    let rows = parse_table(&a).unwrap();
    assert_eq!(export_table(&rows).unwrap(), a);
}

#[test]
fn invalid_configurations_are_rejected_before_solving() {
    let mut case = coarse("flexural", &[1e-2]);
    case.penalty = Some(0.0);
    assert!(matches!(run_case(&case, &options()), Err(Error::InvalidPenalty(_))));

    let mut case = coarse("elliptic", &[1e-2]);
    case.mesh.layers = 3;
    assert!(matches!(run_case(&case, &options()), Err(Error::OddLayerCount(3))));

    let mut case = coarse("elliptic", &[1e-2]);
    case.mesh.n1 = 0;
    assert!(matches!(
        run_case(&case, &options()),
        Err(Error::InvalidResolution { .. })
    ));

    let case = coarse("elliptic", &[0.0]);
    assert!(run_case(&case, &options()).is_err());

    // Lame constants that disagree with E and nu
    let mut case = coarse("generalized", &[1e-2]);
    case.lame.mu *= 2.0;
    assert!(matches!(run_case(&case, &options()), Err(Error::Config(_))));

    let mut case = coarse("generalized", &[1e-2]);
    (case.lame.mu, case.young, case.poisson) = (-1.0, None, None);
    assert!(matches!(run_case(&case, &options()), Err(Error::InvalidLame { .. })));
}
