use std::path::Path;
use std::process::{Command, Output};

fn koiter(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_koiter"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn run_small(out: &Path) -> Output {
    koiter(&[
        "run",
        "--case",
        "elliptic",
        "--mesh",
        "4,4,2",
        "--eps",
        "0.01",
        "--out",
        out.to_str().unwrap(),
    ])
}

#[test]
fn geometry_check_passes_on_builtins() {
    let o = koiter(&["geometry-check", "--points", "10"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let reports: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(reports.as_array().unwrap().len(), 4);
}

#[test]
fn unknown_chart_is_a_config_error() {
    assert_eq!(code(&koiter(&["geometry-check", "--chart", "torus"])), 2);
}

#[test]
fn zero_penalty_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let o = koiter(&[
        "convergence",
        "--case",
        "flexural",
        "--penalty",
        "0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("penalty"));
}

#[test]
fn odd_layers_are_a_config_error() {
    let o = koiter(&["run", "--case", "elliptic", "--mesh", "4,4,3", "--eps", "0.01"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn unknown_config_key_names_the_line() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("c.toml");
    std::fs::write(&cfg, "case = \"elliptic\"\nthickness = 2\n").unwrap();
    let o = koiter(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("thickness") && err.contains("line 2"), "{err}");
}

#[test]
fn run_writes_table_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("nested/out");
    let o = run_small(&out);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("elliptic.csv")).unwrap();
    let rows = koiter::experiments::export::parse_table(&csv).unwrap();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].is_ok());
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["files"][0]["path"], "elliptic.csv");
    assert_eq!(manifest["files"][0]["bytes"], csv.len() as u64);
}

#[test]
fn repeated_runs_give_identical_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert_eq!(code(&run_small(&a)), 0);
    assert_eq!(code(&run_small(&b)), 0);
    assert_eq!(
        std::fs::read(a.join("elliptic.csv")).unwrap(),
        std::fs::read(b.join("elliptic.csv")).unwrap()
    );
}

#[test]
fn export_vtk_writes_fields() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("v");
    let o = koiter(&[
        "export-vtk",
        "--case",
        "generalized",
        "--mesh",
        "4,4,2",
        "--eps",
        "1e-3",
        "--surface-only",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let vtk = std::fs::read_to_string(out.join("generalized_eps1e-3_koiter.vtk")).unwrap();
    assert!(vtk.starts_with("# vtk DataFile Version 3.0"));
    assert!(vtk.contains("VECTORS displacement double"));
    assert!(!out.join("generalized.csv").exists());
}

#[test]
fn degenerate_chart_fails_the_check() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("c.toml");
    // the ellipsoid chart collapses at y1 = 0
    std::fs::write(
        &cfg,
        "[chart]\nkind = \"ellipsoid\"\nm = 0.1\nn = 0.1\nl = 0.1\nrect = { min = [0.0, 0.0], max = [1.0, 1.0] }\n",
    )
    .unwrap();
    let o = koiter(&["geometry-check", "--config", cfg.to_str().unwrap(), "--points", "5"]);
    assert_eq!(code(&o), 1);
    let reports: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(reports[0]["failure"].as_str().unwrap().contains("not an immersion"));
}

#[test]
fn default_eps_list_gives_eight_rows_and_failed_rows_exit_3() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let o = koiter(&[
        "run",
        "--case",
        "elliptic",
        "--mesh",
        "4,4,2",
        "--out",
        out.to_str().unwrap(),
    ]);
    // the three thickest shells reach past the ellipsoid's focal surface in 3D
    assert_eq!(code(&o), 3);
    let rows =
        koiter::experiments::export::parse_table(&std::fs::read_to_string(out.join("elliptic.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 8);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["errors"].as_array().unwrap().len(), 3);
}
