//! Runs one built-in case and prints its result table.
//!
//! `cargo run --release --example sweep -- elliptic [--surface-only]
//! [--mesh n1,n2,n1_3d,n2_3d,layers] [--penalty p] [--eps a,b] [--saturation]`

use std::time::Instant;

use koiter::experiments::{case_by_name, run_case, RunOptions};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let name = args.first().map(String::as_str).unwrap_or("elliptic");
    let mut case = case_by_name(name).expect("unknown case");
    let options = RunOptions {
        skip_3d: args.iter().any(|a| a == "--surface-only"),
        ..Default::default()
    };
    if let Some(m) = args.iter().position(|a| a == "--mesh") {
        let v: Vec<usize> = args[m + 1].split(',').map(|s| s.parse().unwrap()).collect();
        case.mesh.n1 = v[0];
        case.mesh.n2 = v[1];
        case.mesh.n1_3d = v[2];
        case.mesh.n2_3d = v[3];
        case.mesh.layers = v[4];
    }
    if let Some(m) = args.iter().position(|a| a == "--penalty") {
        case.penalty = Some(args[m + 1].parse().unwrap());
    }
    if let Some(m) = args.iter().position(|a| a == "--eps") {
        case.eps_list = args[m + 1].split(',').map(|s| s.parse().unwrap()).collect();
    }
    if args.iter().any(|a| a == "--saturation") {
        let space = koiter::experiments::koiter_space(&case).unwrap();
        let forms = koiter::experiments::case_forms(&case, &space, &koiter::fem::default_surface_rule()).unwrap();
        let pens = [1e2, 1e4, 1e6, 1e8, 1e10, 1e12];
        for (p, e) in koiter::experiments::penalty_energies(&forms, &pens, &options.solver).unwrap() {
            println!("penalty {p:.0e} energy {e:.6e}");
        }
        return;
    }
    let start = Instant::now();
    let run = run_case(&case, &options).expect("case setup failed");
    if let Some(l) = &run.limit {
        println!(
            "limit dofs {} residual {:.2e} penalty {:?}",
            l.field.space.ndof, l.report.residual, l.penalty
        );
    }
    println!(
        "{:>12} {:>12} {:>12} {:>12} {:>10} {:>9} {:>9} {:>9} {:>7}  status",
        "eps", "ErrLK", "Err3DK", "Err3DL", "memfrac", "resK", "res3D", "resL", "time"
    );
    let f = |v: Option<f64>| v.map_or("n/a".to_string(), |v| format!("{v:.4e}"));
    let g = |v: Option<f64>| v.map_or("n/a".to_string(), |v| format!("{v:.1e}"));
    for r in &run.rows {
        println!(
            "{:>12.5e} {:>12} {:>12} {:>12} {:>10} {:>9} {:>9} {:>9} {:>7.1}  {}",
            r.eps,
            f(r.err_lk),
            f(r.err_3dk),
            f(r.err_3dl),
            f(r.membrane_fraction),
            g(r.residual_koiter),
            g(r.residual_3d),
            g(r.residual_limit),
            r.wall_seconds,
            r.status
        );
    }
    println!("total {:.1} s", start.elapsed().as_secs_f64());
}
