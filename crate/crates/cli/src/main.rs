//! `koiter` command-line driver.
//!
//! Exit codes: 0 success, 1 a check or trend failed, 2 configuration
//! error, 3 numerical failure.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use koiter::checks::{geometry_check, GeometryReport};
use koiter::experiments::export::{export_field_vtk, export_table};
use koiter::experiments::{check_trends, run_case, CaseRun, ResultRow, RunOptions, ShellCase};
use koiter::fem::field::AveragedField;
use koiter::geometry::BuiltinChart;

use config::{parse_eps, parse_mesh, ConfigError, RunConfig};
use output::{CaseTiming, Manifest, OutDir, RowTiming};

#[derive(Parser)]
#[command(
    name = "koiter",
    version,
    about = "Koiter, 3D and limit shell models over a thickness sweep"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check chart derivatives, curvature identities and rigid-motion strains.
    GeometryCheck {
        #[command(flatten)]
        common: Common,
        /// built-in chart: plane, ellipsoid, cylinder or cone
        #[arg(long)]
        chart: Option<String>,
        /// random sample points in addition to an 11 x 11 grid
        #[arg(long, default_value_t = 100)]
        points: usize,
    },
    /// Run the thickness sweep of one case and write its table and fields.
    Run(Common),
    /// Run the built-in cases and check their error trends.
    Convergence(Common),
    /// Solve one case and write only the VTK fields.
    ExportVtk(Common),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Vtk,
    Both,
}

#[derive(Args, Clone)]
struct Common {
    /// TOML run configuration; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// built-in case: elliptic, generalized or flexural
    #[arg(long)]
    case: Option<String>,
    /// comma-separated half-thicknesses
    #[arg(long)]
    eps: Option<String>,
    /// n1,n2,layers or n1,n2,n1_3d,n2_3d,layers
    #[arg(long)]
    mesh: Option<String>,
    /// relative penalty of the flexural limit
    #[arg(long)]
    penalty: Option<f64>,
    /// output directory, created if missing [default: koiter-out]
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// seed of the random sample points
    #[arg(long)]
    seed: Option<u64>,
    /// skip the 3D model
    #[arg(long)]
    surface_only: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Status {
    Ok = 0,
    CheckFailed = 1,
    Config = 2,
    Numerical = 3,
}

impl Status {
    /// Configuration errors outrank numerical failures, which outrank
    /// failed checks.
    fn worst(self, other: Status) -> Status {
        let rank = |s: Status| match s {
            Status::Ok => 0,
            Status::CheckFailed => 1,
            Status::Numerical => 2,
            Status::Config => 3,
        };
        if rank(other) > rank(self) {
            other
        } else {
            self
        }
    }
}

fn classify(e: &koiter::Error) -> Status {
    use koiter::Error::*;
    match e {
        Config(_)
        | InvalidLame { .. }
        | InvalidResolution { .. }
        | OddLayerCount(_)
        | InvalidPenalty(_)
        | ZeroThickness(_) => Status::Config,
        _ => Status::Numerical,
    }
}

fn load_config(c: &Common) -> Result<RunConfig, ConfigError> {
    let mut cfg = match &c.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(v) = &c.case {
        cfg.case = Some(v.clone());
        cfg.case_override = None;
    }
    if let Some(v) = &c.eps {
        cfg.eps = Some(parse_eps(v)?);
    }
    if let Some(v) = &c.mesh {
        cfg.mesh = parse_mesh(v)?;
    }
    if c.penalty.is_some() {
        cfg.penalty = c.penalty;
    }
    if c.out.is_some() {
        cfg.out = c.out.clone();
    }
    match c.format {
        Some(Format::Csv) => (cfg.export.csv, cfg.export.vtk) = (true, false),
        Some(Format::Vtk) => (cfg.export.csv, cfg.export.vtk) = (false, true),
        Some(Format::Both) => (cfg.export.csv, cfg.export.vtk) = (true, true),
        None => {}
    }
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    cfg.surface_only |= c.surface_only;
    Ok(cfg)
}

fn out_dir(cfg: &RunConfig) -> Result<OutDir, ConfigError> {
    let root = cfg.out.clone().unwrap_or_else(|| PathBuf::from("koiter-out"));
    OutDir::prepare(&root).map_err(|e| ConfigError::Invalid(format!("output directory {}: {e}", root.display())))
}

fn config_json(cfg: &RunConfig) -> serde_json::Value {
    serde_json::to_value(cfg).unwrap_or(serde_json::Value::Null)
}

fn print_rows(rows: &[ResultRow]) {
    let f = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |v| format!("{v:.5e}"));
    println!(
        "{:>12} {:>12} {:>12} {:>12}  status",
        "eps", "ErrLK", "Err3DK", "Err3DL"
    );
    for r in rows {
        println!(
            "{:>12.5e} {:>12} {:>12} {:>12}  {}",
            r.eps,
            f(r.err_lk),
            f(r.err_3dk),
            f(r.err_3dl),
            r.status
        );
    }
}

fn write_vtk(out: &mut OutDir, run: &CaseRun, errors: &mut Vec<String>) {
    let case = &run.case;
    let mut put = |name: String, text: koiter::Result<String>, errors: &mut Vec<String>| match text {
        Ok(t) => {
            if let Err(e) = out.write(&name, t.as_bytes()) {
                errors.push(format!("{name}: {e}"));
            }
        }
        Err(e) => errors.push(format!("{name}: {e}")),
    };
    for f in &run.fields {
        let stem = format!("{}_eps{:e}", case.name, f.eps);
        if let Some(k) = &f.koiter {
            put(
                format!("{stem}_koiter.vtk"),
                export_field_vtk(k, &case.chart, &format!("{stem} koiter")),
                errors,
            );
        }
        if let Some(u) = &f.volume {
            let text = AveragedField::new(u, &case.chart, f.eps)
                .and_then(|avg| export_field_vtk(&avg, &case.chart, &format!("{stem} 3d average")));
            put(format!("{stem}_3d.vtk"), text, errors);
        }
        if let Some(l) = &run.limit {
            put(
                format!("{stem}_limit.vtk"),
                export_field_vtk(&l.field, &case.chart, &format!("{stem} limit")),
                errors,
            );
        }
    }
}

struct CaseOutcome {
    run: Option<CaseRun>,
    timing: CaseTiming,
    status: Status,
}

fn run_one(case: &ShellCase, cfg: &RunConfig, out: &mut OutDir, errors: &mut Vec<String>) -> CaseOutcome {
    let start = Instant::now();
    let options = RunOptions {
        solver: cfg.solver_settings(),
        skip_3d: cfg.surface_only,
        keep_fields: cfg.export.vtk,
    };
    let mut status = Status::Ok;
    let run = match run_case(case, &options) {
        Ok(run) => Some(run),
        Err(e) => {
            eprintln!("{}: {e}", case.name);
            errors.push(format!("{}: {e}", case.name));
            status = classify(&e);
            None
        }
    };
    let mut rows = Vec::new();
    if let Some(run) = &run {
        print_rows(&run.rows);
        for r in &run.rows {
            if !r.is_ok() {
                errors.push(format!("{} eps {:e}: {}", case.name, r.eps, r.status));
                status = status.worst(Status::Numerical);
            }
            rows.push(RowTiming {
                eps: r.eps,
                wall_seconds: r.wall_seconds,
                status: r.status.clone(),
            });
        }
        if cfg.export.csv {
            match export_table(&run.rows) {
                Ok(t) => {
                    if let Err(e) = out.write(&format!("{}.csv", case.name), t.as_bytes()) {
                        errors.push(e.to_string());
                        status = status.worst(Status::Numerical);
                    }
                }
                Err(e) => errors.push(e.to_string()),
            }
        }
        if cfg.export.vtk {
            write_vtk(out, run, errors);
        }
    }
    let timing = CaseTiming {
        case: case.name.clone(),
        wall_seconds: start.elapsed().as_secs_f64(),
        rows,
    };
    CaseOutcome { run, timing, status }
}

fn finish(
    out: OutDir,
    command: &str,
    cfg: &RunConfig,
    cases: Vec<CaseTiming>,
    errors: Vec<String>,
    start: Instant,
) -> Status {
    let manifest = Manifest {
        command: command.into(),
        version: env!("CARGO_PKG_VERSION"),
        seed: cfg.seed,
        config: config_json(cfg),
        files: Vec::new(),
        cases,
        errors,
        wall_seconds: start.elapsed().as_secs_f64(),
    };
    match out.finish(manifest) {
        Ok(p) => {
            eprintln!("manifest: {}", p.display());
            Status::Ok
        }
        Err(e) => {
            eprintln!("cannot write manifest: {e}");
            Status::Numerical
        }
    }
}

fn cmd_sweep(
    common: &Common,
    command: &str,
    default: &[&str],
    trends: bool,
    force_vtk: bool,
) -> Result<Status, ConfigError> {
    let start = Instant::now();
    let mut cfg = load_config(common)?;
    if force_vtk {
        cfg.export.csv = false;
        cfg.export.vtk = true;
    }
    if default.is_empty() && cfg.case.is_none() && cfg.case_override.is_none() {
        return Err(ConfigError::Invalid(format!(
            "{command} needs --case or a case in the configuration"
        )));
    }
    let cases = cfg.cases(default)?;
    for case in &cases {
        case.validate()
            .map_err(|e| ConfigError::Invalid(format!("{}: {e}", case.name)))?;
    }
    let mut out = out_dir(&cfg)?;
    let mut errors = Vec::new();
    let mut timings = Vec::new();
    let mut status = Status::Ok;
    let mut summary = Vec::new();
    for case in &cases {
        println!("== {} ==", case.name);
        let outcome = run_one(case, &cfg, &mut out, &mut errors);
        timings.push(outcome.timing);
        if trends {
            // failed rows show up as missing values in the trend lines
            match &outcome.run {
                Some(run) => {
                    let check = check_trends(run, &cfg.solver_settings());
                    if !check.passed() {
                        status = status.worst(Status::CheckFailed);
                    }
                    summary.push(check);
                }
                None => status = status.worst(outcome.status),
            }
        } else {
            status = status.worst(outcome.status);
        }
    }
    if trends {
        println!("== summary ==");
        for c in &summary {
            println!("{} {}", if c.passed() { "PASS" } else { "FAIL" }, c.case);
            for l in &c.lines {
                println!("  {} {}: {}", if l.passed { "pass" } else { "fail" }, l.what, l.detail);
            }
        }
        if let Ok(t) = serde_json::to_string_pretty(&summary) {
            if let Err(e) = out.write("convergence.json", t.as_bytes()) {
                errors.push(e.to_string());
            }
        }
    }
    status = status.worst(finish(out, command, &cfg, timings, errors, start));
    Ok(status)
}

fn chart_by_name(name: &str) -> Result<BuiltinChart, ConfigError> {
    BuiltinChart::by_name(name).ok_or_else(|| {
        ConfigError::Invalid(format!(
            "unknown chart {name:?}; built-in charts are plane, ellipsoid, cylinder and cone"
        ))
    })
}

fn cmd_geometry_check(common: &Common, chart: &Option<String>, points: usize) -> Result<Status, ConfigError> {
    let start = Instant::now();
    let cfg = load_config(common)?;
    let charts: Vec<BuiltinChart> = if let Some(name) = chart {
        vec![chart_by_name(name)?]
    } else if let Some(c) = cfg.chart {
        vec![c]
    } else if cfg.case.is_some() || cfg.case_override.is_some() {
        cfg.cases(&[])?.into_iter().map(|c| c.chart).collect()
    } else {
        ["plane", "ellipsoid", "cylinder", "cone"]
            .iter()
            .map(|n| chart_by_name(n))
            .collect::<Result<_, _>>()?
    };
    let reports: Vec<GeometryReport> = charts.iter().map(|c| geometry_check(c, points, cfg.seed)).collect();
    let text = serde_json::to_string_pretty(&reports).map_err(|e| ConfigError::Invalid(e.to_string()))?;
    println!("{text}");
    for r in &reports {
        eprintln!(
            "{} {} (kappa in [{:.4e}, {:.4e}]){}",
            if r.passed() { "PASS" } else { "FAIL" },
            r.chart,
            r.kappa_min,
            r.kappa_max,
            r.failure.as_ref().map(|f| format!(": {f}")).unwrap_or_default()
        );
    }
    let mut status = if reports.iter().all(|r| r.passed()) {
        Status::Ok
    } else {
        Status::CheckFailed
    };
    if cfg.out.is_some() {
        let mut out = out_dir(&cfg)?;
        if let Err(e) = out.write("geometry_check.json", text.as_bytes()) {
            eprintln!("{e}");
            status = status.worst(Status::Numerical);
        }
        status = status.worst(finish(out, "geometry-check", &cfg, Vec::new(), Vec::new(), start));
    }
    Ok(status)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::GeometryCheck { common, chart, points } => cmd_geometry_check(common, chart, *points),
        Command::Run(c) => cmd_sweep(c, "run", &[], false, false),
        Command::Convergence(c) => cmd_sweep(c, "convergence", &["elliptic", "generalized", "flexural"], true, false),
        Command::ExportVtk(c) => cmd_sweep(c, "export-vtk", &[], false, true),
    };
    let status = match result {
        Ok(s) => s,
        Err(e) => {
            eprintln!("configuration error: {e}");
            Status::Config
        }
    };
    ExitCode::from(status as u8)
}
