//! The thin-shell experiments: Koiter, scaled 3D and limit solutions over a
//! sweep of thicknesses, compared in Cartesian norms.
//!
//! Per case the surface forms `B_M`, `B_F` and the limit problem are built
//! once; each thickness then costs one Koiter solve and one 3D solve. A row
//! whose assembly or solve fails is kept with its diagnostic and does not
//! stop the sweep.

pub mod cases;
pub mod export;
pub mod norms;
pub mod trends;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use cases::*;
pub use norms::{error_norms, field_norm, ErrorNorm, NormKind};
pub use trends::{check_trends, TrendCheck, TrendLine};

use crate::error::{Error, Result};
use crate::fem::assembly::{
    assemble_3d_scaled, assemble_surface_forms, default_prism_rule, default_surface_rule, koiter_from_forms,
    limit_flexural_from_forms, penalty_scale, FormRequest, SurfaceForms,
};
use crate::fem::field::{AveragedField, DiscreteField};
use crate::fem::quadrature::{PrismRule, TriangleRule};
use crate::fem::space::{FunctionSpace, MixedSpace, SpaceKind};
use crate::fem::sparse::SparseSystem;
use crate::geometry::Chart;
use crate::mesh::{extrude, structured_tri, BoundarySpec};
use crate::solver::{solve_system_unchecked, SolveReport, SolverSettings, DIRECT_TOL, ITERATIVE_TOL};

/// One line of a result table. Values that do not apply to the case are
/// `None`, never zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub case: String,
    pub eps: f64,
    pub err_lk: Option<f64>,
    pub err_3dk: Option<f64>,
    pub err_3dl: Option<f64>,
    pub abs_lk: Option<f64>,
    pub abs_3dk: Option<f64>,
    pub abs_3dl: Option<f64>,
    pub norm_lk: Option<String>,
    pub norm_3d: Option<String>,
    pub koiter_dofs: usize,
    pub volume_dofs: usize,
    pub limit_dofs: Option<usize>,
    /// `eps B_M(z, z) / (eps B_M + eps^3 B_F)(z, z)` for the Koiter solution
    pub membrane_fraction: Option<f64>,
    pub residual_koiter: Option<f64>,
    pub residual_3d: Option<f64>,
    pub residual_limit: Option<f64>,
    /// `ok` or a diagnostic
    pub status: String,
    /// excluded from the CSV so that tables are reproducible byte for byte
    #[serde(skip)]
    pub wall_seconds: f64,
}

impl ResultRow {
    fn empty(case: &ShellCase, eps: f64) -> Self {
        Self {
            case: case.name.clone(),
            eps,
            err_lk: None,
            err_3dk: None,
            err_3dl: None,
            abs_lk: None,
            abs_3dk: None,
            abs_3dl: None,
            norm_lk: None,
            norm_3d: None,
            koiter_dofs: 0,
            volume_dofs: 0,
            limit_dofs: None,
            membrane_fraction: None,
            residual_koiter: None,
            residual_3d: None,
            residual_limit: None,
            status: String::new(),
            wall_seconds: 0.0,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }

    pub fn flexural_fraction(&self) -> Option<f64> {
        self.membrane_fraction.map(|m| 1.0 - m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunOptions {
    pub solver: SolverSettings,
    /// skip the 3D problem (surface models only)
    pub skip_3d: bool,
    /// keep the solution fields for export
    pub keep_fields: bool,
}

/// Solution fields of one row, kept for export.
#[derive(Debug, Clone)]
pub struct RowFields {
    pub eps: f64,
    pub koiter: Option<DiscreteField>,
    pub volume: Option<DiscreteField>,
}

#[derive(Debug, Clone)]
pub struct LimitSolution {
    pub field: DiscreteField,
    pub report: SolveReport,
    /// absolute penalty (flexural case only)
    pub penalty: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct CaseRun {
    pub case: ShellCase,
    pub rows: Vec<ResultRow>,
    pub limit: Option<LimitSolution>,
    pub fields: Vec<RowFields>,
    /// `(B_M, B_F)` symmetry defects relative to the largest entry
    pub asymmetry: Vec<(String, f64)>,
}

/// Norms for `(ErrLK, Err3DK and Err3DL)`.
pub fn norm_kinds(kind: ShellKind) -> (Option<NormKind>, NormKind) {
    match kind {
        ShellKind::EllipticMembrane => (Some(NormKind::Membrane), NormKind::Membrane),
        ShellKind::GeneralizedMembrane => (None, NormKind::Membrane),
        // the average of a 3D field has no second derivatives
        ShellKind::Flexural => (Some(NormKind::Flexural), NormKind::FlexuralH1),
    }
}

/// Koiter space: P2 tangential components and reduced HCT transverse
/// component, clamped on the case boundary.
pub fn koiter_space(case: &ShellCase) -> Result<MixedSpace> {
    let m = &case.mesh;
    let mesh = Arc::new(structured_tri(case.chart.rect(), m.n1, m.n2, case.boundary.clone())?);
    let p2 = Arc::new(FunctionSpace::new(SpaceKind::LagrangeP2Tri, mesh.clone())?.clamped(&case.boundary));
    let hct = Arc::new(FunctionSpace::new(SpaceKind::ReducedHct, mesh)?.clamped(&case.boundary));
    MixedSpace::new([p2.clone(), p2, hct])
}

/// Limit membrane space: clamped P2 tangential components and a P1
/// transverse component without boundary condition.
pub fn limit_membrane_space(case: &ShellCase) -> Result<MixedSpace> {
    let m = &case.mesh;
    let mesh = Arc::new(structured_tri(case.chart.rect(), m.n1, m.n2, case.boundary.clone())?);
    let p2 = Arc::new(FunctionSpace::new(SpaceKind::LagrangeP2Tri, mesh.clone())?.clamped(&case.boundary));
    let p1 = Arc::new(FunctionSpace::new(SpaceKind::LagrangeP1Tri, mesh)?);
    MixedSpace::new([p2.clone(), p2, p1])
}

/// P2 prism space on the layered 3D mesh, clamped on the lateral faces
/// over the case boundary.
pub fn volume_space(case: &ShellCase) -> Result<MixedSpace> {
    let m = &case.mesh;
    let base = structured_tri(case.chart.rect(), m.n1_3d, m.n2_3d, case.boundary.clone())?;
    let prism = Arc::new(extrude(&base, m.layers)?);
    let p2 = Arc::new(FunctionSpace::new_prism(SpaceKind::LagrangeP2Prism, prism)?.clamped(&case.boundary));
    MixedSpace::new([p2.clone(), p2.clone(), p2])
}

fn contract(report: &SolveReport) -> f64 {
    match report.method {
        crate::solver::SolveMethod::DirectCholesky => DIRECT_TOL,
        crate::solver::SolveMethod::PreconditionedCg => ITERATIVE_TOL,
    }
}

fn solve(
    system: &SparseSystem,
    settings: &SolverSettings,
    what: &str,
    notes: &mut Vec<String>,
) -> Result<(Vec<f64>, SolveReport)> {
    let (x, report) = solve_system_unchecked(system, settings)?;
    if report.residual > contract(&report) {
        notes.push(format!("{what} residual {:.3e} above contract", report.residual));
    }
    Ok((x, report))
}

/// Surface forms of the case with the limit load `p^i`.
pub fn case_forms(case: &ShellCase, space: &MixedSpace, rule: &TriangleRule) -> Result<SurfaceForms> {
    assemble_surface_forms(
        &case.chart,
        case.lame,
        space,
        case.limit_load(),
        rule,
        FormRequest {
            membrane: true,
            flexural: true,
            require_elliptic: false,
        },
    )
}

/// Limit problem of the case, if it has one.
pub fn solve_limit(
    case: &ShellCase,
    forms: &SurfaceForms,
    koiter: &MixedSpace,
    rule: &TriangleRule,
    settings: &SolverSettings,
) -> Result<Option<LimitSolution>> {
    match case.kind {
        ShellKind::GeneralizedMembrane => Ok(None),
        ShellKind::EllipticMembrane => {
            let space = limit_membrane_space(case)?;
            let system =
                crate::fem::assembly::assemble_limit_membrane(&case.chart, case.lame, case.limit_load(), &space, rule)?;
            let (x, report) = solve_system_unchecked(&system, settings)?;
            Ok(Some(LimitSolution {
                field: DiscreteField::new(space, x)?,
                report,
                penalty: None,
            }))
        }
        ShellKind::Flexural => {
            let penalty = case.penalty() * penalty_scale(forms)?;
            let system = limit_flexural_from_forms(forms, penalty)?;
            let (x, report) = solve_system_unchecked(&system, settings)?;
            Ok(Some(LimitSolution {
                field: DiscreteField::new(koiter.clone(), x)?,
                report,
                penalty: Some(penalty),
            }))
        }
    }
}

/// Compliance `l(zeta)` of the penalized flexural limit for each relative
/// penalty.
pub fn penalty_energies(forms: &SurfaceForms, penalties: &[f64], settings: &SolverSettings) -> Result<Vec<(f64, f64)>> {
    let scale = penalty_scale(forms)?;
    penalties
        .iter()
        .map(|&p| {
            let system = limit_flexural_from_forms(forms, p * scale)?;
            let (x, _) = solve_system_unchecked(&system, settings)?;
            let energy: f64 = x.iter().zip(&system.rhs).map(|(a, b)| a * b).sum();
            Ok((p, energy))
        })
        .collect()
}

/// Membrane and flexural energies `(eps B_M(z, z), eps^3 B_F(z, z))`.
pub fn koiter_energies(forms: &SurfaceForms, eps: f64, z: &[f64]) -> Result<(f64, f64)> {
    let m = forms
        .membrane
        .as_ref()
        .ok_or(Error::SingularSystem("membrane form missing".into()))?;
    let f = forms
        .flexural
        .as_ref()
        .ok_or(Error::SingularSystem("flexural form missing".into()))?;
    Ok((eps * m.quad_form(z, z), eps * eps * eps * f.quad_form(z, z)))
}

struct Context<'a> {
    case: &'a ShellCase,
    koiter: &'a MixedSpace,
    forms: &'a SurfaceForms,
    limit: Option<&'a LimitSolution>,
    volume: Option<&'a MixedSpace>,
    surface_rule: &'a TriangleRule,
    prism_rule: &'a PrismRule,
    options: &'a RunOptions,
}

fn run_row(ctx: &Context, eps: f64, row: &mut ResultRow, fields: &mut RowFields) -> Result<Vec<String>> {
    let case = ctx.case;
    let mut notes = Vec::new();
    let (lk_kind, vol_kind) = norm_kinds(case.kind);
    row.koiter_dofs = ctx.koiter.ndof;
    row.limit_dofs = ctx.limit.map(|l| l.field.space.ndof);
    row.residual_limit = ctx.limit.map(|l| l.report.residual);

    let system = koiter_from_forms(ctx.forms, eps, case.scaling.koiter_load_factor(eps))?;
    let (z, report) = solve(&system, &ctx.options.solver, "koiter", &mut notes)?;
    row.residual_koiter = Some(report.residual);
    let (em, ef) = koiter_energies(ctx.forms, eps, &z)?;
    row.membrane_fraction = Some(em / (em + ef));
    let koiter = DiscreteField::new(ctx.koiter.clone(), z)?;

    if let (Some(limit), Some(kind)) = (ctx.limit, lk_kind) {
        let e = error_norms(&koiter, &limit.field, &case.chart, kind, ctx.surface_rule)?;
        row.err_lk = Some(e.relative);
        row.abs_lk = Some(e.absolute);
        row.norm_lk = Some(kind.label().into());
    }

    if let Some(space) = ctx.volume {
        row.volume_dofs = space.ndof;
        let body = case.scaling.body_force(case.body_force, eps);
        let traction = case.scaling.surface_force(case.surface_force, eps).map(|h| h / eps);
        let vs = assemble_3d_scaled(&case.chart, case.lame, eps, body, traction, space, ctx.prism_rule)?;
        let (x, report) = solve(&vs.system, &ctx.options.solver, "3d", &mut notes)?;
        row.residual_3d = Some(report.residual);
        let u = DiscreteField::new(space.clone(), vs.coefficients(&x))?;
        {
            let avg = AveragedField::new(&u, &case.chart, eps)?;
            let e = error_norms(&avg, &koiter, &case.chart, vol_kind, ctx.surface_rule)?;
            row.err_3dk = Some(e.relative);
            row.abs_3dk = Some(e.absolute);
            if let Some(limit) = ctx.limit {
                let e = error_norms(&avg, &limit.field, &case.chart, vol_kind, ctx.surface_rule)?;
                row.err_3dl = Some(e.relative);
                row.abs_3dl = Some(e.absolute);
            }
            row.norm_3d = Some(vol_kind.label().into());
        }
        if ctx.options.keep_fields {
            fields.volume = Some(u);
        }
    }
    if ctx.options.keep_fields {
        fields.koiter = Some(koiter);
    }
    Ok(notes)
}

/// Wall clock for the row timings. `wasm32-unknown-unknown` has no clock,
/// so timings read zero there.
struct Stopwatch(#[cfg(not(all(target_arch = "wasm32", target_os = "unknown")))] std::time::Instant);

impl Stopwatch {
    #[cfg(not(all(target_arch = "wasm32", target_os = "unknown")))]
    fn start() -> Self {
        Self(std::time::Instant::now())
    }

    #[cfg(all(target_arch = "wasm32", target_os = "unknown"))]
    fn start() -> Self {
        Self()
    }

    #[cfg(not(all(target_arch = "wasm32", target_os = "unknown")))]
    fn seconds(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }

    #[cfg(all(target_arch = "wasm32", target_os = "unknown"))]
    fn seconds(&self) -> f64 {
        0.0
    }
}

/// Runs the thickness sweep of a case. Rows come back in the order of
/// `case.eps_list`.
pub fn run_case(case: &ShellCase, options: &RunOptions) -> Result<CaseRun> {
    case.validate()?;
    let surface_rule = default_surface_rule();
    let prism_rule = default_prism_rule();
    let koiter = koiter_space(case)?;
    let forms = case_forms(case, &koiter, &surface_rule)?;
    let mut asymmetry = Vec::new();
    for (name, m) in [("membrane", &forms.membrane), ("flexural", &forms.flexural)] {
        if let Some(m) = m {
            asymmetry.push((name.to_string(), m.asymmetry()));
        }
    }
    let limit = solve_limit(case, &forms, &koiter, &surface_rule, &options.solver)?;
    let volume = if options.skip_3d {
        None
    } else {
        Some(volume_space(case)?)
    };
    let ctx = Context {
        case,
        koiter: &koiter,
        forms: &forms,
        limit: limit.as_ref(),
        volume: volume.as_ref(),
        surface_rule: &surface_rule,
        prism_rule: &prism_rule,
        options,
    };
    let mut rows = Vec::with_capacity(case.eps_list.len());
    let mut fields = Vec::new();
    for &eps in &case.eps_list {
        let start = Stopwatch::start();
        let mut row = ResultRow::empty(case, eps);
        let mut f = RowFields {
            eps,
            koiter: None,
            volume: None,
        };
        row.status = match run_row(&ctx, eps, &mut row, &mut f) {
            Ok(notes) if notes.is_empty() => "ok".into(),
            Ok(notes) => notes.join("; "),
            Err(e) => format!("failed: {e}"),
        };
        if let Some(l) = &limit {
            if l.report.residual > contract(&l.report) && row.is_ok() {
                row.status = format!("limit residual {:.3e} above contract", l.report.residual);
            }
        }
        row.wall_seconds = start.seconds();
        rows.push(row);
        if options.keep_fields {
            fields.push(f);
        }
    }
    Ok(CaseRun {
        case: case.clone(),
        rows,
        limit,
        fields,
        asymmetry,
    })
}

/// True when the values are strictly decreasing.
pub fn strictly_decreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] < w[0])
}

/// Ratios `v[k] / v[k+1]`.
pub fn consecutive_ratios(values: &[f64]) -> Vec<f64> {
    values.windows(2).map(|w| w[0] / w[1]).collect()
}

/// Column of a result table, `None` if any row lacks the value.
pub fn column(rows: &[ResultRow], get: impl Fn(&ResultRow) -> Option<f64>) -> Option<Vec<f64>> {
    rows.iter().map(get).collect()
}

/// Overrides the thicknesses of a case, keeping the order given.
pub fn with_eps(mut case: ShellCase, eps: Vec<f64>) -> ShellCase {
    case.eps_list = eps;
    case
}

/// Overrides the clamped part of the boundary.
pub fn with_boundary(mut case: ShellCase, boundary: BoundarySpec) -> ShellCase {
    case.boundary = boundary;
    case
}
