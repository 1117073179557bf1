//! Assembly of the membrane, flexural, Koiter, scaled 3D and limit systems.
//!
//! Element matrices are computed independently per cell (in parallel with
//! the `parallel` feature) and inserted serially in cell order, so the
//! floating-point summation order never depends on scheduling.

use nalgebra::DMatrix;

use super::hct::ScalarJet;
use super::quadrature::{PrismRule, TriangleRule};
use super::space::{MixedSpace, SpaceKind};
use super::sparse::{CsrMatrix, SparseSystem};
use crate::error::{Error, Result};
use crate::geometry::{surface_at, volume_from_surface, Chart, SurfaceGeometry};
use crate::kinematics::{
    gamma, rho, strain3_scaled, tensor2d, tensor3d, Lame, SurfaceDisplacementJet, VolumeDisplacementJet,
};

/// Default triangle rule for surface forms (applied per HCT subtriangle).
pub fn default_surface_rule() -> TriangleRule {
    TriangleRule::collapsed(6)
}

/// Default prism rule: degree 6 on the triangle, 4 Gauss points per layer.
pub fn default_prism_rule() -> PrismRule {
    PrismRule::new(6, 6)
}

#[cfg(feature = "parallel")]
pub(crate) fn map_cells<T, F>(n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_cells<T, F>(n: usize, f: F) -> Result<Vec<T>>
where
    F: Fn(usize) -> Result<T>,
{
    (0..n).map(f).collect()
}

/// Quadrature points of triangle `t` as `(y, weight, subtriangle)`. With
/// `split` the rule is applied on the three centroid subtriangles.
pub fn cell_points(space: &MixedSpace, t: usize, rule: &TriangleRule) -> Vec<([f64; 2], f64, Option<usize>)> {
    let corners = space.mesh().corners(t);
    if space.uses_hct() {
        let c = [
            (corners[0][0] + corners[1][0] + corners[2][0]) / 3.0,
            (corners[0][1] + corners[1][1] + corners[2][1]) / 3.0,
        ];
        (0..3)
            .flat_map(|k| {
                let sub = [corners[k], corners[(k + 1) % 3], c];
                map_rule(sub, rule).into_iter().map(move |(y, w)| (y, w, Some(k)))
            })
            .collect()
    } else {
        map_rule(corners, rule).into_iter().map(|(y, w)| (y, w, None)).collect()
    }
}

/// Maps a reference-triangle rule onto the triangle `p`.
pub fn map_rule(p: [[f64; 2]; 3], rule: &TriangleRule) -> Vec<([f64; 2], f64)> {
    let det = ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1])).abs();
    rule.points
        .iter()
        .zip(&rule.weights)
        .map(|(q, w)| {
            (
                [
                    p[0][0] + q[0] * (p[1][0] - p[0][0]) + q[1] * (p[2][0] - p[0][0]),
                    p[0][1] + q[0] * (p[1][1] - p[0][1]) + q[1] * (p[2][1] - p[0][1]),
                ],
                w * det,
            )
        })
        .collect()
}

/// Basis jets of all three components at a point, in mixed local order.
fn surface_basis(space: &MixedSpace, t: usize, y: [f64; 2], sub: Option<usize>) -> [Vec<ScalarJet>; 3] {
    let eval = |c: usize| {
        let s = &space.comps[c];
        let hint = if s.kind == SpaceKind::ReducedHct { sub } else { None };
        s.eval_tri(t, y, hint)
    };
    [eval(0), eval(1), eval(2)]
}

/// Strain rows (3 x n) of `gamma` and, when asked, `rho` for every local dof.
fn strain_rows(
    geom: &SurfaceGeometry,
    basis: &[Vec<ScalarJet>; 3],
    with_rho: bool,
) -> Result<(DMatrix<f64>, Option<DMatrix<f64>>)> {
    let n: usize = basis.iter().map(|b| b.len()).sum();
    let mut bg = DMatrix::zeros(3, n);
    let mut br = if with_rho { Some(DMatrix::zeros(3, n)) } else { None };
    let mut col = 0;
    for (c, comp) in basis.iter().enumerate() {
        for phi in comp {
            let mut jet = SurfaceDisplacementJet {
                dd_eta3: Some([[0.0; 2]; 2]),
                ..Default::default()
            };
            jet.eta[c] = phi.value;
            jet.d_eta[c] = phi.grad;
            if c == 2 {
                jet.dd_eta3 = Some(phi.hess);
            }
            let g = gamma(geom, &jet);
            for k in 0..3 {
                bg[(k, col)] = g.0[k];
            }
            if let Some(br) = br.as_mut() {
                let r = rho(geom, &jet)?;
                for k in 0..3 {
                    br[(k, col)] = r.0[k];
                }
            }
            col += 1;
        }
    }
    Ok((bg, br))
}

struct SurfaceCell {
    dofs: Vec<usize>,
    membrane: Option<Vec<f64>>,
    flexural: Option<Vec<f64>>,
    load: Vec<f64>,
}

/// Membrane matrix `B_M`, flexural matrix `B_F` (with its factor 1/3) and
/// the load functional `int p^i eta_i sqrt(a) dy` for constant `p`.
#[derive(Debug, Clone)]
pub struct SurfaceForms {
    pub membrane: Option<CsrMatrix>,
    pub flexural: Option<CsrMatrix>,
    pub load: Vec<f64>,
    pub constrained: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormRequest {
    pub membrane: bool,
    pub flexural: bool,
    /// fail with `NotElliptic` when the Gaussian curvature is not positive
    pub require_elliptic: bool,
}

pub fn assemble_surface_forms(
    chart: &dyn Chart,
    lame: Lame,
    space: &MixedSpace,
    p: [f64; 3],
    rule: &TriangleRule,
    request: FormRequest,
) -> Result<SurfaceForms> {
    lame.validate()?;
    if request.flexural && space.comps[2].kind != SpaceKind::ReducedHct {
        return Err(Error::WrongTransverseSpace(space.comps[2].kind.name().to_string()));
    }
    let cells = map_cells(space.n_cells(), |t| {
        let dofs = space.cell_dofs(t);
        let n = dofs.len();
        let mut km = request.membrane.then(|| DMatrix::<f64>::zeros(n, n));
        let mut kf = request.flexural.then(|| DMatrix::<f64>::zeros(n, n));
        let mut load = vec![0.0; n];
        for (y, w, sub) in cell_points(space, t, rule) {
            let geom = surface_at(chart, y)?;
            if request.require_elliptic && !(geom.kappa > 0.0) {
                return Err(Error::NotElliptic { y, kappa: geom.kappa });
            }
            let tensor = tensor2d(&geom, lame)?;
            let basis = surface_basis(space, t, y, sub);
            let (bg, br) = strain_rows(&geom, &basis, request.flexural)?;
            let ws = w * geom.sqrt_a;
            if let Some(km) = km.as_mut() {
                let cb = tensor.voigt * &bg;
                *km += ws * bg.transpose() * cb;
            }
            if let (Some(kf), Some(br)) = (kf.as_mut(), br.as_ref()) {
                let cb = tensor.voigt * br;
                *kf += (ws / 3.0) * br.transpose() * cb;
            }
            let mut col = 0;
            for (c, comp) in basis.iter().enumerate() {
                for phi in comp {
                    load[col] += ws * p[c] * phi.value;
                    col += 1;
                }
            }
        }
        let flat = |m: DMatrix<f64>| m.transpose().as_slice().to_vec();
        Ok(SurfaceCell {
            dofs,
            membrane: km.map(flat),
            flexural: kf.map(flat),
            load,
        })
    })?;

    let pattern = CsrMatrix::from_cells(space.ndof, cells.iter().map(|c| c.dofs.as_slice()));
    let mut membrane = request.membrane.then(|| pattern.clone());
    let mut flexural = request.flexural.then(|| pattern.clone());
    let mut load = vec![0.0; space.ndof];
    for cell in &cells {
        if let (Some(m), Some(local)) = (membrane.as_mut(), cell.membrane.as_ref()) {
            m.add_local(&cell.dofs, local);
        }
        if let (Some(m), Some(local)) = (flexural.as_mut(), cell.flexural.as_ref()) {
            m.add_local(&cell.dofs, local);
        }
        for (d, v) in cell.dofs.iter().zip(&cell.load) {
            load[*d] += v;
        }
    }
    Ok(SurfaceForms {
        membrane,
        flexural,
        load,
        constrained: space.constrained(),
    })
}

/// `B_M` alone, with zero load.
pub fn assemble_membrane(
    chart: &dyn Chart,
    lame: Lame,
    space: &MixedSpace,
    rule: &TriangleRule,
) -> Result<SparseSystem> {
    let f = assemble_surface_forms(
        chart,
        lame,
        space,
        [0.0; 3],
        rule,
        FormRequest {
            membrane: true,
            flexural: false,
            require_elliptic: false,
        },
    )?;
    Ok(SparseSystem {
        matrix: f.membrane.expect("requested"),
        rhs: f.load,
        constrained: f.constrained,
    })
}

/// `B_F` alone, with zero load. Needs a C1 transverse space.
pub fn assemble_flexural(
    chart: &dyn Chart,
    lame: Lame,
    space: &MixedSpace,
    rule: &TriangleRule,
) -> Result<SparseSystem> {
    let f = assemble_surface_forms(
        chart,
        lame,
        space,
        [0.0; 3],
        rule,
        FormRequest {
            membrane: false,
            flexural: true,
            require_elliptic: false,
        },
    )?;
    Ok(SparseSystem {
        matrix: f.flexural.expect("requested"),
        rhs: f.load,
        constrained: f.constrained,
    })
}

/// Koiter system `eps B_M + eps^3 B_F = l^eps` with `p^{i,eps} = 2 eps f^{i,eps}`
/// for a body force `f^{i,eps}` constant through the thickness.
pub fn assemble_koiter(
    chart: &dyn Chart,
    lame: Lame,
    eps: f64,
    body_force: [f64; 3],
    space: &MixedSpace,
    rule: &TriangleRule,
) -> Result<SparseSystem> {
    if !(eps > 0.0) {
        return Err(Error::ZeroThickness(eps));
    }
    let p = body_force.map(|f| 2.0 * eps * f);
    let forms = assemble_surface_forms(
        chart,
        lame,
        space,
        p,
        rule,
        FormRequest {
            membrane: true,
            flexural: true,
            require_elliptic: false,
        },
    )?;
    koiter_from_forms(&forms, eps, 1.0)
}

/// `eps M + eps^3 F` with the stored load scaled by `load_scale`.
pub fn koiter_from_forms(forms: &SurfaceForms, eps: f64, load_scale: f64) -> Result<SparseSystem> {
    let m = forms
        .membrane
        .as_ref()
        .ok_or(Error::SingularSystem("membrane form missing".into()))?;
    let f = forms
        .flexural
        .as_ref()
        .ok_or(Error::SingularSystem("flexural form missing".into()))?;
    Ok(SparseSystem {
        matrix: m.combine(eps, f, eps * eps * eps)?,
        rhs: forms.load.iter().map(|v| v * load_scale).collect(),
        constrained: forms.constrained.clone(),
    })
}

/// Limit membrane problem `B_M(zeta, eta) = int p^i eta_i sqrt(a) dy` for an
/// elliptic surface. The transverse component carries no boundary condition.
pub fn assemble_limit_membrane(
    chart: &dyn Chart,
    lame: Lame,
    p: [f64; 3],
    space: &MixedSpace,
    rule: &TriangleRule,
) -> Result<SparseSystem> {
    let f = assemble_surface_forms(
        chart,
        lame,
        space,
        p,
        rule,
        FormRequest {
            membrane: true,
            flexural: false,
            require_elliptic: true,
        },
    )?;
    Ok(SparseSystem {
        matrix: f.membrane.expect("requested"),
        rhs: f.load,
        constrained: f.constrained,
    })
}

/// Ratio of the mean free diagonals of `B_F` and `B_M`, the natural unit
/// for the flexural penalty.
pub fn penalty_scale(forms: &SurfaceForms) -> Result<f64> {
    let m = forms
        .membrane
        .as_ref()
        .ok_or(Error::SingularSystem("membrane form missing".into()))?;
    let f = forms
        .flexural
        .as_ref()
        .ok_or(Error::SingularSystem("flexural form missing".into()))?;
    let (dm, df) = (m.diagonal(), f.diagonal());
    let (mut sm, mut sf) = (0.0, 0.0);
    for i in 0..m.n {
        if !forms.constrained[i] {
            sm += dm[i];
            sf += df[i];
        }
    }
    if !(sm > 0.0) {
        return Err(Error::SingularSystem("membrane form has no free diagonal".into()));
    }
    Ok(sf / sm)
}

/// Penalized flexural limit `(B_F + penalty B_M) zeta = l` where the load
/// `int p^i eta_i sqrt(a) dy` is stored in `forms`. `penalty` is absolute.
pub fn limit_flexural_from_forms(forms: &SurfaceForms, penalty: f64) -> Result<SparseSystem> {
    if !(penalty > 0.0) || !penalty.is_finite() {
        return Err(Error::InvalidPenalty(penalty));
    }
    let m = forms
        .membrane
        .as_ref()
        .ok_or(Error::SingularSystem("membrane form missing".into()))?;
    let f = forms
        .flexural
        .as_ref()
        .ok_or(Error::SingularSystem("flexural form missing".into()))?;
    Ok(SparseSystem {
        matrix: f.combine(1.0, m, penalty)?,
        rhs: forms.load.clone(),
        constrained: forms.constrained.clone(),
    })
}

/// Penalized flexural limit with the penalty given relative to
/// [`penalty_scale`].
pub fn assemble_limit_flexural_penalized(
    chart: &dyn Chart,
    lame: Lame,
    p: [f64; 3],
    space: &MixedSpace,
    rule: &TriangleRule,
    penalty: f64,
) -> Result<SparseSystem> {
    if !(penalty > 0.0) || !penalty.is_finite() {
        return Err(Error::InvalidPenalty(penalty));
    }
    let forms = assemble_surface_forms(
        chart,
        lame,
        space,
        p,
        rule,
        FormRequest {
            membrane: true,
            flexural: true,
            require_elliptic: false,
        },
    )?;
    limit_flexural_from_forms(&forms, penalty * penalty_scale(&forms)?)
}

struct VolumeCell {
    dofs: Vec<usize>,
    stiffness: Vec<f64>,
    load: Vec<f64>,
}

/// Scaled 3D system. The unknowns are the column-basis coefficients with
/// the transverse differences divided by `eps`, which keeps all matrix
/// entries of order one as `eps -> 0`.
#[derive(Debug, Clone)]
pub struct VolumeSystem {
    pub system: SparseSystem,
    pub dof_scale: Vec<f64>,
}

impl VolumeSystem {
    /// Column-basis coefficients of the field with unknowns `x`.
    pub fn coefficients(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.dof_scale).map(|(x, s)| x * s).collect()
    }
}

/// `1` on the column dofs (plane 0) and `eps` on the transverse differences.
pub fn volume_dof_scale(space: &MixedSpace, eps: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(space.ndof);
    for comp in &space.comps {
        let n = comp.plane_ndof();
        out.extend((0..comp.ndof).map(|d| if d < n { 1.0 } else { eps }));
    }
    out
}

/// Scaled 3D problem on `omega x (-1, 1)`:
/// `int A^{ijkl}(eps) e_kl(eps; u) e_ij(eps; v) sqrt(g(eps)) dx
///  = int f^i v_i sqrt(g(eps)) dx + int_{Gamma+-} t^i v_i sqrt(g(eps)) dy`,
/// where `body_force` is `f^{i,eps}` and `traction` is `h^{i,eps} / eps`.
pub fn assemble_3d_scaled(
    chart: &dyn Chart,
    lame: Lame,
    eps: f64,
    body_force: [f64; 3],
    traction: [f64; 3],
    space: &MixedSpace,
    rule: &PrismRule,
) -> Result<VolumeSystem> {
    lame.validate()?;
    if !(eps > 0.0) {
        return Err(Error::ZeroThickness(eps));
    }
    let prism = space.comps[0]
        .prism
        .clone()
        .ok_or_else(|| Error::WrongTransverseSpace("3D assembly needs prism spaces".into()))?;
    let nt = prism.base.triangles.len();
    let has_traction = traction.iter().any(|&t| t != 0.0);
    let dof_scale = volume_dof_scale(space, eps);
    let cells = map_cells(space.n_cells(), |c| {
        let (t, k) = (c % nt, c / nt);
        let (z0, z1) = prism.layer_bounds(k);
        let (mid, half) = (0.5 * (z0 + z1), 0.5 * (z1 - z0));
        let dofs = space.cell_dofs(c);
        let n = dofs.len();
        let mut kl = DMatrix::<f64>::zeros(n, n);
        let mut load = vec![0.0; n];
        let tri_points = map_rule(prism.base.corners(t), &rule.triangle);
        let mut b = DMatrix::<f64>::zeros(6, n);
        for (y, wy) in &tri_points {
            let surface = surface_at(chart, *y)?;
            for (z, wz) in rule.line_points.iter().zip(&rule.line_weights) {
                let x3 = mid + half * z;
                let vol = volume_from_surface(&surface, x3, eps)?;
                let tensor = tensor3d(&vol, lame)?;
                let w = wy * wz * half * vol.sqrt_g;
                let mut col = 0;
                for comp in 0..3 {
                    for phi in space.comps[comp].eval_prism(c, *y, x3) {
                        let sc = dof_scale[dofs[col]];
                        let mut jet = VolumeDisplacementJet::default();
                        jet.v[comp] = sc * phi.value;
                        jet.d_v[comp] = phi.grad.map(|g| sc * g);
                        let e = strain3_scaled(&vol, &jet, eps)?;
                        for r in 0..6 {
                            b[(r, col)] = e.0[r];
                        }
                        load[col] += w * body_force[comp] * jet.v[comp];
                        col += 1;
                    }
                }
                let cb = tensor.voigt * &b;
                kl += w * b.transpose() * cb;
            }
            if has_traction {
                for (face, x3) in [(0, -1.0), (prism.layers - 1, 1.0)] {
                    if k != face {
                        continue;
                    }
                    let vol = volume_from_surface(&surface, x3, eps)?;
                    let mut col = 0;
                    for comp in 0..3 {
                        for phi in space.comps[comp].eval_prism(c, *y, x3) {
                            load[col] += wy * vol.sqrt_g * traction[comp] * dof_scale[dofs[col]] * phi.value;
                            col += 1;
                        }
                    }
                }
            }
        }
        Ok(VolumeCell {
            dofs,
            stiffness: kl.transpose().as_slice().to_vec(),
            load,
        })
    })?;
    let mut matrix = CsrMatrix::from_cells(space.ndof, cells.iter().map(|c| c.dofs.as_slice()));
    let mut rhs = vec![0.0; space.ndof];
    for cell in &cells {
        matrix.add_local(&cell.dofs, &cell.stiffness);
        for (d, v) in cell.dofs.iter().zip(&cell.load) {
            rhs[*d] += v;
        }
    }
    Ok(VolumeSystem {
        system: SparseSystem {
            matrix,
            rhs,
            constrained: space.constrained(),
        },
        dof_scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::space::FunctionSpace;
    use crate::geometry::{BuiltinChart, ParamRect};
    use crate::mesh::{extrude, structured_tri, BoundarySpec};
    use std::sync::Arc;

    fn plane_space(kinds: [SpaceKind; 3], n: usize) -> MixedSpace {
        let mesh = Arc::new(structured_tri(ParamRect::unit(), n, n, BoundarySpec::EntireBoundary).unwrap());
        MixedSpace::new(kinds.map(|k| Arc::new(FunctionSpace::new(k, mesh.clone()).unwrap()))).unwrap()
    }

    #[test]
    fn membrane_kernel_on_plane_contains_constants() {
        let space = plane_space(
            [
                SpaceKind::LagrangeP2Tri,
                SpaceKind::LagrangeP2Tri,
                SpaceKind::ReducedHct,
            ],
            2,
        );
        let sys = assemble_membrane(
            &BuiltinChart::plane(),
            Lame::new(1.0, 1.0).unwrap(),
            &space,
            &default_surface_rule(),
        )
        .unwrap();
        let mut eta = vec![0.0; space.ndof];
        for i in 0..space.comps[0].ndof {
            eta[i] = 0.7;
            eta[space.offsets[1] + i] = -0.2;
        }
        // arbitrary transverse part
        for (i, v) in eta[space.offsets[2]..].iter_mut().enumerate() {
            *v = (i as f64 * 0.37).sin();
        }
        assert!(sys.matrix.quad_form(&eta, &eta).abs() < 1e-12);
        assert!(sys.matrix.asymmetry() < 1e-12);
    }

    #[test]
    fn flexural_kernel_on_plane_contains_affine_transverse() {
        let space = plane_space(
            [
                SpaceKind::LagrangeP2Tri,
                SpaceKind::LagrangeP2Tri,
                SpaceKind::ReducedHct,
            ],
            2,
        );
        let sys = assemble_flexural(
            &BuiltinChart::plane(),
            Lame::new(1.0, 1.0).unwrap(),
            &space,
            &default_surface_rule(),
        )
        .unwrap();
        let mut eta = vec![0.0; space.ndof];
        for (i, v) in eta[..space.offsets[2]].iter_mut().enumerate() {
            *v = (i as f64).cos();
        }
        let mesh = space.mesh();
        for (v, p) in mesh.vertices.iter().enumerate() {
            let o = space.offsets[2] + 3 * v;
            eta[o] = 1.0 + 2.0 * p[0] - 0.5 * p[1];
            eta[o + 1] = 2.0;
            eta[o + 2] = -0.5;
        }
        assert!(sys.matrix.quad_form(&eta, &eta).abs() < 1e-10);
    }

    #[test]
    fn flexural_needs_c1_transverse_space() {
        let space = plane_space(
            [
                SpaceKind::LagrangeP2Tri,
                SpaceKind::LagrangeP2Tri,
                SpaceKind::LagrangeP2Tri,
            ],
            1,
        );
        let err = assemble_flexural(
            &BuiltinChart::plane(),
            Lame::new(1.0, 1.0).unwrap(),
            &space,
            &default_surface_rule(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::WrongTransverseSpace(_)));
    }

    #[test]
    fn koiter_equals_scaled_sum() {
        let chart = BuiltinChart::cone();
        let mesh = Arc::new(structured_tri(chart.rect(), 3, 2, BoundarySpec::EntireBoundary).unwrap());
        let space = MixedSpace::new(
            [
                SpaceKind::LagrangeP2Tri,
                SpaceKind::LagrangeP2Tri,
                SpaceKind::ReducedHct,
            ]
            .map(|k| Arc::new(FunctionSpace::new(k, mesh.clone()).unwrap())),
        )
        .unwrap();
        let lame = Lame::new(1.68e7, 1.86e6).unwrap();
        let rule = default_surface_rule();
        let m = assemble_membrane(&chart, lame, &space, &rule).unwrap().matrix;
        let f = assemble_flexural(&chart, lame, &space, &rule).unwrap().matrix;
        for eps in [0.1, 1e-3] {
            let k = assemble_koiter(&chart, lame, eps, [1.0; 3], &space, &rule).unwrap();
            for i in 0..k.matrix.nnz() {
                let want = eps * m.values[i] + eps.powi(3) * f.values[i];
                assert!((k.matrix.values[i] - want).abs() <= 1e-12 * k.matrix.max_abs());
            }
        }
    }

    #[test]
    fn limit_membrane_rejects_non_elliptic_surfaces() {
        let chart = BuiltinChart::cylinder();
        let mesh = Arc::new(structured_tri(chart.rect(), 2, 2, BoundarySpec::EntireBoundary).unwrap());
        let space = MixedSpace::new(
            [
                SpaceKind::LagrangeP2Tri,
                SpaceKind::LagrangeP2Tri,
                SpaceKind::LagrangeP1Tri,
            ]
            .map(|k| Arc::new(FunctionSpace::new(k, mesh.clone()).unwrap())),
        )
        .unwrap();
        let err = assemble_limit_membrane(
            &chart,
            Lame::new(1.0, 1.0).unwrap(),
            [1.0; 3],
            &space,
            &default_surface_rule(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::NotElliptic { .. }));
    }

    #[test]
    fn invalid_penalty_rejected() {
        let space = plane_space(
            [
                SpaceKind::LagrangeP2Tri,
                SpaceKind::LagrangeP2Tri,
                SpaceKind::ReducedHct,
            ],
            1,
        );
        let err = assemble_limit_flexural_penalized(
            &BuiltinChart::plane(),
            Lame::new(1.0, 1.0).unwrap(),
            [1.0; 3],
            &space,
            &default_surface_rule(),
            0.0,
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidPenalty(_)));
    }

    #[test]
    fn volume_system_is_symmetric_and_rigid_free_on_plane() {
        let mesh = structured_tri(ParamRect::unit(), 1, 1, BoundarySpec::EntireBoundary).unwrap();
        let prism = Arc::new(extrude(&mesh, 2).unwrap());
        let comp = Arc::new(FunctionSpace::new_prism(SpaceKind::LagrangeP2Prism, prism).unwrap());
        let space = MixedSpace::new([comp.clone(), comp.clone(), comp]).unwrap();
        let sys = assemble_3d_scaled(
            &BuiltinChart::plane(),
            Lame::new(1.0, 1.0).unwrap(),
            1.0,
            [0.0; 3],
            [0.0; 3],
            &space,
            &default_prism_rule(),
        )
        .unwrap()
        .system;
        assert!(sys.matrix.asymmetry() < 1e-13);
        // a translation carries no strain energy
        let mut u = vec![0.0; space.ndof];
        let ones = vec![1.0; space.comps[1].ndof];
        u[space.offsets[1]..space.offsets[2]].copy_from_slice(&space.comps[1].from_nodal(&ones));
        assert!(sys.matrix.quad_form(&u, &u).abs() < 1e-12);
        assert!(sys.rhs.iter().all(|&v| v == 0.0));
    }
}
