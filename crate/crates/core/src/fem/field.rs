//! Discrete fields and their evaluation as Cartesian vector fields on the
//! middle surface.

use super::hct::ScalarJet;
use super::space::{MixedSpace, SpaceKind};
use crate::error::{Error, Result};
use crate::geometry::{surface_at, volume_from_surface, Chart, SurfaceGeometry, Vec3};
use crate::kinematics::SurfaceDisplacementJet;
use crate::mesh::TriMesh;

/// Coefficients of a vector field in a mixed space. For prism spaces the
/// coefficients refer to the column basis of [`super::FunctionSpace`].
#[derive(Debug, Clone)]
pub struct DiscreteField {
    pub space: MixedSpace,
    pub coefs: Vec<f64>,
}

/// Tangential part `T = u_a a^a` and normal part `N = u_3 a_3` of a surface
/// vector field, with derivatives in the curvilinear coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CartesianJet {
    pub tangential: Vec3,
    pub d_tangential: [Vec3; 2],
    pub normal: Vec3,
    pub d_normal: [Vec3; 2],
    pub dd_normal: Option<[[Vec3; 2]; 2]>,
}

impl CartesianJet {
    pub fn value(&self) -> Vec3 {
        self.tangential + self.normal
    }

    /// Splits a full field `u` with derivatives into tangential and normal parts.
    pub fn split(geom: &SurfaceGeometry, u: Vec3, du: [Vec3; 2]) -> Self {
        let a3 = geom.base[2];
        let u3 = u.dot(&a3);
        let normal = u3 * a3;
        let mut d_normal = [Vec3::zeros(); 2];
        let mut d_tangential = [Vec3::zeros(); 2];
        for b in 0..2 {
            let du3 = du[b].dot(&a3) + u.dot(&geom.d_normal[b]);
            d_normal[b] = du3 * a3 + u3 * geom.d_normal[b];
            d_tangential[b] = du[b] - d_normal[b];
        }
        Self {
            tangential: u - normal,
            d_tangential,
            normal,
            d_normal,
            dd_normal: None,
        }
    }
}

/// Cartesian jet of `eta_i a^i` from covariant components and derivatives.
pub fn cartesian_from_surface_jet(geom: &SurfaceGeometry, jet: &SurfaceDisplacementJet) -> CartesianJet {
    let mut out = CartesianJet::default();
    for a in 0..2 {
        out.tangential += jet.eta[a] * geom.dual[a];
        for b in 0..2 {
            out.d_tangential[b] += jet.d_eta[a][b] * geom.dual[a] + jet.eta[a] * geom.d_dual(a, b);
        }
    }
    let a3 = geom.base[2];
    out.normal = jet.eta[2] * a3;
    for b in 0..2 {
        out.d_normal[b] = jet.d_eta[2][b] * a3 + jet.eta[2] * geom.d_normal[b];
    }
    out.dd_normal = jet.dd_eta3.map(|h| {
        let mut dd = [[Vec3::zeros(); 2]; 2];
        for b in 0..2 {
            for c in 0..2 {
                dd[b][c] = h[b][c] * a3
                    + jet.d_eta[2][b] * geom.d_normal[c]
                    + jet.d_eta[2][c] * geom.d_normal[b]
                    + jet.eta[2] * geom.dd_normal[b][c];
            }
        }
        dd
    });
    out
}

/// Triangle containing `y` in `mesh`, or `MeshMismatch`.
pub fn locate(mesh: &TriMesh, y: [f64; 2]) -> Result<usize> {
    mesh.locate(y)
        .map(|(t, _)| t)
        .ok_or_else(|| Error::MeshMismatch(format!("point ({}, {}) outside the mesh", y[0], y[1])))
}

impl DiscreteField {
    pub fn new(space: MixedSpace, coefs: Vec<f64>) -> Result<Self> {
        if coefs.len() != space.ndof {
            return Err(Error::MeshMismatch(format!(
                "{} coefficients for {} dofs",
                coefs.len(),
                space.ndof
            )));
        }
        Ok(Self { space, coefs })
    }

    pub fn component(&self, c: usize) -> &[f64] {
        let start = self.space.offsets[c];
        &self.coefs[start..start + self.space.comps[c].ndof]
    }

    /// Covariant components with derivatives at `y` on triangle `t`. `sub`
    /// picks the HCT subtriangle; `None` selects it from `y`.
    pub fn surface_jet_in(&self, t: usize, y: [f64; 2], sub: Option<usize>) -> SurfaceDisplacementJet {
        let mut jet = SurfaceDisplacementJet::default();
        let mut hess = [[0.0; 2]; 2];
        let mut has_hess = false;
        for c in 0..3 {
            let space = &self.space.comps[c];
            let basis: Vec<ScalarJet> = space.eval_tri(t, y, sub);
            let coefs = self.component(c);
            for (b, &d) in basis.iter().zip(&space.cell_dofs[t]) {
                let w = coefs[d];
                jet.eta[c] += w * b.value;
                jet.d_eta[c][0] += w * b.grad[0];
                jet.d_eta[c][1] += w * b.grad[1];
                if c == 2 {
                    for i in 0..2 {
                        for j in 0..2 {
                            hess[i][j] += w * b.hess[i][j];
                        }
                    }
                }
            }
            if c == 2 {
                has_hess = space.kind != SpaceKind::LagrangeP1Tri;
            }
        }
        jet.dd_eta3 = has_hess.then_some(hess);
        jet
    }

    pub fn surface_jet(&self, y: [f64; 2]) -> Result<SurfaceDisplacementJet> {
        let t = locate(self.space.mesh(), y)?;
        Ok(self.surface_jet_in(t, y, None))
    }

    /// Values `(u_1, u_2, u_3)` and the `y`-gradients of a prism field at `(y, x3)`.
    pub fn volume_values(&self, t: usize, y: [f64; 2], x3: f64) -> Result<([f64; 3], [[f64; 3]; 3])> {
        let prism = self.space.comps[0]
            .prism
            .as_ref()
            .ok_or_else(|| Error::MeshMismatch("not a prism field".into()))?;
        let nt = prism.base.triangles.len();
        let k = (((x3 + 1.0) * 0.5 * prism.layers as f64).floor() as usize).min(prism.layers - 1);
        let cell = k * nt + t;
        let mut v = [0.0; 3];
        let mut dv = [[0.0; 3]; 3];
        for c in 0..3 {
            let space = &self.space.comps[c];
            let coefs = self.component(c);
            for (b, &d) in space.eval_prism(cell, y, x3).iter().zip(&space.cell_dofs[cell]) {
                v[c] += coefs[d] * b.value;
                for a in 0..3 {
                    dv[c][a] += coefs[d] * b.grad[a];
                }
            }
        }
        Ok((v, dv))
    }
}

/// A vector field on the middle surface that can be compared in the
/// Cartesian norms of the error module.
pub trait SurfaceVectorField: Sync {
    /// Mesh whose cells bound the smoothness of the field.
    fn mesh(&self) -> &TriMesh;
    fn cartesian(&self, geom: &SurfaceGeometry) -> Result<CartesianJet>;
}

impl SurfaceVectorField for DiscreteField {
    fn mesh(&self) -> &TriMesh {
        self.space.mesh()
    }

    fn cartesian(&self, geom: &SurfaceGeometry) -> Result<CartesianJet> {
        let jet = self.surface_jet(geom.y)?;
        Ok(cartesian_from_surface_jet(geom, &jet))
    }
}

/// Through-thickness average `(1/2) int_{-1}^{1} u_i(eps) g^i(eps) dx3` of a
/// scaled 3D solution, evaluated pointwise by Gauss quadrature per layer.
pub struct AveragedField<'a> {
    pub field: &'a DiscreteField,
    pub chart: &'a dyn Chart,
    pub eps: f64,
    line: (Vec<f64>, Vec<f64>),
}

impl<'a> AveragedField<'a> {
    pub fn new(field: &'a DiscreteField, chart: &'a dyn Chart, eps: f64) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::ZeroThickness(eps));
        }
        if field.space.comps[0].prism.is_none() {
            return Err(Error::MeshMismatch("averaging needs a prism field".into()));
        }
        Ok(Self {
            field,
            chart,
            eps,
            line: super::quadrature::gauss_legendre(3),
        })
    }

    /// Average and its `y`-derivatives, in Cartesian components.
    pub fn average(&self, geom: &SurfaceGeometry) -> Result<(Vec3, [Vec3; 2])> {
        let prism = self.field.space.comps[0].prism.as_ref().expect("checked in new");
        let t = locate(&prism.base, geom.y)?;
        let mut u = Vec3::zeros();
        let mut du = [Vec3::zeros(); 2];
        for k in 0..prism.layers {
            let (z0, z1) = prism.layer_bounds(k);
            let (mid, half) = (0.5 * (z0 + z1), 0.5 * (z1 - z0));
            for (z, w) in self.line.0.iter().zip(&self.line.1) {
                let x3 = mid + half * z;
                let vol = volume_from_surface(geom, x3, self.eps)?;
                let (v, dv) = self.field.volume_values(t, geom.y, x3)?;
                let w = 0.5 * w * half;
                for i in 0..3 {
                    u += w * v[i] * vol.g_dual[i];
                    for a in 0..2 {
                        // d_a g^i = -Gamma^i_{ap} g^p
                        let mut dgi = Vec3::zeros();
                        for p in 0..3 {
                            dgi -= vol.christoffel3[i][a][p] * vol.g_dual[p];
                        }
                        du[a] += w * (dv[i][a] * vol.g_dual[i] + v[i] * dgi);
                    }
                }
            }
        }
        Ok((u, du))
    }

    /// Averages at the base-mesh vertices, in Cartesian components.
    pub fn vertex_values(&self) -> Result<Vec<Vec3>> {
        let prism = self.field.space.comps[0].prism.as_ref().expect("checked in new");
        prism
            .base
            .vertices
            .iter()
            .map(|&y| {
                let geom = surface_at(self.chart, y)?;
                Ok(self.average(&geom)?.0)
            })
            .collect()
    }
}

impl SurfaceVectorField for AveragedField<'_> {
    fn mesh(&self) -> &TriMesh {
        &self.field.space.comps[0].prism.as_ref().expect("checked in new").base
    }

    fn cartesian(&self, geom: &SurfaceGeometry) -> Result<CartesianJet> {
        let (u, du) = self.average(geom)?;
        Ok(CartesianJet::split(geom, u, du))
    }
}
