//! Finite-element spaces on triangle and prism meshes with clamped-dof
//! bookkeeping.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::hct::{HctElement, ScalarJet};
use crate::error::{Error, Result};
use crate::mesh::{BoundarySpec, EdgeTag, PrismMesh, TriMesh};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpaceKind {
    LagrangeP1Tri,
    LagrangeP2Tri,
    ReducedHct,
    LagrangeP1Prism,
    LagrangeP2Prism,
}

impl SpaceKind {
    pub fn is_prism(self) -> bool {
        matches!(self, Self::LagrangeP1Prism | Self::LagrangeP2Prism)
    }

    pub fn is_c1(self) -> bool {
        self == Self::ReducedHct
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::LagrangeP1Tri => "P1",
            Self::LagrangeP2Tri => "P2",
            Self::ReducedHct => "HCT",
            Self::LagrangeP1Prism => "P1xP1",
            Self::LagrangeP2Prism => "P2xP2",
        }
    }
}

/// Value and gradient of a basis function on a prism, with `grad[2]` the
/// derivative in the scaled transverse coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PrismJet {
    pub value: f64,
    pub grad: [f64; 3],
}

#[derive(Debug, Clone)]
pub struct FunctionSpace {
    pub kind: SpaceKind,
    pub mesh: Arc<TriMesh>,
    pub prism: Option<Arc<PrismMesh>>,
    pub cell_dofs: Vec<Vec<usize>>,
    pub ndof: usize,
    pub constrained: Vec<bool>,
    /// dofs of the triangle-level space (P1 or P2) per plane, prism spaces only
    plane_ndof: usize,
    tri_points: Vec<[f64; 2]>,
    hct: Vec<HctElement>,
}

impl FunctionSpace {
    pub fn new(kind: SpaceKind, mesh: Arc<TriMesh>) -> Result<Self> {
        if kind.is_prism() {
            return Err(Error::WrongTransverseSpace(format!(
                "{} needs a prism mesh",
                kind.name()
            )));
        }
        let nv = mesh.vertices.len();
        let (cell_dofs, ndof, hct): (Vec<Vec<usize>>, usize, Vec<HctElement>) = match kind {
            SpaceKind::LagrangeP1Tri => (mesh.triangles.iter().map(|t| t.to_vec()).collect(), nv, Vec::new()),
            SpaceKind::LagrangeP2Tri => {
                let table = mesh.edge_table();
                let dofs = mesh
                    .triangles
                    .iter()
                    .zip(&table.tri_edges)
                    .map(|(t, e)| vec![t[0], t[1], t[2], nv + e[0], nv + e[1], nv + e[2]])
                    .collect();
                (dofs, nv + table.edges.len(), Vec::new())
            }
            SpaceKind::ReducedHct => {
                let dofs = mesh
                    .triangles
                    .iter()
                    .map(|t| t.iter().flat_map(|&v| [3 * v, 3 * v + 1, 3 * v + 2]).collect())
                    .collect();
                let elements = (0..mesh.triangles.len())
                    .map(|t| HctElement::new(mesh.corners(t)))
                    .collect();
                (dofs, 3 * nv, elements)
            }
            _ => unreachable!(),
        };
        let tri_points = tri_level_points(&mesh, &cell_dofs, kind);
        Ok(Self {
            kind,
            mesh,
            prism: None,
            tri_points,
            cell_dofs,
            ndof,
            constrained: vec![false; ndof],
            plane_ndof: 0,
            hct,
        })
    }

    pub fn new_prism(kind: SpaceKind, prism: Arc<PrismMesh>) -> Result<Self> {
        let base_kind = match kind {
            SpaceKind::LagrangeP1Prism => SpaceKind::LagrangeP1Tri,
            SpaceKind::LagrangeP2Prism => SpaceKind::LagrangeP2Tri,
            other => {
                return Err(Error::WrongTransverseSpace(format!(
                    "{} is not a prism space",
                    other.name()
                )))
            }
        };
        let mesh = Arc::new(prism.base.clone());
        let base = Self::new(base_kind, mesh.clone())?;
        let nt = mesh.triangles.len();
        // P1: one node plane per layer interface; P2: also one mid-layer plane
        let per_layer = if kind == SpaceKind::LagrangeP1Prism { 1 } else { 2 };
        let planes = per_layer * prism.layers + 1;
        // Column basis: the plane-0 dof of every column carries the function
        // that is constant in x3 over the whole column, the other planes carry
        // the nodal functions. Cells above the bottom layer therefore also list
        // the plane-0 dofs of their columns first.
        let mut cell_dofs = Vec::with_capacity(nt * prism.layers);
        for k in 0..prism.layers {
            for t in 0..nt {
                let mut dofs = Vec::with_capacity(base.cell_dofs[t].len() * (per_layer + 2));
                if k > 0 {
                    dofs.extend_from_slice(&base.cell_dofs[t]);
                }
                for q in 0..=per_layer {
                    let plane = per_layer * k + q;
                    dofs.extend(base.cell_dofs[t].iter().map(|d| plane * base.ndof + d));
                }
                cell_dofs.push(dofs);
            }
        }
        let ndof = planes * base.ndof;
        Ok(Self {
            kind,
            mesh,
            prism: Some(prism),
            cell_dofs,
            ndof,
            constrained: vec![false; ndof],
            plane_ndof: base.ndof,
            tri_points: base.tri_points,
            hct: Vec::new(),
        })
    }

    pub fn n_cells(&self) -> usize {
        self.cell_dofs.len()
    }

    pub fn hct_element(&self, t: usize) -> Option<&HctElement> {
        self.hct.get(t)
    }

    pub fn same_mesh(&self, other: &FunctionSpace) -> bool {
        Arc::ptr_eq(&self.mesh, &other.mesh) || *self.mesh == *other.mesh
    }

    /// Basis functions of triangle `t` at the physical point `y`. For the HCT
    /// space `sub` selects the subtriangle polynomial.
    pub fn eval_tri(&self, t: usize, y: [f64; 2], sub: Option<usize>) -> Vec<ScalarJet> {
        match self.kind {
            SpaceKind::ReducedHct => self.hct[t].eval(y, sub).to_vec(),
            SpaceKind::LagrangeP1Tri | SpaceKind::LagrangeP1Prism => {
                let (l, g) = bary_with_gradients(&self.mesh, t, y);
                (0..3)
                    .map(|k| ScalarJet {
                        value: l[k],
                        grad: g[k],
                        hess: [[0.0; 2]; 2],
                    })
                    .collect()
            }
            SpaceKind::LagrangeP2Tri | SpaceKind::LagrangeP2Prism => {
                let (l, g) = bary_with_gradients(&self.mesh, t, y);
                let mut out = Vec::with_capacity(6);
                for k in 0..3 {
                    let c = 4.0 * l[k] - 1.0;
                    out.push(ScalarJet {
                        value: l[k] * (2.0 * l[k] - 1.0),
                        grad: [c * g[k][0], c * g[k][1]],
                        hess: outer(4.0, g[k], g[k]),
                    });
                }
                for k in 0..3 {
                    let m = (k + 1) % 3;
                    let h1 = outer(4.0, g[k], g[m]);
                    out.push(ScalarJet {
                        value: 4.0 * l[k] * l[m],
                        grad: [
                            4.0 * (l[k] * g[m][0] + l[m] * g[k][0]),
                            4.0 * (l[k] * g[m][1] + l[m] * g[k][1]),
                        ],
                        hess: [
                            [2.0 * h1[0][0], h1[0][1] + h1[1][0]],
                            [h1[0][1] + h1[1][0], 2.0 * h1[1][1]],
                        ],
                    });
                }
                out
            }
        }
    }

    /// Basis functions of prism cell `c` at `(y, x3)`.
    pub fn eval_prism(&self, c: usize, y: [f64; 2], x3: f64) -> Vec<PrismJet> {
        let prism = self.prism.as_ref().expect("prism space");
        let nt = self.mesh.triangles.len();
        let (t, k) = (c % nt, c / nt);
        let (z0, z1) = prism.layer_bounds(k);
        let zeta = (2.0 * x3 - z0 - z1) / (z1 - z0);
        let dzeta = 2.0 / (z1 - z0);
        let line: Vec<(f64, f64)> = if self.kind == SpaceKind::LagrangeP1Prism {
            vec![(0.5 * (1.0 - zeta), -0.5 * dzeta), (0.5 * (1.0 + zeta), 0.5 * dzeta)]
        } else {
            vec![
                (0.5 * zeta * (zeta - 1.0), (zeta - 0.5) * dzeta),
                (1.0 - zeta * zeta, -2.0 * zeta * dzeta),
                (0.5 * zeta * (zeta + 1.0), (zeta + 0.5) * dzeta),
            ]
        };
        let tri = self.eval_tri(t, y, None);
        let mut out = Vec::with_capacity(tri.len() * (line.len() + 1));
        let column = tri.iter().map(|b| PrismJet {
            value: b.value,
            grad: [b.grad[0], b.grad[1], 0.0],
        });
        if k == 0 {
            out.extend(column);
        } else {
            out.extend(column);
            out.extend(tri.iter().map(|b| PrismJet {
                value: b.value * line[0].0,
                grad: [b.grad[0] * line[0].0, b.grad[1] * line[0].0, b.value * line[0].1],
            }));
        }
        for (lv, ld) in &line[1..] {
            for b in &tri {
                out.push(PrismJet {
                    value: b.value * lv,
                    grad: [b.grad[0] * lv, b.grad[1] * lv, b.value * ld],
                });
            }
        }
        out
    }

    /// Nodal values of a prism field from its column-basis coefficients.
    pub fn to_nodal(&self, coefs: &[f64]) -> Vec<f64> {
        if !self.kind.is_prism() {
            return coefs.to_vec();
        }
        let n = self.plane_ndof;
        let mut out = coefs.to_vec();
        for (i, v) in out.iter_mut().enumerate().skip(n) {
            *v += coefs[i % n];
        }
        out
    }

    /// Inverse of [`Self::to_nodal`].
    pub fn from_nodal(&self, nodal: &[f64]) -> Vec<f64> {
        if !self.kind.is_prism() {
            return nodal.to_vec();
        }
        let n = self.plane_ndof;
        let mut out = nodal.to_vec();
        for (i, v) in out.iter_mut().enumerate().skip(n) {
            *v -= nodal[i % n];
        }
        out
    }

    pub fn plane_ndof(&self) -> usize {
        self.plane_ndof
    }

    /// Position `(y, x3)` of a Lagrange dof (`x3 = 0` for surface spaces).
    /// HCT dofs report their vertex.
    pub fn dof_point(&self, dof: usize) -> ([f64; 2], f64) {
        match self.kind {
            SpaceKind::ReducedHct => (self.mesh.vertices[dof / 3], 0.0),
            SpaceKind::LagrangeP1Tri | SpaceKind::LagrangeP2Tri => (self.tri_dof_point(dof), 0.0),
            SpaceKind::LagrangeP1Prism | SpaceKind::LagrangeP2Prism => {
                let prism = self.prism.as_ref().expect("prism space");
                let per_layer = if self.kind == SpaceKind::LagrangeP1Prism { 1 } else { 2 };
                let plane = dof / self.plane_ndof;
                let x3 = -1.0 + 2.0 * plane as f64 / (per_layer * prism.layers) as f64;
                let local = dof % self.plane_ndof;
                (self.tri_dof_point(local), x3)
            }
        }
    }

    fn tri_dof_point(&self, dof: usize) -> [f64; 2] {
        self.tri_points[dof]
    }

    /// Marks the dofs that realize the clamped condition on the boundary
    /// part selected by `spec` (sides) or, for meshes without side labels,
    /// by the `Gamma0` edge tags.
    pub fn apply_clamping(&mut self, spec: &BoundarySpec) {
        for d in clamped_dofs(self, spec) {
            self.constrained[d] = true;
        }
    }

    pub fn clamped(mut self, spec: &BoundarySpec) -> Self {
        self.apply_clamping(spec);
        self
    }

    pub fn n_constrained(&self) -> usize {
        self.constrained.iter().filter(|&&c| c).count()
    }
}

/// Dofs set to zero by clamping on the selected boundary part.
pub fn clamped_dofs(space: &FunctionSpace, spec: &BoundarySpec) -> Vec<usize> {
    let mesh = &space.mesh;
    let nv = mesh.vertices.len();
    let clamped_edges: Vec<[usize; 2]> = mesh
        .boundary_edges
        .iter()
        .filter(|e| match e.side {
            Some(side) => spec.clamps(side),
            None => e.tag == EdgeTag::Gamma0,
        })
        .map(|e| [e.v[0].min(e.v[1]), e.v[0].max(e.v[1])])
        .collect();
    let mut vertex = vec![false; nv];
    for e in &clamped_edges {
        vertex[e[0]] = true;
        vertex[e[1]] = true;
    }
    // triangle-level dofs (P1/P2 numbering) on clamped edges
    let mut tri_level = vec![
        false;
        if space.kind.is_prism() {
            space.plane_ndof
        } else {
            space.ndof
        }
    ];
    match space.kind {
        SpaceKind::ReducedHct => {
            let mut out = Vec::new();
            for (v, &on) in vertex.iter().enumerate() {
                if on {
                    out.extend([3 * v, 3 * v + 1, 3 * v + 2]);
                }
            }
            return out;
        }
        _ => {
            for (v, &on) in vertex.iter().enumerate() {
                tri_level[v] |= on;
            }
            if tri_level.len() > nv {
                let table = mesh.edge_table();
                let keyset: std::collections::HashSet<[usize; 2]> = clamped_edges.iter().copied().collect();
                for (i, e) in table.edges.iter().enumerate() {
                    if keyset.contains(e) {
                        tri_level[nv + i] = true;
                    }
                }
            }
        }
    }
    if space.kind.is_prism() {
        let planes = space.ndof / space.plane_ndof;
        (0..planes)
            .flat_map(|p| {
                tri_level
                    .iter()
                    .enumerate()
                    .filter(|(_, &on)| on)
                    .map(move |(d, _)| p * space.plane_ndof + d)
            })
            .collect()
    } else {
        tri_level
            .iter()
            .enumerate()
            .filter(|(_, &on)| on)
            .map(|(d, _)| d)
            .collect()
    }
}

/// Node positions of the triangle-level Lagrange dofs (vertices for HCT).
fn tri_level_points(mesh: &TriMesh, cell_dofs: &[Vec<usize>], kind: SpaceKind) -> Vec<[f64; 2]> {
    if kind == SpaceKind::ReducedHct {
        return Vec::new();
    }
    let mut points = mesh.vertices.clone();
    for (t, dofs) in cell_dofs.iter().enumerate() {
        let tri = mesh.triangles[t];
        for (pos, &d) in dofs.iter().enumerate().skip(3) {
            if points.len() <= d {
                points.resize(d + 1, [0.0; 2]);
            }
            let (a, b) = (mesh.vertices[tri[pos - 3]], mesh.vertices[tri[(pos - 2) % 3]]);
            points[d] = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
        }
    }
    points
}

fn outer(s: f64, a: [f64; 2], b: [f64; 2]) -> [[f64; 2]; 2] {
    [[s * a[0] * b[0], s * a[0] * b[1]], [s * a[1] * b[0], s * a[1] * b[1]]]
}

fn bary_with_gradients(mesh: &TriMesh, t: usize, y: [f64; 2]) -> ([f64; 3], [[f64; 2]; 3]) {
    let [a, b, c] = mesh.corners(t);
    let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
    let g1 = [(c[1] - a[1]) / det, -(c[0] - a[0]) / det];
    let g2 = [-(b[1] - a[1]) / det, (b[0] - a[0]) / det];
    let g0 = [-g1[0] - g2[0], -g1[1] - g2[1]];
    (mesh.barycentric(t, y), [g0, g1, g2])
}

/// Three scalar spaces on one surface mesh, numbered `[eta1 | eta2 | eta3]`.
#[derive(Debug, Clone)]
pub struct MixedSpace {
    pub comps: [Arc<FunctionSpace>; 3],
    pub offsets: [usize; 3],
    pub ndof: usize,
}

impl MixedSpace {
    pub fn new(comps: [Arc<FunctionSpace>; 3]) -> Result<Self> {
        if !comps[0].same_mesh(&comps[1]) || !comps[0].same_mesh(&comps[2]) {
            return Err(Error::SpaceMeshMismatch);
        }
        if comps[0].kind.is_prism() != comps[2].kind.is_prism() || comps[0].kind.is_prism() != comps[1].kind.is_prism()
        {
            return Err(Error::SpaceMeshMismatch);
        }
        let offsets = [0, comps[0].ndof, comps[0].ndof + comps[1].ndof];
        let ndof = offsets[2] + comps[2].ndof;
        Ok(Self { comps, offsets, ndof })
    }

    pub fn constrained(&self) -> Vec<bool> {
        let mut out = Vec::with_capacity(self.ndof);
        for c in &self.comps {
            out.extend_from_slice(&c.constrained);
        }
        out
    }

    pub fn n_cells(&self) -> usize {
        self.comps[0].n_cells()
    }

    /// Global dof list of a cell, components concatenated.
    pub fn cell_dofs(&self, cell: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for (c, space) in self.comps.iter().enumerate() {
            out.extend(space.cell_dofs[cell].iter().map(|d| self.offsets[c] + d));
        }
        out
    }

    pub fn mesh(&self) -> &Arc<TriMesh> {
        &self.comps[0].mesh
    }

    pub fn uses_hct(&self) -> bool {
        self.comps.iter().any(|c| c.kind == SpaceKind::ReducedHct)
    }
}
