//! Structured triangulations of the parameter rectangle and layered prism
//! meshes of `omega x (-1, 1)`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ParamRect;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `y2 = y2min`
    Bottom,
    /// `y1 = y1max`
    Right,
    /// `y2 = y2max`
    Top,
    /// `y1 = y1min`
    Left,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "sides", rename_all = "snake_case")]
pub enum BoundarySpec {
    EntireBoundary,
    EdgeSet(Vec<Side>),
}

impl BoundarySpec {
    pub fn clamps(&self, side: Side) -> bool {
        match self {
            Self::EntireBoundary => true,
            Self::EdgeSet(sides) => sides.contains(&side),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeTag {
    Gamma0,
    FreeLateral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FaceTag {
    Gamma0,
    GammaPlus,
    GammaMinus,
    FreeLateral,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryEdge {
    pub v: [usize; 2],
    pub side: Option<Side>,
    pub tag: EdgeTag,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridInfo {
    pub rect: ParamRect,
    pub n1: usize,
    pub n2: usize,
    pub boundary: BoundarySpec,
}

/// Triangle mesh of the parameter domain. Triangles are counterclockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    pub vertices: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<BoundaryEdge>,
    pub grid: Option<GridInfo>,
}

/// Unique edges, with `tri_edges[t][k]` the edge joining local vertices `k` and `k + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeTable {
    pub edges: Vec<[usize; 2]>,
    pub tri_edges: Vec<[usize; 3]>,
    /// Triangles adjacent to each edge (one for boundary edges).
    pub neighbors: Vec<Vec<usize>>,
}

pub fn structured_tri(rect: ParamRect, n1: usize, n2: usize, boundary: BoundarySpec) -> Result<TriMesh> {
    if n1 == 0 || n2 == 0 || !(rect.width() > 0.0) || !(rect.height() > 0.0) {
        return Err(Error::InvalidResolution { n1, n2 });
    }
    let idx = |i: usize, j: usize| j * (n1 + 1) + i;
    let mut vertices = Vec::with_capacity((n1 + 1) * (n2 + 1));
    for j in 0..=n2 {
        for i in 0..=n1 {
            vertices.push(rect.lerp([i as f64 / n1 as f64, j as f64 / n2 as f64]));
        }
    }
    // snap the far sides exactly onto the rectangle
    for j in 0..=n2 {
        vertices[idx(n1, j)][0] = rect.max[0];
    }
    for i in 0..=n1 {
        vertices[idx(i, n2)][1] = rect.max[1];
    }

    let mut triangles = Vec::with_capacity(2 * n1 * n2);
    for j in 0..n2 {
        for i in 0..n1 {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }

    let tag = |side: Side| {
        if boundary.clamps(side) {
            EdgeTag::Gamma0
        } else {
            EdgeTag::FreeLateral
        }
    };
    let mut boundary_edges = Vec::with_capacity(2 * (n1 + n2));
    // counterclockwise loop
    for i in 0..n1 {
        boundary_edges.push(BoundaryEdge {
            v: [idx(i, 0), idx(i + 1, 0)],
            side: Some(Side::Bottom),
            tag: tag(Side::Bottom),
        });
    }
    for j in 0..n2 {
        boundary_edges.push(BoundaryEdge {
            v: [idx(n1, j), idx(n1, j + 1)],
            side: Some(Side::Right),
            tag: tag(Side::Right),
        });
    }
    for i in (0..n1).rev() {
        boundary_edges.push(BoundaryEdge {
            v: [idx(i + 1, n2), idx(i, n2)],
            side: Some(Side::Top),
            tag: tag(Side::Top),
        });
    }
    for j in (0..n2).rev() {
        boundary_edges.push(BoundaryEdge {
            v: [idx(0, j + 1), idx(0, j)],
            side: Some(Side::Left),
            tag: tag(Side::Left),
        });
    }

    Ok(TriMesh {
        vertices,
        triangles,
        boundary_edges,
        grid: Some(GridInfo { rect, n1, n2, boundary }),
    })
}

impl TriMesh {
    pub fn signed_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t].map(|v| self.vertices[v]);
        0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.signed_area(t)).sum()
    }

    pub fn corners(&self, t: usize) -> [[f64; 2]; 3] {
        self.triangles[t].map(|v| self.vertices[v])
    }

    pub fn min_angle(&self) -> f64 {
        let mut best = f64::INFINITY;
        for t in 0..self.triangles.len() {
            let p = self.corners(t);
            for k in 0..3 {
                let (a, b, c) = (p[k], p[(k + 1) % 3], p[(k + 2) % 3]);
                let u = [b[0] - a[0], b[1] - a[1]];
                let v = [c[0] - a[0], c[1] - a[1]];
                let cos = (u[0] * v[0] + u[1] * v[1]) / (u[0].hypot(u[1]) * v[0].hypot(v[1]));
                best = best.min(cos.clamp(-1.0, 1.0).acos());
            }
        }
        best
    }

    pub fn boundary_length(&self) -> f64 {
        self.boundary_edges
            .iter()
            .map(|e| {
                let (a, b) = (self.vertices[e.v[0]], self.vertices[e.v[1]]);
                (b[0] - a[0]).hypot(b[1] - a[1])
            })
            .sum()
    }

    pub fn edge_table(&self) -> EdgeTable {
        let mut lookup: HashMap<[usize; 2], usize> = HashMap::new();
        let mut edges = Vec::new();
        let mut neighbors: Vec<Vec<usize>> = Vec::new();
        let mut tri_edges = Vec::with_capacity(self.triangles.len());
        for (t, tri) in self.triangles.iter().enumerate() {
            let mut local = [0; 3];
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let key = [a.min(b), a.max(b)];
                let e = *lookup.entry(key).or_insert_with(|| {
                    edges.push(key);
                    neighbors.push(Vec::new());
                    edges.len() - 1
                });
                neighbors[e].push(t);
                local[k] = e;
            }
            tri_edges.push(local);
        }
        EdgeTable {
            edges,
            tri_edges,
            neighbors,
        }
    }

    /// Vertices lying on a `Gamma0` edge.
    pub fn clamped_vertices(&self) -> Vec<bool> {
        let mut flags = vec![false; self.vertices.len()];
        for e in &self.boundary_edges {
            if e.tag == EdgeTag::Gamma0 {
                flags[e.v[0]] = true;
                flags[e.v[1]] = true;
            }
        }
        flags
    }

    /// Edge keys (sorted vertex pairs) tagged `Gamma0`.
    pub fn clamped_edge_keys(&self) -> Vec<[usize; 2]> {
        self.boundary_edges
            .iter()
            .filter(|e| e.tag == EdgeTag::Gamma0)
            .map(|e| [e.v[0].min(e.v[1]), e.v[0].max(e.v[1])])
            .collect()
    }

    /// Triangle containing `y` and its barycentric coordinates. Uses the grid
    /// structure when available and a linear scan otherwise.
    pub fn locate(&self, y: [f64; 2]) -> Option<(usize, [f64; 3])> {
        if let Some(g) = &self.grid {
            if !g.rect.contains(y) {
                return None;
            }
            let s = ((y[0] - g.rect.min[0]) / g.rect.width() * g.n1 as f64).clamp(0.0, g.n1 as f64);
            let r = ((y[1] - g.rect.min[1]) / g.rect.height() * g.n2 as f64).clamp(0.0, g.n2 as f64);
            let i = (s.floor() as usize).min(g.n1 - 1);
            let j = (r.floor() as usize).min(g.n2 - 1);
            let lower = (r - j as f64) <= (s - i as f64);
            let t = 2 * (j * g.n1 + i) + usize::from(!lower);
            return Some((t, self.barycentric(t, y)));
        }
        (0..self.triangles.len()).find_map(|t| {
            let l = self.barycentric(t, y);
            (l.iter().all(|&v| v >= -1e-12)).then_some((t, l))
        })
    }

    pub fn barycentric(&self, t: usize, y: [f64; 2]) -> [f64; 3] {
        let [a, b, c] = self.corners(t);
        let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
        let l1 = ((y[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (y[1] - a[1])) / det;
        let l2 = ((b[0] - a[0]) * (y[1] - a[1]) - (y[0] - a[0]) * (b[1] - a[1])) / det;
        [1.0 - l1 - l2, l1, l2]
    }

    /// Uniform red refinement: every triangle splits into four similar ones.
    pub fn refine(&self) -> TriMesh {
        if let Some(g) = &self.grid {
            // red refinement of the diagonal-split grid is the grid at twice the resolution
            return structured_tri(g.rect, 2 * g.n1, 2 * g.n2, g.boundary.clone())
                .expect("doubling a valid resolution stays valid");
        }
        let table = self.edge_table();
        let nv = self.vertices.len();
        let mut vertices = self.vertices.clone();
        for e in &table.edges {
            let (a, b) = (self.vertices[e[0]], self.vertices[e[1]]);
            vertices.push([0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]);
        }
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for (t, tri) in self.triangles.iter().enumerate() {
            let m = table.tri_edges[t].map(|e| nv + e);
            triangles.push([tri[0], m[0], m[2]]);
            triangles.push([m[0], tri[1], m[1]]);
            triangles.push([m[2], m[1], tri[2]]);
            triangles.push([m[0], m[1], m[2]]);
        }
        let lookup: HashMap<[usize; 2], usize> = table.edges.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let mut boundary_edges = Vec::with_capacity(2 * self.boundary_edges.len());
        for e in &self.boundary_edges {
            let mid = nv + lookup[&[e.v[0].min(e.v[1]), e.v[0].max(e.v[1])]];
            boundary_edges.push(BoundaryEdge { v: [e.v[0], mid], ..*e });
            boundary_edges.push(BoundaryEdge { v: [mid, e.v[1]], ..*e });
        }
        TriMesh {
            vertices,
            triangles,
            boundary_edges,
            grid: None,
        }
    }
}

/// Quadrilateral or triangular boundary face of a prism mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct PrismFace {
    pub cell: usize,
    pub nodes: Vec<usize>,
    pub tag: FaceTag,
}

/// Base triangulation extruded through `x3 in [-1, 1]`. Vertex index is
/// `plane * nv + v`, cell index is `layer * ntri + t`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrismMesh {
    pub base: TriMesh,
    pub layers: usize,
    pub prisms: Vec<[usize; 6]>,
    pub faces: Vec<PrismFace>,
}

pub fn extrude(base: &TriMesh, layers: usize) -> Result<PrismMesh> {
    if layers < 2 || !layers.is_multiple_of(2) {
        return Err(Error::OddLayerCount(layers));
    }
    let nv = base.vertices.len();
    let nt = base.triangles.len();
    let mut prisms = Vec::with_capacity(nt * layers);
    for k in 0..layers {
        for tri in &base.triangles {
            let lo = tri.map(|v| k * nv + v);
            let hi = tri.map(|v| (k + 1) * nv + v);
            prisms.push([lo[0], lo[1], lo[2], hi[0], hi[1], hi[2]]);
        }
    }
    let mut faces = Vec::new();
    for (t, tri) in base.triangles.iter().enumerate() {
        faces.push(PrismFace {
            cell: t,
            nodes: tri.to_vec(),
            tag: FaceTag::GammaMinus,
        });
        faces.push(PrismFace {
            cell: (layers - 1) * nt + t,
            nodes: tri.iter().map(|v| layers * nv + v).collect(),
            tag: FaceTag::GammaPlus,
        });
    }
    let edge_owner = base.edge_table();
    let owner: HashMap<[usize; 2], usize> = edge_owner
        .edges
        .iter()
        .enumerate()
        .map(|(i, e)| (*e, edge_owner.neighbors[i][0]))
        .collect();
    for e in &base.boundary_edges {
        let t = owner[&[e.v[0].min(e.v[1]), e.v[0].max(e.v[1])]];
        let tag = match e.tag {
            EdgeTag::Gamma0 => FaceTag::Gamma0,
            EdgeTag::FreeLateral => FaceTag::FreeLateral,
        };
        for k in 0..layers {
            faces.push(PrismFace {
                cell: k * nt + t,
                nodes: vec![
                    k * nv + e.v[0],
                    k * nv + e.v[1],
                    (k + 1) * nv + e.v[1],
                    (k + 1) * nv + e.v[0],
                ],
                tag,
            });
        }
    }
    Ok(PrismMesh {
        base: base.clone(),
        layers,
        prisms,
        faces,
    })
}

impl PrismMesh {
    pub fn layer_bounds(&self, k: usize) -> (f64, f64) {
        let h = 2.0 / self.layers as f64;
        (-1.0 + k as f64 * h, -1.0 + (k + 1) as f64 * h)
    }

    pub fn vertex(&self, index: usize) -> ([f64; 2], f64) {
        let nv = self.base.vertices.len();
        let plane = index / nv;
        (
            self.base.vertices[index % nv],
            -1.0 + 2.0 * plane as f64 / self.layers as f64,
        )
    }

    pub fn n_vertices(&self) -> usize {
        self.base.vertices.len() * (self.layers + 1)
    }

    pub fn cell_volume(&self, c: usize) -> f64 {
        let nt = self.base.triangles.len();
        let (z0, z1) = self.layer_bounds(c / nt);
        self.base.signed_area(c % nt) * (z1 - z0)
    }

    pub fn count_faces(&self, tag: FaceTag) -> usize {
        self.faces.iter().filter(|f| f.tag == tag).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn unit(n1: usize, n2: usize) -> TriMesh {
        structured_tri(ParamRect::unit(), n1, n2, BoundarySpec::EntireBoundary).unwrap()
    }

    #[test]
    fn smallest_mesh() {
        let m = unit(1, 1);
        assert_eq!(m.vertices.len(), 4);
        assert_eq!(m.triangles.len(), 2);
        assert_eq!(m.boundary_edges.len(), 4);
        assert!(m.boundary_edges.iter().all(|e| e.tag == EdgeTag::Gamma0));
    }

    #[test]
    fn bottom_clamping_count() {
        let rect = ParamRect::new((0.0, PI), (0.0, 1.0));
        let m = structured_tri(rect, 4, 2, BoundarySpec::EdgeSet(vec![Side::Bottom])).unwrap();
        let clamped: Vec<_> = m.boundary_edges.iter().filter(|e| e.tag == EdgeTag::Gamma0).collect();
        assert_eq!(clamped.len(), 4);
        for e in clamped {
            assert_eq!(m.vertices[e.v[0]][1], 0.0);
            assert_eq!(m.vertices[e.v[1]][1], 0.0);
        }
        assert_relative_eq!(m.total_area(), PI, max_relative = 1e-12);
    }

    #[test]
    fn invalid_resolution() {
        let err = structured_tri(ParamRect::unit(), 0, 3, BoundarySpec::EntireBoundary).unwrap_err();
        assert!(matches!(err, Error::InvalidResolution { n1: 0, n2: 3 }));
    }

    #[test]
    fn orientation_and_euler() {
        let m = unit(5, 3);
        assert!((0..m.triangles.len()).all(|t| m.signed_area(t) > 0.0));
        let edges = m.edge_table().edges.len() as i64;
        assert_eq!(m.vertices.len() as i64 - edges + m.triangles.len() as i64, 1);
        // conforming: every edge has one or two neighbors, boundary ones exactly one
        let table = m.edge_table();
        let boundary = table.neighbors.iter().filter(|n| n.len() == 1).count();
        assert!(table.neighbors.iter().all(|n| n.len() <= 2));
        assert_eq!(boundary, m.boundary_edges.len());
    }

    #[test]
    fn boundary_loop_is_closed() {
        let m = unit(3, 4);
        for w in m.boundary_edges.windows(2) {
            assert_eq!(w[0].v[1], w[1].v[0]);
        }
        assert_eq!(m.boundary_edges.last().unwrap().v[1], m.boundary_edges[0].v[0]);
        assert_relative_eq!(m.boundary_length(), 4.0, max_relative = 1e-14);
    }

    #[test]
    fn refinement_properties() {
        let m = unit(1, 1);
        let r = m.refine();
        assert_eq!(r.triangles.len(), 8);
        assert_relative_eq!(r.total_area(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(r.boundary_length(), m.boundary_length(), max_relative = 1e-14);
        assert_relative_eq!(r.min_angle(), m.min_angle(), max_relative = 1e-12);
    }

    #[test]
    fn generic_red_refinement_matches_grid_doubling() {
        let mut m = unit(2, 2);
        let doubled = m.refine();
        m.grid = None;
        let red = m.refine();
        assert_eq!(red.triangles.len(), doubled.triangles.len());
        let centroids = |mesh: &TriMesh| {
            let mut c: Vec<(i64, i64)> = (0..mesh.triangles.len())
                .map(|t| {
                    let p = mesh.corners(t);
                    (
                        ((p[0][0] + p[1][0] + p[2][0]) * 3e6).round() as i64,
                        ((p[0][1] + p[1][1] + p[2][1]) * 3e6).round() as i64,
                    )
                })
                .collect();
            c.sort();
            c
        };
        assert_eq!(centroids(&red), centroids(&doubled));
        assert_relative_eq!(red.boundary_length(), 4.0, max_relative = 1e-14);
        assert!((0..red.triangles.len()).all(|t| red.signed_area(t) > 0.0));
    }

    #[test]
    fn locate_finds_containing_triangle() {
        let m = unit(4, 3);
        for &y in &[[0.1, 0.05], [0.99, 0.99], [0.5, 0.5], [0.0, 1.0], [0.37, 0.81]] {
            let (t, l) = m.locate(y).unwrap();
            assert!(l.iter().all(|&v| v >= -1e-12), "{y:?} -> {t} {l:?}");
        }
        assert!(m.locate([1.5, 0.5]).is_none());
    }

    #[test]
    fn extrusion_counts() {
        let base = unit(1, 1);
        let p = extrude(&base, 2).unwrap();
        assert_eq!(p.prisms.len(), 4);
        assert_eq!(p.count_faces(FaceTag::GammaPlus), 2);
        assert_eq!(p.count_faces(FaceTag::GammaMinus), 2);
        assert_eq!(p.count_faces(FaceTag::Gamma0), 4 * 2);
        assert_eq!(p.count_faces(FaceTag::FreeLateral), 0);
        let vol: f64 = (0..p.prisms.len()).map(|c| p.cell_volume(c)).sum();
        assert_relative_eq!(vol, 2.0, max_relative = 1e-12);
        assert!(matches!(extrude(&base, 3), Err(Error::OddLayerCount(3))));
        assert!(matches!(extrude(&base, 0), Err(Error::OddLayerCount(0))));
    }

    #[test]
    fn extrusion_face_placement() {
        let rect = ParamRect::new((0.0, PI), (0.4, 1.0));
        let base = structured_tri(rect, 3, 2, BoundarySpec::EdgeSet(vec![Side::Left])).unwrap();
        let p = extrude(&base, 4).unwrap();
        for f in &p.faces {
            let xs: Vec<f64> = f.nodes.iter().map(|&n| p.vertex(n).1).collect();
            match f.tag {
                FaceTag::GammaPlus => assert!(xs.iter().all(|&x| x == 1.0)),
                FaceTag::GammaMinus => assert!(xs.iter().all(|&x| x == -1.0)),
                FaceTag::Gamma0 => assert!(f.nodes.iter().all(|&n| p.vertex(n).0[0] == 0.0)),
                FaceTag::FreeLateral => assert!(f.nodes.iter().any(|&n| p.vertex(n).0[0] != 0.0)),
            }
        }
        let base_gamma0 = base.boundary_edges.iter().filter(|e| e.tag == EdgeTag::Gamma0).count();
        assert_eq!(p.count_faces(FaceTag::Gamma0), base_gamma0 * 4);
        let lateral = p.count_faces(FaceTag::Gamma0) + p.count_faces(FaceTag::FreeLateral);
        assert_eq!(lateral, base.boundary_edges.len() * 4);
    }
}
