//! Oracles shared by the integration tests and the acceptance report.

#![allow(dead_code)]

use std::sync::Arc;

use koiter::fem::assembly::{assemble_3d_scaled, default_prism_rule};
use koiter::fem::space::{FunctionSpace, MixedSpace, SpaceKind};
use koiter::geometry::{surface_at, BuiltinChart, ParamRect};
use koiter::kinematics::{gamma, rho, Lame, SurfaceDisplacementJet};
use koiter::mesh::{extrude, structured_tri, BoundarySpec};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Degree-4 symmetric rule on the reference triangle (Dunavant), weights
/// summing to one.
const DUNAVANT4: [([f64; 3], f64); 6] = [
    (
        [0.108103018168070, 0.445948490915965, 0.445948490915965],
        0.223381589678011,
    ),
    (
        [0.445948490915965, 0.108103018168070, 0.445948490915965],
        0.223381589678011,
    ),
    (
        [0.445948490915965, 0.445948490915965, 0.108103018168070],
        0.223381589678011,
    ),
    (
        [0.816847572980459, 0.091576213509771, 0.091576213509771],
        0.109951743655322,
    ),
    (
        [0.091576213509771, 0.816847572980459, 0.091576213509771],
        0.109951743655322,
    ),
    (
        [0.091576213509771, 0.091576213509771, 0.816847572980459],
        0.109951743655322,
    ),
];

/// Three-point Gauss rule on `[-1, 1]`.
const GAUSS3: [(f64, f64); 3] = [
    (-0.774_596_669_241_483_4, 5.0 / 9.0),
    (0.0, 8.0 / 9.0),
    (0.774_596_669_241_483_4, 5.0 / 9.0),
];

/// Relative entrywise mismatch `max |a - b| / max |b|`.
pub fn rel_mismatch(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax() / b.amax()
}

/// P2 prism space on a 2-triangle base with `layers` layers over the unit
/// square, without clamping.
pub fn plane_prism_space(layers: usize) -> MixedSpace {
    let base = structured_tri(ParamRect::unit(), 1, 1, BoundarySpec::EdgeSet(vec![])).unwrap();
    let prism = Arc::new(extrude(&base, layers).unwrap());
    let p2 = Arc::new(FunctionSpace::new_prism(SpaceKind::LagrangeP2Prism, prism).unwrap());
    MixedSpace::new([p2.clone(), p2.clone(), p2]).unwrap()
}

/// Stiffness of the scaled 3D problem on the flat plate, assembled by the
/// library and by Cartesian Hooke's law. On the plane the scaled problem is
/// the physical one on `omega x (-eps, eps)` divided by `eps`, with the
/// physical displacement `U(y, eps x3) = v(y, x3)`.
pub fn plane_3d_matrices(eps: f64, lame: Lame) -> (DMatrix<f64>, DMatrix<f64>) {
    let space = plane_prism_space(2);
    let vs = assemble_3d_scaled(
        &BuiltinChart::plane(),
        lame,
        eps,
        [0.0; 3],
        [0.0; 3],
        &space,
        &default_prism_rule(),
    )
    .unwrap();
    let assembled = vs.system.matrix.to_dense();

    let prism = space.comps[0].prism.clone().unwrap();
    let nt = prism.base.triangles.len();
    let n = space.ndof;
    let mut oracle = DMatrix::<f64>::zeros(n, n);
    for c in 0..space.n_cells() {
        let (t, k) = (c % nt, c / nt);
        let corners = prism.base.corners(t);
        let area = prism.base.signed_area(t).abs();
        let (z0, z1) = prism.layer_bounds(k);
        let dofs = space.cell_dofs(c);
        for (bary, wt) in DUNAVANT4 {
            let y = [0, 1].map(|i| bary[0] * corners[0][i] + bary[1] * corners[1][i] + bary[2] * corners[2][i]);
            for (z, wz) in GAUSS3 {
                let x3 = 0.5 * (z0 + z1) + 0.5 * (z1 - z0) * z;
                // physical volume element: area * (x3 range) * eps, divided by eps
                let w = wt * area * wz * 0.5 * (z1 - z0);
                let mut strains = Vec::with_capacity(dofs.len());
                for comp in 0..3 {
                    for phi in space.comps[comp].eval_prism(c, y, x3) {
                        let mut grad = [[0.0; 3]; 3];
                        let scale = vs.dof_scale[dofs[strains.len()]];
                        grad[comp] = [phi.grad[0], phi.grad[1], phi.grad[2] / eps].map(|g| scale * g);
                        let mut e = [[0.0; 3]; 3];
                        for i in 0..3 {
                            for j in 0..3 {
                                e[i][j] = 0.5 * (grad[i][j] + grad[j][i]);
                            }
                        }
                        strains.push(e);
                    }
                }
                for (a, ea) in strains.iter().enumerate() {
                    for (b, eb) in strains.iter().enumerate() {
                        let tr = |e: &[[f64; 3]; 3]| e[0][0] + e[1][1] + e[2][2];
                        let mut dd = 0.0;
                        for i in 0..3 {
                            for j in 0..3 {
                                dd += ea[i][j] * eb[i][j];
                            }
                        }
                        oracle[(dofs[a], dofs[b])] += w * (lame.lambda * tr(ea) * tr(eb) + 2.0 * lame.mu * dd);
                    }
                }
            }
        }
    }
    (assembled, oracle)
}

/// Worst mismatch of `gamma` against the symmetric gradient and of `rho`
/// against the Hessian of `eta_3` on the plane, at random jets.
pub fn plane_strain_mismatch(samples: usize, seed: u64) -> (f64, f64) {
    let chart = BuiltinChart::plane();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut g_err, mut r_err) = (0.0f64, 0.0f64);
    for _ in 0..samples {
        let y = [rng.random::<f64>(), rng.random::<f64>()];
        let geom = surface_at(&chart, y).unwrap();
        let mut r = || rng.random_range(-1.0..1.0);
        let eta = [r(), r(), r()];
        let d_eta = [[r(), r()], [r(), r()], [r(), r()]];
        let h12 = r();
        let hess = [[r(), h12], [h12, r()]];
        let jet = SurfaceDisplacementJet {
            eta,
            d_eta,
            dd_eta3: Some(hess),
        };
        let g = gamma(&geom, &jet);
        let rh = rho(&geom, &jet).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                let sym = 0.5 * (d_eta[a][b] + d_eta[b][a]);
                g_err = g_err.max((g.get(a, b) - sym).abs());
                r_err = r_err.max((rh.get(a, b) - hess[a][b]).abs());
            }
        }
    }
    (g_err, r_err)
}

/// Worst jump of value and gradient of a random reduced-HCT function across
/// interior edges, and worst value and gradient on clamped edges, of an
/// `n x n` mesh clamped on the entire boundary.
pub fn hct_conformity(n: usize, seed: u64) -> (f64, f64) {
    let mesh = Arc::new(structured_tri(ParamRect::unit(), n, n, BoundarySpec::EntireBoundary).unwrap());
    let space = FunctionSpace::new(SpaceKind::ReducedHct, mesh.clone())
        .unwrap()
        .clamped(&BoundarySpec::EntireBoundary);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coefs: Vec<f64> = (0..space.ndof)
        .map(|d| {
            if space.constrained[d] {
                0.0
            } else {
                rng.random_range(-1.0..1.0)
            }
        })
        .collect();
    let jet = |t: usize, y: [f64; 2]| {
        let mut v = [0.0; 3];
        for (b, &d) in space.eval_tri(t, y, None).iter().zip(&space.cell_dofs[t]) {
            v[0] += coefs[d] * b.value;
            v[1] += coefs[d] * b.grad[0];
            v[2] += coefs[d] * b.grad[1];
        }
        v
    };
    let table = mesh.edge_table();
    let clamped: std::collections::HashSet<[usize; 2]> = mesh.clamped_edge_keys().into_iter().collect();
    let (mut interior, mut boundary) = (0.0f64, 0.0f64);
    for (e, [a, b]) in table.edges.iter().enumerate() {
        let (pa, pb) = (mesh.vertices[*a], mesh.vertices[*b]);
        for s in [0.13, 0.5, 0.81] {
            let y = [pa[0] + s * (pb[0] - pa[0]), pa[1] + s * (pb[1] - pa[1])];
            match table.neighbors[e][..] {
                [t1, t2] => {
                    let (j1, j2) = (jet(t1, y), jet(t2, y));
                    for k in 0..3 {
                        interior = interior.max((j1[k] - j2[k]).abs());
                    }
                }
                [t] => {
                    let key = [(*a).min(*b), (*a).max(*b)];
                    if clamped.contains(&key) {
                        boundary = jet(t, y).iter().fold(boundary, |m, v| m.max(v.abs()));
                    }
                }
                _ => panic!("edge with {} neighbours", table.neighbors[e].len()),
            }
        }
    }
    (interior, boundary)
}
