//! Chart identities against finite-difference oracles computed here.

#![allow(clippy::needless_range_loop)]

use koiter::checks::{geometry_check, CHRISTOFFEL_TOL, KAPPA_TOL};
use koiter::geometry::{surface_at, volume_at, BuiltinChart, Chart, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CHARTS: [&str; 4] = ["plane", "ellipsoid", "cylinder", "cone"];

fn sample_points(chart: &dyn Chart, n: usize, seed: u64) -> Vec<[f64; 2]> {
    let r = chart.rect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            // stay away from the edges so the stencils remain inside the rectangle
            let s: [f64; 2] = [rng.random_range(0.05..0.95), rng.random_range(0.05..0.95)];
            [0, 1].map(|i| r.min[i] + s[i] * (r.max[i] - r.min[i]))
        })
        .collect()
}

/// Fourth-order central difference of `f` along `dir`.
fn diff4(f: &dyn Fn([f64; 2]) -> Vec3, y: [f64; 2], dir: usize, h: f64) -> Vec3 {
    let at = |s: f64| {
        let mut p = y;
        p[dir] += s * h;
        f(p)
    };
    (at(-2.0) - 8.0 * at(-1.0) + 8.0 * at(1.0) - at(2.0)) / (12.0 * h)
}

#[test]
fn analytic_partials_match_central_differences() {
    for name in CHARTS {
        let chart = BuiltinChart::by_name(name).unwrap();
        let h = 1e-3 * chart.rect().diagonal();
        for y in sample_points(&chart, 100, 7) {
            let jet = chart.jet(y);
            let scale = jet.d1[0].norm().max(jet.d1[1].norm());
            for a in 0..2 {
                let fd = diff4(&|p| chart.point(p), y, a, h);
                assert!((fd - jet.d1[a]).norm() <= 1e-6 * scale, "{name} d{a} at {y:?}");
                for b in 0..2 {
                    let fd = diff4(&|p| chart.jet(p).d1[a], y, b, h);
                    let tol = 1e-6 * scale.max(jet.second(a, b).norm());
                    assert!((fd - jet.second(a, b)).norm() <= tol, "{name} d{a}{b} at {y:?}");
                }
            }
        }
    }
}

#[test]
fn gaussian_curvature_is_det_of_mixed_curvature() {
    for name in CHARTS {
        let chart = BuiltinChart::by_name(name).unwrap();
        for y in sample_points(&chart, 100, 8) {
            let s = surface_at(&chart, y).unwrap();
            // independent route: det(b_cov) / det(a_cov)
            let det = |m: [[f64; 2]; 2]| m[0][0] * m[1][1] - m[0][1] * m[1][0];
            let kappa = det(s.b_cov) / det(s.a_cov);
            let scale = 1.0f64.max(kappa.abs());
            assert!((s.kappa - kappa).abs() <= KAPPA_TOL * scale, "{name} at {y:?}");
            let bm = s.b_mix;
            assert!((s.kappa - det(bm)).abs() <= KAPPA_TOL * scale, "{name} at {y:?}");
        }
    }
}

#[test]
fn transverse_christoffel_symbols_vanish_and_match_differences() {
    for name in CHARTS {
        let chart = BuiltinChart::by_name(name).unwrap();
        let h = 1e-4 * chart.rect().diagonal();
        for y in sample_points(&chart, 30, 9) {
            for eps in [1e-2, 1e-4] {
                for x3 in [-0.7, 0.0, 0.4] {
                    let Ok(v) = volume_at(&chart, y, x3, eps) else {
                        continue;
                    };
                    let g = &v.christoffel3;
                    for p in 0..3 {
                        assert!(g[p][2][2].abs() <= CHRISTOFFEL_TOL, "{name} G^{p}_33");
                    }
                    for a in 0..2 {
                        assert!(g[2][a][2].abs() <= CHRISTOFFEL_TOL && g[2][2][a].abs() <= CHRISTOFFEL_TOL);
                    }
                    // Gamma^p_{a b} = g^p . d_b g_a with g_a differenced in y
                    let base = |p: [f64; 2]| volume_at(&chart, p, x3, eps).unwrap().g_base;
                    for a in 0..2 {
                        for b in 0..2 {
                            let dg = diff4(&|p| base(p)[a], y, b, h);
                            for p in 0..3 {
                                let fd = v.g_dual[p].dot(&dg);
                                let scale = 1.0f64.max(g[p][a][b].abs());
                                assert!(
                                    (fd - g[p][a][b]).abs() <= 1e-6 * scale,
                                    "{name} G^{p}_{a}{b}: {fd} vs {}",
                                    g[p][a][b]
                                );
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn built_in_suite_passes_with_100_points() {
    for name in CHARTS {
        let report = geometry_check(&BuiltinChart::by_name(name).unwrap(), 100, 42);
        assert!(report.passed(), "{report:?}");
    }
}

#[test]
fn ellipsoid_is_elliptic_and_others_are_not() {
    let k = |name: &str| geometry_check(&BuiltinChart::by_name(name).unwrap(), 50, 1);
    assert!(k("ellipsoid").kappa_min > 0.0);
    assert!(k("cylinder").kappa_max.abs() < 1e-12);
    assert!(k("cone").kappa_max.abs() < 1e-12);
}
