//! Invariant checks of a chart and of the strain measures on it, packaged
//! as a machine-readable report.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::geometry::{surface_at, volume_from_surface, Chart, ChartJet, SurfaceGeometry, Vec3};
use crate::kinematics::{gamma, rho, SurfaceDisplacementJet};

pub const PARTIALS_TOL: f64 = 1e-6;
pub const KAPPA_TOL: f64 = 1e-10;
pub const CHRISTOFFEL_TOL: f64 = 1e-12;
pub const INVERSE_TOL: f64 = 1e-12;
pub const RIGID_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckItem {
    pub name: String,
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeometryReport {
    pub chart: String,
    pub points: usize,
    pub seed: u64,
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub items: Vec<CheckItem>,
    /// first error raised while evaluating the chart, if any
    pub failure: Option<String>,
}

impl GeometryReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none() && self.items.iter().all(|c| c.passed)
    }

    pub fn item(&self, name: &str) -> Option<&CheckItem> {
        self.items.iter().find(|c| c.name == name)
    }
}

/// Fourth-order central difference of `f` at `x` along one axis.
fn richardson<F: Fn(f64) -> Vec3>(f: F, x: f64, h: f64) -> Vec3 {
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    (4.0 * d(0.5 * h) - d(h)) / 3.0
}

fn shift(y: [f64; 2], axis: usize, t: f64) -> [f64; 2] {
    let mut p = y;
    p[axis] = t;
    p
}

/// Worst relative mismatch between the analytic partials of each order and
/// central differences of the order below.
pub fn partials_mismatch(chart: &dyn Chart, y: [f64; 2]) -> f64 {
    let jet = chart.jet(y);
    let h = 1e-3 * chart.rect().diagonal();
    let at = |p: [f64; 2]| chart.jet(p);
    let mut worst: f64 = 0.0;
    let mut compare = |analytic: &[Vec3], numeric: &[Vec3]| {
        let scale = analytic
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        for (a, n) in analytic.iter().zip(numeric) {
            worst = worst.max((a - n).norm() / scale);
        }
    };
    let d1: Vec<Vec3> = (0..2)
        .map(|b| richardson(|t| chart.point(shift(y, b, t)), y[b], h))
        .collect();
    compare(&jet.d1, &d1);
    // d2 = [d11, d12, d22]: d11 and d12 from y1-differences of d1, d22 from y2
    let of = |order: fn(&ChartJet, usize) -> Vec3, k: usize, axis: usize| {
        richardson(|t| order(&at(shift(y, axis, t)), k), y[axis], h)
    };
    let first: fn(&ChartJet, usize) -> Vec3 = |j, k| j.d1[k];
    let second: fn(&ChartJet, usize) -> Vec3 = |j, k| j.d2[k];
    let d2 = [of(first, 0, 0), of(first, 1, 0), of(first, 1, 1)];
    compare(&jet.d2, &d2);
    let d3 = [of(second, 0, 0), of(second, 1, 0), of(second, 2, 0), of(second, 2, 1)];
    compare(&jet.d3, &d3);
    worst
}

/// `|det(b^b_a) - kappa|` relative to the squared largest curvature entry.
pub fn kappa_mismatch(s: &SurfaceGeometry) -> f64 {
    let b = &s.b_mix;
    let det = b[0][0] * b[1][1] - b[0][1] * b[1][0];
    let scale = b
        .iter()
        .flatten()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .powi(2)
        .max(f64::MIN_POSITIVE);
    (det - s.kappa).abs() / scale
}

/// Largest `|Gamma^3_{a3}|` and `|Gamma^p_{33}|` of the shell map at the
/// given thicknesses, skipping thicknesses past the focal surface.
pub fn transverse_christoffel(s: &SurfaceGeometry, eps: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for &e in eps {
        for x3 in [-1.0, -0.3, 0.0, 0.6, 1.0] {
            let Ok(v) = volume_from_surface(s, x3, e) else { continue };
            for a in 0..2 {
                worst = worst
                    .max(v.christoffel3[2][a][2].abs())
                    .max(v.christoffel3[2][2][a].abs());
            }
            for p in 0..3 {
                worst = worst.max(v.christoffel3[p][2][2].abs());
            }
        }
    }
    worst
}

/// Largest entry of `a_cov a_con - I`.
pub fn inverse_mismatch(s: &SurfaceGeometry) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let v: f64 = (0..2).map(|k| s.a_cov[i][k] * s.a_con[k][j]).sum();
            worst = worst.max((v - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    worst
}

/// Covariant jet of the rigid displacement `c + w x theta(y)`.
pub fn rigid_jet(jet: &ChartJet, s: &SurfaceGeometry, c: Vec3, w: Vec3) -> SurfaceDisplacementJet {
    let r = c + w.cross(&jet.point);
    let dr = [w.cross(&jet.d1[0]), w.cross(&jet.d1[1])];
    let da = |i: usize, b: usize| if i < 2 { jet.second(i, b) } else { s.d_normal[b] };
    let mut out = SurfaceDisplacementJet::default();
    for i in 0..3 {
        out.eta[i] = r.dot(&s.base[i]);
        for b in 0..2 {
            out.d_eta[i][b] = dr[b].dot(&s.base[i]) + r.dot(&da(i, b));
        }
    }
    let mut dd = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            let ddr = w.cross(&jet.second(a, b));
            dd[a][b] =
                ddr.dot(&s.base[2]) + dr[a].dot(&s.d_normal[b]) + dr[b].dot(&s.d_normal[a]) + r.dot(&s.dd_normal[a][b]);
        }
    }
    out.dd_eta3 = Some(dd);
    out
}

/// Largest `|gamma|` and `|rho|` of a rigid motion, relative to the size of
/// its gradient.
pub fn rigid_strain(chart: &dyn Chart, y: [f64; 2], c: Vec3, w: Vec3) -> Result<f64> {
    let jet = chart.jet(y);
    let s = surface_at(chart, y)?;
    let r = rigid_jet(&jet, &s, c, w);
    let g = gamma(&s, &r);
    let k = rho(&s, &r)?;
    let scale = r
        .d_eta
        .iter()
        .flatten()
        .chain(r.eta.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let worst = g.0.iter().chain(k.0.iter()).fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(worst / scale)
}

/// Runs every check at `points` random points plus an `11 x 11` grid that
/// includes the boundary of the parameter rectangle.
pub fn geometry_check(chart: &dyn Chart, points: usize, seed: u64) -> GeometryReport {
    let rect = chart.rect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sample: Vec<[f64; 2]> = (0..=10)
        .flat_map(|i| (0..=10).map(move |j| rect.lerp([i as f64 / 10.0, j as f64 / 10.0])))
        .collect();
    sample.extend((0..points).map(|_| rect.lerp([rng.random::<f64>(), rng.random::<f64>()])));
    let probes: Vec<(Vec3, Vec3)> = (0..3)
        .map(|_| {
            let v = |rng: &mut ChaCha8Rng| {
                Vec3::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                )
            };
            (v(&mut rng), v(&mut rng))
        })
        .collect();
    let mut report = GeometryReport {
        chart: chart.label(),
        points: sample.len(),
        seed,
        kappa_min: f64::INFINITY,
        kappa_max: f64::NEG_INFINITY,
        items: Vec::new(),
        failure: None,
    };
    let eps = [1e-8, 1e-4, 1e-2, 0.1];
    let mut worst = [0.0f64; 5];
    for &y in &sample {
        let s = match surface_at(chart, y) {
            Ok(s) => s,
            Err(e) => {
                report.failure.get_or_insert_with(|| e.to_string());
                continue;
            }
        };
        report.kappa_min = report.kappa_min.min(s.kappa);
        report.kappa_max = report.kappa_max.max(s.kappa);
        worst[0] = worst[0].max(partials_mismatch(chart, y));
        worst[1] = worst[1].max(kappa_mismatch(&s));
        worst[2] = worst[2].max(transverse_christoffel(&s, &eps));
        worst[3] = worst[3].max(inverse_mismatch(&s));
        for &(c, w) in &probes {
            match rigid_strain(chart, y, c, w) {
                Ok(v) => worst[4] = worst[4].max(v),
                Err(e) => {
                    report.failure.get_or_insert_with(|| e.to_string());
                }
            }
        }
    }
    let names = [
        ("partials_vs_central_differences", PARTIALS_TOL),
        ("kappa_is_det_b_mixed", KAPPA_TOL),
        ("transverse_christoffel_vanish", CHRISTOFFEL_TOL),
        ("metric_inverse", INVERSE_TOL),
        ("rigid_motion_is_strain_free", RIGID_TOL),
    ];
    for ((name, tol), w) in names.into_iter().zip(worst) {
        report.items.push(CheckItem {
            name: name.into(),
            worst: w,
            tolerance: tol,
            passed: w <= tol,
        });
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{BuiltinChart, MapChart, ParamRect};

    #[test]
    fn builtin_charts_pass() {
        for chart in [
            BuiltinChart::plane(),
            BuiltinChart::ellipsoid(),
            BuiltinChart::cylinder(),
            BuiltinChart::cone(),
        ] {
            let r = geometry_check(&chart, 100, 7);
            assert!(r.passed(), "{r:#?}");
        }
    }

    #[test]
    fn ellipsoid_is_positively_curved() {
        let r = geometry_check(&BuiltinChart::ellipsoid(), 20, 1);
        assert!(r.kappa_min > 0.0);
    }

    #[test]
    fn pole_in_rect_fails() {
        let chart = BuiltinChart::ellipsoid().with_rect(ParamRect::new((0.0, 1.0), (0.0, 1.0)));
        let r = geometry_check(&chart, 5, 1);
        assert!(!r.passed());
        assert!(r.failure.unwrap().contains("not an immersion"));
    }

    #[test]
    fn wrong_partials_are_caught() {
        // a chart whose jet disagrees with its map
        struct Bad;
        impl Chart for Bad {
            fn rect(&self) -> ParamRect {
                ParamRect::unit()
            }
            fn point(&self, y: [f64; 2]) -> Vec3 {
                Vec3::new(y[0], y[1], y[0] * y[0])
            }
            fn jet(&self, y: [f64; 2]) -> ChartJet {
                let mut j = crate::geometry::finite_difference_jet(|p| self.point(p), y, 1.0);
                j.d2[0].z *= 1.1;
                j
            }
            fn label(&self) -> String {
                "bad".into()
            }
        }
        let r = geometry_check(&Bad, 5, 1);
        assert!(!r.item("partials_vs_central_differences").unwrap().passed);
        let good = MapChart {
            map: |y: [f64; 2]| Vec3::new(y[0], y[1], 0.1 * y[0] * y[1]),
            rect: ParamRect::unit(),
            name: "saddle".into(),
        };
        assert!(geometry_check(&good, 5, 1).item("kappa_is_det_b_mixed").unwrap().passed);
    }
}
