//! Differential geometry of the middle surface `theta(omega)` and of the
//! shell map `Theta(y, x3) = theta(y) + x3 a3(y)`.
//!
//! Index conventions used throughout the crate:
//! - `christoffel[s][a][b]` is `Gamma^s_{ab}`,
//! - `b_mix[a][b]` is `b_a^b = a^{b s} b_{a s}`,
//! - `db_mix[c][a][b]` is `d_c (b_a^b)`,
//! - `christoffel3[p][i][j]` is `Gamma^p_{ij}(eps)`.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

/// Minimum admissible `|a_1 x a_2|`.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// `det g / det a` below this is treated as loss of positive definiteness.
pub const VOLUME_DEGENERACY_TOL: f64 = 1e-12;

/// Axis-aligned rectangle of curvilinear coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamRect {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

impl ParamRect {
    pub fn new(y1: (f64, f64), y2: (f64, f64)) -> Self {
        Self {
            min: [y1.0, y2.0],
            max: [y1.1, y2.1],
        }
    }

    pub fn unit() -> Self {
        Self::new((0.0, 1.0), (0.0, 1.0))
    }

    pub fn width(&self) -> f64 {
        self.max[0] - self.min[0]
    }

    pub fn height(&self) -> f64 {
        self.max[1] - self.min[1]
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn diagonal(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn contains(&self, y: [f64; 2]) -> bool {
        let tol = 1e-12 * self.diagonal();
        (0..2).all(|k| y[k] >= self.min[k] - tol && y[k] <= self.max[k] + tol)
    }

    /// Maps `s in [0,1]^2` onto the rectangle.
    pub fn lerp(&self, s: [f64; 2]) -> [f64; 2] {
        [self.min[0] + s[0] * self.width(), self.min[1] + s[1] * self.height()]
    }
}

/// Point value and partial derivatives of a chart up to order three.
///
/// Mixed partials are stored once, keyed by the number of `y2` derivatives:
/// `d2 = [d11, d12, d22]`, `d3 = [d111, d112, d122, d222]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartJet {
    pub point: Vec3,
    pub d1: [Vec3; 2],
    pub d2: [Vec3; 3],
    pub d3: [Vec3; 4],
}

impl ChartJet {
    #[inline]
    pub fn second(&self, a: usize, b: usize) -> Vec3 {
        self.d2[a + b]
    }

    #[inline]
    pub fn third(&self, a: usize, b: usize, c: usize) -> Vec3 {
        self.d3[a + b + c]
    }
}

/// A parametrization `theta: omega -> E^3` of a middle surface.
pub trait Chart: Send + Sync {
    fn rect(&self) -> ParamRect;

    fn point(&self, y: [f64; 2]) -> Vec3;

    /// Partial derivatives through order three. The default uses central
    /// differences of [`Chart::point`].
    fn jet(&self, y: [f64; 2]) -> ChartJet {
        finite_difference_jet(|p| self.point(p), y, self.rect().diagonal())
    }

    fn label(&self) -> String;
}

/// Central-difference jet of a map. The step grows with the derivative order
/// (`1e-5`, `1e-4`, `1e-3` times `scale`) to balance truncation and rounding.
pub fn finite_difference_jet<F: Fn([f64; 2]) -> Vec3>(map: F, y: [f64; 2], scale: f64) -> ChartJet {
    let shifted = |h: f64, i: f64, j: f64| map([y[0] + i * h, y[1] + j * h]);

    let h1 = 1e-5 * scale;
    let d1 = [
        (shifted(h1, 1.0, 0.0) - shifted(h1, -1.0, 0.0)) / (2.0 * h1),
        (shifted(h1, 0.0, 1.0) - shifted(h1, 0.0, -1.0)) / (2.0 * h1),
    ];

    let h2 = 1e-4 * scale;
    let c = shifted(h2, 0.0, 0.0);
    let d11 = (shifted(h2, 1.0, 0.0) - 2.0 * c + shifted(h2, -1.0, 0.0)) / (h2 * h2);
    let d22 = (shifted(h2, 0.0, 1.0) - 2.0 * c + shifted(h2, 0.0, -1.0)) / (h2 * h2);
    let d12 = (shifted(h2, 1.0, 1.0) - shifted(h2, 1.0, -1.0) - shifted(h2, -1.0, 1.0) + shifted(h2, -1.0, -1.0))
        / (4.0 * h2 * h2);

    let h3 = 1e-3 * scale;
    let third_pure = |dir: usize| {
        let f = |k: f64| {
            if dir == 0 {
                shifted(h3, k, 0.0)
            } else {
                shifted(h3, 0.0, k)
            }
        };
        (f(2.0) - 2.0 * f(1.0) + 2.0 * f(-1.0) - f(-2.0)) / (2.0 * h3 * h3 * h3)
    };
    // d_{aa b}: second difference along `a` of the central difference along `b`.
    let third_mixed = |a: usize| {
        let g = |i: f64, j: f64| {
            if a == 0 {
                shifted(h3, i, j)
            } else {
                shifted(h3, j, i)
            }
        };
        let second = |j: f64| g(1.0, j) - 2.0 * g(0.0, j) + g(-1.0, j);
        (second(1.0) - second(-1.0)) / (2.0 * h3 * h3 * h3)
    };

    ChartJet {
        point: map(y),
        d1,
        d2: [d11, d12, d22],
        d3: [third_pure(0), third_mixed(0), third_mixed(1), third_pure(1)],
    }
}

/// The surfaces shipped with analytic partial derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum BuiltinChart {
    /// `(y1, y2, 0)`
    Plane { rect: ParamRect },
    /// `(m sin y1 cos y2, n sin y1 sin y2, l cos y1)`
    Ellipsoid { m: f64, n: f64, l: f64, rect: ParamRect },
    /// `(r cos y1, r sin y1, h y2)`
    Cylinder { r: f64, h: f64, rect: ParamRect },
    /// `(b y2 cos y1, b y2 sin y1, c y2)`
    Cone { b: f64, c: f64, rect: ParamRect },
}

impl BuiltinChart {
    pub fn plane() -> Self {
        Self::Plane {
            rect: ParamRect::unit(),
        }
    }

    pub fn ellipsoid() -> Self {
        use std::f64::consts::PI;
        Self::Ellipsoid {
            m: 0.06,
            n: 0.05,
            l: 0.03,
            rect: ParamRect::new((PI / 6.0, 5.0 * PI / 6.0), (0.0, PI)),
        }
    }

    pub fn cylinder() -> Self {
        Self::Cylinder {
            r: 0.2,
            h: 0.4,
            rect: ParamRect::new((0.0, std::f64::consts::PI), (0.0, 1.0)),
        }
    }

    pub fn cone() -> Self {
        Self::Cone {
            b: 0.2,
            c: 0.4,
            rect: ParamRect::new((0.0, std::f64::consts::PI), (0.4, 1.0)),
        }
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "plane" => Some(Self::plane()),
            "ellipsoid" => Some(Self::ellipsoid()),
            "cylinder" => Some(Self::cylinder()),
            "cone" => Some(Self::cone()),
            _ => None,
        }
    }

    pub fn with_rect(mut self, new_rect: ParamRect) -> Self {
        match &mut self {
            Self::Plane { rect }
            | Self::Ellipsoid { rect, .. }
            | Self::Cylinder { rect, .. }
            | Self::Cone { rect, .. } => *rect = new_rect,
        }
        self
    }
}

impl Chart for BuiltinChart {
    fn rect(&self) -> ParamRect {
        match *self {
            Self::Plane { rect }
            | Self::Ellipsoid { rect, .. }
            | Self::Cylinder { rect, .. }
            | Self::Cone { rect, .. } => rect,
        }
    }

    fn point(&self, y: [f64; 2]) -> Vec3 {
        let (s1, c1) = y[0].sin_cos();
        let (s2, c2) = y[1].sin_cos();
        match *self {
            Self::Plane { .. } => Vec3::new(y[0], y[1], 0.0),
            Self::Ellipsoid { m, n, l, .. } => Vec3::new(m * s1 * c2, n * s1 * s2, l * c1),
            Self::Cylinder { r, h, .. } => Vec3::new(r * c1, r * s1, h * y[1]),
            Self::Cone { b, c, .. } => Vec3::new(b * y[1] * c1, b * y[1] * s1, c * y[1]),
        }
    }

    fn jet(&self, y: [f64; 2]) -> ChartJet {
        let zero = Vec3::zeros();
        let (s1, c1) = y[0].sin_cos();
        let (s2, c2) = y[1].sin_cos();
        let point = self.point(y);
        match *self {
            Self::Plane { .. } => ChartJet {
                point,
                d1: [Vec3::x(), Vec3::y()],
                d2: [zero; 3],
                d3: [zero; 4],
            },
            Self::Ellipsoid { m, n, l, .. } => ChartJet {
                point,
                d1: [
                    Vec3::new(m * c1 * c2, n * c1 * s2, -l * s1),
                    Vec3::new(-m * s1 * s2, n * s1 * c2, 0.0),
                ],
                d2: [
                    Vec3::new(-m * s1 * c2, -n * s1 * s2, -l * c1),
                    Vec3::new(-m * c1 * s2, n * c1 * c2, 0.0),
                    Vec3::new(-m * s1 * c2, -n * s1 * s2, 0.0),
                ],
                d3: [
                    Vec3::new(-m * c1 * c2, -n * c1 * s2, l * s1),
                    Vec3::new(m * s1 * s2, -n * s1 * c2, 0.0),
                    Vec3::new(-m * c1 * c2, -n * c1 * s2, 0.0),
                    Vec3::new(m * s1 * s2, -n * s1 * c2, 0.0),
                ],
            },
            Self::Cylinder { r, h, .. } => ChartJet {
                point,
                d1: [Vec3::new(-r * s1, r * c1, 0.0), Vec3::new(0.0, 0.0, h)],
                d2: [Vec3::new(-r * c1, -r * s1, 0.0), zero, zero],
                d3: [Vec3::new(r * s1, -r * c1, 0.0), zero, zero, zero],
            },
            Self::Cone { b, c, .. } => {
                let t = y[1];
                ChartJet {
                    point,
                    d1: [Vec3::new(-b * t * s1, b * t * c1, 0.0), Vec3::new(b * c1, b * s1, c)],
                    d2: [
                        Vec3::new(-b * t * c1, -b * t * s1, 0.0),
                        Vec3::new(-b * s1, b * c1, 0.0),
                        zero,
                    ],
                    d3: [
                        Vec3::new(b * t * s1, -b * t * c1, 0.0),
                        Vec3::new(-b * c1, -b * s1, 0.0),
                        zero,
                        zero,
                    ],
                }
            }
        }
    }

    fn label(&self) -> String {
        match self {
            Self::Plane { .. } => "plane",
            Self::Ellipsoid { .. } => "ellipsoid",
            Self::Cylinder { .. } => "cylinder",
            Self::Cone { .. } => "cone",
        }
        .to_string()
    }
}

/// A chart given only by its map; partials come from finite differences.
pub struct MapChart<F> {
    pub map: F,
    pub rect: ParamRect,
    pub name: String,
}

impl<F: Fn([f64; 2]) -> Vec3 + Send + Sync> Chart for MapChart<F> {
    fn rect(&self) -> ParamRect {
        self.rect
    }

    fn point(&self, y: [f64; 2]) -> Vec3 {
        (self.map)(y)
    }

    fn label(&self) -> String {
        self.name.clone()
    }
}

/// Fundamental forms, frames and connection of the middle surface at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceGeometry {
    pub y: [f64; 2],
    pub point: Vec3,
    pub a_cov: [[f64; 2]; 2],
    pub a_con: [[f64; 2]; 2],
    pub sqrt_a: f64,
    /// `a_1, a_2, a_3`
    pub base: [Vec3; 3],
    /// `a^1, a^2, a^3`
    pub dual: [Vec3; 3],
    pub b_cov: [[f64; 2]; 2],
    pub b_mix: [[f64; 2]; 2],
    pub db_mix: [[[f64; 2]; 2]; 2],
    pub christoffel: [[[f64; 2]; 2]; 2],
    pub kappa: f64,
    /// `d_a a_3 = -b_a^s a_s`
    pub d_normal: [Vec3; 2],
    /// `d_a d_b a_3`
    pub dd_normal: [[Vec3; 2]; 2],
}

impl SurfaceGeometry {
    /// `d_b a^a = -Gamma^a_{bs} a^s + b_b^a a^3`
    pub fn d_dual(&self, a: usize, b: usize) -> Vec3 {
        let mut v = self.b_mix[b][a] * self.dual[2];
        for s in 0..2 {
            v -= self.christoffel[a][b][s] * self.dual[s];
        }
        v
    }

    /// Mean curvature `H = b_a^a / 2`.
    pub fn mean_curvature(&self) -> f64 {
        0.5 * (self.b_mix[0][0] + self.b_mix[1][1])
    }

    /// Largest principal curvature in absolute value.
    pub fn max_abs_principal_curvature(&self) -> f64 {
        let h = self.mean_curvature();
        let disc = (h * h - self.kappa).max(0.0).sqrt();
        (h + disc).abs().max((h - disc).abs())
    }
}

pub fn surface_at(chart: &dyn Chart, y: [f64; 2]) -> Result<SurfaceGeometry> {
    surface_from_jet(&chart.jet(y), y)
}

pub fn surface_from_jet(jet: &ChartJet, y: [f64; 2]) -> Result<SurfaceGeometry> {
    let a = jet.d1;
    let cross = a[0].cross(&a[1]);
    let norm = cross.norm();
    if !(norm >= DEGENERACY_TOL) {
        return Err(Error::DegenerateChart { y, norm });
    }
    let a3 = cross / norm;

    let a_cov = [[a[0].dot(&a[0]), a[0].dot(&a[1])], [a[1].dot(&a[0]), a[1].dot(&a[1])]];
    let det_a = a_cov[0][0] * a_cov[1][1] - a_cov[0][1] * a_cov[1][0];
    let a_con = [
        [a_cov[1][1] / det_a, -a_cov[0][1] / det_a],
        [-a_cov[1][0] / det_a, a_cov[0][0] / det_a],
    ];
    let dual = [
        a_con[0][0] * a[0] + a_con[0][1] * a[1],
        a_con[1][0] * a[0] + a_con[1][1] * a[1],
        a3,
    ];

    let mut b_cov = [[0.0; 2]; 2];
    let mut christoffel = [[[0.0; 2]; 2]; 2];
    for al in 0..2 {
        for be in 0..2 {
            let dab = jet.second(al, be);
            b_cov[al][be] = dab.dot(&a3);
            for s in 0..2 {
                christoffel[s][al][be] = dab.dot(&dual[s]);
            }
        }
    }

    let mut b_mix = [[0.0; 2]; 2];
    for al in 0..2 {
        for be in 0..2 {
            b_mix[al][be] = (0..2).map(|s| a_con[be][s] * b_cov[al][s]).sum();
        }
    }

    let d_normal = [
        -(b_mix[0][0] * a[0] + b_mix[0][1] * a[1]),
        -(b_mix[1][0] * a[0] + b_mix[1][1] * a[1]),
    ];

    // d_c b_{ab} = d_cab theta . a3 + d_ab theta . d_c a3
    let mut db_cov = [[[0.0; 2]; 2]; 2];
    // d_c a^{bs} = -a^{bm} (d_c a_{mn}) a^{ns}
    let mut da_con = [[[0.0; 2]; 2]; 2];
    for c in 0..2 {
        for al in 0..2 {
            for be in 0..2 {
                db_cov[c][al][be] = jet.third(c, al, be).dot(&a3) + jet.second(al, be).dot(&d_normal[c]);
            }
        }
        let mut da_cov = [[0.0; 2]; 2];
        for mu in 0..2 {
            for nu in 0..2 {
                da_cov[mu][nu] = jet.second(c, mu).dot(&a[nu]) + a[mu].dot(&jet.second(c, nu));
            }
        }
        for be in 0..2 {
            for s in 0..2 {
                let mut acc = 0.0;
                for mu in 0..2 {
                    for nu in 0..2 {
                        acc -= a_con[be][mu] * da_cov[mu][nu] * a_con[nu][s];
                    }
                }
                da_con[c][be][s] = acc;
            }
        }
    }
    let mut db_mix = [[[0.0; 2]; 2]; 2];
    for c in 0..2 {
        for al in 0..2 {
            for be in 0..2 {
                db_mix[c][al][be] = (0..2)
                    .map(|s| da_con[c][be][s] * b_cov[al][s] + a_con[be][s] * db_cov[c][al][s])
                    .sum();
            }
        }
    }

    // d_a d_b a3 = -d_a(b_b^s) a_s - b_b^s d_a a_s
    let mut dd_normal = [[Vec3::zeros(); 2]; 2];
    for al in 0..2 {
        for be in 0..2 {
            let mut v = Vec3::zeros();
            for s in 0..2 {
                v -= db_mix[al][be][s] * a[s] + b_mix[be][s] * jet.second(al, s);
            }
            dd_normal[al][be] = v;
        }
    }

    let det_b = b_cov[0][0] * b_cov[1][1] - b_cov[0][1] * b_cov[1][0];

    Ok(SurfaceGeometry {
        y,
        point: jet.point,
        a_cov,
        a_con,
        sqrt_a: det_a.sqrt(),
        base: [a[0], a[1], a3],
        dual,
        b_cov,
        b_mix,
        db_mix,
        christoffel,
        kappa: det_b / det_a,
        d_normal,
        dd_normal,
    })
}

/// Metric and connection of the shell map at a point of the scaled domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeGeometry {
    pub y: [f64; 2],
    /// Scaled transverse coordinate in `[-1, 1]`.
    pub x3: f64,
    pub eps: f64,
    pub g_cov: [[f64; 3]; 3],
    pub g_con: [[f64; 3]; 3],
    pub sqrt_g: f64,
    pub g_base: [Vec3; 3],
    pub g_dual: [Vec3; 3],
    pub christoffel3: [[[f64; 3]; 3]; 3],
}

pub fn volume_at(chart: &dyn Chart, y: [f64; 2], x3: f64, eps: f64) -> Result<VolumeGeometry> {
    let surface = surface_at(chart, y)?;
    volume_from_surface(&surface, x3, eps)
}

pub fn volume_from_surface(s: &SurfaceGeometry, x3: f64, eps: f64) -> Result<VolumeGeometry> {
    if !(eps > 0.0) {
        return Err(Error::ZeroThickness(eps));
    }
    let t = eps * x3;
    let g_base = [s.base[0] + t * s.d_normal[0], s.base[1] + t * s.d_normal[1], s.base[2]];
    let mut g_cov = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            g_cov[i][j] = g_base[i].dot(&g_base[j]);
        }
    }
    let gm = Matrix3::from_fn(|i, j| g_cov[i][j]);
    let det = gm.determinant();
    let det_a = s.sqrt_a * s.sqrt_a;
    let ratio = det / det_a;
    // past a focal point g_cov stays definite but the map folds over,
    // which shows up as a sign change of the oriented volume
    let oriented = g_base[0].cross(&g_base[1]).dot(&g_base[2]) / s.sqrt_a;
    if !(ratio > VOLUME_DEGENERACY_TOL) || !(oriented > 0.0) {
        return Err(Error::ThicknessExceedsCurvature {
            y: s.y,
            x3,
            eps,
            ratio: oriented,
        });
    }
    let inv = gm.try_inverse().ok_or(Error::ThicknessExceedsCurvature {
        y: s.y,
        x3,
        eps,
        ratio: oriented,
    })?;
    let mut g_con = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            // symmetrize away rounding
            g_con[i][j] = 0.5 * (inv[(i, j)] + inv[(j, i)]);
        }
    }
    let mut g_dual = [Vec3::zeros(); 3];
    for i in 0..3 {
        for j in 0..3 {
            g_dual[i] += g_con[i][j] * g_base[j];
        }
    }

    // d_i g_j with d_3 taken in the physical transverse coordinate.
    let mut dg = [[Vec3::zeros(); 3]; 3];
    for al in 0..2 {
        for be in 0..2 {
            let d2 = second_from_christoffel(s, al, be);
            dg[al][be] = d2 + t * s.dd_normal[al][be];
        }
        dg[al][2] = s.d_normal[al];
        dg[2][al] = s.d_normal[al];
    }
    let mut christoffel3 = [[[0.0; 3]; 3]; 3];
    for p in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                christoffel3[p][i][j] = dg[i][j].dot(&g_dual[p]);
            }
        }
    }
    // Gamma^3_{a3} and Gamma^p_{33} vanish identically.
    for al in 0..2 {
        christoffel3[2][al][2] = 0.0;
        christoffel3[2][2][al] = 0.0;
    }
    for p in 0..3 {
        christoffel3[p][2][2] = 0.0;
    }

    Ok(VolumeGeometry {
        y: s.y,
        x3,
        eps,
        g_cov,
        g_con,
        sqrt_g: det.sqrt(),
        g_base,
        g_dual,
        christoffel3,
    })
}

/// Recovers `d_a d_b theta = Gamma^s_{ab} a_s + b_{ab} a_3` from the stored
/// surface quantities.
pub fn second_from_christoffel(s: &SurfaceGeometry, a: usize, b: usize) -> Vec3 {
    s.christoffel[0][a][b] * s.base[0] + s.christoffel[1][a][b] * s.base[1] + s.b_cov[a][b] * s.base[2]
}

/// Smallest focal distance `1 / max |k_i|` sampled on an `n x n` grid.
pub fn focal_distance(chart: &dyn Chart, n: usize) -> Result<f64> {
    let rect = chart.rect();
    let mut kmax: f64 = 0.0;
    for i in 0..=n {
        for j in 0..=n {
            let y = rect.lerp([i as f64 / n as f64, j as f64 / n as f64]);
            let s = surface_at(chart, y)?;
            kmax = kmax.max(s.max_abs_principal_curvature());
        }
    }
    Ok(if kmax > 0.0 { 1.0 / kmax } else { f64::INFINITY })
}
