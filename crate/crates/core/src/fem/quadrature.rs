//! Gauss rules on the interval, the reference triangle and the reference prism.
//!
//! The reference triangle is `{(s, t): s, t >= 0, s + t <= 1}` (measure 1/2);
//! the reference prism is that triangle times `[-1, 1]` (measure 1).

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "a Gauss rule needs at least one point");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// `P_n(x)` and `P_n'(x)` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (x * p1 - p0) / (x * x - 1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriangleRule {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl TriangleRule {
    /// Collapsed (Duffy) tensor Gauss rule exact for total degree `degree`.
    pub fn collapsed(degree: usize) -> Self {
        let n = (degree + 2).div_ceil(2);
        let (x, w) = gauss_legendre(n);
        let mut points = Vec::with_capacity(n * n);
        let mut weights = Vec::with_capacity(n * n);
        for (xi, wi) in x.iter().zip(&w) {
            let u = 0.5 * (xi + 1.0);
            for (xj, wj) in x.iter().zip(&w) {
                let v = 0.5 * (xj + 1.0);
                points.push([u, v * (1.0 - u)]);
                weights.push(0.25 * wi * wj * (1.0 - u));
            }
        }
        Self {
            points,
            weights,
            degree,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrismRule {
    pub triangle: TriangleRule,
    pub line_points: Vec<f64>,
    pub line_weights: Vec<f64>,
}

impl PrismRule {
    pub fn new(tri_degree: usize, line_degree: usize) -> Self {
        let (line_points, line_weights) = gauss_legendre(line_degree / 2 + 1);
        Self {
            triangle: TriangleRule::collapsed(tri_degree),
            line_points,
            line_weights,
        }
    }

    pub fn degree(&self) -> usize {
        self.triangle.degree.min(2 * self.line_points.len() - 1)
    }

    /// `((s, t, z), weight)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = ([f64; 3], f64)> + '_ {
        self.triangle
            .points
            .iter()
            .zip(&self.triangle.weights)
            .flat_map(move |(p, w)| {
                self.line_points
                    .iter()
                    .zip(&self.line_weights)
                    .map(move |(z, wz)| ([p[0], p[1], *z], w * wz))
            })
    }
}
