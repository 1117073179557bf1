//! Reduced Hsieh-Clough-Tocher macro element.
//!
//! The triangle `P0 P1 P2` is split at its centroid `C` into the subtriangles
//! `T_k = (P_k, P_{k+1}, C)`. On each `T_k` the basis functions are cubics in
//! `xi = (y - C) / h`. The nine degrees of freedom are `w, d1 w, d2 w` at each
//! vertex; the normal derivative at each outer-edge midpoint is tied to the
//! average of the endpoint normal derivatives, so normal derivatives are
//! linear along outer edges and the assembled space is C1.
//!
//! The 30 cubic coefficients per basis function are found numerically from
//! the interpolation and interior C1 conditions (an overdetermined but
//! consistent system, solved by SVD).

use nalgebra::DMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ScalarJet {
    pub value: f64,
    pub grad: [f64; 2],
    pub hess: [[f64; 2]; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct HctElement {
    pub corners: [[f64; 2]; 3],
    pub center: [f64; 2],
    h: f64,
    /// `coef[k][j]`: monomial coefficients of basis `j` on subtriangle `k`
    coef: [[[f64; 10]; 9]; 3],
}

/// Cubic monomials `1, x, y, x^2, xy, y^2, x^3, x^2 y, x y^2, y^3` with
/// gradient and Hessian.
fn monomials(x: f64, y: f64) -> ([f64; 10], [[f64; 10]; 2], [[f64; 10]; 3]) {
    let v = [
        1.0,
        x,
        y,
        x * x,
        x * y,
        y * y,
        x * x * x,
        x * x * y,
        x * y * y,
        y * y * y,
    ];
    let dx = [0.0, 1.0, 0.0, 2.0 * x, y, 0.0, 3.0 * x * x, 2.0 * x * y, y * y, 0.0];
    let dy = [0.0, 0.0, 1.0, 0.0, x, 2.0 * y, 0.0, x * x, 2.0 * x * y, 3.0 * y * y];
    let dxx = [0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 6.0 * x, 2.0 * y, 0.0, 0.0];
    let dxy = [0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 2.0 * x, 2.0 * y, 0.0];
    let dyy = [0.0, 0.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 2.0 * x, 6.0 * y];
    (v, [dx, dy], [dxx, dxy, dyy])
}

fn dot10(a: &[f64; 10], b: &[f64; 10]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl HctElement {
    pub fn new(corners: [[f64; 2]; 3]) -> Self {
        let center = [
            (corners[0][0] + corners[1][0] + corners[2][0]) / 3.0,
            (corners[0][1] + corners[1][1] + corners[2][1]) / 3.0,
        ];
        let h = (0..3)
            .map(|k| {
                let (a, b) = (corners[k], corners[(k + 1) % 3]);
                (b[0] - a[0]).hypot(b[1] - a[1])
            })
            .fold(0.0, f64::max);
        let local = |p: [f64; 2]| [(p[0] - center[0]) / h, (p[1] - center[1]) / h];
        let p = corners.map(local);

        let mut rows: Vec<([f64; 30], [f64; 9])> = Vec::with_capacity(57);
        let put = |sub: usize, m: &[f64; 10], scale: f64, row: &mut [f64; 30]| {
            for (r, v) in row[sub * 10..sub * 10 + 10].iter_mut().zip(m) {
                *r += scale * v;
            }
        };

        // vertex values and gradients, from both subtriangles sharing the vertex
        for i in 0..3 {
            for sub in [i, (i + 2) % 3] {
                let (v, d, _) = monomials(p[i][0], p[i][1]);
                let mut row = [0.0; 30];
                put(sub, &v, 1.0, &mut row);
                let mut rhs = [0.0; 9];
                rhs[3 * i] = 1.0;
                rows.push((row, rhs));
                for c in 0..2 {
                    let mut row = [0.0; 30];
                    put(sub, &d[c], 1.0, &mut row);
                    let mut rhs = [0.0; 9];
                    rhs[3 * i + 1 + c] = h;
                    rows.push((row, rhs));
                }
            }
        }

        // outer-edge midpoint normal derivative = mean of endpoint normal derivatives
        for k in 0..3 {
            let (a, b) = (p[k], p[(k + 1) % 3]);
            let (tx, ty) = (b[0] - a[0], b[1] - a[1]);
            let len = tx.hypot(ty);
            let n = [ty / len, -tx / len];
            let (_, d, _) = monomials(0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]));
            let mut row = [0.0; 30];
            put(k, &d[0], n[0], &mut row);
            put(k, &d[1], n[1], &mut row);
            let mut rhs = [0.0; 9];
            for v in [k, (k + 1) % 3] {
                rhs[3 * v + 1] += 0.5 * h * n[0];
                rhs[3 * v + 2] += 0.5 * h * n[1];
            }
            rows.push((row, rhs));
        }

        // C1 continuity across the interior edges C -> P_k, shared by T_k and T_{k-1}
        for k in 0..3 {
            let prev = (k + 2) % 3;
            for t in [0.25, 0.5, 0.75, 1.0] {
                let (v, d, _) = monomials(t * p[k][0], t * p[k][1]);
                for m in [&v, &d[0], &d[1]] {
                    let mut row = [0.0; 30];
                    put(k, m, 1.0, &mut row);
                    put(prev, m, -1.0, &mut row);
                    rows.push((row, [0.0; 9]));
                }
            }
        }

        let a = DMatrix::from_fn(rows.len(), 30, |r, c| rows[r].0[c]);
        let b = DMatrix::from_fn(rows.len(), 9, |r, c| rows[r].1[c]);
        let x = a
            .svd(true, true)
            .solve(&b, 1e-12)
            .expect("SVD was computed with both factors");

        let mut coef = [[[0.0; 10]; 9]; 3];
        for (k, sub) in coef.iter_mut().enumerate() {
            for (j, basis) in sub.iter_mut().enumerate() {
                for (m, c) in basis.iter_mut().enumerate() {
                    *c = x[(k * 10 + m, j)];
                }
            }
        }
        Self {
            corners,
            center,
            h,
            coef,
        }
    }

    /// Barycentric coordinates of `y` in the macro triangle.
    pub fn barycentric(&self, y: [f64; 2]) -> [f64; 3] {
        let [a, b, c] = self.corners;
        let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
        let l1 = ((y[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (y[1] - a[1])) / det;
        let l2 = ((b[0] - a[0]) * (y[1] - a[1]) - (y[0] - a[0]) * (b[1] - a[1])) / det;
        [1.0 - l1 - l2, l1, l2]
    }

    /// Subtriangle `T_k` containing `y`: the one whose opposite vertex
    /// `P_{k+2}` has the smallest barycentric weight.
    pub fn subtriangle(&self, y: [f64; 2]) -> usize {
        let l = self.barycentric(y);
        let opposite = (0..3)
            .min_by(|&i, &j| l[i].partial_cmp(&l[j]).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap_or(0);
        (opposite + 1) % 3
    }

    pub fn subtriangle_corners(&self, k: usize) -> [[f64; 2]; 3] {
        [self.corners[k], self.corners[(k + 1) % 3], self.center]
    }

    /// All nine basis functions at `y`, evaluated with the polynomial of
    /// subtriangle `sub` (or the containing one when `None`).
    pub fn eval(&self, y: [f64; 2], sub: Option<usize>) -> [ScalarJet; 9] {
        let k = sub.unwrap_or_else(|| self.subtriangle(y));
        let (v, d, dd) = monomials((y[0] - self.center[0]) / self.h, (y[1] - self.center[1]) / self.h);
        let (ih, ih2) = (1.0 / self.h, 1.0 / (self.h * self.h));
        let mut out = [ScalarJet::default(); 9];
        for (j, o) in out.iter_mut().enumerate() {
            let c = &self.coef[k][j];
            let hxy = ih2 * dot10(c, &dd[1]);
            *o = ScalarJet {
                value: dot10(c, &v),
                grad: [ih * dot10(c, &d[0]), ih * dot10(c, &d[1])],
                hess: [[ih2 * dot10(c, &dd[0]), hxy], [hxy, ih2 * dot10(c, &dd[2])]],
            };
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn element() -> HctElement {
        HctElement::new([[0.1, 0.2], [0.9, 0.35], [0.3, 1.0]])
    }

    /// Interpolate with vertex data of `q` and compare on random points.
    fn check_reproduction(q: impl Fn([f64; 2]) -> ScalarJet) {
        let e = element();
        let dofs: Vec<f64> = e
            .corners
            .iter()
            .flat_map(|&p| {
                let j = q(p);
                [j.value, j.grad[0], j.grad[1]]
            })
            .collect();
        for &(s, t) in &[(0.2, 0.3), (0.6, 0.1), (0.1, 0.8), (0.33, 0.33), (0.45, 0.5)] {
            let [a, b, c] = e.corners;
            let y = [
                a[0] + s * (b[0] - a[0]) + t * (c[0] - a[0]),
                a[1] + s * (b[1] - a[1]) + t * (c[1] - a[1]),
            ];
            let basis = e.eval(y, None);
            let mut w = ScalarJet::default();
            for (bj, dj) in basis.iter().zip(&dofs) {
                w.value += dj * bj.value;
                for i in 0..2 {
                    w.grad[i] += dj * bj.grad[i];
                    for k in 0..2 {
                        w.hess[i][k] += dj * bj.hess[i][k];
                    }
                }
            }
            let exact = q(y);
            assert!((w.value - exact.value).abs() < 1e-11);
            for i in 0..2 {
                assert!((w.grad[i] - exact.grad[i]).abs() < 1e-10);
                for k in 0..2 {
                    assert!((w.hess[i][k] - exact.hess[i][k]).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn reproduces_quadratics() {
        check_reproduction(|y| ScalarJet {
            value: 1.0 - 2.0 * y[0] + 0.5 * y[1] + 3.0 * y[0] * y[0] - y[0] * y[1] + 2.5 * y[1] * y[1],
            grad: [-2.0 + 6.0 * y[0] - y[1], 0.5 - y[0] + 5.0 * y[1]],
            hess: [[6.0, -1.0], [-1.0, 5.0]],
        });
    }

    #[test]
    fn vertex_dofs_are_interpolated() {
        let e = element();
        for (i, &p) in e.corners.iter().enumerate() {
            for sub in [i, (i + 2) % 3] {
                let b = e.eval(p, Some(sub));
                for (j, bj) in b.iter().enumerate() {
                    let want = |slot: usize| if j == 3 * i + slot { 1.0 } else { 0.0 };
                    assert!((bj.value - want(0)).abs() < 1e-12);
                    assert!((bj.grad[0] - want(1)).abs() < 1e-11);
                    assert!((bj.grad[1] - want(2)).abs() < 1e-11);
                }
            }
        }
    }

    #[test]
    fn interior_edges_are_c1() {
        let e = element();
        for k in 0..3 {
            let prev = (k + 2) % 3;
            for t in [0.1, 0.4, 0.77] {
                let y = [
                    e.center[0] + t * (e.corners[k][0] - e.center[0]),
                    e.center[1] + t * (e.corners[k][1] - e.center[1]),
                ];
                let (a, b) = (e.eval(y, Some(k)), e.eval(y, Some(prev)));
                for j in 0..9 {
                    assert!((a[j].value - b[j].value).abs() < 1e-12);
                    assert!((a[j].grad[0] - b[j].grad[0]).abs() < 1e-11);
                    assert!((a[j].grad[1] - b[j].grad[1]).abs() < 1e-11);
                }
            }
        }
    }

    #[test]
    fn outer_normal_derivative_is_linear() {
        let e = element();
        for k in 0..3 {
            let (a, b) = (e.corners[k], e.corners[(k + 1) % 3]);
            let (tx, ty) = (b[0] - a[0], b[1] - a[1]);
            let n = [ty, -tx];
            let at = |s: f64| {
                let y = [a[0] + s * tx, a[1] + s * ty];
                e.eval(y, Some(k)).map(|j| j.grad[0] * n[0] + j.grad[1] * n[1])
            };
            let (d0, d1, dq) = (at(0.0), at(1.0), at(0.3));
            for j in 0..9 {
                assert!((dq[j] - (0.7 * d0[j] + 0.3 * d1[j])).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn subtriangle_selection() {
        let e = element();
        for k in 0..3 {
            let [a, b, c] = e.subtriangle_corners(k);
            let y = [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0];
            assert_eq!(e.subtriangle(y), k);
        }
    }
}
