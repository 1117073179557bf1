//! Strain measures of surface and volume displacement fields and the
//! isotropic elasticity tensors of the shell models.

use nalgebra::{Matrix3, Matrix6};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{SurfaceGeometry, VolumeGeometry};

/// Symmetric 2x2 tensor stored as `(11, 22, 12)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Sym2(pub [f64; 3]);

/// Symmetric 3x3 tensor stored as `(11, 22, 33, 23, 13, 12)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Sym3(pub [f64; 6]);

const VOIGT2: [[usize; 2]; 2] = [[0, 2], [2, 1]];
const VOIGT3: [[usize; 3]; 3] = [[0, 5, 4], [5, 1, 3], [4, 3, 2]];

impl Sym2 {
    #[inline]
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.0[VOIGT2[a][b]]
    }

    pub fn full(&self) -> [[f64; 2]; 2] {
        [[self.0[0], self.0[2]], [self.0[2], self.0[1]]]
    }
}

impl Sym3 {
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[VOIGT3[i][j]]
    }

    pub fn full(&self) -> [[f64; 3]; 3] {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.get(i, j);
            }
        }
        m
    }
}

/// Covariant components of a surface displacement `eta_i a^i` and their
/// derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SurfaceDisplacementJet {
    pub eta: [f64; 3],
    /// `d_eta[i][b] = d_b eta_i`
    pub d_eta: [[f64; 2]; 3],
    pub dd_eta3: Option<[[f64; 2]; 2]>,
}

/// Covariant components `v_i` of a scaled 3D displacement and `d_j v_i`,
/// with `j = 3` the derivative in the scaled coordinate `x3`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VolumeDisplacementJet {
    pub v: [f64; 3],
    pub d_v: [[f64; 3]; 3],
}

/// Linearized change of metric
/// `gamma_ab = (d_b eta_a + d_a eta_b)/2 - Gamma^s_ab eta_s - b_ab eta_3`.
pub fn gamma(geom: &SurfaceGeometry, jet: &SurfaceDisplacementJet) -> Sym2 {
    let entry = |a: usize, b: usize| {
        0.5 * (jet.d_eta[a][b] + jet.d_eta[b][a])
            - geom.christoffel[0][a][b] * jet.eta[0]
            - geom.christoffel[1][a][b] * jet.eta[1]
            - geom.b_cov[a][b] * jet.eta[2]
    };
    Sym2([entry(0, 0), entry(1, 1), entry(0, 1)])
}

/// Linearized change of curvature.
pub fn rho(geom: &SurfaceGeometry, jet: &SurfaceDisplacementJet) -> Result<Sym2> {
    let dd = jet.dd_eta3.ok_or(Error::MissingSecondDerivatives)?;
    let g = &geom.christoffel;
    let bm = &geom.b_mix;
    let eta = &jet.eta;
    let d = &jet.d_eta;

    // covariant derivative of the tangential part: eta_{s|b} = d_b eta_s - Gamma^t_{bs} eta_t
    let cov = |s: usize, b: usize| d[s][b] - g[0][b][s] * eta[0] - g[1][b][s] * eta[1];
    // b^t_{b|a} = d_a b^t_b + Gamma^t_{as} b^s_b - Gamma^s_{ab} b^t_s
    let b_cov_deriv = |t: usize, b: usize, a: usize| {
        let mut v = geom.db_mix[a][b][t];
        for s in 0..2 {
            v += g[t][a][s] * bm[b][s] - g[s][a][b] * bm[s][t];
        }
        v
    };

    let entry = |a: usize, b: usize| {
        let mut r = dd[a][b];
        for s in 0..2 {
            r -= g[s][a][b] * d[2][s];
            r -= bm[a][s] * geom.b_cov[s][b] * eta[2];
            r += bm[a][s] * cov(s, b);
            r += bm[b][s] * cov(s, a);
            r += b_cov_deriv(s, b, a) * eta[s];
        }
        r
    };
    // the two mixed entries agree up to the Codazzi identity; average away rounding
    Ok(Sym2([entry(0, 0), entry(1, 1), 0.5 * (entry(0, 1) + entry(1, 0))]))
}

/// Scaled linearized strains `e_{i||j}(eps; v)` on the fixed domain.
pub fn strain3_scaled(vol: &VolumeGeometry, jet: &VolumeDisplacementJet, eps: f64) -> Result<Sym3> {
    if !(eps > 0.0) {
        return Err(Error::ZeroThickness(eps));
    }
    let g = &vol.christoffel3;
    let v = &jet.v;
    let d = &jet.d_v;
    let inv = 1.0 / eps;
    let tangential =
        |a: usize, b: usize| 0.5 * (d[a][b] + d[b][a]) - g[0][a][b] * v[0] - g[1][a][b] * v[1] - g[2][a][b] * v[2];
    let transverse = |a: usize| 0.5 * (inv * d[a][2] + d[2][a]) - g[0][a][2] * v[0] - g[1][a][2] * v[1];
    Ok(Sym3([
        tangential(0, 0),
        tangential(1, 1),
        inv * d[2][2],
        transverse(1),
        transverse(0),
        tangential(0, 1),
    ]))
}

/// Lame constants in Pa.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lame {
    pub lambda: f64,
    pub mu: f64,
}

impl Lame {
    pub fn new(lambda: f64, mu: f64) -> Result<Self> {
        let lame = Self { lambda, mu };
        lame.validate()?;
        Ok(lame)
    }

    pub fn from_young_poisson(young: f64, poisson: f64) -> Result<Self> {
        Self::new(
            young * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson)),
            young / (2.0 * (1.0 + poisson)),
        )
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0) || !(self.lambda >= 0.0) || !self.lambda.is_finite() || !self.mu.is_finite() {
            return Err(Error::InvalidLame {
                lambda: self.lambda,
                mu: self.mu,
            });
        }
        Ok(())
    }

    /// Coefficient `4 lambda mu / (lambda + 2 mu)` of the shell tensor.
    pub fn shell_lambda(&self) -> f64 {
        4.0 * self.lambda * self.mu / (self.lambda + 2.0 * self.mu)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElasticityTensor2D {
    pub a4: [[[[f64; 2]; 2]; 2]; 2],
    pub lame: Lame,
    /// `gamma^T voigt gamma = a^{abst} gamma_st gamma_ab` for `Sym2` storage.
    pub voigt: Matrix3<f64>,
}

impl ElasticityTensor2D {
    pub fn energy(&self, x: &Sym2, y: &Sym2) -> f64 {
        let xv = nalgebra::Vector3::from(x.0);
        let yv = nalgebra::Vector3::from(y.0);
        xv.dot(&(self.voigt * yv))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElasticityTensor3D {
    pub a4: [[[[f64; 3]; 3]; 3]; 3],
    pub lame: Lame,
    pub voigt: Matrix6<f64>,
}

impl ElasticityTensor3D {
    pub fn energy(&self, x: &Sym3, y: &Sym3) -> f64 {
        let xv = nalgebra::Vector6::from(x.0);
        let yv = nalgebra::Vector6::from(y.0);
        xv.dot(&(self.voigt * yv))
    }
}

pub fn tensor2d(geom: &SurfaceGeometry, lame: Lame) -> Result<ElasticityTensor2D> {
    lame.validate()?;
    let a = &geom.a_con;
    let c = lame.shell_lambda();
    let mut a4 = [[[[0.0; 2]; 2]; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    a4[i][j][k][l] = c * a[i][j] * a[k][l] + 2.0 * lame.mu * (a[i][k] * a[j][l] + a[i][l] * a[j][k]);
                }
            }
        }
    }
    const PAIRS: [(usize, usize); 3] = [(0, 0), (1, 1), (0, 1)];
    let weight = |p: usize| if p == 2 { 2.0 } else { 1.0 };
    let voigt = Matrix3::from_fn(|p, q| {
        let (i, j) = PAIRS[p];
        let (k, l) = PAIRS[q];
        weight(p) * weight(q) * a4[i][j][k][l]
    });
    Ok(ElasticityTensor2D { a4, lame, voigt })
}

pub fn tensor3d(vol: &VolumeGeometry, lame: Lame) -> Result<ElasticityTensor3D> {
    lame.validate()?;
    let g = &vol.g_con;
    let mut a4 = [[[[0.0; 3]; 3]; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    a4[i][j][k][l] =
                        lame.lambda * g[i][j] * g[k][l] + lame.mu * (g[i][k] * g[j][l] + g[i][l] * g[j][k]);
                }
            }
        }
    }
    const PAIRS: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1)];
    let weight = |p: usize| if p >= 3 { 2.0 } else { 1.0 };
    let voigt = Matrix6::from_fn(|p, q| {
        let (i, j) = PAIRS[p];
        let (k, l) = PAIRS[q];
        weight(p) * weight(q) * a4[i][j][k][l]
    });
    Ok(ElasticityTensor3D { a4, lame, voigt })
}
