//! Sparse symmetric positive definite solves.
//!
//! The direct path is a sequential sparse Cholesky factorization with an
//! approximate minimum degree ordering, followed by iterative refinement in
//! which residuals are accumulated with error-free transformations. The
//! fallback is conjugate gradients with a Jacobi preconditioner.

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::cholesky::llt::factor::LltRegularization;
use faer::sparse::linalg::cholesky::{factorize_symbolic_cholesky, CholeskySymbolicParams, SymmetricOrdering};
use faer::sparse::{SparseColMat, Triplet};
use faer::{Conj, MatMut, Par, Side};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::sparse::{CsrMatrix, SparseSystem};

pub const DIRECT_TOL: f64 = 1e-10;
pub const ITERATIVE_TOL: f64 = 1e-8;
/// Systems above this size go to conjugate gradients under `Auto`.
pub const DIRECT_LIMIT: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    DirectCholesky,
    PreconditionedCg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodChoice {
    #[default]
    Auto,
    Direct,
    Iterative,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    pub method: MethodChoice,
    /// relative residual target of the iterative method
    pub tol: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            method: MethodChoice::Auto,
            tol: ITERATIVE_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub method: SolveMethod,
    /// CG iterations, or refinement steps after the Cholesky solve
    pub iterations: usize,
    /// `|A x - b| / |b|`
    pub residual: f64,
    /// stored entries of the Cholesky factor
    pub fill: Option<usize>,
}

/// `b - A x` with every row accumulated in double-double arithmetic.
pub fn accurate_residual(a: &CsrMatrix, x: &[f64], b: &[f64]) -> Vec<f64> {
    (0..a.n)
        .map(|i| {
            let (mut hi, mut lo) = (b[i], 0.0);
            for (j, v) in a.row(i) {
                let p = -v * x[j];
                let pe = (-v).mul_add(x[j], -p);
                let (s, e) = two_sum(hi, p);
                hi = s;
                lo += e + pe;
            }
            hi + lo
        })
        .collect()
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `|A x - b| / |b|` (absolute when `b = 0`).
pub fn relative_residual(a: &CsrMatrix, x: &[f64], b: &[f64]) -> f64 {
    let r = norm(&accurate_residual(a, x, b));
    let nb = norm(b);
    if nb > 0.0 {
        r / nb
    } else {
        r
    }
}

struct Cholesky {
    symbolic: faer::sparse::linalg::cholesky::SymbolicCholesky<usize>,
    values: Vec<f64>,
}

impl Cholesky {
    fn factor(a: &CsrMatrix) -> Result<Self> {
        let mut triplets = Vec::with_capacity(a.nnz() / 2 + a.n);
        for i in 0..a.n {
            for (j, v) in a.row(i) {
                // CSR row i, column j >= i is the upper triangle
                if j >= i {
                    triplets.push(Triplet::new(i, j, v));
                }
            }
        }
        let mat = SparseColMat::<usize, f64>::try_new_from_triplets(a.n, a.n, &triplets)
            .map_err(|e| Error::SingularSystem(format!("sparse matrix creation failed: {e:?}")))?;
        let symbolic = factorize_symbolic_cholesky(
            mat.symbolic(),
            Side::Upper,
            SymmetricOrdering::Amd,
            CholeskySymbolicParams::default(),
        )
        .map_err(|e| Error::SingularSystem(format!("symbolic factorization failed: {e:?}")))?;
        let mut values = vec![0.0; symbolic.len_val()];
        let mut mem = MemBuffer::new(symbolic.factorize_numeric_llt_scratch::<f64>(Par::Seq, Default::default()));
        symbolic
            .factorize_numeric_llt(
                &mut values,
                mat.as_ref(),
                Side::Upper,
                LltRegularization::default(),
                Par::Seq,
                MemStack::new(&mut mem),
                Default::default(),
            )
            .map_err(|_| Error::NotPositiveDefinite)?;
        Ok(Self { symbolic, values })
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = rhs.to_vec();
        let n = x.len();
        let llt = faer::sparse::linalg::cholesky::LltRef::new(&self.symbolic, &self.values);
        let mut mem = MemBuffer::new(self.symbolic.solve_in_place_scratch::<f64>(1, Par::Seq));
        let view = MatMut::from_column_major_slice_mut(&mut x, n, 1);
        llt.solve_in_place_with_conj(Conj::No, view, Par::Seq, MemStack::new(&mut mem));
        x
    }
}

/// Cholesky solve with up to 8 refinement steps.
pub fn direct_solve(a: &CsrMatrix, b: &[f64]) -> Result<(Vec<f64>, SolveReport)> {
    let chol = Cholesky::factor(a)?;
    let mut x = chol.solve(b);
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NotPositiveDefinite);
    }
    let mut res = relative_residual(a, &x, b);
    let mut steps = 0;
    while res > 1e-3 * DIRECT_TOL && steps < 8 {
        let r = accurate_residual(a, &x, b);
        let dx = chol.solve(&r);
        let trial: Vec<f64> = x.iter().zip(&dx).map(|(x, d)| x + d).collect();
        let trial_res = relative_residual(a, &trial, b);
        steps += 1;
        if !(trial_res < res) {
            break;
        }
        x = trial;
        res = trial_res;
    }
    Ok((
        x,
        SolveReport {
            method: SolveMethod::DirectCholesky,
            iterations: steps,
            residual: res,
            fill: Some(chol.values.len()),
        },
    ))
}

/// Jacobi-preconditioned conjugate gradients, at most `10 n` iterations.
pub fn cg_solve(a: &CsrMatrix, b: &[f64], tol: f64) -> Result<(Vec<f64>, SolveReport)> {
    let n = a.n;
    let nb = norm(b);
    let mut x = vec![0.0; n];
    if nb == 0.0 {
        return Ok((
            x,
            SolveReport {
                method: SolveMethod::PreconditionedCg,
                iterations: 0,
                residual: 0.0,
                fill: None,
            },
        ));
    }
    let diag = a.diagonal();
    if diag.iter().any(|d| !(*d > 0.0)) {
        return Err(Error::NotPositiveDefinite);
    }
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let max_iter = 10 * n.max(1);
    for it in 1..=max_iter {
        let ap = a.mul_vec(&p);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if !(pap > 0.0) {
            return Err(Error::NotPositiveDefinite);
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if norm(&r) <= tol * nb {
            // confirm with a recomputed residual
            let res = relative_residual(a, &x, b);
            if res <= tol {
                return Ok((
                    x,
                    SolveReport {
                        method: SolveMethod::PreconditionedCg,
                        iterations: it,
                        residual: res,
                        fill: None,
                    },
                ));
            }
            r = accurate_residual(a, &x, b);
        }
        z = r.iter().zip(&diag).map(|(r, d)| r / d).collect();
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual: relative_residual(a, &x, b),
    })
}

/// Solves `A x = b` under the uniform contract: relative residual below
/// `1e-10` for the direct method and below `settings.tol` for CG.
pub fn factor_solve(a: &CsrMatrix, b: &[f64], settings: &SolverSettings) -> Result<(Vec<f64>, SolveReport)> {
    let (x, report) = factor_solve_unchecked(a, b, settings)?;
    if report.method == SolveMethod::DirectCholesky && report.residual > DIRECT_TOL {
        return Err(Error::ResidualTooLarge {
            residual: report.residual,
            threshold: DIRECT_TOL,
        });
    }
    Ok((x, report))
}

/// Like [`factor_solve`] but returns the direct solution whatever its
/// residual, leaving the check to the caller.
pub fn factor_solve_unchecked(a: &CsrMatrix, b: &[f64], settings: &SolverSettings) -> Result<(Vec<f64>, SolveReport)> {
    let direct = match settings.method {
        MethodChoice::Direct => true,
        MethodChoice::Iterative => false,
        MethodChoice::Auto => a.n <= DIRECT_LIMIT,
    };
    if direct {
        direct_solve(a, b)
    } else {
        cg_solve(a, b, settings.tol)
    }
}

/// Eliminates the constrained dofs and solves. Constrained entries of the
/// result are exactly zero.
pub fn solve_system(system: &SparseSystem, settings: &SolverSettings) -> Result<(Vec<f64>, SolveReport)> {
    let (x, report) = solve_system_unchecked(system, settings)?;
    if report.method == SolveMethod::DirectCholesky && report.residual > DIRECT_TOL {
        return Err(Error::ResidualTooLarge {
            residual: report.residual,
            threshold: DIRECT_TOL,
        });
    }
    Ok((x, report))
}

/// [`solve_system`] without the residual check.
pub fn solve_system_unchecked(system: &SparseSystem, settings: &SolverSettings) -> Result<(Vec<f64>, SolveReport)> {
    let reduced = system.eliminate_constraints();
    let (mut x, report) = factor_solve_unchecked(&reduced.matrix, &reduced.rhs, settings)?;
    for (v, &c) in x.iter_mut().zip(&system.constrained) {
        if c {
            *v = 0.0;
        }
    }
    Ok((x, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_returns_rhs() {
        let a = CsrMatrix::identity(4);
        let b = [1.0, -2.0, 3.0, 0.5];
        let (x, r) = factor_solve(&a, &b, &SolverSettings::default()).unwrap();
        assert_eq!(x, b);
        assert_eq!(r.method, SolveMethod::DirectCholesky);
    }

    #[test]
    fn diagonal_system() {
        let t: Vec<_> = (0..5).map(|i| (i, i, (i + 1) as f64)).collect();
        let a = CsrMatrix::from_triplets(5, &t);
        let (x, _) = factor_solve(&a, &[1.0; 5], &SolverSettings::default()).unwrap();
        for (i, v) in x.iter().enumerate() {
            assert!((v - 1.0 / (i + 1) as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn indefinite_matrix_is_rejected() {
        let a = CsrMatrix::from_triplets(2, &[(0, 0, 1.0), (0, 1, 2.0), (1, 0, 2.0), (1, 1, 1.0)]);
        assert!(matches!(direct_solve(&a, &[1.0, 1.0]), Err(Error::NotPositiveDefinite)));
    }

    #[test]
    fn cg_agrees_with_cholesky() {
        let n = 30;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0 + 0.01 * i as f64));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        let a = CsrMatrix::from_triplets(n, &t);
        let b: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let (xd, _) = direct_solve(&a, &b).unwrap();
        let (xc, rep) = cg_solve(&a, &b, 1e-12).unwrap();
        assert!(rep.iterations <= 10 * n);
        for (p, q) in xd.iter().zip(&xc) {
            assert!((p - q).abs() < 1e-9);
        }
    }

    #[test]
    fn accurate_residual_is_exact_on_cancellation() {
        let a = CsrMatrix::from_triplets(1, &[(0, 0, 1.0)]);
        let r = accurate_residual(&a, &[1.0 + f64::EPSILON], &[1.0]);
        assert_eq!(r[0], -f64::EPSILON);
    }
}
