//! Sparse symmetric linear algebra for the per-step systems.

mod csr;
mod envelope;
mod mtx;
mod precond;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use csr::{dot, norm2, CsrMatrix};
pub use mtx::{read_matrix_market, write_matrix_market};

use envelope::EnvelopeCholesky;
use precond::{IncompleteCholesky, Jacobi, Precondition};

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("dimension mismatch: matrix is {rows}x{cols}, right-hand side has {rhs}")]
    DimensionMismatch {
        rows: usize,
        cols: usize,
        rhs: usize,
    },
    #[error("no convergence after {iterations} iterations (relative residual {residual:.3e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error(
        "conjugate gradient breakdown at iteration {iteration}: matrix is not positive definite"
    )]
    Breakdown { iteration: usize },
    #[error("matrix is not symmetric positive definite (detected at row {row})")]
    NotPositiveDefinite { row: usize },
    #[error("matrix is not symmetric (max |a_ij - a_ji| = {0:.3e})")]
    NotSymmetric(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ConjugateGradient,
    SparseDirect,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preconditioner {
    None,
    Jacobi,
    IncompleteCholesky,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::ConjugateGradient => "conjugate-gradient",
            Method::SparseDirect => "sparse-direct",
        })
    }
}

impl FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "conjugate-gradient" | "cg" => Ok(Method::ConjugateGradient),
            "sparse-direct" | "direct" => Ok(Method::SparseDirect),
            _ => Err(format!("unknown solver method '{s}'")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub method: Method,
    /// Relative residual tolerance `‖Ax − b‖ ≤ tol·‖b‖`.
    pub tolerance: f64,
    /// `None` means `10·n`.
    pub max_iterations: Option<usize>,
    pub preconditioner: Preconditioner,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            method: Method::ConjugateGradient,
            tolerance: 1e-10,
            max_iterations: None,
            preconditioner: Preconditioner::IncompleteCholesky,
        }
    }
}

impl SolverConfig {
    pub fn direct() -> Self {
        Self {
            method: Method::SparseDirect,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return Err(SolveError::InvalidConfig(format!(
                "tolerance {} not in (0, 1)",
                self.tolerance
            )));
        }
        if self.max_iterations == Some(0) {
            return Err(SolveError::InvalidConfig(
                "max_iterations must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Final relative residual `‖Ax − b‖/‖b‖`.
    pub residual: f64,
}

enum Prepared {
    Cg(Box<dyn Precondition>),
    Direct(EnvelopeCholesky),
}

/// A symmetric positive definite system matrix with its preconditioner or
/// factorization computed once and reused for every right-hand side.
pub struct LinearSolver {
    matrix: CsrMatrix,
    cfg: SolverConfig,
    prepared: Prepared,
}

impl fmt::Debug for LinearSolver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LinearSolver")
            .field("n", &self.matrix.nrows())
            .field("nnz", &self.matrix.nnz())
            .field("cfg", &self.cfg)
            .finish()
    }
}

impl LinearSolver {
    pub fn new(matrix: CsrMatrix, cfg: SolverConfig) -> Result<Self, SolveError> {
        cfg.validate()?;
        if matrix.nrows() != matrix.ncols() {
            return Err(SolveError::DimensionMismatch {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
                rhs: matrix.nrows(),
            });
        }
        if cfg!(debug_assertions) {
            check_spd_stochastic(&matrix)?;
        }
        let prepared = match cfg.method {
            Method::SparseDirect => Prepared::Direct(EnvelopeCholesky::new(&matrix)?),
            Method::ConjugateGradient => Prepared::Cg(match cfg.preconditioner {
                Preconditioner::None => Box::new(precond::Identity),
                Preconditioner::Jacobi => Box::new(Jacobi::new(&matrix)?),
                Preconditioner::IncompleteCholesky => Box::new(IncompleteCholesky::new(&matrix)?),
            }),
        };
        Ok(Self {
            matrix,
            cfg,
            prepared,
        })
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn solve(&self, b: &[f64], guess: Option<&[f64]>) -> Result<SolveOutcome, SolveError> {
        self.solve_observed(b, guess, |_, _, _| {})
    }

    /// Like [`solve`](Self::solve), calling `observe(iteration, x, relative_residual)`
    /// after every conjugate gradient iteration.
    pub fn solve_observed<F>(
        &self,
        b: &[f64],
        guess: Option<&[f64]>,
        mut observe: F,
    ) -> Result<SolveOutcome, SolveError>
    where
        F: FnMut(usize, &[f64], f64),
    {
        let n = self.matrix.nrows();
        if b.len() != n || guess.is_some_and(|g| g.len() != n) {
            return Err(SolveError::DimensionMismatch {
                rows: n,
                cols: n,
                rhs: b.len(),
            });
        }
        let bnorm = norm2(b);
        if bnorm == 0.0 {
            return Ok(SolveOutcome {
                x: vec![0.0; n],
                iterations: 0,
                residual: 0.0,
            });
        }
        match &self.prepared {
            Prepared::Direct(factor) => {
                let x = factor.solve(b);
                let r = residual(&self.matrix, &x, b);
                Ok(SolveOutcome {
                    x,
                    iterations: 1,
                    residual: norm2(&r) / bnorm,
                })
            }
            Prepared::Cg(pc) => {
                let max_iter = self.cfg.max_iterations.unwrap_or(10 * n).max(1);
                pcg(
                    &self.matrix,
                    pc.as_ref(),
                    b,
                    guess,
                    self.cfg.tolerance,
                    max_iter,
                    &mut observe,
                )
            }
        }
    }
}

/// One-shot solve of `A x = b`.
pub fn solve(a: &CsrMatrix, b: &[f64], cfg: &SolverConfig) -> Result<Vec<f64>, SolveError> {
    Ok(LinearSolver::new(a.clone(), *cfg)?.solve(b, None)?.x)
}

fn residual(a: &CsrMatrix, x: &[f64], b: &[f64]) -> Vec<f64> {
    let ax = a.mul_vec(x);
    b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect()
}

fn pcg(
    a: &CsrMatrix,
    pc: &dyn Precondition,
    b: &[f64],
    guess: Option<&[f64]>,
    tol: f64,
    max_iter: usize,
    observe: &mut dyn FnMut(usize, &[f64], f64),
) -> Result<SolveOutcome, SolveError> {
    let n = b.len();
    let bnorm = norm2(b);
    let mut x = guess.map_or_else(|| vec![0.0; n], <[f64]>::to_vec);
    let mut r = residual(a, &x, b);
    let mut rel = norm2(&r) / bnorm;
    if rel <= tol {
        return Ok(SolveOutcome {
            x,
            iterations: 0,
            residual: rel,
        });
    }
    let mut z = vec![0.0; n];
    pc.apply(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for it in 1..=max_iter {
        a.mul_vec_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap.is_nan() || pap <= 0.0 {
            return Err(SolveError::Breakdown { iteration: it });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        rel = norm2(&r) / bnorm;
        observe(it, &x, rel);
        if rel <= tol {
            return Ok(SolveOutcome {
                x,
                iterations: it,
                residual: rel,
            });
        }
        pc.apply(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(SolveError::NotConverged {
        iterations: max_iter,
        residual: rel,
    })
}

/// Symmetry check plus `xᵀAx > 0` on a few pseudo-random vectors.
fn check_spd_stochastic(a: &CsrMatrix) -> Result<(), SolveError> {
    use rand::{Rng, SeedableRng};
    let asym = a.max_asymmetry();
    let scale = a.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if asym > 1e-12 * scale {
        return Err(SolveError::NotSymmetric(asym));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..3 {
        let x: Vec<f64> = (0..a.nrows())
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        let q = a.bilinear(&x, &x);
        if q.is_nan() || q <= 0.0 {
            return Err(SolveError::NotPositiveDefinite { row: 0 });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_returns_rhs() {
        let b = vec![1.0, -2.0, 3.5];
        for cfg in [SolverConfig::default(), SolverConfig::direct()] {
            let x = solve(&CsrMatrix::identity(3), &b, &cfg).unwrap();
            assert_eq!(x, b);
        }
    }

    #[test]
    fn diagonal_two_by_two() {
        let a = CsrMatrix::from_triplets(2, 2, &[(0, 0, 2.0), (1, 1, 3.0)]);
        for pc in [
            Preconditioner::None,
            Preconditioner::Jacobi,
            Preconditioner::IncompleteCholesky,
        ] {
            let cfg = SolverConfig {
                preconditioner: pc,
                ..SolverConfig::default()
            };
            let x = solve(&a, &[2.0, 3.0], &cfg).unwrap();
            assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn invalid_config_is_rejected() {
        let bad = SolverConfig {
            tolerance: 1.5,
            ..SolverConfig::default()
        };
        assert!(matches!(bad.validate(), Err(SolveError::InvalidConfig(_))));
        let bad = SolverConfig {
            max_iterations: Some(0),
            ..SolverConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn non_convergence_reports_residual() {
        let n = 50;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i > 0 {
                t.push((i, i - 1, -1.0));
                t.push((i - 1, i, -1.0));
            }
        }
        let a = CsrMatrix::from_triplets(n, n, &t);
        let cfg = SolverConfig {
            max_iterations: Some(2),
            preconditioner: Preconditioner::None,
            ..SolverConfig::default()
        };
        let err = solve(&a, &vec![1.0; n], &cfg).unwrap_err();
        match err {
            SolveError::NotConverged {
                iterations,
                residual,
            } => {
                assert_eq!(iterations, 2);
                assert!(residual > 1e-10);
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn indefinite_matrix_breaks_down() {
        // symmetric, positive diagonal, indefinite; skip the debug SPD probe by
        // driving the CG kernel directly
        let a =
            CsrMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 1, 3.0), (1, 0, 3.0), (1, 1, 1.0)]);
        let mut sink = |_: usize, _: &[f64], _: f64| {};
        let err = pcg(
            &a,
            &precond::Identity,
            &[1.0, -1.0],
            None,
            1e-10,
            10,
            &mut sink,
        )
        .unwrap_err();
        assert!(matches!(err, SolveError::Breakdown { .. }));
    }
}
