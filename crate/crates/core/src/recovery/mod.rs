//! Gradient and Hessian recovery for piecewise linear nodal fields.
//!
//! Every operator is stored as a sparse node-to-node weight matrix, built
//! once per mesh by fitting the canonical nodal basis on each patch, and
//! applied by mat-vec afterwards.

mod fit;
mod ghost;

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use thiserror::Error;

use crate::linalg::{write_matrix_market, CsrMatrix};
use crate::mesh::{build_patch, Mesh, MeshError, Patch, Point};

pub use fit::{
    fit_quadratic, local_vandermonde, numerical_rank, patch_weights, satisfies_rank_condition,
    QuadraticFit, QUADRATIC_DIM, RANK_TOLERANCE,
};
pub use ghost::build_ghost_point_laplacian;

use fit::LocalLeastSquares;

#[derive(Debug, Error)]
pub enum RecoveryError {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("least-squares fit at vertex {vertex} is rank deficient (rank {rank} < 6)")]
    RankDeficient { vertex: usize, rank: usize },
    #[error("nodal vector has length {got}, mesh has {expected} vertices")]
    LengthMismatch { expected: usize, got: usize },
    #[error("ghost-point closure requires a regular-pattern uniform mesh")]
    NotUniform,
    #[error("{path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryMode {
    /// Every row comes from a patch least-squares fit.
    LsPatch,
    /// Five-point Laplacian with the Neumann condition eliminated through
    /// ghost points; no gradient or mixed-derivative rows.
    GhostPoint,
}

/// Recovered derivative operators as `n × n` weight matrices.
#[derive(Clone, Debug)]
pub struct RecoveryOperator {
    pub gx: CsrMatrix,
    pub gy: CsrMatrix,
    pub hxx: CsrMatrix,
    /// Also `H^{yx}`; the recovered Hessian is symmetric.
    pub hxy: CsrMatrix,
    pub hyy: CsrMatrix,
    pub lap: CsrMatrix,
    pub boundary_mode: BoundaryMode,
}

impl RecoveryOperator {
    pub fn num_nodes(&self) -> usize {
        self.lap.nrows()
    }

    /// Nodal recovered gradient `[G_h^x u, G_h^y u]`.
    pub fn gradient(&self, u: &[f64]) -> [Vec<f64>; 2] {
        [self.gx.mul_vec(u), self.gy.mul_vec(u)]
    }

    /// Nodal recovered Hessian `[H^{xx} u, H^{xy} u, H^{yy} u]`.
    pub fn hessian(&self, u: &[f64]) -> [Vec<f64>; 3] {
        [
            self.hxx.mul_vec(u),
            self.hxy.mul_vec(u),
            self.hyy.mul_vec(u),
        ]
    }

    pub fn laplacian(&self, u: &[f64]) -> Vec<f64> {
        self.lap.mul_vec(u)
    }

    /// Writes each operator as a Matrix Market file into `dir`.
    pub fn dump_matrix_market(&self, dir: &Path) -> Result<(), RecoveryError> {
        let io = |path: &Path, source| RecoveryError::Io {
            path: path.to_path_buf(),
            source,
        };
        fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        for (name, m) in [
            ("gx", &self.gx),
            ("gy", &self.gy),
            ("hxx", &self.hxx),
            ("hxy", &self.hxy),
            ("hyy", &self.hyy),
            ("lap", &self.lap),
        ] {
            let path = dir.join(format!("{name}.mtx"));
            write_matrix_market(&path, m).map_err(|e| io(&path, e))?;
        }
        Ok(())
    }
}

/// Builds all patches of a mesh in parallel.
pub fn build_patches(mesh: &Mesh) -> Result<Vec<Patch>, MeshError> {
    (0..mesh.num_vertices())
        .into_par_iter()
        .map(|z| build_patch(mesh, z))
        .collect()
}

/// Least-squares patch recovery of gradient, Hessian and Laplacian.
pub fn build_recovery(mesh: &Mesh) -> Result<RecoveryOperator, RecoveryError> {
    let rows: Vec<[Vec<(usize, f64)>; 5]> = (0..mesh.num_vertices())
        .into_par_iter()
        .map(|z| -> Result<_, RecoveryError> {
            let patch = build_patch(mesh, z)?;
            let nodes = patch.sample_nodes();
            let points: Vec<Point> = nodes.iter().map(|&v| mesh.vertex(v)).collect();
            let ls = LocalLeastSquares::new(&points, mesh.vertex(z), z)?;
            Ok(ls.derivative_weights().map(|w| derivative_row(nodes, &w)))
        })
        .collect::<Result<_, _>>()?;
    let n = mesh.num_vertices();
    let take = |k: usize| CsrMatrix::from_rows(n, rows.iter().map(|r| r[k].clone()).collect());
    let hxx = take(2);
    let hyy = take(4);
    let lap = CsrMatrix::linear_combination(&[(1.0, &hxx), (1.0, &hyy)]);
    Ok(RecoveryOperator {
        gx: take(0),
        gy: take(1),
        hxx,
        hxy: take(3),
        hyy,
        lap,
        boundary_mode: BoundaryMode::LsPatch,
    })
}

/// Relative size below which a fitted weight is round-off of an exact zero.
const WEIGHT_DROP_TOL: f64 = 1e-13;

/// Pairs weights with their nodes, dropping round-off weights and resetting
/// the center weight (always `nodes[0]`) so that the row annihilates
/// constants.
fn derivative_row(nodes: &[usize], weights: &[f64]) -> Vec<(usize, f64)> {
    let wmax = weights.iter().fold(0.0f64, |m, w| m.max(w.abs()));
    let kept: Vec<(usize, f64)> = nodes[1..]
        .iter()
        .copied()
        .zip(weights[1..].iter().copied())
        .filter(|(_, w)| w.abs() > WEIGHT_DROP_TOL * wmax)
        .collect();
    let off: f64 = kept.iter().map(|e| e.1).sum();
    std::iter::once((nodes[0], -off)).chain(kept).collect()
}
