//! Patch-local least-squares quadratic fitting.
//!
//! A quadratic is written in shifted, scaled coordinates
//! `ξ = (x − x_z)/s`, `η = (y − y_z)/s` around the patch center `z`, with `s`
//! the largest center-to-node distance:
//!
//! ```text
//! p(ξ, η) = c₀ + c₁ξ + c₂η + c₃ξ² + c₄ξη + c₅η²
//! ```
//!
//! The minimizer is obtained from the SVD of the scaled Vandermonde matrix,
//! which also provides the numerical rank used by the rank condition.

use nalgebra::{DMatrix, DVector};

use super::RecoveryError;
use crate::mesh::{Mesh, Patch, Point};

/// Relative singular-value cutoff of the rank condition.
pub const RANK_TOLERANCE: f64 = 1e-8;

/// Dimension of the space of quadratics in two variables.
pub const QUADRATIC_DIM: usize = 6;

/// Coefficients of a fitted quadratic in the patch's local coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadraticFit {
    pub coefficients: [f64; 6],
    pub center: Point,
    pub scale: f64,
}

impl QuadraticFit {
    /// Evaluates the fitted polynomial at a physical point.
    pub fn eval(&self, p: Point) -> f64 {
        let xi = (p[0] - self.center[0]) / self.scale;
        let eta = (p[1] - self.center[1]) / self.scale;
        dot6(&self.coefficients, &monomials(xi, eta))
    }

    /// Value at the center.
    pub fn value(&self) -> f64 {
        self.coefficients[0]
    }

    /// Physical gradient at the center.
    pub fn gradient(&self) -> [f64; 2] {
        let c = &self.coefficients;
        [c[1] / self.scale, c[2] / self.scale]
    }

    /// Physical Hessian at the center.
    pub fn hessian(&self) -> [[f64; 2]; 2] {
        let c = &self.coefficients;
        let s2 = self.scale * self.scale;
        let xy = c[4] / s2;
        [[2.0 * c[3] / s2, xy], [xy, 2.0 * c[5] / s2]]
    }
}

fn dot6(a: &[f64; 6], b: &[f64; 6]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn monomials(xi: f64, eta: f64) -> [f64; 6] {
    [1.0, xi, eta, xi * xi, xi * eta, eta * eta]
}

/// Largest distance from `center` to any sample point.
pub(crate) fn patch_scale(points: &[Point], center: Point) -> f64 {
    points
        .iter()
        .map(|p| (p[0] - center[0]).hypot(p[1] - center[1]))
        .fold(0.0, f64::max)
}

/// Scaled local Vandermonde matrix, one row per sample point.
pub fn local_vandermonde(points: &[Point], center: Point, scale: f64) -> DMatrix<f64> {
    DMatrix::from_fn(points.len(), QUADRATIC_DIM, |r, c| {
        let xi = (points[r][0] - center[0]) / scale;
        let eta = (points[r][1] - center[1]) / scale;
        monomials(xi, eta)[c]
    })
}

/// Numerical rank of the scaled Vandermonde matrix of `points`.
pub fn numerical_rank(points: &[Point], center: Point) -> usize {
    let scale = patch_scale(points, center);
    if points.is_empty() || scale == 0.0 {
        return usize::from(!points.is_empty());
    }
    let sv = local_vandermonde(points, center, scale).singular_values();
    let smax = sv.max();
    sv.iter().filter(|&&s| s > RANK_TOLERANCE * smax).count()
}

/// Whether the sample points determine a unique least-squares quadratic.
pub fn satisfies_rank_condition(points: &[Point], center: Point) -> bool {
    points.len() >= QUADRATIC_DIM && numerical_rank(points, center) == QUADRATIC_DIM
}

/// The linear map from sampled values to local coefficients, `c = P u`.
pub(crate) struct LocalLeastSquares {
    /// `6 × k` pseudo-inverse of the scaled Vandermonde matrix.
    pub(crate) pinv: DMatrix<f64>,
    pub(crate) center: Point,
    pub(crate) scale: f64,
}

impl LocalLeastSquares {
    pub(crate) fn new(
        points: &[Point],
        center: Point,
        vertex: usize,
    ) -> Result<Self, RecoveryError> {
        let scale = patch_scale(points, center);
        if points.len() < QUADRATIC_DIM || scale == 0.0 {
            return Err(RecoveryError::RankDeficient { vertex, rank: 0 });
        }
        let v = local_vandermonde(points, center, scale);
        let svd = v.svd(true, true);
        let smax = svd.singular_values.max();
        let rank = svd
            .singular_values
            .iter()
            .filter(|&&s| s > RANK_TOLERANCE * smax)
            .count();
        if rank < QUADRATIC_DIM {
            return Err(RecoveryError::RankDeficient { vertex, rank });
        }
        let u = svd.u.expect("requested U");
        let vt = svd.v_t.expect("requested Vᵀ");
        let inv_s = DMatrix::from_diagonal(&svd.singular_values.map(|s| 1.0 / s));
        let pinv = vt.transpose() * inv_s * u.transpose();
        Ok(Self {
            pinv,
            center,
            scale,
        })
    }

    pub(crate) fn fit(&self, values: &[f64]) -> QuadraticFit {
        let c = &self.pinv * DVector::from_column_slice(values);
        QuadraticFit {
            coefficients: [c[0], c[1], c[2], c[3], c[4], c[5]],
            center: self.center,
            scale: self.scale,
        }
    }

    /// Weights of `∂ₓ, ∂ᵧ, ∂ₓₓ, ∂ₓᵧ, ∂ᵧᵧ` at the center, one row each.
    pub(crate) fn derivative_weights(&self) -> [Vec<f64>; 5] {
        let s = self.scale;
        let s2 = s * s;
        let row = |r: usize, f: f64| self.pinv.row(r).iter().map(|w| w * f).collect::<Vec<f64>>();
        [
            row(1, 1.0 / s),
            row(2, 1.0 / s),
            row(3, 2.0 / s2),
            row(4, 1.0 / s2),
            row(5, 2.0 / s2),
        ]
    }
}

/// Weights of the recovered `∂ₓ, ∂ᵧ, ∂ₓₓ, ∂ₓᵧ, ∂ᵧᵧ` at `center` for
/// samples at `points`, before any pruning. Errors report vertex 0.
pub fn patch_weights(points: &[Point], center: Point) -> Result<[Vec<f64>; 5], RecoveryError> {
    Ok(LocalLeastSquares::new(points, center, 0)?.derivative_weights())
}

/// Least-squares quadratic fit of nodal values over a patch.
pub fn fit_quadratic(
    mesh: &Mesh,
    patch: &Patch,
    nodal_values: &[f64],
) -> Result<QuadraticFit, RecoveryError> {
    if nodal_values.len() != mesh.num_vertices() {
        return Err(RecoveryError::LengthMismatch {
            expected: mesh.num_vertices(),
            got: nodal_values.len(),
        });
    }
    let points: Vec<Point> = patch
        .sample_nodes()
        .iter()
        .map(|&v| mesh.vertex(v))
        .collect();
    let values: Vec<f64> = patch
        .sample_nodes()
        .iter()
        .map(|&v| nodal_values[v])
        .collect();
    let ls = LocalLeastSquares::new(&points, mesh.vertex(patch.center()), patch.center())?;
    Ok(ls.fit(&values))
}
