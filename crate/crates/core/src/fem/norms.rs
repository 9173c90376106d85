use serde::{Deserialize, Serialize};

use super::assembly::{basis_gradients, sum_over_triangles};
use super::quadrature::{barycentric_point, triangle_rule};
use crate::mesh::{Mesh, Point};
use crate::recovery::RecoveryOperator;

/// A smooth field with known derivatives, used as the reference in error
/// norms.
pub trait ExactField: Sync {
    fn value(&self, p: Point) -> f64;
    fn gradient(&self, p: Point) -> [f64; 2];
    /// `[u_xx, u_xy, u_yy]`
    fn hessian(&self, p: Point) -> [f64; 3];
}

/// `e₀ = ‖u − u_h‖`, `e₁ = ‖∇u − ∇u_h‖`, `e₁ᵣ = ‖∇u − G_h u_h‖` and
/// `e₂ = ‖D²u − H_h u_h‖`, all in `L²(Ω)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ErrorNorms {
    pub e0: f64,
    pub e1: f64,
    pub e1r: f64,
    pub e2: f64,
}

impl ErrorNorms {
    pub fn as_array(&self) -> [f64; 4] {
        [self.e0, self.e1, self.e1r, self.e2]
    }
}

/// Nodal fields of a discrete solution: `u_h`, `G_h u_h`, `H_h u_h`.
pub(crate) struct RecoveredFields {
    pub u: Vec<f64>,
    pub grad: [Vec<f64>; 2],
    pub hess: [Vec<f64>; 3],
}

impl RecoveredFields {
    pub fn new(u: &[f64], recovery: &RecoveryOperator) -> Self {
        Self {
            u: u.to_vec(),
            grad: recovery.gradient(u),
            hess: recovery.hessian(u),
        }
    }
}

fn lerp(v: &[f64], tri: [usize; 3], l: [f64; 3]) -> f64 {
    l[0] * v[tri[0]] + l[1] * v[tri[1]] + l[2] * v[tri[2]]
}

/// Error norms of `u_h` against an exact field. `recovery` must provide
/// gradient and Hessian rows (least-squares patch mode).
pub fn error_norms(
    mesh: &Mesh,
    u_h: &[f64],
    recovery: &RecoveryOperator,
    exact: &dyn ExactField,
) -> ErrorNorms {
    let f = RecoveredFields::new(u_h, recovery);
    let rule = triangle_rule();
    let sq = |t: usize, k: usize| -> f64 {
        let pts = mesh.triangle_points(t);
        let tri = mesh.triangle(t);
        let (g, area) = basis_gradients(&pts);
        let grad_h = [0, 1].map(|d| (0..3).map(|i| f.u[tri[i]] * g[i][d]).sum::<f64>());
        let mut acc = 0.0;
        for (l, w) in rule.points.iter().zip(&rule.weights) {
            let p = barycentric_point(&pts, *l);
            let v = match k {
                0 => (exact.value(p) - lerp(&f.u, tri, *l)).powi(2),
                1 => {
                    let du = exact.gradient(p);
                    (du[0] - grad_h[0]).powi(2) + (du[1] - grad_h[1]).powi(2)
                }
                2 => {
                    let du = exact.gradient(p);
                    (0..2)
                        .map(|d| (du[d] - lerp(&f.grad[d], tri, *l)).powi(2))
                        .sum()
                }
                _ => {
                    let h = exact.hessian(p);
                    let r = [0, 1, 2].map(|d| h[d] - lerp(&f.hess[d], tri, *l));
                    r[0] * r[0] + 2.0 * r[1] * r[1] + r[2] * r[2]
                }
            };
            acc += w * v;
        }
        area * acc
    };
    let [e0, e1, e1r, e2] = [0, 1, 2, 3].map(|k| sum_over_triangles(mesh, |t| sq(t, k)).sqrt());
    ErrorNorms { e0, e1, e1r, e2 }
}

/// Norms of the difference between a fine solution and a coarse one
/// transferred to the fine mesh. Every argument is a nodal field on `mesh`;
/// the coarse fields have already been prolongated, which is exact for
/// nested meshes.
pub(crate) fn difference_norms(
    mesh: &Mesh,
    fine: &RecoveredFields,
    coarse: &RecoveredFields,
) -> ErrorNorms {
    let sub = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x - y).collect() };
    let du = sub(&fine.u, &coarse.u);
    let dg = [0, 1].map(|d| sub(&fine.grad[d], &coarse.grad[d]));
    let dh = [0, 1, 2].map(|d| sub(&fine.hess[d], &coarse.hess[d]));
    let e1 = sum_over_triangles(mesh, |t| {
        let tri = mesh.triangle(t);
        let (g, area) = basis_gradients(&mesh.triangle_points(t));
        let grad = [0, 1].map(|d| (0..3).map(|i| du[tri[i]] * g[i][d]).sum::<f64>());
        area * (grad[0] * grad[0] + grad[1] * grad[1])
    });
    ErrorNorms {
        e0: l2_norm(mesh, &du),
        e1: e1.sqrt(),
        e1r: (l2_norm(mesh, &dg[0]).powi(2) + l2_norm(mesh, &dg[1]).powi(2)).sqrt(),
        e2: (l2_norm(mesh, &dh[0]).powi(2)
            + 2.0 * l2_norm(mesh, &dh[1]).powi(2)
            + l2_norm(mesh, &dh[2]).powi(2))
        .sqrt(),
    }
}

/// `‖v_h‖_{L²}` of a nodal field, computed exactly element by element.
pub fn l2_norm(mesh: &Mesh, v: &[f64]) -> f64 {
    sum_over_triangles(mesh, |t| {
        let [a, b, c] = mesh.triangle(t).map(|i| v[i]);
        mesh.area(t) / 6.0 * (a * a + b * b + c * c + a * b + b * c + c * a)
    })
    .sqrt()
}
