use serde::{Deserialize, Serialize};

use crate::fem::{mass_matrix, triangle_rule};
use crate::linalg::{dot, CsrMatrix};
use crate::mesh::Mesh;
use crate::recovery::{BoundaryMode, RecoveryOperator};

/// Scalar diagnostics of one time level.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: f64,
    /// Interfacial energy `ε²/2 ∫ |G_h u_h|²`.
    pub e1: f64,
    /// Bulk energy `1/4 ∫ (u_h² − 1)²`.
    pub e2: f64,
    /// `∫ u_h`
    pub mass: f64,
    /// `max |u_i|` over the nodes.
    pub max_norm: f64,
}

impl StepRecord {
    pub fn total_energy(&self) -> f64 {
        self.e1 + self.e2
    }
}

/// Precomputed operators for evaluating [`StepRecord`]s on one mesh.
#[derive(Clone, Debug)]
pub struct EnergyEvaluator {
    epsilon: f64,
    mass: CsrMatrix,
    gx: CsrMatrix,
    gy: CsrMatrix,
    triangles: Vec<[usize; 3]>,
    areas: Vec<f64>,
}

impl EnergyEvaluator {
    /// `recovery` must be a least-squares patch recovery; the ghost-point
    /// operator carries no gradient.
    pub fn new(mesh: &Mesh, recovery: &RecoveryOperator, epsilon: f64) -> Self {
        assert_eq!(
            recovery.boundary_mode,
            BoundaryMode::LsPatch,
            "energies need G_h"
        );
        Self {
            epsilon,
            mass: mass_matrix(mesh),
            gx: recovery.gx.clone(),
            gy: recovery.gy.clone(),
            triangles: mesh.triangles().to_vec(),
            areas: (0..mesh.num_triangles()).map(|t| mesh.area(t)).collect(),
        }
    }

    pub fn mass_matrix(&self) -> &CsrMatrix {
        &self.mass
    }

    pub fn record(&self, u: &[f64], t: f64) -> StepRecord {
        let gx = self.gx.mul_vec(u);
        let gy = self.gy.mul_vec(u);
        let e1 = 0.5
            * self.epsilon
            * self.epsilon
            * (self.mass.bilinear(&gx, &gx) + self.mass.bilinear(&gy, &gy));
        let ones = vec![1.0; u.len()];
        StepRecord {
            t,
            e1,
            e2: self.bulk_energy(u),
            mass: dot(&ones, &self.mass.mul_vec(u)),
            max_norm: u.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        }
    }

    /// The quartic of a linear function has degree 4, so the six-point rule
    /// is exact here.
    fn bulk_energy(&self, u: &[f64]) -> f64 {
        let rule = triangle_rule();
        self.triangles
            .iter()
            .zip(&self.areas)
            .map(|(tri, area)| {
                let s: f64 = rule
                    .points
                    .iter()
                    .zip(&rule.weights)
                    .map(|(l, w)| {
                        let v = l[0] * u[tri[0]] + l[1] * u[tri[1]] + l[2] * u[tri[2]];
                        w * (v * v - 1.0).powi(2)
                    })
                    .sum();
                area * s
            })
            .sum::<f64>()
            * 0.25
    }
}

/// One-shot [`StepRecord`] of `u` at time `t`.
pub fn record(
    mesh: &Mesh,
    recovery: &RecoveryOperator,
    epsilon: f64,
    u: &[f64],
    t: f64,
) -> StepRecord {
    EnergyEvaluator::new(mesh, recovery, epsilon).record(u, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::interpolate;
    use crate::mesh::build_uniform_mesh;
    use crate::recovery::build_recovery;
    use std::f64::consts::PI;

    #[test]
    fn constant_fields() {
        let mesh = build_uniform_mesh(4).unwrap();
        let rec = build_recovery(&mesh).unwrap();
        let n = mesh.num_vertices();
        let one = record(&mesh, &rec, 0.1, &vec![1.0; n], 0.0);
        assert!(one.e1.abs() < 1e-20 && one.e2.abs() < 1e-15);
        assert!((one.mass - 1.0).abs() < 1e-14);
        assert_eq!(one.max_norm, 1.0);
        let zero = record(&mesh, &rec, 0.1, &vec![0.0; n], 0.0);
        assert!((zero.e2 - 0.25).abs() < 1e-14);
    }

    #[test]
    fn interfacial_energy_of_cosine_mode() {
        let eps = 0.1;
        let mesh = build_uniform_mesh(64).unwrap();
        let rec = build_recovery(&mesh).unwrap();
        let u = interpolate(&mesh, |p| (PI * p[0]).cos() * (PI * p[1]).cos());
        let r = record(&mesh, &rec, eps, &u, 0.0);
        // ∫|∇u|² = π²/2
        let exact = eps * eps * PI * PI / 4.0;
        assert!((r.e1 - exact).abs() < 0.02 * exact, "{} vs {exact}", r.e1);
    }

    /// `∫_T v⁴` for linear `v` equals `2|T|/6!·Σ_{|α|=4} 4!·v^α`, i.e.
    /// `|T|/15 · h₄(v₁, v₂, v₃)` with `h₄` the complete homogeneous
    /// polynomial; same for `v²` with `|T|/6 · h₂`.
    #[test]
    fn bulk_energy_matches_closed_form() {
        let mesh = Mesh::new(vec![[0.0, 0.0], [0.7, 0.1], [0.2, 0.9]], vec![[0, 1, 2]]).unwrap();
        let rec_free = EnergyEvaluator {
            epsilon: 1.0,
            mass: mass_matrix(&mesh),
            gx: CsrMatrix::zeros(3, 3),
            gy: CsrMatrix::zeros(3, 3),
            triangles: mesh.triangles().to_vec(),
            areas: vec![mesh.area(0)],
        };
        let v = [0.3, -1.2, 0.8];
        let mut h4 = 0.0;
        let mut h2 = 0.0;
        for a in 0..3 {
            for b in a..3 {
                h2 += v[a] * v[b];
                for c in b..3 {
                    for d in c..3 {
                        h4 += v[a] * v[b] * v[c] * v[d];
                    }
                }
            }
        }
        let area = mesh.area(0);
        let exact = 0.25 * (area / 15.0 * h4 - 2.0 * area / 6.0 * h2 + area);
        assert!((rec_free.bulk_energy(&v) - exact).abs() < 1e-13);
    }
}
