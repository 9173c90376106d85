#![allow(dead_code)]

use chrec_core::mesh::{build_uniform_mesh, Mesh};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Uniform `m × m` mesh of the unit square with every interior vertex
/// moved by up to `0.2 h` in each direction.
pub fn jittered_mesh(m: usize, seed: u64) -> Mesh {
    let base = build_uniform_mesh(m).unwrap();
    let h = 1.0 / m as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vertices = base
        .vertices()
        .iter()
        .enumerate()
        .map(|(v, &p)| {
            if base.is_boundary_vertex(v) {
                p
            } else {
                [
                    p[0] + rng.random_range(-0.2..0.2) * h,
                    p[1] + rng.random_range(-0.2..0.2) * h,
                ]
            }
        })
        .collect();
    Mesh::new(vertices, base.triangles().to_vec()).unwrap()
}

/// `q(x, y) = c₀ + c₁x + c₂y + c₃x² + c₄xy + c₅y²`.
#[derive(Clone, Copy, Debug)]
pub struct Quadratic(pub [f64; 6]);

impl Quadratic {
    pub fn value(&self, p: [f64; 2]) -> f64 {
        let [c0, c1, c2, c3, c4, c5] = self.0;
        let (x, y) = (p[0], p[1]);
        c0 + c1 * x + c2 * y + c3 * x * x + c4 * x * y + c5 * y * y
    }

    pub fn gradient(&self, p: [f64; 2]) -> [f64; 2] {
        let c = self.0;
        [
            c[1] + 2.0 * c[3] * p[0] + c[4] * p[1],
            c[2] + c[4] * p[0] + 2.0 * c[5] * p[1],
        ]
    }

    /// `[q_xx, q_xy, q_yy]`.
    pub fn hessian(&self) -> [f64; 3] {
        [2.0 * self.0[3], self.0[4], 2.0 * self.0[5]]
    }

    /// Integral over the unit square.
    pub fn unit_square_integral(&self) -> f64 {
        let c = self.0;
        c[0] + (c[1] + c[2]) / 2.0 + (c[3] + c[5]) / 3.0 + c[4] / 4.0
    }
}
