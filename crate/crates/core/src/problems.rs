//! The benchmark problems: two accuracy tests and five interface-dynamics
//! runs.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::fem::{interpolate, ExactField};
use crate::mesh::{Mesh, Point};
use crate::schemes::Source;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Example {
    /// Manufactured solution `e^{−2t} cos πx cos πy` with forcing.
    Manufactured = 1,
    /// Unforced evolution of `cos πx cos πy`.
    CosineMode = 2,
    /// Small localized bump near the origin.
    Bump = 3,
    /// Uniform random field on `(−1, 1)`.
    Random = 4,
    Cross = 5,
    Ellipse = 6,
    /// Two circles on `[−1, 1]²`.
    TwoCircles = 7,
}

impl Example {
    pub const ALL: [Example; 7] = [
        Example::Manufactured,
        Example::CosineMode,
        Example::Bump,
        Example::Random,
        Example::Cross,
        Example::Ellipse,
        Example::TwoCircles,
    ];

    pub fn number(self) -> u8 {
        self as u8
    }

    pub fn defaults(self) -> ExampleDefaults {
        let unit = ([0.0, 0.0], [1.0, 1.0]);
        let (epsilon, domain, m, dt, t_end, snapshots): (
            f64,
            (Point, Point),
            usize,
            f64,
            f64,
            &[f64],
        ) = match self {
            Example::Manufactured => (0.1, unit, 64, 1e-6, 0.1, &[0.0, 0.1]),
            Example::CosineMode => (0.1, unit, 64, 1e-5, 0.1, &[0.0, 0.1]),
            Example::Bump | Example::Random => (
                0.02,
                unit,
                128,
                1e-3,
                10.0,
                &[0.0, 0.01, 0.1, 0.5, 1.0, 10.0],
            ),
            Example::Cross => (
                0.01,
                unit,
                128,
                5e-5,
                1.0,
                &[0.0, 0.005, 0.01, 0.05, 0.1, 1.0],
            ),
            Example::Ellipse => (
                0.01,
                unit,
                128,
                5e-5,
                1.0,
                &[0.0, 0.003, 0.05, 0.1, 0.3, 1.0],
            ),
            Example::TwoCircles => (
                0.025,
                ([-1.0, -1.0], [1.0, 1.0]),
                256,
                5e-5,
                0.1,
                &[0.0, 0.001, 0.005, 0.01, 0.05, 0.1],
            ),
        };
        ExampleDefaults {
            epsilon,
            lower: domain.0,
            upper: domain.1,
            subdivisions: m,
            dt,
            t_end,
            snapshots: snapshots.to_vec(),
        }
    }

    /// Initial nodal field. `seed` only matters for [`Example::Random`].
    pub fn initial_condition(self, mesh: &Mesh, seed: u64) -> Vec<f64> {
        let eps = self.defaults().epsilon;
        match self {
            Example::Manufactured => interpolate(mesh, |p| Manufactured::value_at(p, 0.0)),
            Example::CosineMode => interpolate(mesh, |p| (PI * p[0]).cos() * (PI * p[1]).cos()),
            Example::Bump => {
                let h = mesh.mesh_size();
                interpolate(mesh, |p| {
                    let inside = |s: f64| s > 0.0 && s < 8.0 * h;
                    if inside(p[0]) && inside(p[1]) {
                        let w = PI / (4.0 * h);
                        1e-3 * (w * p[0]).sin().powi(3) * (w * p[1]).sin().powi(3)
                    } else {
                        0.0
                    }
                })
            }
            Example::Random => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..mesh.num_vertices())
                    .map(|_| rng.random_range(-1.0..1.0))
                    .collect()
            }
            Example::Cross => interpolate(mesh, |p| {
                let (x, y) = (p[0] - 0.5, p[1] - 0.5);
                let arm1 = 5.0 * (y - x).abs() + (0.4 * x - y).abs() < 1.0;
                let arm2 = 5.0 * (x - y).abs() + (0.4 * y - x).abs() < 1.0;
                if arm1 || arm2 {
                    0.95
                } else {
                    -0.95
                }
            }),
            Example::Ellipse => interpolate(mesh, |p| {
                let (x, y) = (p[0] - 0.5, p[1] - 0.5);
                if 81.0 * x * x + 9.0 * y * y < 1.0 {
                    0.95
                } else {
                    -0.95
                }
            }),
            Example::TwoCircles => interpolate(mesh, |p| {
                let (x, y) = (p[0], p[1]);
                let d1 = (x + 0.3).hypot(y) - 0.3;
                let d2 = (x - 0.3).hypot(y) - 0.25;
                (d1.min(d2) / (2f64.sqrt() * eps)).tanh()
            }),
        }
    }

    /// Whether the exact solution is known.
    pub fn exact(self, epsilon: f64) -> Option<Manufactured> {
        (self == Example::Manufactured).then_some(Manufactured { epsilon, t: 0.0 })
    }
}

impl From<Example> for u8 {
    fn from(e: Example) -> u8 {
        e.number()
    }
}

impl TryFrom<u8> for Example {
    type Error = String;
    fn try_from(n: u8) -> Result<Self, Self::Error> {
        Example::ALL
            .into_iter()
            .find(|e| e.number() == n)
            .ok_or_else(|| format!("no example {n} (expected 1 to 7)"))
    }
}

impl FromStr for Example {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let n: u8 = s
            .trim()
            .parse()
            .map_err(|_| format!("example must be a number from 1 to 7, got '{s}'"))?;
        n.try_into()
    }
}

impl fmt::Display for Example {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExampleDefaults {
    pub epsilon: f64,
    pub lower: Point,
    pub upper: Point,
    /// Cells per side of the uniform mesh.
    pub subdivisions: usize,
    pub dt: f64,
    pub t_end: f64,
    pub snapshots: Vec<f64>,
}

/// `u = e^{−2t} cos πx cos πy` at a fixed time; satisfies
/// `∂ₙu = ∂ₙΔu = 0` on the unit square.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Manufactured {
    pub epsilon: f64,
    pub t: f64,
}

impl Manufactured {
    pub fn at(self, t: f64) -> Self {
        Self { t, ..self }
    }

    pub fn value_at(p: Point, t: f64) -> f64 {
        (-2.0 * t).exp() * (PI * p[0]).cos() * (PI * p[1]).cos()
    }

    /// `g = u_t + ε²Δ²u − Δ(u³ − u)`, using `Δu = −2π²u`, `Δ²u = 4π⁴u` and
    /// `Δ(u³) = 3u²Δu + 6u|∇u|²`:
    ///
    /// ```text
    /// g = −2u + 4ε²π⁴u + 6π²u³ − 6u|∇u|² − 2π²u
    /// ```
    pub fn source_at(epsilon: f64, p: Point, t: f64) -> f64 {
        let u = Self::value_at(p, t);
        let e = (-2.0 * t).exp();
        let (cx, sx) = ((PI * p[0]).cos(), (PI * p[0]).sin());
        let (cy, sy) = ((PI * p[1]).cos(), (PI * p[1]).sin());
        let grad2 = PI * PI * e * e * (sx * sx * cy * cy + cx * cx * sy * sy);
        let pi2 = PI * PI;
        -2.0 * u + 4.0 * epsilon * epsilon * pi2 * pi2 * u + 6.0 * pi2 * u * u * u
            - 6.0 * u * grad2
            - 2.0 * pi2 * u
    }

    pub fn source(epsilon: f64) -> Source {
        Box::new(move |p, t| Self::source_at(epsilon, p, t))
    }
}

impl ExactField for Manufactured {
    fn value(&self, p: Point) -> f64 {
        Self::value_at(p, self.t)
    }

    fn gradient(&self, p: Point) -> [f64; 2] {
        let e = (-2.0 * self.t).exp();
        let (cx, sx) = ((PI * p[0]).cos(), (PI * p[0]).sin());
        let (cy, sy) = ((PI * p[1]).cos(), (PI * p[1]).sin());
        [-PI * e * sx * cy, -PI * e * cx * sy]
    }

    fn hessian(&self, p: Point) -> [f64; 3] {
        let e = (-2.0 * self.t).exp();
        let (cx, sx) = ((PI * p[0]).cos(), (PI * p[0]).sin());
        let (cy, sy) = ((PI * p[1]).cos(), (PI * p[1]).sin());
        let pi2 = PI * PI;
        [-pi2 * e * cx * cy, pi2 * e * sx * sy, -pi2 * e * cx * cy]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_uniform_mesh, build_uniform_mesh_on};

    #[test]
    fn example_numbers_round_trip() {
        for e in Example::ALL {
            assert_eq!(e.to_string().parse::<Example>().unwrap(), e);
        }
        assert!("8".parse::<Example>().is_err());
        assert!("x".parse::<Example>().is_err());
    }

    #[test]
    fn manufactured_initial_data() {
        let mesh = build_uniform_mesh(8).unwrap();
        let u0 = Example::Manufactured.initial_condition(&mesh, 0);
        for (v, p) in mesh.vertices().iter().enumerate() {
            assert_eq!(u0[v], (PI * p[0]).cos() * (PI * p[1]).cos());
        }
    }

    #[test]
    fn bump_is_supported_near_the_origin() {
        let mesh = build_uniform_mesh(32).unwrap();
        let u0 = Example::Bump.initial_condition(&mesh, 0);
        let h = 1.0 / 32.0;
        for (v, p) in mesh.vertices().iter().enumerate() {
            if p[0] >= 8.0 * h - 1e-12 || p[1] >= 8.0 * h - 1e-12 {
                assert_eq!(u0[v], 0.0);
            }
        }
        assert!(u0.iter().any(|&v| v != 0.0));
        assert!(u0.iter().all(|&v| v.abs() <= 1e-3));
    }

    #[test]
    fn random_field_is_seeded() {
        let mesh = build_uniform_mesh(16).unwrap();
        let a = Example::Random.initial_condition(&mesh, 7);
        assert_eq!(a, Example::Random.initial_condition(&mesh, 7));
        assert_ne!(a, Example::Random.initial_condition(&mesh, 8));
        assert!(a.iter().all(|&v| (-1.0..1.0).contains(&v)));
    }

    #[test]
    fn interface_examples_take_two_values() {
        let mesh = build_uniform_mesh(64).unwrap();
        for e in [Example::Cross, Example::Ellipse] {
            let u0 = e.initial_condition(&mesh, 0);
            assert!(u0.iter().all(|&v| v == 0.95 || v == -0.95));
            let g = mesh.uniform_grid().unwrap();
            assert_eq!(u0[g.vertex(32, 32)], 0.95);
            assert_eq!(u0[g.vertex(64, 0)], -0.95);
        }
        let square = build_uniform_mesh_on(64, [-1.0, -1.0], [1.0, 1.0]).unwrap();
        let u0 = Example::TwoCircles.initial_condition(&square, 0);
        let g = square.uniform_grid().unwrap();
        // both circle centers lie inside the minus phase
        assert!(u0[g.vertex(22, 32)] < -0.9 && u0[g.vertex(42, 32)] < -0.9);
        assert!(u0[0] > 0.99);
    }

    /// Checks `g` against `u_t + ε²Δ²u − Δ(u³ − u)` from sixth-order central
    /// differences of the exact solution.
    #[test]
    fn source_matches_finite_differences() {
        let eps = 0.1;
        let h = 1e-2;
        // first and second derivative weights, sixth order
        let d1 = [
            (-3, -1.0 / 60.0),
            (-2, 3.0 / 20.0),
            (-1, -3.0 / 4.0),
            (1, 3.0 / 4.0),
            (2, -3.0 / 20.0),
            (3, 1.0 / 60.0),
        ];
        let d2 = [
            (-3, 1.0 / 90.0),
            (-2, -3.0 / 20.0),
            (-1, 3.0 / 2.0),
            (0, -49.0 / 18.0),
            (1, 3.0 / 2.0),
            (2, -3.0 / 20.0),
            (3, 1.0 / 90.0),
        ];
        let lap = |f: &dyn Fn(Point) -> f64, p: Point| -> f64 {
            d2.iter()
                .map(|&(k, w)| {
                    let s = k as f64 * h;
                    w * (f([p[0] + s, p[1]]) + f([p[0], p[1] + s]))
                })
                .sum::<f64>()
                / (h * h)
        };
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let p = [rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)];
            let t = rng.random_range(0.0..0.1);
            let u = |q: Point| Manufactured::value_at(q, t);
            let ut = d1
                .iter()
                .map(|&(k, w)| w * Manufactured::value_at(p, t + k as f64 * h))
                .sum::<f64>()
                / h;
            let lap_u = |q: Point| lap(&u, q);
            let bilap = lap(&lap_u, p);
            let f = |q: Point| u(q).powi(3) - u(q);
            let expected = ut + eps * eps * bilap - lap(&f, p);
            let g = Manufactured::source_at(eps, p, t);
            assert!(
                (g - expected).abs() < 1e-6 * (1.0 + g.abs()),
                "{p:?} t={t}: {g} vs {expected}"
            );
        }
    }

    #[test]
    fn exact_derivatives_are_consistent() {
        let m = Manufactured {
            epsilon: 0.1,
            t: 0.05,
        };
        let p = [0.3, 0.8];
        let h = 1e-5;
        let g = m.gradient(p);
        let fd = [
            (m.value([p[0] + h, p[1]]) - m.value([p[0] - h, p[1]])) / (2.0 * h),
            (m.value([p[0], p[1] + h]) - m.value([p[0], p[1] - h])) / (2.0 * h),
        ];
        assert!((g[0] - fd[0]).abs() < 1e-8 && (g[1] - fd[1]).abs() < 1e-8);
        let hxy = (m.gradient([p[0], p[1] + h])[0] - m.gradient([p[0], p[1] - h])[0]) / (2.0 * h);
        assert!((m.hessian(p)[1] - hxy).abs() < 1e-7);
    }
}
