mod common;

use chrec_core::fem::interpolate;
use chrec_core::recovery::{build_ghost_point_laplacian, build_recovery, patch_weights};
use common::{jittered_mesh, Quadratic};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn coefficients() -> impl Strategy<Value = [f64; 6]> {
    prop::array::uniform6(-2.0..2.0f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn quadratics_are_recovered_exactly_on_distorted_meshes(c in coefficients(), seed in 0u64..1000) {
        let mesh = jittered_mesh(8, seed);
        let rec = build_recovery(&mesh).unwrap();
        let q = Quadratic(c);
        let u = interpolate(&mesh, |p| q.value(p));
        let [gx, gy] = rec.gradient(&u);
        let [hxx, hxy, hyy] = rec.hessian(&u);
        let lap = rec.laplacian(&u);
        let h = q.hessian();
        for v in 0..mesh.num_vertices() {
            let g = q.gradient(mesh.vertex(v));
            prop_assert!((gx[v] - g[0]).abs() < 1e-9 && (gy[v] - g[1]).abs() < 1e-9, "gradient at {v}");
            prop_assert!((hxx[v] - h[0]).abs() < 1e-8, "hxx at {v}");
            prop_assert!((hxy[v] - h[1]).abs() < 1e-8, "hxy at {v}");
            prop_assert!((hyy[v] - h[2]).abs() < 1e-8, "hyy at {v}");
            prop_assert!((lap[v] - h[0] - h[2]).abs() < 1e-8, "laplacian at {v}");
        }
    }

    #[test]
    fn patch_weights_solve_the_normal_equations(
        pts in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 6..16),
        cx in -0.2..0.2f64,
        cy in -0.2..0.2f64,
    ) {
        let points: Vec<[f64; 2]> = pts.iter().map(|&(x, y)| [x, y]).collect();
        let center = [cx, cy];
        let k = points.len();
        let v = DMatrix::from_fn(k, 6, |i, j| {
            let (dx, dy) = (points[i][0] - cx, points[i][1] - cy);
            [1.0, dx, dy, dx * dx, dx * dy, dy * dy][j]
        });
        let normal = v.transpose() * &v;
        // skip point sets too close to degenerate for a meaningful comparison
        let sv = normal.clone().singular_values();
        prop_assume!(sv.min() > 1e-6 * sv.max());
        let oracle = normal.try_inverse().unwrap() * v.transpose();
        let w = patch_weights(&points, center).unwrap();
        for (row, (r, f)) in [(1, 1.0), (2, 1.0), (3, 2.0), (4, 1.0), (5, 2.0)].into_iter().enumerate() {
            let expect = DVector::from_iterator(k, oracle.row(r).iter().map(|x| x * f));
            let got = DVector::from_column_slice(&w[row]);
            prop_assert!((&got - &expect).norm() <= 1e-8 * expect.norm().max(1.0), "row {row}");
        }
    }
}

#[test]
fn recovered_operators_annihilate_constants() {
    let mesh = jittered_mesh(10, 3);
    let rec = build_recovery(&mesh).unwrap();
    for m in [&rec.gx, &rec.gy, &rec.hxx, &rec.hxy, &rec.hyy, &rec.lap] {
        assert!(m.row_sums().iter().all(|s| s.abs() < 1e-9));
    }
}

#[test]
fn ghost_laplacian_converges_at_second_order() {
    let err = |m: usize| {
        let mesh = chrec_core::mesh::build_uniform_mesh(m).unwrap();
        let rec = build_ghost_point_laplacian(&mesh).unwrap();
        let f = |p: [f64; 2]| {
            (std::f64::consts::PI * p[0]).cos() * (2.0 * std::f64::consts::PI * p[1]).cos()
        };
        let u = interpolate(&mesh, f);
        let lap = rec.laplacian(&u);
        let pi2 = std::f64::consts::PI.powi(2);
        u.iter()
            .zip(&lap)
            .map(|(u, l)| (l + 5.0 * pi2 * u).abs())
            .fold(0.0, f64::max)
    };
    let (a, b) = (err(16), err(32));
    let r = (a / b).log2();
    assert!((1.9..2.1).contains(&r), "rate {r}");
}
