mod common;

use chrec_core::fem::{interpolate, load_vector, mass_matrix, stiffness_matrix};
use chrec_core::linalg::dot;
use chrec_core::mesh::{uniform_refine_with_parents, unstructured_unit_square};
use common::{jittered_mesh, Quadratic};
use proptest::prelude::*;

fn linear() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-3.0..3.0f64)
}

/// `∫∫_[0,1]² (a₀+a₁x+a₂y)(b₀+b₁x+b₂y)`.
fn product_integral(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0]
        + (a[0] * (b[1] + b[2]) + b[0] * (a[1] + a[2])) / 2.0
        + (a[1] * b[1] + a[2] * b[2]) / 3.0
        + (a[1] * b[2] + a[2] * b[1]) / 4.0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn mass_matrix_integrates_products_of_linears(a in linear(), b in linear(), seed in 0u64..1000) {
        let mesh = jittered_mesh(6, seed);
        let m = mass_matrix(&mesh);
        let f = |c: [f64; 3]| interpolate(&mesh, move |p| c[0] + c[1] * p[0] + c[2] * p[1]);
        let got = m.bilinear(&f(a), &f(b));
        prop_assert!((got - product_integral(a, b)).abs() < 1e-12 * (1.0 + got.abs()));
    }

    #[test]
    fn stiffness_energy_of_a_linear_is_its_gradient_squared(a in linear(), seed in 0u64..1000) {
        let mesh = jittered_mesh(6, seed);
        let u = interpolate(&mesh, |p| a[0] + a[1] * p[0] + a[2] * p[1]);
        let got = stiffness_matrix(&mesh).bilinear(&u, &u);
        let expect = a[1] * a[1] + a[2] * a[2];
        prop_assert!((got - expect).abs() < 1e-11 * (1.0 + expect));
    }

    #[test]
    fn load_vector_integrates_quadratics(c in prop::array::uniform6(-2.0..2.0f64), seed in 0u64..1000) {
        let mesh = jittered_mesh(5, seed);
        let q = Quadratic(c);
        let total: f64 = load_vector(&mesh, |p| q.value(p)).iter().sum();
        prop_assert!((total - q.unit_square_integral()).abs() < 1e-12 * (1.0 + total.abs()));
    }

    #[test]
    fn refinement_prolongates_linears_exactly(a in linear(), seed in 0u64..1000) {
        let coarse = jittered_mesh(4, seed);
        let r = uniform_refine_with_parents(&coarse);
        let f = |p: [f64; 2]| a[0] + a[1] * p[0] + a[2] * p[1];
        let fine = r.prolongate(&interpolate(&coarse, f));
        let direct = interpolate(&r.mesh, f);
        for (x, y) in fine.iter().zip(&direct) {
            prop_assert!((x - y).abs() < 1e-12 * (1.0 + y.abs()));
        }
    }
}

#[test]
fn matrices_are_symmetric_with_consistent_row_sums() {
    let mesh = unstructured_unit_square();
    let m = mass_matrix(&mesh);
    let k = stiffness_matrix(&mesh);
    assert!(m.max_asymmetry() < 1e-15 && k.max_asymmetry() < 1e-12);
    assert!(k.row_sums().iter().all(|s| s.abs() < 1e-12));
    let ones = vec![1.0; mesh.num_vertices()];
    let load = load_vector(&mesh, |_| 1.0);
    for (a, b) in m.row_sums().iter().zip(&load) {
        assert!((a - b).abs() < 1e-15);
    }
    assert!((dot(&m.mul_vec(&ones), &ones) - 1.0).abs() < 1e-13);
}

#[test]
fn refinement_preserves_area_and_counts() {
    let coarse = unstructured_unit_square();
    let r = uniform_refine_with_parents(&coarse);
    assert_eq!(
        r.mesh.num_vertices(),
        coarse.num_vertices() + coarse.num_edges()
    );
    assert_eq!(r.mesh.num_triangles(), 4 * coarse.num_triangles());
    assert!((r.mesh.total_area() - coarse.total_area()).abs() < 1e-13);
    assert!((r.mesh.max_edge_length() - coarse.max_edge_length() / 2.0).abs() < 1e-13);
}
