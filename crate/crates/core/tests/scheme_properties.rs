mod common;

use chrec_core::diagnostics::{convergence_ladder, relative_mass_drift, Ladder};
use chrec_core::fem::interpolate;
use chrec_core::linalg::{dot, CsrMatrix, SolverConfig};
use chrec_core::mesh::{build_uniform_mesh, unstructured_unit_square, MeshLadder};
use chrec_core::problems::Example;
use chrec_core::schemes::{SchemeConfig, SchemeError, Simulation, Variant};
use common::jittered_mesh;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn config(variant: Variant, dt: f64, t_end: f64) -> SchemeConfig {
    let mut cfg = SchemeConfig::new(variant, 0.05, dt, t_end);
    cfg.nitsche_c = 16.0;
    cfg.solver = SolverConfig::direct();
    cfg
}

fn min_random_quotient(a: &CsrMatrix, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..50)
        .map(|_| {
            let v: Vec<f64> = (0..a.nrows())
                .map(|_| rng.random_range(-1.0..1.0))
                .collect();
            a.bilinear(&v, &v) / dot(&v, &v)
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn forms_are_symmetric_and_vanish_on_constants() {
    let uniform = build_uniform_mesh(12).unwrap();
    let distorted = jittered_mesh(12, 5);
    let cases = [
        (&uniform, Variant::UniformSimple),
        (&uniform, Variant::NitscheLaplace),
        (&uniform, Variant::NitscheHessian),
        (&distorted, Variant::NitscheLaplace),
        (&distorted, Variant::NitscheHessian),
    ];
    for (mesh, variant) in cases {
        let sim = Simulation::new(mesh, config(variant, 1e-3, 1e-3)).unwrap();
        let a = sim.form_matrix();
        let scale = a.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(a.max_asymmetry() <= 1e-12 * scale, "{variant} asymmetric");
        assert!(
            a.row_sums().iter().all(|s| s.abs() <= 1e-10 * scale),
            "{variant} constants"
        );
        assert!(
            min_random_quotient(sim.system_matrix(), 1) > 0.0,
            "{variant} system"
        );
    }
}

#[test]
fn hessian_form_is_semidefinite_with_a_large_penalty() {
    let mesh = unstructured_unit_square();
    let sim = Simulation::new(&mesh, config(Variant::NitscheHessian, 1e-3, 1e-3)).unwrap();
    assert!(min_random_quotient(sim.form_matrix(), 2) >= 0.0);
}

#[test]
fn laplacian_form_with_unit_penalty_is_rejected() {
    let mesh = unstructured_unit_square();
    let cfg = SchemeConfig::new(Variant::NitscheLaplace, 0.05, 1e-5, 1e-5);
    let err =
        Simulation::new(&mesh, cfg).and_then(|s| s.run(vec![0.0; mesh.num_vertices()], |_| {}));
    assert!(
        matches!(
            err,
            Err(SchemeError::Setup(_)) | Err(SchemeError::Solve { .. })
        ),
        "{err:?}"
    );
}

#[test]
fn zero_data_stays_zero() {
    let mesh = build_uniform_mesh(8).unwrap();
    for variant in Variant::ALL {
        let sim = Simulation::new(&mesh, config(variant, 1e-3, 1e-2)).unwrap();
        let end = sim.run(vec![0.0; mesh.num_vertices()], |_| {}).unwrap();
        assert!(end.u.iter().all(|&u| u == 0.0), "{variant}");
    }
}

#[test]
fn hessian_scheme_converges_on_the_unstructured_ladder() {
    let mut cfg = SchemeConfig::new(Variant::NitscheHessian, 0.1, 1e-5, 2e-3);
    cfg.nitsche_c = 16.0;
    let ladder = Ladder::Spatial(MeshLadder::new(unstructured_unit_square(), 3));
    let table = convergence_ladder(Example::Manufactured, &cfg, &ladder).unwrap();
    let [r0, r1, r1r, _] = table.last_rates().map(Option::unwrap);
    assert!(r0 > 1.8 && r1 > 0.9 && r1r > 1.5, "{}", table.summary());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn constants_are_steady_states(c in -1.2..1.2f64, variant in prop::sample::select(Variant::ALL.to_vec())) {
        let mesh = build_uniform_mesh(8).unwrap();
        let sim = Simulation::new(&mesh, config(variant, 1e-3, 5e-3)).unwrap();
        let end = sim.run(vec![c; mesh.num_vertices()], |_| {}).unwrap();
        prop_assert!(end.u.iter().all(|u| (u - c).abs() < 1e-12));
    }

    #[test]
    fn mass_is_conserved(
        a in prop::array::uniform4(-0.5..0.5f64),
        variant in prop::sample::select(Variant::ALL.to_vec()),
    ) {
        let mesh = build_uniform_mesh(10).unwrap();
        let sim = Simulation::new(&mesh, config(variant, 1e-4, 2e-3)).unwrap();
        let u0 = interpolate(&mesh, |p| {
            0.3 + a[0] * (3.0 * p[0]).sin() + a[1] * (5.0 * p[1]).cos() + a[2] * p[0] * p[1] + a[3] * (7.0 * p[0] * p[1]).sin()
        });
        let end = sim.run(u0, |_| {}).unwrap();
        prop_assert!(relative_mass_drift(&end.history) < 1e-11);
    }
}
