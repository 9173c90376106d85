//! Recovery-based linear finite elements for the Cahn-Hilliard equation.
//!
//! Second derivatives of piecewise linear fields are recovered from local
//! least-squares quadratic fits, which turns the fourth-order operator into
//! something a C⁰ linear element space can represent. Boundary conditions
//! are imposed either weakly through a Nitsche form (any triangulation) or
//! by ghost-point elimination (uniform meshes).
//!
//! ```no_run
//! use chrec_core::mesh::build_uniform_mesh;
//! use chrec_core::problems::Example;
//! use chrec_core::schemes::{SchemeConfig, Simulation, Variant};
//!
//! let mesh = build_uniform_mesh(64).unwrap();
//! let cfg = SchemeConfig::new(Variant::UniformSimple, 0.02, 1e-3, 0.5);
//! let sim = Simulation::new(&mesh, cfg).unwrap();
//! let end = sim.run(Example::Random.initial_condition(&mesh, 42), |_| {}).unwrap();
//! println!("E = {}", end.history.last().unwrap().total_energy());
//! ```

pub mod diagnostics;
pub mod fem;
pub mod io;
pub mod linalg;
pub mod mesh;
pub mod problems;
pub mod recovery;
pub mod schemes;
