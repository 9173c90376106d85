use rayon::prelude::*;

use super::rates::{LadderKind, RateTable};
use crate::fem::{difference_norms, error_norms, ErrorNorms, RecoveredFields};
use crate::mesh::{Mesh, MeshLadder};
use crate::problems::{Example, Manufactured};
use crate::schemes::{SchemeConfig, SchemeError, Simulation};

/// Sequence of discretizations to compare.
#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum Ladder {
    /// Nested meshes at fixed `Δt` (taken from the scheme configuration).
    Spatial(MeshLadder),
    /// One mesh, decreasing time steps.
    Temporal { mesh: Mesh, dts: Vec<f64> },
}

struct Level {
    fields: RecoveredFields,
    errors: Option<ErrorNorms>,
}

fn solve_level(example: Example, mesh: &Mesh, cfg: SchemeConfig) -> Result<Level, SchemeError> {
    let mut sim = Simulation::new(mesh, cfg)?;
    let exact = example.exact(cfg.epsilon);
    if exact.is_some() {
        sim = sim.with_source(Manufactured::source(cfg.epsilon));
    }
    let end = sim.run(example.initial_condition(mesh, 0), |_| {})?;
    let errors = exact.map(|m| error_norms(mesh, &end.u, sim.recovery(), &m.at(end.time)));
    Ok(Level {
        fields: RecoveredFields::new(&end.u, sim.recovery()),
        errors,
    })
}

/// Runs every level (concurrently) and tabulates errors and rates.
///
/// With a known exact solution every level is measured against it.
/// Otherwise level `k` is measured against level `k + 1`, transferred to the
/// finer level, and the finest level only serves as reference.
pub fn convergence_ladder(
    example: Example,
    cfg: &SchemeConfig,
    ladder: &Ladder,
) -> Result<RateTable, SchemeError> {
    cfg.validate()?;
    match ladder {
        Ladder::Spatial(meshes) => {
            let levels: Vec<Level> = meshes
                .meshes()
                .par_iter()
                .map(|mesh| solve_level(example, mesh, *cfg))
                .collect::<Result<_, _>>()?;
            let rows = (0..levels.len())
                .filter_map(|k| {
                    let mesh = &meshes.meshes()[k];
                    let errors = match levels[k].errors {
                        Some(e) => e,
                        None if k + 1 < levels.len() => {
                            let fine = &levels[k + 1].fields;
                            let coarse = prolongate_fields(meshes, k, &levels[k].fields);
                            difference_norms(&meshes.meshes()[k + 1], fine, &coarse)
                        }
                        None => return None,
                    };
                    Some((mesh.mesh_size(), mesh.num_vertices(), errors))
                })
                .collect();
            Ok(RateTable::from_levels(LadderKind::Spatial, rows))
        }
        Ladder::Temporal { mesh, dts } => {
            let levels: Vec<Level> = dts
                .par_iter()
                .map(|&dt| solve_level(example, mesh, SchemeConfig { dt, ..*cfg }))
                .collect::<Result<_, _>>()?;
            let rows = (0..levels.len())
                .filter_map(|k| {
                    let errors = match levels[k].errors {
                        Some(e) => e,
                        None if k + 1 < levels.len() => {
                            difference_norms(mesh, &levels[k + 1].fields, &levels[k].fields)
                        }
                        None => return None,
                    };
                    Some((dts[k], mesh.num_vertices(), errors))
                })
                .collect();
            Ok(RateTable::from_levels(LadderKind::Temporal, rows))
        }
    }
}

fn prolongate_fields(meshes: &MeshLadder, k: usize, f: &RecoveredFields) -> RecoveredFields {
    RecoveredFields {
        u: meshes.prolongate(k, &f.u),
        grad: [0, 1].map(|d| meshes.prolongate(k, &f.grad[d])),
        hess: [0, 1, 2].map(|d| meshes.prolongate(k, &f.hess[d])),
    }
}
