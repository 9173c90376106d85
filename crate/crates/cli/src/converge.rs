use std::fs::{self, File};
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, ensure, Context, Result};
use chrec_core::diagnostics::{convergence_ladder, Ladder, RateTable};
use chrec_core::mesh::{build_uniform_mesh, MeshLadder};
use chrec_core::problems::Example;
use chrec_core::schemes::{SchemeConfig, Variant};
use clap::Args;

use crate::config::MeshSpec;
use crate::SchemeArgs;

const NORMS: [&str; 4] = ["e0", "e1", "e1r", "e2"];

/// Accepted range of the last-interval rate of one error norm.
#[derive(Clone, Debug, PartialEq)]
pub struct Band {
    norm: usize,
    min: f64,
    max: f64,
}

impl FromStr for Band {
    type Err = String;
    /// `e1r=1.9` or `e0=0.9:1.1`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, range) = s
            .split_once('=')
            .ok_or_else(|| format!("expected NORM=MIN[:MAX], got '{s}'"))?;
        let norm = NORMS
            .iter()
            .position(|n| *n == name)
            .ok_or_else(|| format!("unknown norm '{name}' (expected e0, e1, e1r or e2)"))?;
        let num = |v: &str| {
            v.parse::<f64>()
                .map_err(|_| format!("bad rate '{v}' in '{s}'"))
        };
        let (min, max) = match range.split_once(':') {
            Some((lo, hi)) => (num(lo)?, num(hi)?),
            None => (num(range)?, f64::INFINITY),
        };
        Ok(Band { norm, min, max })
    }
}

impl Band {
    fn new(norm: usize, min: f64, max: f64) -> Self {
        Self { norm, min, max }
    }
}

#[derive(Args)]
pub struct ConvergeArgs {
    /// 1 (manufactured solution) or 2 (reference solution).
    #[arg(long)]
    example: Example,
    /// Cells per side of each uniform level, each twice the previous.
    #[arg(long, value_delimiter = ',', default_value = "16,32,64")]
    levels: Vec<usize>,
    /// Refine the bundled unstructured mesh instead of uniform levels.
    #[arg(long, conflicts_with = "mesh")]
    unstructured: bool,
    /// Coarse mesh of the spatial ladder, or the fixed mesh of a temporal
    /// one (default uniform:128).
    #[arg(long)]
    mesh: Option<MeshSpec>,
    /// Number of levels when refining --unstructured or --mesh.
    #[arg(long, default_value_t = 3)]
    refinements: usize,
    /// Ladder in Δt on one mesh instead of in h.
    #[arg(long)]
    temporal: bool,
    /// Time steps of the temporal ladder.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "1e-3,5e-4,2.5e-4,1.25e-4"
    )]
    dts: Vec<f64>,
    /// Rate band of the last interval, NORM=MIN[:MAX]; repeatable, replaces
    /// the defaults.
    #[arg(long = "band")]
    bands: Vec<Band>,
    /// Report rates without checking any band.
    #[arg(long, conflicts_with = "bands")]
    no_bands: bool,
    #[command(flatten)]
    scheme: SchemeArgs,
    #[arg(long, default_value = "converge")]
    out: PathBuf,
}

fn default_bands(example: Example, temporal: bool) -> Vec<Band> {
    match (example, temporal) {
        (_, true) => vec![Band::new(0, 0.9, 1.1)],
        (Example::Manufactured, false) => vec![
            Band::new(0, 1.9, f64::INFINITY),
            Band::new(1, 0.95, f64::INFINITY),
            Band::new(2, 1.9, f64::INFINITY),
            Band::new(3, 0.95, f64::INFINITY),
        ],
        // e₂ is reported but not checked against a reference solution
        _ => vec![
            Band::new(0, 1.9, f64::INFINITY),
            Band::new(1, 0.95, f64::INFINITY),
            Band::new(2, 1.9, f64::INFINITY),
        ],
    }
}

/// The first band the last interval violates, as a message.
fn check(table: &RateTable, bands: &[Band]) -> Option<String> {
    let row = table.rows.last()?;
    bands.iter().find_map(|b| {
        let ok = row.rates[b.norm].is_some_and(|r| r >= b.min && r <= b.max);
        (!ok).then(|| {
            let got = row.rates[b.norm].map_or("undefined".into(), |r| format!("{r:.3}"));
            format!(
                "rate of {} is {got}, outside [{}, {}], in row size={:e} dof={} {}={:e}",
                NORMS[b.norm],
                b.min,
                b.max,
                row.size,
                row.dof,
                NORMS[b.norm],
                row.errors.as_array()[b.norm]
            )
        })
    })
}

pub fn run(args: ConvergeArgs) -> Result<bool> {
    ensure!(
        matches!(args.example, Example::Manufactured | Example::CosineMode),
        "example: convergence studies need example 1 or 2, got {}",
        args.example
    );
    let unstructured = args.unstructured
        || matches!(
            args.mesh,
            Some(MeshSpec::File(_) | MeshSpec::Unstructured(_))
        );
    let d = args.example.defaults();
    let variant = if unstructured {
        Variant::NitscheLaplace
    } else {
        Variant::UniformSimple
    };
    let mut cfg = SchemeConfig::new(variant, d.epsilon, 1e-5, 0.01);
    args.scheme.apply(&mut cfg);
    cfg.validate()?;

    let ladder = if args.temporal {
        ensure!(
            args.dts.len() >= 2,
            "dts: a temporal ladder needs at least two time steps"
        );
        let spec = args.mesh.clone().unwrap_or(MeshSpec::Uniform(128));
        Ladder::Temporal {
            mesh: spec.build([d.lower, d.upper])?,
            dts: args.dts.clone(),
        }
    } else if args.unstructured {
        Ladder::Spatial(MeshLadder::new(
            MeshSpec::Unstructured(0).build([d.lower, d.upper])?,
            args.refinements,
        ))
    } else if let Some(spec) = &args.mesh {
        Ladder::Spatial(MeshLadder::new(
            spec.build([d.lower, d.upper])?,
            args.refinements,
        ))
    } else {
        let levels = &args.levels;
        ensure!(levels.len() >= 2, "levels: need at least two levels");
        if let Some(w) = levels.windows(2).find(|w| w[1] != 2 * w[0]) {
            bail!(
                "levels: each level must double the previous one ({} -> {})",
                w[0],
                w[1]
            );
        }
        Ladder::Spatial(MeshLadder::new(
            build_uniform_mesh(levels[0])?,
            levels.len(),
        ))
    };

    let table = convergence_ladder(args.example, &cfg, &ladder)?;
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let csv_path = args.out.join("rates.csv");
    table
        .write_csv(
            File::create(&csv_path).with_context(|| format!("creating {}", csv_path.display()))?,
        )
        .with_context(|| format!("writing {}", csv_path.display()))?;
    let summary = format!(
        "example {}, {}, eps={}, dt={}, T={}, C={}\n{}",
        args.example,
        cfg.variant,
        cfg.epsilon,
        cfg.dt,
        cfg.t_end,
        cfg.nitsche_c,
        table.summary()
    );
    fs::write(args.out.join("summary.txt"), &summary)?;
    print!("{summary}");

    if args.no_bands {
        return Ok(true);
    }
    let bands = if args.bands.is_empty() {
        default_bands(args.example, args.temporal)
    } else {
        args.bands.clone()
    };
    match check(&table, &bands) {
        None => Ok(true),
        Some(msg) => {
            eprintln!("rate check failed: {msg}");
            Ok(false)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrec_core::diagnostics::LadderKind;
    use chrec_core::fem::ErrorNorms;

    #[test]
    fn bands_parse() {
        assert_eq!(
            "e1r=1.9".parse::<Band>().unwrap(),
            Band::new(2, 1.9, f64::INFINITY)
        );
        assert_eq!(
            "e0=0.9:1.1".parse::<Band>().unwrap(),
            Band::new(0, 0.9, 1.1)
        );
        assert!("e3=1".parse::<Band>().is_err());
        assert!("e0".parse::<Band>().is_err());
    }

    #[test]
    fn check_reports_the_offending_row() {
        let e = |s: f64| ErrorNorms {
            e0: s * s,
            e1: s,
            e1r: s * s,
            e2: 1.0,
        };
        let t = RateTable::from_levels(
            LadderKind::Spatial,
            vec![(0.5, 9, e(0.5)), (0.25, 25, e(0.25))],
        );
        assert_eq!(check(&t, &default_bands(Example::CosineMode, false)), None);
        let msg = check(&t, &default_bands(Example::Manufactured, false)).unwrap();
        assert!(msg.contains("e2") && msg.contains("dof=25"), "{msg}");
    }
}
