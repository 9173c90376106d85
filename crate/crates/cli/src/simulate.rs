use std::fs::{self, File};
use std::io::BufWriter;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use chrec_core::diagnostics::RecordWriter;
use chrec_core::io::write_vtk_file;
use chrec_core::problems::Example;
use chrec_core::schemes::Simulation;
use clap::Args;

use crate::config::{Manifest, MeshSpec, RunConfig};
use crate::SchemeArgs;

#[derive(Args)]
pub struct SimulateArgs {
    /// Example 3 to 7; its default setup is the starting point.
    #[arg(long, required_unless_present = "config")]
    example: Option<Example>,
    /// TOML run configuration, or the manifest of an earlier run to replay.
    #[arg(long)]
    config: Option<PathBuf>,
    /// uniform:m, unstructured[:k] or a Triangle .node/.ele path.
    #[arg(long)]
    mesh: Option<MeshSpec>,
    /// Seed of the random initial field.
    #[arg(long)]
    seed: Option<u64>,
    /// Snapshot times, comma separated.
    #[arg(long, value_delimiter = ',')]
    snapshots: Option<Vec<f64>>,
    #[command(flatten)]
    scheme: SchemeArgs,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

impl SimulateArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let mut run = match (&self.config, self.example) {
            (Some(path), _) => {
                let mut run = RunConfig::load(path)?;
                if let Some(e) = self.example {
                    run.example = Some(e);
                    run.initial_file = None;
                }
                run
            }
            (None, Some(e)) => RunConfig::for_example(e),
            (None, None) => bail!("either --example or --config is required"),
        };
        if let Some(m) = &self.mesh {
            run.mesh = m.clone();
        }
        if let Some(s) = self.seed {
            run.seed = s;
        }
        if let Some(s) = &self.snapshots {
            run.snapshots = s.clone();
        }
        self.scheme.apply(&mut run.scheme);
        run.validate()?;
        Ok(run)
    }
}

pub fn run(args: SimulateArgs) -> Result<()> {
    let run = args.resolve()?;
    let out = &args.out;
    let mesh = run.mesh.build(run.domain)?;
    let sim = Simulation::new(&mesh, run.scheme)?;
    let u0 = run.initial_condition(&mesh)?;
    let dt = run.scheme.dt;
    let steps = sim.num_steps();

    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        output_dir: out.clone(),
        vertices: mesh.num_vertices(),
        triangles: mesh.num_triangles(),
        steps,
        run: run.clone(),
    };
    let manifest_path = out.join("manifest.toml");
    fs::write(&manifest_path, toml::to_string(&manifest)?)
        .with_context(|| format!("writing {}", manifest_path.display()))?;

    let mut snapshot_steps: Vec<usize> = run
        .snapshots
        .iter()
        .map(|t| (t / dt).round() as usize)
        .filter(|&s| s <= steps)
        .collect();
    snapshot_steps.sort_unstable();
    snapshot_steps.dedup();

    let records_path = out.join("records.csv");
    let file = File::create(&records_path)
        .with_context(|| format!("creating {}", records_path.display()))?;
    let mut records = RecordWriter::new(BufWriter::new(file))?;
    let mut failure: Option<anyhow::Error> = None;
    let end = sim.run(u0, |state| {
        if failure.is_some() {
            return;
        }
        let rec = state.history.last().expect("history is never empty");
        let mut io = || -> Result<()> {
            records.write(rec)?;
            if snapshot_steps.binary_search(&state.step).is_ok() {
                let path = out.join(format!("u_{:06}.vtk", state.step));
                let title = format!("u at t = {}", state.time);
                write_vtk_file(&path, &title, &mesh, &[("u", &state.u)])
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(())
        };
        failure = io().err();
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    records.flush()?;

    let last = end.history.last().expect("history is never empty");
    println!(
        "{} steps on {} vertices: E {:.6e} -> {:.6e}, mass {:.6e} -> {:.6e}, max|u| {:.4}",
        end.step,
        mesh.num_vertices(),
        end.history[0].total_energy(),
        last.total_energy(),
        end.history[0].mass,
        last.mass,
        last.max_norm
    );
    println!(
        "records, {} snapshots and manifest written to {}",
        snapshot_steps.len(),
        out.display()
    );
    Ok(())
}
