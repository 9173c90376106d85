//! `chrec`: benchmark driver and general front end for the recovery-based
//! Cahn-Hilliard solver.

mod config;
mod converge;
mod simulate;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use chrec_core::linalg::{Method, SolverConfig};
use chrec_core::problems::Example;
use chrec_core::schemes::{NonlinearForm, SchemeConfig, Simulation, Variant};
use clap::{Args, Parser, Subcommand, ValueEnum};

use config::MeshSpec;

#[derive(Parser)]
#[command(
    name = "chrec",
    version,
    about = "Recovery-based linear finite elements for the Cahn-Hilliard equation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spatial or temporal convergence study for the accuracy examples (1, 2).
    Converge(converge::ConvergeArgs),
    /// Time evolution of an interface example (3 to 7) or a custom configuration.
    Simulate(simulate::SimulateArgs),
    /// Writes the assembled operators of one mesh as Matrix Market files.
    Operators(OperatorArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum NonlinearArg {
    Nodal,
    Quadrature,
}

/// Scheme parameters shared by every command; unset flags keep the
/// command's defaults.
#[derive(Args, Clone, Debug, Default)]
struct SchemeArgs {
    /// nitsche-laplace, nitsche-hessian or uniform-simple.
    #[arg(long)]
    scheme: Option<Variant>,
    /// Interface width ε.
    #[arg(long, allow_negative_numbers = true)]
    eps: Option<f64>,
    /// Stabilization κ.
    #[arg(long, allow_negative_numbers = true)]
    kappa: Option<f64>,
    /// Nitsche penalty constant C in γ = C/|e|.
    #[arg(long = "nitsche-c", allow_negative_numbers = true)]
    nitsche_c: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    dt: Option<f64>,
    #[arg(long = "t-end", allow_negative_numbers = true)]
    t_end: Option<f64>,
    /// Assembly of the explicit nonlinear term.
    #[arg(long, value_enum)]
    nonlinear: Option<NonlinearArg>,
    /// Linear solver: cg or direct.
    #[arg(long)]
    solver: Option<Method>,
    /// Relative residual tolerance of the iterative solver.
    #[arg(long)]
    tolerance: Option<f64>,
}

impl SchemeArgs {
    fn apply(&self, cfg: &mut SchemeConfig) {
        if let Some(v) = self.scheme {
            cfg.variant = v;
        }
        if let Some(v) = self.eps {
            cfg.epsilon = v;
        }
        if let Some(v) = self.kappa {
            cfg.kappa = v;
        }
        if let Some(v) = self.nitsche_c {
            cfg.nitsche_c = v;
        }
        if let Some(v) = self.dt {
            cfg.dt = v;
        }
        if let Some(v) = self.t_end {
            cfg.t_end = v;
        }
        if let Some(v) = self.nonlinear {
            cfg.nonlinear = match v {
                NonlinearArg::Nodal => NonlinearForm::Nodal,
                NonlinearArg::Quadrature => NonlinearForm::Quadrature,
            };
        }
        if let Some(m) = self.solver {
            cfg.solver = SolverConfig {
                method: m,
                ..cfg.solver
            };
        }
        if let Some(t) = self.tolerance {
            cfg.solver.tolerance = t;
        }
    }
}

#[derive(Args)]
struct OperatorArgs {
    /// uniform:m, unstructured[:k] or a Triangle .node/.ele path.
    #[arg(long, default_value = "uniform:16")]
    mesh: MeshSpec,
    /// Example whose default ε, Δt and domain are used.
    #[arg(long, default_value = "3")]
    example: Example,
    #[command(flatten)]
    scheme: SchemeArgs,
    #[arg(long, default_value = "operators")]
    out: PathBuf,
}

fn operators(args: OperatorArgs) -> Result<()> {
    let mut run = config::RunConfig::for_example(args.example);
    if args.scheme.scheme.is_none() && !matches!(args.mesh, MeshSpec::Uniform(_)) {
        run.scheme.variant = Variant::NitscheLaplace;
    }
    args.scheme.apply(&mut run.scheme);
    let mesh = args.mesh.build(run.domain)?;
    let sim = Simulation::new(&mesh, run.scheme)?;
    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    sim.recovery().dump_matrix_market(&args.out)?;
    for (name, m) in [
        ("mass", sim.mass_matrix()),
        ("stiffness", sim.stiffness_matrix()),
        ("form", sim.form_matrix()),
        ("system", sim.system_matrix()),
    ] {
        let path = args.out.join(format!("{name}.mtx"));
        chrec_core::linalg::write_matrix_market(&path, m)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    println!(
        "wrote operators of a {}-vertex mesh ({}) to {}",
        mesh.num_vertices(),
        run.scheme.variant,
        args.out.display()
    );
    Ok(())
}

/// Sizes the global worker pool from `CHREC_THREADS` when set.
fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("CHREC_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .with_context(|| format!("CHREC_THREADS must be a positive integer, got '{v}'"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|()| match cli.command {
        Command::Converge(a) => converge::run(a),
        Command::Simulate(a) => simulate::run(a).map(|()| true),
        Command::Operators(a) => operators(a).map(|()| true),
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
