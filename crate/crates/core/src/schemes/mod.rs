//! Discrete fourth-order forms and the stabilized semi-implicit time
//! stepper for the Cahn-Hilliard equation
//!
//! ```text
//! u_t = −ε²Δ²u + Δ(u³ − u) + g,   ∂ₙu = ∂ₙΔu = 0 on ∂Ω.
//! ```

mod forms;
mod stepper;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{SolveError, SolverConfig};
use crate::recovery::RecoveryError;

pub use forms::{assemble_a1h, assemble_a2h, assemble_a3h};
pub use stepper::{step_count, SimState, Simulation, Source};

#[derive(Debug, Error)]
pub enum SchemeError {
    #[error("invalid configuration: {field}: {message}")]
    Config {
        field: &'static str,
        message: String,
    },
    #[error(transparent)]
    Recovery(#[from] RecoveryError),
    #[error("system matrix rejected by the solver (too small a Nitsche constant makes it indefinite): {0}")]
    Setup(#[source] SolveError),
    #[error("linear solve failed at step {step}: {source}")]
    Solve {
        step: usize,
        #[source]
        source: SolveError,
    },
    #[error("initial field has {got} values, mesh has {expected} vertices")]
    LengthMismatch { expected: usize, got: usize },
}

/// Which discrete fourth-order form the scheme uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Nitsche form on the recovered Laplacian; any mesh.
    NitscheLaplace,
    /// Nitsche form on the full recovered Hessian; any mesh.
    NitscheHessian,
    /// `∫ Δ_h u Δ_h v` with the ghost-point Laplacian; uniform meshes only.
    UniformSimple,
}

impl Variant {
    pub const ALL: [Variant; 3] = [
        Variant::NitscheLaplace,
        Variant::NitscheHessian,
        Variant::UniformSimple,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::NitscheLaplace => "nitsche-laplace",
            Variant::NitscheHessian => "nitsche-hessian",
            Variant::UniformSimple => "uniform-simple",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| format!("unknown scheme '{s}' (expected nitsche-laplace, nitsche-hessian or uniform-simple)"))
    }
}

/// How the explicit term `(∇f(uⁿ), ∇v)`, `f(u) = u³ − u`, is assembled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NonlinearForm {
    /// `K·f(uⁿ)` with `f` evaluated at the nodes.
    #[default]
    Nodal,
    /// `∫ f'(u_h)∇u_h·∇φ_i`, integrated exactly per element.
    Quadrature,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeConfig {
    pub epsilon: f64,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    /// `C` in the per-edge penalty `γ = C/|e|`.
    #[serde(default = "default_nitsche_c")]
    pub nitsche_c: f64,
    pub dt: f64,
    pub t_end: f64,
    pub variant: Variant,
    #[serde(default)]
    pub nonlinear: NonlinearForm,
    #[serde(default)]
    pub solver: SolverConfig,
}

fn default_kappa() -> f64 {
    2.0
}

fn default_nitsche_c() -> f64 {
    1.0
}

impl SchemeConfig {
    /// `κ = 2`, `C = 1`, nodal nonlinear term and the default solver.
    pub fn new(variant: Variant, epsilon: f64, dt: f64, t_end: f64) -> Self {
        Self {
            epsilon,
            kappa: default_kappa(),
            nitsche_c: default_nitsche_c(),
            dt,
            t_end,
            variant,
            nonlinear: NonlinearForm::Nodal,
            solver: SolverConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<(), SchemeError> {
        let bad = |field, message: String| Err(SchemeError::Config { field, message });
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad("epsilon", format!("must be positive, got {}", self.epsilon));
        }
        if !(self.kappa >= 0.0 && self.kappa.is_finite()) {
            return bad("kappa", format!("must be non-negative, got {}", self.kappa));
        }
        if !(self.nitsche_c > 0.0 && self.nitsche_c.is_finite()) {
            return bad(
                "nitsche_c",
                format!("must be positive, got {}", self.nitsche_c),
            );
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("dt", format!("must be positive, got {}", self.dt));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return bad("t_end", format!("must be non-negative, got {}", self.t_end));
        }
        self.solver
            .validate()
            .or_else(|e| bad("solver", e.to_string()))
    }
}
