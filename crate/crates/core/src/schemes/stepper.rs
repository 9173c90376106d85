use super::forms::{assemble_a1h, assemble_a2h, assemble_a3h};
use super::{NonlinearForm, SchemeConfig, SchemeError, Variant};
use crate::diagnostics::{EnergyEvaluator, StepRecord};
use crate::fem::{basis_gradients, load_vector, mass_matrix, stiffness_matrix};
use crate::linalg::{CsrMatrix, LinearSolver};
use crate::mesh::{Mesh, Point};
use crate::recovery::{
    build_ghost_point_laplacian, build_recovery, RecoveryError, RecoveryOperator,
};

/// Right-hand side forcing `g(x, t)`.
pub type Source = Box<dyn Fn(Point, f64) -> f64 + Send + Sync>;

/// Number of steps to reach `t_end`: `T/Δt` when that is an integer up to
/// round-off, otherwise rounded up.
pub fn step_count(t_end: f64, dt: f64) -> usize {
    let q = t_end / dt;
    if (q - q.round()).abs() <= 1e-9 * q.max(1.0) {
        q.round() as usize
    } else {
        q.ceil() as usize
    }
}

/// Solution at one time level with the diagnostics of every level so far.
#[derive(Clone, Debug, PartialEq)]
pub struct SimState {
    pub u: Vec<f64>,
    pub step: usize,
    pub time: f64,
    /// One record per time level, `history.len() == step + 1`.
    pub history: Vec<StepRecord>,
}

/// A configured scheme on one mesh. The system matrix
/// `S = M/Δt + ε²A + κK` is assembled and factored once.
pub struct Simulation<'m> {
    mesh: &'m Mesh,
    cfg: SchemeConfig,
    recovery: RecoveryOperator,
    mass: CsrMatrix,
    stiffness: CsrMatrix,
    form: CsrMatrix,
    /// `M/Δt + κK`, applied to `uⁿ`.
    explicit: CsrMatrix,
    solver: LinearSolver,
    energy: EnergyEvaluator,
    source: Option<Source>,
    /// Basis gradients and area of each triangle.
    elements: Vec<([[f64; 2]; 3], f64)>,
}

impl<'m> Simulation<'m> {
    pub fn new(mesh: &'m Mesh, cfg: SchemeConfig) -> Result<Self, SchemeError> {
        cfg.validate()?;
        let recovery = build_recovery(mesh)?;
        Self::with_recovery(mesh, cfg, recovery)
    }

    /// Like [`new`](Self::new), reusing a least-squares patch recovery of
    /// `mesh`. It serves the Nitsche forms and every diagnostic.
    pub fn with_recovery(
        mesh: &'m Mesh,
        cfg: SchemeConfig,
        recovery: RecoveryOperator,
    ) -> Result<Self, SchemeError> {
        cfg.validate()?;
        let form = match cfg.variant {
            Variant::NitscheLaplace => assemble_a1h(mesh, &recovery, cfg.nitsche_c),
            Variant::NitscheHessian => assemble_a2h(mesh, &recovery, cfg.nitsche_c),
            Variant::UniformSimple => {
                let ghost = build_ghost_point_laplacian(mesh).map_err(|e| match e {
                    RecoveryError::NotUniform => SchemeError::Config {
                        field: "variant",
                        message: "uniform-simple needs a regular-pattern uniform mesh".into(),
                    },
                    other => other.into(),
                })?;
                assemble_a3h(mesh, &ghost)
            }
        };
        let mass = mass_matrix(mesh);
        let stiffness = stiffness_matrix(mesh);
        let eps2 = cfg.epsilon * cfg.epsilon;
        let inv_dt = 1.0 / cfg.dt;
        let system = CsrMatrix::linear_combination(&[
            (inv_dt, &mass),
            (eps2, &form),
            (cfg.kappa, &stiffness),
        ]);
        let explicit = CsrMatrix::linear_combination(&[(inv_dt, &mass), (cfg.kappa, &stiffness)]);
        let solver = LinearSolver::new(system, cfg.solver).map_err(SchemeError::Setup)?;
        let energy = EnergyEvaluator::new(mesh, &recovery, cfg.epsilon);
        let elements = (0..mesh.num_triangles())
            .map(|t| basis_gradients(&mesh.triangle_points(t)))
            .collect();
        Ok(Self {
            mesh,
            cfg,
            recovery,
            mass,
            stiffness,
            form,
            explicit,
            solver,
            energy,
            source: None,
            elements,
        })
    }

    /// Adds the forcing `g`, applied as `(g(·, tⁿ⁺¹), φ_i)`.
    pub fn with_source(mut self, g: Source) -> Self {
        self.source = Some(g);
        self
    }

    pub fn mesh(&self) -> &Mesh {
        self.mesh
    }

    pub fn config(&self) -> &SchemeConfig {
        &self.cfg
    }

    /// The least-squares patch recovery used for diagnostics.
    pub fn recovery(&self) -> &RecoveryOperator {
        &self.recovery
    }

    pub fn mass_matrix(&self) -> &CsrMatrix {
        &self.mass
    }

    pub fn stiffness_matrix(&self) -> &CsrMatrix {
        &self.stiffness
    }

    /// Matrix of the fourth-order form `A`.
    pub fn form_matrix(&self) -> &CsrMatrix {
        &self.form
    }

    pub fn system_matrix(&self) -> &CsrMatrix {
        self.solver.matrix()
    }

    pub fn energy(&self) -> &EnergyEvaluator {
        &self.energy
    }

    pub fn num_steps(&self) -> usize {
        step_count(self.cfg.t_end, self.cfg.dt)
    }

    pub fn initial_state(&self, u0: Vec<f64>) -> Result<SimState, SchemeError> {
        if u0.len() != self.mesh.num_vertices() {
            return Err(SchemeError::LengthMismatch {
                expected: self.mesh.num_vertices(),
                got: u0.len(),
            });
        }
        let rec = self.energy.record(&u0, 0.0);
        Ok(SimState {
            u: u0,
            step: 0,
            time: 0.0,
            history: vec![rec],
        })
    }

    /// `(∇f(uⁿ), ∇φ_i)` for every node `i`.
    fn nonlinear_term(&self, u: &[f64]) -> Vec<f64> {
        match self.cfg.nonlinear {
            NonlinearForm::Nodal => {
                let f: Vec<f64> = u.iter().map(|&v| v * v * v - v).collect();
                self.stiffness.mul_vec(&f)
            }
            NonlinearForm::Quadrature => {
                let mut out = vec![0.0; u.len()];
                for (tri, (g, area)) in self.mesh.triangles().iter().zip(&self.elements) {
                    let v = tri.map(|i| u[i]);
                    // ∫_T (3u_h² − 1), exact for linear u_h
                    let sq = v[0] * v[0]
                        + v[1] * v[1]
                        + v[2] * v[2]
                        + v[0] * v[1]
                        + v[1] * v[2]
                        + v[2] * v[0];
                    let c = area * (0.5 * sq - 1.0);
                    let grad = [0, 1].map(|d| v[0] * g[0][d] + v[1] * g[1][d] + v[2] * g[2][d]);
                    for k in 0..3 {
                        out[tri[k]] += c * (grad[0] * g[k][0] + grad[1] * g[k][1]);
                    }
                }
                out
            }
        }
    }

    /// Right-hand side `(M/Δt + κK)uⁿ − F(uⁿ) + (g(tⁿ⁺¹), φ)` of the next step.
    pub fn rhs(&self, state: &SimState) -> Vec<f64> {
        let mut b = self.explicit.mul_vec(&state.u);
        for (bi, fi) in b.iter_mut().zip(self.nonlinear_term(&state.u)) {
            *bi -= fi;
        }
        if let Some(g) = &self.source {
            let t = (state.step + 1) as f64 * self.cfg.dt;
            for (bi, mg) in b.iter_mut().zip(load_vector(self.mesh, |p| g(p, t))) {
                *bi += mg;
            }
        }
        b
    }

    /// Advances `state` by one time step.
    pub fn step(&self, state: &mut SimState) -> Result<(), SchemeError> {
        let b = self.rhs(state);
        let out = self
            .solver
            .solve(&b, Some(&state.u))
            .map_err(|source| SchemeError::Solve {
                step: state.step + 1,
                source,
            })?;
        state.u = out.x;
        state.step += 1;
        state.time = state.step as f64 * self.cfg.dt;
        state.history.push(self.energy.record(&state.u, state.time));
        Ok(())
    }

    /// Runs from `u0` to `t_end`, calling `observe` on the initial state and
    /// after every step.
    pub fn run<F>(&self, u0: Vec<f64>, mut observe: F) -> Result<SimState, SchemeError>
    where
        F: FnMut(&SimState),
    {
        let mut state = self.initial_state(u0)?;
        observe(&state);
        for _ in 0..self.num_steps() {
            self.step(&mut state)?;
            observe(&state);
        }
        Ok(state)
    }
}
