//! Oseen systems, BDF time stepping and Picard iteration.

use std::collections::VecDeque;
use std::sync::Arc;

use super::case::{FlowCase, NonlinearMode, SolverMode};
use crate::error::{Error, NonConvergence, Result};
use crate::fem::{
    apply_dirichlet, assemble_convection, assemble_divergence_block, assemble_mass, assemble_viscous_block, Field,
    FunctionSpace, MassKind,
};
use crate::geometry::BoundaryTag;
use crate::linalg::csr::norm2;
use crate::linalg::pcd::{build_pcd, gmres_block};
use crate::linalg::{CsrMatrix, GmresOptions, SaddleSystem, SparseLu};

pub const PICARD_TOL: f64 = 1e-8;
pub const STEADY_MAX_PICARD: usize = 100;
pub const TRANSIENT_MAX_PICARD: usize = 50;
const INNER_TOL_FACTOR: f64 = 1e-2;
/// Lag, in steps, of the steadiness indicator.
pub const STEADY_LAG: usize = 10;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Diagnostics {
    pub divergence: f64,
    pub nonlinear_iterations: usize,
    pub linear_iterations: usize,
}

#[derive(Debug, Clone)]
pub struct SolutionState {
    pub field: Field,
    pub time: f64,
    pub step: usize,
    pub diagnostics: Diagnostics,
}

/// Per-step record of a transient run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub time: f64,
    pub diagnostics: Diagnostics,
    /// `‖u^n − u^{n−10}‖ / ‖u^n‖`, once ten steps exist.
    pub change: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub final_state: SolutionState,
    pub records: Vec<StepRecord>,
    pub steady_reached: bool,
}

/// What a transient run hands to its observer after each step.
pub struct StepReport<'a> {
    pub system: &'a SaddleSystem,
    pub state: &'a SolutionState,
    /// Initial guess the linear solver started from.
    pub initial_guess: &'a [f64],
}

/// Essential data on each tag: `Some(value)` fixes that velocity component.
pub type DirichletData<'a> = dyn Fn(BoundaryTag, f64, f64) -> [Option<f64>; 2] + 'a;

/// Velocity constraints in monolithic numbering. Walls take precedence
/// over the inlet, the inlet over the axis, so shared corner nodes get one value.
pub fn velocity_constraints(space: &FunctionSpace, data: &DirichletData) -> Vec<(usize, f64)> {
    let nu = space.n_u();
    let mut fixed = vec![[None::<f64>; 2]; nu];
    let coords = space.velocity_map().coords();
    for tag in [BoundaryTag::Wall, BoundaryTag::Inlet, BoundaryTag::Axis, BoundaryTag::Outlet] {
        for d in space.velocity_map().boundary_dofs(space.mesh(), tag) {
            let [r, z] = coords[d];
            let v = data(tag, r, z);
            for c in 0..2 {
                if fixed[d][c].is_none() {
                    fixed[d][c] = v[c];
                }
            }
        }
    }
    let mut out = Vec::new();
    for c in 0..2 {
        for (d, f) in fixed.iter().enumerate() {
            if let Some(v) = f[c] {
                out.push((c * nu + d, v));
            }
        }
    }
    out
}

/// Discretized Navier-Stokes problem: the constant blocks and boundary data
/// of one case.
pub struct NsSolver {
    case: FlowCase,
    space: Arc<FunctionSpace>,
    viscous: CsrMatrix,
    mass: CsrMatrix,
    div: CsrMatrix,
    mp_lu: SparseLu,
    constraints: Vec<(usize, f64)>,
    load: Vec<f64>,
}

impl NsSolver {
    /// Benchmark boundary conditions: Poiseuille inlet, no-slip walls,
    /// `u_r = 0` on the axis, do-nothing outlet.
    pub fn new(case: FlowCase) -> Result<Self> {
        case.validate()?;
        let inflow = case.inlet_profile()?;
        let data = move |tag: BoundaryTag, r: f64, _z: f64| match tag {
            BoundaryTag::Wall => [Some(0.0), Some(0.0)],
            BoundaryTag::Inlet => [Some(0.0), Some(inflow.value(r).max(0.0))],
            BoundaryTag::Axis => [Some(0.0), None],
            BoundaryTag::Outlet => [None, None],
        };
        Self::with_boundary(case, &data, None)
    }

    /// Custom essential data and an optional extra velocity right-hand side
    /// (body forces, outlet tractions).
    pub fn with_boundary(case: FlowCase, data: &DirichletData, load: Option<Vec<f64>>) -> Result<Self> {
        case.validate()?;
        let space = Arc::new(FunctionSpace::new(case.mesh.clone(), case.order)?);
        let viscous = assemble_viscous_block(&space, case.mu)?;
        let mass = assemble_mass(&space, MassKind::Velocity, case.rho)?;
        let div = assemble_divergence_block(&space)?;
        let mp_lu = SparseLu::factor(&assemble_mass(&space, MassKind::Pressure, 1.0)?)?;
        let constraints = velocity_constraints(&space, data);
        let load = match load {
            Some(l) if l.len() == space.n_velocity() => l,
            Some(_) => return Err(Error::invalid("extra load vector does not match the velocity block")),
            None => vec![0.0; space.n_velocity()],
        };
        Ok(NsSolver {
            case,
            space,
            viscous,
            mass,
            div,
            mp_lu,
            constraints,
            load,
        })
    }

    pub fn case(&self) -> &FlowCase {
        &self.case
    }

    pub fn space(&self) -> &Arc<FunctionSpace> {
        &self.space
    }

    /// Viscous block `A`, hoop term included.
    pub fn viscous(&self) -> &CsrMatrix {
        &self.viscous
    }

    /// Velocity mass matrix, scaled by `ρ`.
    pub fn mass(&self) -> &CsrMatrix {
        &self.mass
    }

    pub fn constraints(&self) -> &[(usize, f64)] {
        &self.constraints
    }

    /// `[(m/Δt) M + A + N(w)] u + Bᵀ p = rhs_u + load`, `B u = 0`, with
    /// the essential conditions eliminated. `mass_factor` is `α / Δt`.
    pub fn oseen_system(&self, w: Option<&Field>, mass_factor: f64, rhs_u: &[f64]) -> Result<SaddleSystem> {
        let mut terms: Vec<(f64, &CsrMatrix)> = vec![(1.0, &self.viscous)];
        if mass_factor != 0.0 {
            terms.push((mass_factor, &self.mass));
        }
        let conv;
        if let (Some(w), true) = (w, self.case.convection) {
            conv = assemble_convection(&self.space, w, self.case.rho)?;
            terms.push((1.0, &conv));
        }
        let f = CsrMatrix::linear_combination(&terms)?;
        let rhs: Vec<f64> = rhs_u.iter().zip(&self.load).map(|(a, b)| a + b).collect();
        let sys = SaddleSystem::new(f, self.div.clone(), rhs, vec![0.0; self.space.n_pressure()])?;
        apply_dirichlet(&sys, &self.constraints)
    }

    /// Solves one linear saddle system; returns the solution and the Krylov
    /// iteration count (zero for direct solves).
    pub fn solve_system(
        &self,
        sys: &SaddleSystem,
        w: Option<&Field>,
        mass_factor: f64,
        x0: Option<&[f64]>,
    ) -> Result<(Vec<f64>, usize)> {
        self.solve_with(sys, w, mass_factor, x0, self.case.gmres)
    }

    fn solve_with(
        &self,
        sys: &SaddleSystem,
        w: Option<&Field>,
        mass_factor: f64,
        x0: Option<&[f64]>,
        opts: GmresOptions,
    ) -> Result<(Vec<f64>, usize)> {
        match self.case.solver {
            SolverMode::Direct => Ok((sys.solve_direct()?, 0)),
            SolverMode::GmresPcd => {
                let zero;
                let w = match w {
                    Some(w) if self.case.convection => w,
                    _ => {
                        zero = Field::zeros(self.space.clone());
                        &zero
                    }
                };
                let pcd = build_pcd(
                    &self.space,
                    self.case.mu,
                    self.case.rho,
                    w,
                    self.case.pcd_boundary,
                    mass_factor * self.case.rho,
                )?;
                let res = gmres_block(sys, &pcd, opts, x0)?;
                Ok((res.x, res.iterations))
            }
        }
    }

    /// BDF system for the step after `history` (`[u^n]` gives BDF1,
    /// `[u^n, u^{n−1}]` BDF2), its mass factor and the transport field.
    pub fn step_system(&self, history: &[&Field]) -> Result<(SaddleSystem, f64, Field)> {
        for h in history {
            if h.coeffs.len() != self.space.n_total() {
                return Err(Error::invalid("history state does not match the function space"));
            }
        }
        let (alpha, w) = match history {
            [un] => (1.0, (*un).clone()),
            [un, um] => {
                let mut w = (*un).clone();
                for (i, v) in w.velocity_mut().iter_mut().enumerate() {
                    *v = 2.0 * un.coeffs[i] - um.coeffs[i];
                }
                (1.5, w)
            }
            _ => return Err(Error::invalid(format!("BDF step needs 1 or 2 history states, got {}", history.len()))),
        };
        let dt = self.case.dt;
        let rhs = self.history_rhs(history);
        let sys = self.oseen_system(Some(&w), alpha / dt, &rhs)?;
        Ok((sys, alpha / dt, w))
    }

    pub fn divergence_norm(&self, field: &Field) -> f64 {
        let d = self.div.mul_vec(field.velocity());
        let y = self.mp_lu.solve(&d);
        d.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>().max(0.0).sqrt()
    }

    fn field(&self, x: Vec<f64>) -> Result<Field> {
        Field::new(self.space.clone(), x)
    }

    /// Picard iteration on `rhs_u` with fixed mass factor, starting from `w0`.
    fn picard(&self, w0: Field, mass_factor: f64, rhs_u: &[f64], max_iter: usize) -> Result<(Field, Diagnostics)> {
        let mut w = w0;
        let mut history = Vec::new();
        let mut diag = Diagnostics::default();
        // the nonlinear residual cannot drop below the inner solve's accuracy
        let inner = GmresOptions {
            tol: self.case.gmres.tol.min(PICARD_TOL * INNER_TOL_FACTOR),
            ..self.case.gmres
        };
        for k in 0..=max_iter {
            let sys = self.oseen_system(Some(&w), mass_factor, rhs_u)?;
            if k > 0 {
                let res = sys.relative_residual(&w.coeffs);
                history.push(res);
                if res <= PICARD_TOL {
                    diag.nonlinear_iterations = k;
                    diag.divergence = self.divergence_norm(&w);
                    return Ok((w, diag));
                }
            }
            if k == max_iter {
                break;
            }
            let (x, its) = self.solve_with(&sys, Some(&w), mass_factor, Some(&w.coeffs), inner)?;
            diag.linear_iterations += its;
            w = self.field(x)?;
        }
        Err(Error::NonConvergence(Box::new(NonConvergence {
            what: "Picard iteration".into(),
            iterations: max_iter,
            best: w.coeffs,
            history,
        })))
    }

    /// Steady Oseen-Picard solve from the Stokes solution.
    pub fn steady(&self) -> Result<SolutionState> {
        let zero = Field::zeros(self.space.clone());
        let rhs = vec![0.0; self.space.n_velocity()];
        let (field, diagnostics) = self.picard(zero, 0.0, &rhs, STEADY_MAX_PICARD)?;
        Ok(SolutionState {
            field,
            time: 0.0,
            step: 0,
            diagnostics,
        })
    }

    /// Marches from rest to `t_end` (or to steadiness when `steady_tol` is
    /// set), calling `observe` after every step.
    pub fn transient(&self, observe: &mut dyn FnMut(&StepReport) -> Result<()>) -> Result<Trajectory> {
        self.transient_from(Field::zeros(self.space.clone()), observe)
    }

    /// As [`NsSolver::transient`], starting from `initial` instead of rest.
    pub fn transient_from(
        &self,
        initial: Field,
        observe: &mut dyn FnMut(&StepReport) -> Result<()>,
    ) -> Result<Trajectory> {
        if !Arc::ptr_eq(initial.space_arc(), &self.space) && initial.coeffs.len() != self.space.n_total() {
            return Err(Error::invalid("initial state does not match the function space"));
        }
        let dt = self.case.dt;
        let mut prev: Option<Field> = None;
        let mut current = Field::new(self.space.clone(), initial.coeffs)?;
        let mut lagged: VecDeque<Vec<f64>> = VecDeque::with_capacity(STEADY_LAG + 1);
        lagged.push_back(current.velocity().to_vec());
        let mut records = Vec::new();
        let mut state = SolutionState {
            field: current.clone(),
            time: 0.0,
            step: 0,
            diagnostics: Diagnostics::default(),
        };
        let mut steady_reached = false;
        for step in 1..=self.case.n_steps() {
            let wrap = |e: Error| Error::Step {
                step,
                source: Box::new(e),
            };
            let history: Vec<&Field> = match &prev {
                None => vec![&current],
                Some(p) => vec![&current, p],
            };
            let (sys, mass_factor, w) = self.step_system(&history).map_err(wrap)?;
            let guess = w.coeffs.clone();
            let (next, diagnostics) = match self.case.nonlinear {
                NonlinearMode::SemiImplicit => {
                    let (x, its) = self.solve_system(&sys, Some(&w), mass_factor, Some(&guess)).map_err(wrap)?;
                    let f = self.field(x)?;
                    let d = Diagnostics {
                        divergence: self.divergence_norm(&f),
                        nonlinear_iterations: 1,
                        linear_iterations: its,
                    };
                    (f, d)
                }
                NonlinearMode::Picard => {
                    let rhs = self.history_rhs(&history);
                    self.picard(w.clone(), mass_factor, &rhs, TRANSIENT_MAX_PICARD).map_err(wrap)?
                }
            };
            state = SolutionState {
                field: next,
                time: step as f64 * dt,
                step,
                diagnostics,
            };
            observe(&StepReport {
                system: &sys,
                state: &state,
                initial_guess: &guess,
            })
            .map_err(wrap)?;
            lagged.push_back(state.field.velocity().to_vec());
            if lagged.len() > STEADY_LAG + 1 {
                lagged.pop_front();
            }
            let change = (lagged.len() == STEADY_LAG + 1).then(|| {
                let now = lagged.back().unwrap();
                let then = lagged.front().unwrap();
                let diff: f64 = now.iter().zip(then).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                let n = norm2(now);
                if n > 0.0 {
                    diff / n
                } else {
                    diff
                }
            });
            records.push(StepRecord {
                step,
                time: state.time,
                diagnostics,
                change,
            });
            prev = Some(std::mem::replace(&mut current, state.field.clone()));
            if let (Some(tol), Some(c)) = (self.case.steady_tol, change) {
                if c <= tol {
                    steady_reached = true;
                    break;
                }
            }
        }
        Ok(Trajectory {
            final_state: state,
            records,
            steady_reached,
        })
    }

    fn history_rhs(&self, history: &[&Field]) -> Vec<f64> {
        let dt = self.case.dt;
        let hist: Vec<f64> = match history {
            [un] => un.velocity().to_vec(),
            [un, um] => un.velocity().iter().zip(um.velocity()).map(|(a, b)| 2.0 * a - 0.5 * b).collect(),
            _ => unreachable!("history length checked by step_system"),
        };
        let mut rhs = self.mass.mul_vec(&hist);
        rhs.iter_mut().for_each(|v| *v /= dt);
        rhs
    }
}

/// Step system for `solver`'s case after `history` (see [`NsSolver::step_system`]).
pub fn assemble_step_system(solver: &NsSolver, history: &[&Field]) -> Result<SaddleSystem> {
    Ok(solver.step_system(history)?.0)
}

pub fn solve_steady(case: FlowCase) -> Result<SolutionState> {
    NsSolver::new(case)?.steady()
}

pub fn solve_transient(case: FlowCase) -> Result<Trajectory> {
    NsSolver::new(case)?.transient(&mut |_| Ok(()))
}

/// `√(dᵀ M_p⁻¹ d)` with `d = B u`.
pub fn divergence_norm(field: &Field) -> Result<f64> {
    let space = field.space();
    let b = assemble_divergence_block(space)?;
    let mp = assemble_mass(space, MassKind::Pressure, 1.0)?;
    let d = b.mul_vec(field.velocity());
    let y = SparseLu::factor(&mp)?.solve(&d);
    Ok(d.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>().max(0.0).sqrt())
}
