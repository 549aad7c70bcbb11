pub mod case;
pub mod checkpoint;
pub mod ns;

pub use case::{
    flow_rate_from_reynolds, mean_velocity, poiseuille_inlet, FlowCase, NonlinearMode, Poiseuille, SolverMode,
    DEFAULT_DENSITY, DEFAULT_VISCOSITY,
};
pub use checkpoint::{read_checkpoint, write_checkpoint};
pub use ns::{
    assemble_step_system, divergence_norm, solve_steady, solve_transient, velocity_constraints, Diagnostics,
    NsSolver, SolutionState, StepRecord, StepReport, Trajectory,
};
