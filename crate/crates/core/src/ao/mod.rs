//! Alternating optimization over a generic block `Q` and unit-modulus phases.
//!
//! The phase block is parametrized by real angles, `v = U(theta)`, which turns
//! the unit-modulus constraint into an unconstrained problem in `theta`. Each
//! outer iteration updates `Q` with the phases fixed and then takes one
//! gradient step in `theta` whose length is chosen by a [`StepRule`].

mod options;
mod phase;
mod problem;
mod solver;
mod step;
mod trace;

pub use options::{SolverOptions, StepRule};
pub use phase::{u_map, PhaseVector, UnitModulusVector};
pub use problem::TwoBlockProblem;
pub use solver::{normalized_increment, random_phases, solve, stationarity_residual, Solution};
pub use step::{ag_backtrack, bb_step, tailored_backtrack, StepOutcome};
pub use trace::{IterationRecord, IterationTrace};
