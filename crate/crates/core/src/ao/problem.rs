use super::{PhaseVector, SolverOptions};
use crate::error::Result;
use crate::scalar::Real;

/// A two-block problem `min_{Q, Theta} f(Q, U(Theta))`.
///
/// Objectives are in minimization orientation; maximization problems register
/// negated objectives and gradients.
pub trait TwoBlockProblem<T: Real> {
    /// The non-phase block `Q`.
    type Block: Clone;

    /// Number of phases `M`.
    fn dim(&self) -> usize;

    /// Solves (or improves) the `Q` subproblem for fixed phases. `previous` is
    /// `Q^(t-1)`, `None` on the first iteration.
    fn update_q(&self, theta: &PhaseVector<T>, previous: Option<&Self::Block>) -> Result<Self::Block>;

    /// `f(Q, U(theta))`. Must be deterministic.
    fn evaluate(&self, q: &Self::Block, theta: &PhaseVector<T>) -> T;

    /// `grad_theta f(Q, U(theta))`, length `M`.
    fn gradient_theta(&self, q: &Self::Block, theta: &PhaseVector<T>) -> Vec<T>;

    /// Tolerance for the outer normalized-increment stopping test.
    fn outer_tolerance(&self, opts: &SolverOptions<T>) -> T {
        opts.xi
    }
}

impl<T: Real, P: TwoBlockProblem<T> + ?Sized> TwoBlockProblem<T> for &P {
    type Block = P::Block;

    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn update_q(&self, theta: &PhaseVector<T>, previous: Option<&Self::Block>) -> Result<Self::Block> {
        (**self).update_q(theta, previous)
    }

    fn evaluate(&self, q: &Self::Block, theta: &PhaseVector<T>) -> T {
        (**self).evaluate(q, theta)
    }

    fn gradient_theta(&self, q: &Self::Block, theta: &PhaseVector<T>) -> Vec<T> {
        (**self).gradient_theta(q, theta)
    }

    fn outer_tolerance(&self, opts: &SolverOptions<T>) -> T {
        (**self).outer_tolerance(opts)
    }
}
