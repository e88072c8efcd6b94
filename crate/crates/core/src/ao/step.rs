use super::{PhaseVector, SolverOptions, TwoBlockProblem};
use crate::error::{check_dim, Result};
use crate::scalar::Real;

/// Result of one phase step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome<T> {
    pub gamma: T,
    pub theta_next: PhaseVector<T>,
    /// `m_t`: number of step reductions before acceptance.
    pub backtracks: usize,
    /// `f(Q^(t), U(theta_next))`.
    pub objective: T,
    pub stalled: bool,
}

pub(crate) fn squared_norm<T: Real>(g: &[T]) -> T {
    g.iter().map(|x| *x * *x).sum()
}

/// Backtracking with the cross-block condition
///
/// `f(U(theta - gamma grad), Q^(t)) <= f_prev_iteration - c gamma ||grad||^2`,
///
/// where `f_prev_iteration = f(U(theta^(t)), Q^(t-1))` is the objective the
/// previous iteration ended with. Returns the largest `gamma0 beta^m` that
/// passes; after `max_backtracks` reductions it takes a zero step.
pub fn tailored_backtrack<T: Real, P: TwoBlockProblem<T> + ?Sized>(
    problem: &P,
    theta: &PhaseVector<T>,
    q: &P::Block,
    grad: &[T],
    f_prev_iteration: T,
    opts: &SolverOptions<T>,
) -> Result<StepOutcome<T>> {
    backtrack(problem, theta, q, grad, f_prev_iteration, opts)
}

/// Armijo-Goldstein backtracking against the current block value
/// `f(U(theta^(t)), Q^(t))`.
pub fn ag_backtrack<T: Real, P: TwoBlockProblem<T> + ?Sized>(
    problem: &P,
    theta: &PhaseVector<T>,
    q: &P::Block,
    grad: &[T],
    opts: &SolverOptions<T>,
) -> Result<StepOutcome<T>> {
    let current = problem.evaluate(q, theta);
    backtrack(problem, theta, q, grad, current, opts)
}

fn backtrack<T: Real, P: TwoBlockProblem<T> + ?Sized>(
    problem: &P,
    theta: &PhaseVector<T>,
    q: &P::Block,
    grad: &[T],
    reference: T,
    opts: &SolverOptions<T>,
) -> Result<StepOutcome<T>> {
    check_dim("backtrack gradient", theta.len(), grad.len())?;
    let gnorm2 = squared_norm(grad);
    let mut gamma = opts.gamma0;
    for m in 0..=opts.max_backtracks {
        let trial = theta.step(gamma, grad)?;
        let value = problem.evaluate(q, &trial);
        // NaN fails the comparison and keeps shrinking.
        if value <= reference - opts.c * gamma * gnorm2 {
            return Ok(StepOutcome {
                gamma,
                theta_next: trial,
                backtracks: m,
                objective: value,
                stalled: false,
            });
        }
        gamma *= opts.beta;
    }
    Ok(StepOutcome {
        gamma: T::zero(),
        theta_next: theta.clone(),
        backtracks: opts.max_backtracks,
        objective: problem.evaluate(q, theta),
        stalled: true,
    })
}

/// Takes `gamma0` without a decrease test; halves only while the objective is
/// non-finite.
pub(crate) fn unguarded_step<T: Real, P: TwoBlockProblem<T> + ?Sized>(
    problem: &P,
    theta: &PhaseVector<T>,
    q: &P::Block,
    grad: &[T],
    gamma0: T,
    opts: &SolverOptions<T>,
) -> Result<StepOutcome<T>> {
    let mut gamma = gamma0;
    for m in 0..=opts.max_backtracks {
        let trial = theta.step(gamma, grad)?;
        let value = problem.evaluate(q, &trial);
        if value.is_finite() {
            return Ok(StepOutcome {
                gamma,
                theta_next: trial,
                backtracks: m,
                objective: value,
                stalled: false,
            });
        }
        gamma *= opts.beta;
    }
    Ok(StepOutcome {
        gamma: T::zero(),
        theta_next: theta.clone(),
        backtracks: opts.max_backtracks,
        objective: problem.evaluate(q, theta),
        stalled: true,
    })
}

/// Safeguarded Barzilai-Borwein (BB1) step `s.s / s.y`, clamped to
/// `[gamma_min, gamma_max]`; `gamma_min` when `s.y <= 0`.
pub fn bb_step<T: Real>(
    theta_t: &[T],
    theta_prev: &[T],
    grad_t: &[T],
    grad_prev: &[T],
    gamma_min: T,
    gamma_max: T,
) -> T {
    let mut ss = T::zero();
    let mut sy = T::zero();
    for i in 0..theta_t.len() {
        let s = theta_t[i] - theta_prev[i];
        let y = grad_t[i] - grad_prev[i];
        ss += s * s;
        sy += s * y;
    }
    if !(sy > T::zero()) || !ss.is_finite() {
        return gamma_min;
    }
    (ss / sy).max(gamma_min).min(gamma_max)
}
