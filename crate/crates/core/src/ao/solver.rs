use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::step::{squared_norm, unguarded_step};
use super::{
    ag_backtrack, bb_step, tailored_backtrack, IterationRecord, IterationTrace, PhaseVector, SolverOptions, StepRule,
    TwoBlockProblem,
};
use crate::error::{check_dim, Error, Result};
use crate::scalar::Real;

/// Output of an alternating solve.
#[derive(Debug, Clone)]
pub struct Solution<T, Q> {
    /// `Theta^(T+1)`, the phases after the last step.
    pub theta: PhaseVector<T>,
    /// `Q^(T)`, the last `Q` block computed.
    pub q: Q,
    pub trace: IterationTrace<T>,
    /// The normalized-increment test fired before the iteration cap.
    pub converged: bool,
}

impl<T: Real, Q> Solution<T, Q> {
    pub fn objective(&self) -> T {
        self.trace.final_objective().unwrap_or_else(T::nan)
    }

    pub fn iterations(&self) -> usize {
        self.trace.len()
    }
}

/// `|f_t - f_prev| / max(|f_prev|, 1e-12)`
pub fn normalized_increment<T: Real>(f_t: T, f_prev: T) -> T {
    (f_t - f_prev).abs() / f_prev.abs().max(T::lit(1e-12))
}

/// Initial phases drawn uniformly on `[0, 2 pi)` from `seed`.
pub fn random_phases<T: Real>(m: usize, seed: u64) -> PhaseVector<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PhaseVector::random(m, &mut rng)
}

/// Alternating optimization with gradient phase updates.
///
/// Each iteration updates `Q` for the current phases, evaluates the phase
/// gradient, chooses a step with `rule`, and moves the phases. Under
/// [`StepRule::Tailored`] the first iteration takes `gamma0` without a decrease
/// test (halving only while the objective is non-finite); later iterations
/// require decrease against the objective the previous iteration ended with.
/// Stops when the normalized objective increment falls below the problem's
/// outer tolerance or after `max_iterations`.
pub fn solve<T: Real, P: TwoBlockProblem<T> + ?Sized>(
    problem: &P,
    theta0: PhaseVector<T>,
    opts: &SolverOptions<T>,
    rule: StepRule,
) -> Result<Solution<T, P::Block>> {
    opts.validate()?;
    check_dim("solve initial phases", problem.dim(), theta0.len())?;
    if !theta0.is_finite() {
        return Err(Error::InvalidInput("initial phases must be finite".into()));
    }

    let start = Instant::now();
    let tol = problem.outer_tolerance(opts);
    let mut trace = IterationTrace::new();
    let mut theta = theta0;
    let mut q_prev: Option<P::Block> = None;
    let mut f_prev: Option<T> = None;
    let mut bb_memory: Option<(PhaseVector<T>, Vec<T>)> = None;
    let mut converged = false;

    for t in 0..opts.max_iterations {
        let q = problem.update_q(&theta, q_prev.as_ref())?;
        let f_after_q = problem.evaluate(&q, &theta);
        if !f_after_q.is_finite() {
            return Err(Error::NonFinite {
                what: "objective",
                iteration: t,
            });
        }
        let grad = problem.gradient_theta(&q, &theta);
        check_dim("gradient_theta", theta.len(), grad.len())?;
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFinite {
                what: "gradient",
                iteration: t,
            });
        }

        let outcome = match (rule, f_prev) {
            (StepRule::Tailored, None) => unguarded_step(problem, &theta, &q, &grad, opts.gamma0, opts)?,
            (StepRule::Tailored, Some(fp)) => tailored_backtrack(problem, &theta, &q, &grad, fp, opts)?,
            (StepRule::Armijo, _) => ag_backtrack(problem, &theta, &q, &grad, opts)?,
            (StepRule::BarzilaiBorwein, _) => {
                let gamma = match &bb_memory {
                    None => opts.gamma0,
                    Some((theta_prev, grad_prev)) => bb_step(
                        theta.as_slice(),
                        theta_prev.as_slice(),
                        &grad,
                        grad_prev,
                        opts.bb_min_factor * opts.gamma0,
                        opts.bb_max_factor * opts.gamma0,
                    ),
                };
                unguarded_step(problem, &theta, &q, &grad, gamma, opts)?
            }
        };
        if !outcome.objective.is_finite() {
            return Err(Error::NonFinite {
                what: "objective",
                iteration: t,
            });
        }

        let grad_norm = squared_norm(&grad).sqrt();
        let grad_max_norm = grad.iter().fold(T::zero(), |acc, g| acc.max(g.abs()));
        trace.push(IterationRecord {
            iteration: t,
            objective: outcome.objective,
            objective_after_q: f_after_q,
            step_size: outcome.gamma,
            backtracks: outcome.backtracks,
            grad_norm,
            grad_max_norm,
            elapsed: start.elapsed(),
            stalled: outcome.stalled,
        });

        bb_memory = Some((theta, grad));
        theta = outcome.theta_next;
        q_prev = Some(q);
        let done = f_prev.is_some_and(|fp| normalized_increment(outcome.objective, fp) < tol);
        f_prev = Some(outcome.objective);
        if done {
            converged = true;
            break;
        }
    }

    Ok(Solution {
        theta,
        q: q_prev.expect("max_iterations >= 1 guarantees one Q update"),
        trace,
        converged,
    })
}

/// First-order stationarity diagnostic for the phase block: `||grad_theta f||_inf`.
pub fn stationarity_residual<T: Real, P: TwoBlockProblem<T> + ?Sized>(
    problem: &P,
    q: &P::Block,
    theta: &PhaseVector<T>,
) -> T {
    problem
        .gradient_theta(q, theta)
        .iter()
        .fold(T::zero(), |acc, g| acc.max(g.abs()))
}
