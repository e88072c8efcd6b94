//! Comparison methods: Riemannian gradient descent on the product of unit
//! circles, element-wise block coordinate descent, and a driver that runs any
//! phase-update strategy inside the same alternating loop.

mod manifold;

use std::time::Instant;

pub use manifold::{manifold_solve, retract, riemannian_gradient, CircleObjective, ManifoldOptions, ManifoldOutcome, TangentVector};

use crate::ao::{
    normalized_increment, solve, u_map, IterationRecord, IterationTrace, PhaseVector, Solution, SolverOptions,
    StepRule, TwoBlockProblem, UnitModulusVector,
};
use crate::error::{check_dim, Error, Result};
use crate::numerics::ComplexVector;
use crate::scalar::Real;
use crate::secrecy::{elementwise_bcd_sweep, ratio_objective, wirtinger_gradient, SecrecyProblem, SecrecyQuadratics};
use crate::wsr::{elementwise_bcd_v, f4_eval, f4_wirtinger_gradient, WsrProblem, WsrQuadratics};

/// Phase-update strategy used inside the alternating loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhaseMethod {
    /// Gradient step with the cross-block sufficient-decrease rule.
    Tailored,
    /// Gradient step with Armijo-Goldstein backtracking.
    Armijo,
    /// Safeguarded Barzilai-Borwein gradient step.
    BarzilaiBorwein,
    /// One sweep of closed-form single-entry updates.
    ElementwiseBcd,
    /// Riemannian gradient descent run to convergence.
    Manifold,
}

impl PhaseMethod {
    pub const ALL: [PhaseMethod; 5] = [
        PhaseMethod::Tailored,
        PhaseMethod::Armijo,
        PhaseMethod::BarzilaiBorwein,
        PhaseMethod::ElementwiseBcd,
        PhaseMethod::Manifold,
    ];

    /// Short name used on the command line and in output files.
    pub fn name(self) -> &'static str {
        match self {
            PhaseMethod::Tailored => "aogd",
            PhaseMethod::Armijo => "ag",
            PhaseMethod::BarzilaiBorwein => "bb",
            PhaseMethod::ElementwiseBcd => "bcd",
            PhaseMethod::Manifold => "manifold",
        }
    }

    pub fn step_rule(self) -> Option<StepRule> {
        match self {
            PhaseMethod::Tailored => Some(StepRule::Tailored),
            PhaseMethod::Armijo => Some(StepRule::Armijo),
            PhaseMethod::BarzilaiBorwein => Some(StepRule::BarzilaiBorwein),
            PhaseMethod::ElementwiseBcd | PhaseMethod::Manifold => None,
        }
    }
}

impl std::str::FromStr for PhaseMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PhaseMethod::ALL
            .into_iter()
            .find(|m| m.name() == s.trim())
            .ok_or_else(|| Error::InvalidInput(format!("unknown method `{s}`")))
    }
}

impl std::fmt::Display for PhaseMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A two-block problem whose phase subproblem is exposed on the circle.
pub trait PhaseSubproblem<T: Real>: TwoBlockProblem<T> {
    /// Phase subproblem with `Q` fixed, minimization orientation.
    type Model: CircleObjective<T>;

    fn phase_model(&self, q: &Self::Block, v: &UnitModulusVector<T>) -> Result<Self::Model>;

    /// One sweep of element-wise exact minimization of the model.
    fn bcd_sweep(&self, model: &Self::Model, v: &UnitModulusVector<T>) -> UnitModulusVector<T>;
}

/// `-v^H Y_l v / v^H Y_e v` for fixed quadratics.
#[derive(Debug, Clone, PartialEq)]
pub struct NegatedRatio<T>(pub SecrecyQuadratics<T>);

impl<T: Real> CircleObjective<T> for NegatedRatio<T> {
    fn value(&self, v: &UnitModulusVector<T>) -> T {
        -ratio_objective(&self.0, v)
    }

    fn egrad(&self, v: &UnitModulusVector<T>) -> ComplexVector<T> {
        wirtinger_gradient(&self.0, v).scale_real(-T::one())
    }
}

impl<T: Real> CircleObjective<T> for WsrQuadratics<T> {
    fn value(&self, v: &UnitModulusVector<T>) -> T {
        f4_eval(self, v)
    }

    fn egrad(&self, v: &UnitModulusVector<T>) -> ComplexVector<T> {
        f4_wirtinger_gradient(self, v)
    }
}

impl<T: Real> PhaseSubproblem<T> for SecrecyProblem<'_, T> {
    type Model = NegatedRatio<T>;

    fn phase_model(&self, q: &Self::Block, _v: &UnitModulusVector<T>) -> Result<Self::Model> {
        Ok(NegatedRatio(q.quadratics.clone()))
    }

    fn bcd_sweep(&self, model: &Self::Model, v: &UnitModulusVector<T>) -> UnitModulusVector<T> {
        elementwise_bcd_sweep(&model.0, v)
    }
}

impl<T: Real> PhaseSubproblem<T> for WsrProblem<'_, T> {
    type Model = WsrQuadratics<T>;

    fn phase_model(&self, q: &Self::Block, v: &UnitModulusVector<T>) -> Result<Self::Model> {
        self.phase_quadratics(&q.w, v)
    }

    fn bcd_sweep(&self, model: &Self::Model, v: &UnitModulusVector<T>) -> UnitModulusVector<T> {
        elementwise_bcd_v(model, v)
    }
}

/// A circle objective viewed as a two-block problem with an empty `Q` block,
/// so the phase step rules can run on a fixed subproblem.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleProblem<O> {
    pub objective: O,
    pub m: usize,
}

impl<O> CircleProblem<O> {
    pub fn new(objective: O, m: usize) -> Self {
        Self { objective, m }
    }
}

impl<T: Real, O: CircleObjective<T>> TwoBlockProblem<T> for CircleProblem<O> {
    type Block = ();

    fn dim(&self) -> usize {
        self.m
    }

    fn update_q(&self, _: &PhaseVector<T>, _: Option<&()>) -> Result<()> {
        Ok(())
    }

    fn evaluate(&self, _: &(), theta: &PhaseVector<T>) -> T {
        self.objective.value(&u_map(theta))
    }

    /// `d f / d theta_k = Re{g_k^* (-j v_k)}`
    fn gradient_theta(&self, _: &(), theta: &PhaseVector<T>) -> Vec<T> {
        let v = u_map(theta);
        let g = self.objective.egrad(&v);
        g.iter().zip(v.as_slice()).map(|(gk, vk)| (gk.conj() * vk).im).collect()
    }
}

/// Runs the alternating loop with the given phase-update strategy.
///
/// Gradient methods delegate to [`solve`]. For [`PhaseMethod::ElementwiseBcd`]
/// and [`PhaseMethod::Manifold`] each outer iteration updates `Q`, builds the
/// phase model and replaces the phases by one BCD sweep or by the output of
/// [`manifold_solve`]. Their records carry a zero step size and the number of
/// inner iterations in `backtracks`.
pub fn run_method<T: Real, P: PhaseSubproblem<T> + ?Sized>(
    problem: &P,
    theta0: PhaseVector<T>,
    opts: &SolverOptions<T>,
    method: PhaseMethod,
) -> Result<Solution<T, P::Block>> {
    if let Some(rule) = method.step_rule() {
        return solve(problem, theta0, opts, rule);
    }
    opts.validate()?;
    check_dim("run_method initial phases", problem.dim(), theta0.len())?;
    let manifold_opts = ManifoldOptions::from_solver(opts);
    let start = Instant::now();
    let tol = problem.outer_tolerance(opts);
    let mut trace = IterationTrace::new();
    let mut theta = theta0;
    let mut q_prev: Option<P::Block> = None;
    let mut f_prev: Option<T> = None;
    let mut converged = false;

    for t in 0..opts.max_iterations {
        let q = problem.update_q(&theta, q_prev.as_ref())?;
        let f_after_q = problem.evaluate(&q, &theta);
        let grad = problem.gradient_theta(&q, &theta);
        if !f_after_q.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFinite {
                what: "objective",
                iteration: t,
            });
        }
        let v = u_map(&theta);
        let model = problem.phase_model(&q, &v)?;
        let (v_next, inner) = match method {
            PhaseMethod::ElementwiseBcd => (problem.bcd_sweep(&model, &v), 1),
            _ => {
                let out = manifold_solve(&model, &v, &manifold_opts)?;
                let iterations = out.iterations;
                (out.v, iterations)
            }
        };
        let theta_next = v_next.angles();
        let objective = problem.evaluate(&q, &theta_next);
        if !objective.is_finite() {
            return Err(Error::NonFinite {
                what: "objective",
                iteration: t,
            });
        }
        trace.push(IterationRecord {
            iteration: t,
            objective,
            objective_after_q: f_after_q,
            step_size: T::zero(),
            backtracks: inner,
            grad_norm: grad.iter().map(|g| *g * *g).sum::<T>().sqrt(),
            grad_max_norm: grad.iter().fold(T::zero(), |acc, g| acc.max(g.abs())),
            elapsed: start.elapsed(),
            stalled: false,
        });
        theta = theta_next;
        q_prev = Some(q);
        let done = f_prev.is_some_and(|fp| normalized_increment(objective, fp) < tol);
        f_prev = Some(objective);
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
