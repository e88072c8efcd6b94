use std::time::Duration;

use crate::scalar::Real;

/// One outer iteration of an alternating solve.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord<T> {
    pub iteration: usize,
    /// Objective after the phase update, `f(Q^(t), Phi^(t+1))`.
    pub objective: T,
    /// Objective after the `Q` update, `f(Q^(t), Phi^(t))`.
    pub objective_after_q: T,
    /// Accepted step size (zero on a stall).
    pub step_size: T,
    /// Number of step reductions (`m_t`), or inner iterations for non-gradient phase updates.
    pub backtracks: usize,
    /// Euclidean norm of the phase gradient at `(Q^(t), Theta^(t))`.
    pub grad_norm: T,
    /// Max-norm of the same gradient.
    pub grad_max_norm: T,
    /// Wall time since the start of the solve.
    pub elapsed: Duration,
    /// The line search exhausted its budget and took a zero step.
    pub stalled: bool,
}

/// Per-iteration history of a solve. Objectives use minimization orientation.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IterationTrace<T> {
    pub records: Vec<IterationRecord<T>>,
}

impl<T: Real> IterationTrace<T> {
    pub fn new() -> Self {
        Self { records: Vec::new() }
    }

    pub fn push(&mut self, record: IterationRecord<T>) {
        self.records.push(record);
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn objectives(&self) -> Vec<T> {
        self.records.iter().map(|r| r.objective).collect()
    }

    pub fn final_objective(&self) -> Option<T> {
        self.records.last().map(|r| r.objective)
    }

    pub fn stalls(&self) -> usize {
        self.records.iter().filter(|r| r.stalled).count()
    }

    /// `f^(t) <= f^(t-1) + slack` for every `t >= 1`.
    pub fn is_monotone(&self, slack: T) -> bool {
        self.records
            .windows(2)
            .all(|w| w[1].objective <= w[0].objective + slack)
    }

    /// `f^(t) <= f^(t-1) - c * gamma^(t) * ||grad^(t)||^2 + slack` for every `t >= 1`.
    pub fn first_decrease_violation(&self, c: T, slack: T) -> Option<usize> {
        self.records.windows(2).find_map(|w| {
            let bound = w[0].objective - c * w[1].step_size * w[1].grad_norm * w[1].grad_norm + slack;
            (w[1].objective > bound).then_some(w[1].iteration)
        })
    }

    pub fn satisfies_sufficient_decrease(&self, c: T, slack: T) -> bool {
        self.first_decrease_violation(c, slack).is_none()
    }

    /// Smallest gradient max-norm seen so far at each iteration.
    pub fn min_grad_max_norm(&self) -> Option<T> {
        self.records.iter().map(|r| r.grad_max_norm).reduce(T::min)
    }

    pub fn initial_grad_max_norm(&self) -> Option<T> {
        self.records.first().map(|r| r.grad_max_norm)
    }

    /// First iteration count `t + 1` at which the objective is within
    /// `rel_tol` (normalized) of the final objective.
    pub fn iterations_to_reach_final(&self, rel_tol: T) -> Option<usize> {
        let target = self.final_objective()?;
        let scale = target.abs().max(T::lit(1e-12));
        self.records
            .iter()
            .position(|r| (r.objective - target).abs() / scale <= rel_tol)
            .map(|i| i + 1)
    }

    pub fn elapsed(&self) -> Duration {
        self.records.last().map_or(Duration::ZERO, |r| r.elapsed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(iteration: usize, objective: f64, step: f64, grad: f64) -> IterationRecord<f64> {
        IterationRecord {
            iteration,
            objective,
            objective_after_q: objective,
            step_size: step,
            backtracks: 0,
            grad_norm: grad,
            grad_max_norm: grad,
            elapsed: Duration::from_millis(iteration as u64),
            stalled: false,
        }
    }

    #[test]
    fn monotone_and_decrease_checks() {
        let mut t = IterationTrace::new();
        t.push(rec(0, 10.0, 1.0, 2.0));
        t.push(rec(1, 5.0, 1.0, 2.0));
        t.push(rec(2, 4.9, 0.01, 1.0));
        assert!(t.is_monotone(0.0));
        assert!(t.satisfies_sufficient_decrease(0.5, 0.0));
        // 4.9 -> 4.8999 with step 1 and grad 1 needs a drop of 0.5.
        t.push(rec(3, 4.8999, 1.0, 1.0));
        assert_eq!(t.first_decrease_violation(0.5, 1e-10), Some(3));
        assert_eq!(t.min_grad_max_norm(), Some(1.0));
    }

    #[test]
    fn iterations_to_final() {
        let mut t = IterationTrace::new();
        for (i, f) in [10.0, 2.0, 1.00001, 1.0].into_iter().enumerate() {
            t.push(rec(i, f, 1.0, 1.0));
        }
        assert_eq!(t.iterations_to_reach_final(1e-4), Some(3));
        assert_eq!(t.iterations_to_reach_final(0.0), Some(4));
    }
}
