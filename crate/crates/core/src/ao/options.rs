use crate::error::{Error, Result};
use crate::scalar::Real;

/// Step-size rule used for the phase block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepRule {
    /// Cross-block sufficient decrease against the previous iteration's value.
    Tailored,
    /// Classic Armijo-Goldstein backtracking against the current block value.
    Armijo,
    /// Safeguarded Barzilai-Borwein (BB1) step without line search.
    BarzilaiBorwein,
}

/// Solver configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions<T> {
    /// Initial step size.
    pub gamma0: T,
    /// Backtracking decay factor in `(0, 1)`.
    pub beta: T,
    /// Sufficient-decrease constant in `(0, 1)`.
    pub c: T,
    /// Outer stopping tolerance on the normalized objective increment.
    pub xi: T,
    /// Inner-loop tolerance (weighted sum-rate fractional programming loop).
    pub xi1: T,
    /// Outer tolerance used by the weighted sum-rate problem.
    pub xi2: T,
    pub max_iterations: usize,
    pub max_backtracks: usize,
    /// Cap on inner fractional-programming cycles.
    pub max_inner: usize,
    /// Barzilai-Borwein safeguard box is `[bb_min_factor, bb_max_factor] * gamma0`.
    pub bb_min_factor: T,
    pub bb_max_factor: T,
    pub rng_seed: u64,
}

impl<T: Real> Default for SolverOptions<T> {
    fn default() -> Self {
        Self {
            gamma0: T::lit(1e-3),
            beta: T::lit(0.5),
            c: T::lit(5e-5),
            xi: T::lit(1e-6),
            xi1: T::lit(1e-5),
            xi2: T::lit(1e-3),
            max_iterations: 10_000,
            max_backtracks: 60,
            max_inner: 500,
            bb_min_factor: T::lit(1e-8),
            bb_max_factor: T::lit(1e4),
            rng_seed: 0,
        }
    }
}

impl<T: Real> SolverOptions<T> {
    /// Secrecy-rate settings: `gamma0 = 1e-3`, `beta = 0.5`, `c = 5e-5`, `xi = 1e-6`.
    pub fn secrecy() -> Self {
        Self::default()
    }

    /// Weighted sum-rate settings: `gamma0 = 100`, `beta = 0.5`, `c = 1e-4`,
    /// inner `xi1 = 1e-5`, outer `xi2 = 1e-3`.
    pub fn wsr() -> Self {
        Self {
            gamma0: T::lit(100.0),
            c: T::lit(1e-4),
            xi: T::lit(1e-3),
            xi2: T::lit(1e-3),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let open_unit = |x: T| x > T::zero() && x < T::one();
        if !(self.gamma0 > T::zero() && self.gamma0.is_finite()) {
            return Err(Error::InvalidInput(format!("gamma0 must be positive, got {}", self.gamma0)));
        }
        if !open_unit(self.beta) {
            return Err(Error::InvalidInput(format!("beta must lie in (0, 1), got {}", self.beta)));
        }
        if !open_unit(self.c) {
            return Err(Error::InvalidInput(format!("c must lie in (0, 1), got {}", self.c)));
        }
        for (name, x) in [("xi", self.xi), ("xi1", self.xi1), ("xi2", self.xi2)] {
            if !(x > T::zero()) {
                return Err(Error::InvalidInput(format!("{name} must be positive, got {x}")));
            }
        }
        if !(self.bb_min_factor > T::zero() && self.bb_min_factor <= self.bb_max_factor) {
            return Err(Error::InvalidInput("invalid Barzilai-Borwein safeguard box".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidInput("max_iterations must be at least 1".into()));
        }
        Ok(())
    }
}
