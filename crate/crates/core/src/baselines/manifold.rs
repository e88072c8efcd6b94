use num_complex::Complex;

use crate::ao::{SolverOptions, UnitModulusVector};
use crate::error::{check_dim, Error, Result};
use crate::numerics::ComplexVector;
use crate::scalar::Real;

/// A smooth objective of `v` on the product of unit circles.
pub trait CircleObjective<T: Real> {
    fn value(&self, v: &UnitModulusVector<T>) -> T;

    /// Wirtinger gradient `2 df/dv^*`, so that `df = Re{g^H dv}`.
    fn egrad(&self, v: &UnitModulusVector<T>) -> ComplexVector<T>;
}

impl<T: Real, O: CircleObjective<T> + ?Sized> CircleObjective<T> for &O {
    fn value(&self, v: &UnitModulusVector<T>) -> T {
        (**self).value(v)
    }

    fn egrad(&self, v: &UnitModulusVector<T>) -> ComplexVector<T> {
        (**self).egrad(v)
    }
}

/// Tangent vector at a point of the torus: `Re{d_k v_k^*} = 0` for each `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector<T>(ComplexVector<T>);

impl<T: Real> TangentVector<T> {
    pub fn as_vector(&self) -> &ComplexVector<T> {
        &self.0
    }

    pub fn norm(&self) -> T {
        self.0.norm()
    }

    /// `max_k |Re{d_k v_k^*}|`
    pub fn tangency_residual(&self, v: &UnitModulusVector<T>) -> T {
        self.0
            .iter()
            .zip(v.as_slice())
            .fold(T::zero(), |acc, (d, vk)| acc.max((*d * vk.conj()).re.abs()))
    }
}

/// Projection of a Euclidean gradient onto the tangent space:
/// `d_k = g_k - Re{g_k v_k^*} v_k`.
pub fn riemannian_gradient<T: Real>(egrad: &ComplexVector<T>, v: &UnitModulusVector<T>) -> Result<TangentVector<T>> {
    check_dim("riemannian_gradient", v.len(), egrad.len())?;
    let vs = v.as_slice();
    Ok(TangentVector(ComplexVector::from_fn(v.len(), |k| {
        egrad[k] - vs[k] * (egrad[k] * vs[k].conj()).re
    })))
}

/// `(v_k + step d_k) / |v_k + step d_k|`, halving `step` while some entry
/// comes within `1e-14` of the origin.
pub fn retract<T: Real>(v: &UnitModulusVector<T>, d: &TangentVector<T>, step: T) -> Result<UnitModulusVector<T>> {
    check_dim("retract", v.len(), d.0.len())?;
    if !(step >= T::zero() && step.is_finite()) {
        return Err(Error::InvalidInput(format!("retraction step must be non-negative, got {step}")));
    }
    let floor = T::lit(1e-14);
    let mut s = step;
    for _ in 0..64 {
        let moved: Vec<Complex<T>> = v.as_slice().iter().zip(d.0.iter()).map(|(vk, dk)| *vk + *dk * s).collect();
        if moved.iter().all(|z| z.norm() >= floor) {
            return Ok(UnitModulusVector::from_complex_normalized(&moved));
        }
        s = s * T::lit(0.5);
    }
    Ok(v.clone())
}

/// Settings of [`manifold_solve`].
#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldOptions<T> {
    /// First trial step. Later iterations start from `2 (f_prev - f) / ||d||^2`.
    pub step0: T,
    pub beta: T,
    pub c: T,
    /// Normalized objective-increment tolerance.
    pub xi: T,
    /// Riemannian gradient norm tolerance.
    pub grad_tol: T,
    pub max_iterations: usize,
    pub max_backtracks: usize,
}

impl<T: Real> ManifoldOptions<T> {
    /// Step, decay and decrease constants of the outer solver; inner
    /// tolerance `xi1`, capped at `max_inner` iterations.
    pub fn from_solver(opts: &SolverOptions<T>) -> Self {
        Self {
            step0: opts.gamma0,
            beta: opts.beta,
            c: opts.c,
            xi: opts.xi1,
            grad_tol: T::lit(1e-8),
            max_iterations: opts.max_inner,
            max_backtracks: opts.max_backtracks,
        }
    }
}

/// Result of [`manifold_solve`].
#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldOutcome<T> {
    pub v: UnitModulusVector<T>,
    /// Objective before the first step followed by the value after each step.
    pub objectives: Vec<T>,
    pub iterations: usize,
    pub converged: bool,
}

/// Riemannian gradient descent with Armijo backtracking along the retraction:
/// accepts the first `t = t0 beta^m` with
/// `f(R(v, -t d)) <= f(v) - c t ||d||^2`.
pub fn manifold_solve<T: Real, O: CircleObjective<T> + ?Sized>(
    objective: &O,
    v0: &UnitModulusVector<T>,
    opts: &ManifoldOptions<T>,
) -> Result<ManifoldOutcome<T>> {
    let mut v = v0.clone();
    let mut f = objective.value(&v);
    if !f.is_finite() {
        return Err(Error::NonFinite {
            what: "manifold objective",
            iteration: 0,
        });
    }
    let mut objectives = vec![f];
    let mut last_decrease: Option<T> = None;
    let mut converged = false;
    let mut iterations = 0;
    let two = T::lit(2.0);

    while iterations < opts.max_iterations {
        let d = riemannian_gradient(&objective.egrad(&v), &v)?;
        let dn2 = d.norm().powi(2);
        if dn2.sqrt() < opts.grad_tol {
            converged = true;
            break;
        }
        let descent = TangentVector(d.0.scale_real(-T::one()));
        let mut accepted = None;
        let mut t = match last_decrease {
            Some(df) if df > T::zero() => two * df / dn2,
            _ => opts.step0,
        };
        for _ in 0..=opts.max_backtracks {
            let trial = retract(&v, &descent, t)?;
            let value = objective.value(&trial);
            if value <= f - opts.c * t * dn2 {
                accepted = Some((trial, value));
                break;
            }
            t = t * opts.beta;
        }
        iterations += 1;
        let Some((next, value)) = accepted else {
            converged = true;
            break;
        };
        let increment = (value - f).abs() / f.abs().max(T::lit(1e-12));
        last_decrease = Some(f - value);
        v = next;
        f = value;
        objectives.push(f);
        if increment < opts.xi {
            converged = true;
            break;
        }
    }

    Ok(ManifoldOutcome {
        v,
        objectives,
        iterations,
        converged,
    })
}
