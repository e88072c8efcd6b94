//! Alternating optimization with gradient-descent phase updates for
//! problems over unit-modulus (reflecting-surface) phase vectors.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: dense complex linear algebra.
//! * [`ao`]: the two-block framework, step-size rules and traces.
//! * [`secrecy`] and [`wsr`]: secrecy-rate and weighted sum-rate applications.
//! * [`baselines`]: Riemannian and element-wise comparators.
//! * [`sim`]: reproducible channel and scenario generation.
//!
//! All numeric code is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`, which is what the experiments use.

pub mod ao;
pub mod baselines;
mod error;
pub mod numerics;
mod scalar;
pub mod secrecy;
pub mod sim;
pub mod wsr;

pub use error::{Error, Result};
pub use scalar::{cis, Cx, Real};

pub type ComplexVector64 = numerics::ComplexVector<f64>;
pub type ComplexMatrix64 = numerics::ComplexMatrix<f64>;
pub type PhaseVector64 = ao::PhaseVector<f64>;
pub type UnitModulusVector64 = ao::UnitModulusVector<f64>;
pub type SolverOptions64 = ao::SolverOptions<f64>;
pub type IterationTrace64 = ao::IterationTrace<f64>;
pub type SecrecyInstance64 = secrecy::SecrecyInstance<f64>;
pub type SecrecyQuadratics64 = secrecy::SecrecyQuadratics<f64>;
pub type WsrInstance64 = wsr::WsrInstance<f64>;
pub type FpState64 = wsr::FpState<f64>;
pub type WsrQuadratics64 = wsr::WsrQuadratics<f64>;

pub type ComplexVector32 = numerics::ComplexVector<f32>;
pub type ComplexMatrix32 = numerics::ComplexMatrix<f32>;
pub type PhaseVector32 = ao::PhaseVector<f32>;
pub type SecrecyInstance32 = secrecy::SecrecyInstance<f32>;
pub type WsrInstance32 = wsr::WsrInstance<f32>;
