//! Dense complex linear algebra sized for a few hundred unknowns.
//!
//! Everything here is a pure function of its inputs. Matrices are row-major
//! and dense; the largest systems in this crate are `M x M` with `M` in the
//! hundreds, where dense storage is cheap.

mod eig;
mod matrix;
mod vector;

pub use eig::{power_iteration, quadratic_form, rank_one_generalized_eig, rank_one_quotient, EigenPair};
pub use matrix::ComplexMatrix;
pub use vector::ComplexVector;
