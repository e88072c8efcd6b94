use rand::Rng;

use crate::error::{check_dim, Result};
use crate::numerics::ComplexVector;
use crate::scalar::{cis, Cx, Real};

/// Real phase angles `theta_1..theta_M` in radians, kept unwrapped.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PhaseVector<T> {
    theta: Vec<T>,
}

impl<T: Real> PhaseVector<T> {
    pub fn new(theta: Vec<T>) -> Self {
        Self { theta }
    }

    pub fn zeros(m: usize) -> Self {
        Self {
            theta: vec![T::zero(); m],
        }
    }

    /// Uniform draw on `[0, 2 pi)`.
    pub fn random<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Self {
        let two_pi = std::f64::consts::TAU;
        Self {
            theta: (0..m).map(|_| T::lit(rng.random::<f64>() * two_pi)).collect(),
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.theta.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[T] {
        &self.theta
    }

    pub fn into_inner(self) -> Vec<T> {
        self.theta
    }

    /// `theta - gamma * direction`
    pub fn step(&self, gamma: T, direction: &[T]) -> Result<Self> {
        check_dim("PhaseVector::step", self.len(), direction.len())?;
        Ok(Self {
            theta: self
                .theta
                .iter()
                .zip(direction)
                .map(|(t, d)| *t - gamma * *d)
                .collect(),
        })
    }

    /// Angles reduced to `[0, 2 pi)`, for reporting only.
    pub fn wrapped(&self) -> Self {
        let two_pi = T::TAU();
        Self {
            theta: self
                .theta
                .iter()
                .map(|t| {
                    let r = *t % two_pi;
                    if r < T::zero() {
                        r + two_pi
                    } else {
                        r
                    }
                })
                .collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.theta.iter().all(|t| t.is_finite())
    }
}

impl<T: Real> From<Vec<T>> for PhaseVector<T> {
    fn from(theta: Vec<T>) -> Self {
        Self::new(theta)
    }
}

/// Unit-modulus vector `v` with `v_k = e^{-j theta_k}`.
///
/// The reflection matrix is `Phi = diag(conj(v))`, so `v^H Phi`-style products
/// in the applications read `sum_k e^{j theta_k} (...)_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitModulusVector<T> {
    v: ComplexVector<T>,
}

impl<T: Real> UnitModulusVector<T> {
    pub fn from_phases(theta: &PhaseVector<T>) -> Self {
        Self {
            v: theta.as_slice().iter().map(|t| cis(-*t)).collect(),
        }
    }

    /// Projects every entry onto the unit circle; zero entries become `1`.
    pub fn from_complex_normalized(values: &[Cx<T>]) -> Self {
        Self {
            v: values
                .iter()
                .map(|z| {
                    let n = z.norm();
                    if n > T::zero() && n.is_finite() {
                        z / n
                    } else {
                        Cx::new(T::one(), T::zero())
                    }
                })
                .collect(),
        }
    }

    pub fn ones(m: usize) -> Self {
        Self::from_phases(&PhaseVector::zeros(m))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.v.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    #[inline]
    pub fn as_vector(&self) -> &ComplexVector<T> {
        &self.v
    }

    #[inline]
    pub fn as_slice(&self) -> &[Cx<T>] {
        self.v.as_slice()
    }

    /// Diagonal of `Phi`: `Phi_kk = e^{j theta_k} = conj(v_k)`.
    pub fn phi_diag(&self) -> ComplexVector<T> {
        self.v.conj()
    }

    /// Recovers `theta` from the entries, in `(-pi, pi]`.
    pub fn angles(&self) -> PhaseVector<T> {
        PhaseVector::new(self.v.iter().map(|z| -z.arg()).collect())
    }

    /// Multiplies every entry by `e^{j phase}`.
    pub fn rotated(&self, phase: T) -> Self {
        Self {
            v: self.v.scale(cis(phase)),
        }
    }

    /// Replaces one entry; the value is projected onto the unit circle.
    pub fn set(&mut self, k: usize, value: Cx<T>) {
        let n = value.norm();
        if n > T::zero() && n.is_finite() {
            self.v[k] = value / n;
        }
    }

    pub fn max_modulus_error(&self) -> T {
        self.v
            .iter()
            .fold(T::zero(), |acc, z| acc.max((z.norm() - T::one()).abs()))
    }
}

/// The map `U(theta)`.
pub fn u_map<T: Real>(theta: &PhaseVector<T>) -> UnitModulusVector<T> {
    UnitModulusVector::from_phases(theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    #[test]
    fn zero_phases_give_identity() {
        let v = u_map(&PhaseVector::<f64>::zeros(5));
        for z in v.as_slice() {
            assert_eq!(*z, Cx::new(1.0, 0.0));
        }
        for z in v.phi_diag().iter() {
            assert_eq!(*z, Cx::new(1.0, 0.0));
        }
    }

    #[test]
    fn quarter_turn_convention() {
        let v = u_map(&PhaseVector::new(vec![FRAC_PI_2]));
        assert!((v.phi_diag()[0] - Cx::new(0.0, 1.0)).norm() < 1e-15);
        assert!((v.as_slice()[0] - Cx::new(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn wrapped_lands_in_range() {
        let p = PhaseVector::new(vec![-0.5, 7.0, TAU, -3.0 * PI]);
        for t in p.wrapped().as_slice() {
            assert!((0.0..TAU).contains(t), "{t}");
        }
    }

    fn angular_distance(a: f64, b: f64) -> f64 {
        let d = (a - b).rem_euclid(TAU);
        d.min(TAU - d)
    }

    proptest! {
        #[test]
        fn unit_modulus_and_round_trip(theta in proptest::collection::vec(-20.0f64..20.0, 1..32)) {
            let p = PhaseVector::new(theta.clone());
            let v = u_map(&p);
            prop_assert!(v.max_modulus_error() <= 1e-12);
            let back = v.angles();
            for (a, b) in theta.iter().zip(back.as_slice()) {
                prop_assert!(angular_distance(*a, *b) <= 1e-12);
            }
        }
    }
}
