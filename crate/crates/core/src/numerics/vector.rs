use std::ops::{Index, IndexMut};

use num_complex::Complex;

use crate::error::{check_dim, Result};
use crate::scalar::{Cx, Real};

/// Dense complex column vector.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComplexVector<T> {
    data: Vec<Cx<T>>,
}

impl<T: Real> ComplexVector<T> {
    pub fn new(data: Vec<Cx<T>>) -> Self {
        Self { data }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            data: vec![Complex::new(T::zero(), T::zero()); n],
        }
    }

    /// Standard basis vector `e_index`.
    pub fn basis(n: usize, index: usize) -> Self {
        let mut v = Self::zeros(n);
        v.data[index] = Complex::new(T::one(), T::zero());
        v
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize) -> Cx<T>) -> Self {
        Self {
            data: (0..n).map(f).collect(),
        }
    }

    pub fn from_real(values: &[T]) -> Self {
        Self::from_fn(values.len(), |i| Complex::new(values[i], T::zero()))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[Cx<T>] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [Cx<T>] {
        &mut self.data
    }

    pub fn into_inner(self) -> Vec<Cx<T>> {
        self.data
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Cx<T>> {
        self.data.iter()
    }

    /// Hermitian inner product `self^H other`.
    pub fn dot(&self, other: &Self) -> Result<Cx<T>> {
        check_dim("ComplexVector::dot", self.len(), other.len())?;
        Ok(self.dot_unchecked(other))
    }

    #[inline]
    pub(crate) fn dot_unchecked(&self, other: &Self) -> Cx<T> {
        self.data
            .iter()
            .zip(&other.data)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b)
    }

    pub fn norm_sqr(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, z| acc.max(z.norm()))
    }

    pub fn scale(&self, s: Cx<T>) -> Self {
        Self::from_fn(self.len(), |i| self.data[i] * s)
    }

    pub fn scale_real(&self, s: T) -> Self {
        Self::from_fn(self.len(), |i| self.data[i] * s)
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(self.len(), |i| self.data[i].conj())
    }

    /// `self += alpha * x`
    pub fn axpy(&mut self, alpha: Cx<T>, x: &Self) -> Result<()> {
        check_dim("ComplexVector::axpy", self.len(), x.len())?;
        for (a, b) in self.data.iter_mut().zip(&x.data) {
            *a += alpha * b;
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dim("ComplexVector::add", self.len(), other.len())?;
        Ok(Self::from_fn(self.len(), |i| self.data[i] + other.data[i]))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_dim("ComplexVector::sub", self.len(), other.len())?;
        Ok(Self::from_fn(self.len(), |i| self.data[i] - other.data[i]))
    }

    /// Entry-wise product.
    pub fn hadamard(&self, other: &Self) -> Result<Self> {
        check_dim("ComplexVector::hadamard", self.len(), other.len())?;
        Ok(Self::from_fn(self.len(), |i| self.data[i] * other.data[i]))
    }

    /// Unit-norm copy, or `None` when the norm is zero.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        if n > T::zero() && n.is_finite() {
            Some(self.scale_real(T::one() / n))
        } else {
            None
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl<T> Index<usize> for ComplexVector<T> {
    type Output = Cx<T>;

    #[inline]
    fn index(&self, i: usize) -> &Cx<T> {
        &self.data[i]
    }
}

impl<T> IndexMut<usize> for ComplexVector<T> {
    #[inline]
    fn index_mut(&mut self, i: usize) -> &mut Cx<T> {
        &mut self.data[i]
    }
}

impl<T: Real> From<Vec<Cx<T>>> for ComplexVector<T> {
    fn from(data: Vec<Cx<T>>) -> Self {
        Self::new(data)
    }
}

impl<T: Real> FromIterator<Cx<T>> for ComplexVector<T> {
    fn from_iter<I: IntoIterator<Item = Cx<T>>>(iter: I) -> Self {
        Self::new(iter.into_iter().collect())
    }
}
