use std::ops::{Index, IndexMut};

use num_complex::Complex;

use super::ComplexVector;
use crate::error::{check_dim, Error, Result};
use crate::scalar::{Cx, Real};

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Cx<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::new(T::zero(), T::zero()); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    /// Square diagonal matrix.
    pub fn from_diag(diag: &[Cx<T>]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Cx<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Cx<T>>) -> Result<Self> {
        check_dim("ComplexMatrix::from_row_major", rows * cols, data.len())?;
        Ok(Self { rows, cols, data })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[ComplexVector<T>]) -> Result<Self> {
        let rows = columns.first().map_or(0, ComplexVector::len);
        for c in columns {
            check_dim("ComplexMatrix::from_columns", rows, c.len())?;
        }
        Ok(Self::from_fn(rows, columns.len(), |r, c| columns[c][r]))
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Cx<T>] {
        &self.data
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[Cx<T>] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> ComplexVector<T> {
        ComplexVector::from_fn(self.rows, |r| self[(r, c)])
    }

    pub fn set_column(&mut self, c: usize, v: &ComplexVector<T>) -> Result<()> {
        check_dim("ComplexMatrix::set_column", self.rows, v.len())?;
        for r in 0..self.rows {
            self[(r, c)] = v[r];
        }
        Ok(())
    }

    pub fn columns(&self) -> Vec<ComplexVector<T>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    /// `A x`
    pub fn mul_vec(&self, x: &ComplexVector<T>) -> Result<ComplexVector<T>> {
        check_dim("ComplexMatrix::mul_vec", self.cols, x.len())?;
        Ok(self.mul_vec_unchecked(x))
    }

    pub(crate) fn mul_vec_unchecked(&self, x: &ComplexVector<T>) -> ComplexVector<T> {
        let xs = x.as_slice();
        ComplexVector::from_fn(self.rows, |r| {
            self.row(r)
                .iter()
                .zip(xs)
                .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a * b)
        })
    }

    /// `A^H x`
    pub fn adjoint_mul_vec(&self, x: &ComplexVector<T>) -> Result<ComplexVector<T>> {
        check_dim("ComplexMatrix::adjoint_mul_vec", self.rows, x.len())?;
        let mut out = ComplexVector::zeros(self.cols);
        for r in 0..self.rows {
            let xr = x[r];
            for (o, a) in out.as_mut_slice().iter_mut().zip(self.row(r)) {
                *o += a.conj() * xr;
            }
        }
        Ok(out)
    }

    pub fn mul_mat(&self, other: &Self) -> Result<Self> {
        check_dim("ComplexMatrix::mul_mat", self.cols, other.rows)?;
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other[(k, c)];
                    out[(r, c)] += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn scale_real(&self, s: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dim("ComplexMatrix::add rows", self.rows, other.rows)?;
        check_dim("ComplexMatrix::add cols", self.cols, other.cols)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    /// `A += alpha * x y^H`
    pub fn add_outer(&mut self, alpha: Cx<T>, x: &ComplexVector<T>, y: &ComplexVector<T>) -> Result<()> {
        check_dim("ComplexMatrix::add_outer rows", self.rows, x.len())?;
        check_dim("ComplexMatrix::add_outer cols", self.cols, y.len())?;
        for r in 0..self.rows {
            let xr = alpha * x[r];
            let cols = self.cols;
            for (c, slot) in self.data[r * cols..(r + 1) * cols].iter_mut().enumerate() {
                *slot += xr * y[c].conj();
            }
        }
        Ok(())
    }

    /// `diag(d) A`
    pub fn scale_rows(&self, d: &ComplexVector<T>) -> Result<Self> {
        check_dim("ComplexMatrix::scale_rows", self.rows, d.len())?;
        Ok(Self::from_fn(self.rows, self.cols, |r, c| d[r] * self[(r, c)]))
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn trace(&self) -> Cx<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).fold(Complex::new(T::zero(), T::zero()), |a, b| a + b)
    }

    /// `A = A^H` within `rel_tol * ||A||_F`.
    pub fn is_hermitian(&self, rel_tol: T) -> bool {
        if !self.is_square() {
            return false;
        }
        let bound = rel_tol * self.frobenius_norm().max(T::min_positive_value());
        (0..self.rows).all(|r| (r..self.cols).all(|c| (self[(r, c)] - self[(c, r)].conj()).norm() <= bound))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub(crate) fn require_square(&self, context: &'static str) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                context,
                expected: self.rows,
                got: self.cols,
            })
        }
    }
}

impl<T> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Cx<T>;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Cx<T> {
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Cx<T> {
        &mut self.data[r * self.cols + c]
    }
}
