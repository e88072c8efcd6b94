use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ComplexMatrix, ComplexVector};
use crate::error::{check_dim, Error, Result};
use crate::scalar::{Cx, Real};

/// `Re{v^H A v}` for Hermitian `A`.
pub fn quadratic_form<T: Real>(a: &ComplexMatrix<T>, v: &ComplexVector<T>) -> Result<T> {
    a.require_square("quadratic_form")?;
    check_dim("quadratic_form", a.cols(), v.len())?;
    let av = a.mul_vec_unchecked(v);
    Ok(v.dot_unchecked(&av).re)
}

/// Dominant eigenpair of a Hermitian PSD matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair<T> {
    pub value: T,
    pub vector: ComplexVector<T>,
    pub iterations: usize,
    pub residual: T,
}

const POWER_ITERATION_SEEDS: [u64; 2] = [0x5eed_0001, 0x5eed_0002];

/// Power iteration on a Hermitian PSD matrix.
///
/// Stops once `||A u - lambda u|| <= tol * lambda`. The start vector is drawn
/// from a fixed seed; if the first start does not converge within `max_iter`
/// steps the iteration restarts once from a second seed.
pub fn power_iteration<T: Real>(a: &ComplexMatrix<T>, tol: T, max_iter: usize) -> Result<EigenPair<T>> {
    a.require_square("power_iteration")?;
    if !(tol > T::zero()) {
        return Err(Error::InvalidInput(format!("power_iteration tolerance must be positive, got {tol}")));
    }
    let n = a.rows();
    if n == 0 {
        return Err(Error::InvalidInput("power_iteration on an empty matrix".into()));
    }
    let mut best_residual = T::infinity();
    let mut total_iterations = 0;
    for seed in POWER_ITERATION_SEEDS {
        match power_iteration_from(a, random_unit_vector(n, seed), tol, max_iter) {
            Ok(mut pair) => {
                pair.iterations += total_iterations;
                return Ok(pair);
            }
            Err(residual) => {
                best_residual = best_residual.min(residual);
                total_iterations += max_iter;
            }
        }
    }
    Err(Error::NoConvergence {
        iterations: total_iterations,
        residual: best_residual.to_f64_lossy(),
    })
}

fn power_iteration_from<T: Real>(
    a: &ComplexMatrix<T>,
    mut u: ComplexVector<T>,
    tol: T,
    max_iter: usize,
) -> std::result::Result<EigenPair<T>, T> {
    let mut residual = T::infinity();
    for it in 1..=max_iter {
        let y = a.mul_vec_unchecked(&u);
        let lambda = u.dot_unchecked(&y).re;
        residual = y
            .iter()
            .zip(u.iter())
            .map(|(yi, ui)| (yi - ui * lambda).norm_sqr())
            .sum::<T>()
            .sqrt();
        if residual <= tol * lambda.abs() || residual == T::zero() {
            return Ok(EigenPair {
                value: lambda,
                vector: u,
                iterations: it,
                residual,
            });
        }
        match y.normalized() {
            Some(next) => u = next,
            None => return Err(residual),
        }
    }
    Err(residual)
}

fn random_unit_vector<T: Real>(n: usize, seed: u64) -> ComplexVector<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = ComplexVector::from_fn(n, |_| {
        Complex::new(
            T::lit(rng.random::<f64>() - 0.5),
            T::lit(rng.random::<f64>() - 0.5),
        )
    });
    v.normalized().unwrap_or_else(|| ComplexVector::basis(n, 0))
}

/// Generalized Rayleigh quotient `u^H A u / u^H B u` with
/// `A = I + a g g^H` and `B = I + b h h^H`.
pub fn rank_one_quotient<T: Real>(
    a: T,
    g: &ComplexVector<T>,
    b: T,
    h: &ComplexVector<T>,
    u: &ComplexVector<T>,
) -> Result<T> {
    check_dim("rank_one_quotient g", u.len(), g.len())?;
    check_dim("rank_one_quotient h", u.len(), h.len())?;
    let uu = u.norm_sqr();
    let num = uu + a * g.dot_unchecked(u).norm_sqr();
    let den = uu + b * h.dot_unchecked(u).norm_sqr();
    Ok(num / den)
}

/// Principal generalized eigenvector of the pencil `(I + a g g^H, I + b h h^H)`.
///
/// Both matrices act as the identity on the orthogonal complement of
/// `span{g, h}`, so the maximizer is either the principal Ritz vector of the
/// pencil compressed to that span or, when the compressed maximum is below one,
/// any vector orthogonal to it. The compressed problem is at most 2x2 and is
/// solved in closed form.
pub fn rank_one_generalized_eig<T: Real>(
    a: T,
    g: &ComplexVector<T>,
    b: T,
    h: &ComplexVector<T>,
) -> Result<ComplexVector<T>> {
    let n = g.len();
    check_dim("rank_one_generalized_eig", n, h.len())?;
    if n == 0 {
        return Err(Error::InvalidInput("rank_one_generalized_eig in dimension 0".into()));
    }
    if a < T::zero() || b < T::zero() {
        return Err(Error::InvalidInput("rank-one weights must be non-negative".into()));
    }

    let mut basis: Vec<ComplexVector<T>> = Vec::with_capacity(2);
    if a > T::zero() {
        push_orthonormal(&mut basis, g);
    }
    if b > T::zero() {
        push_orthonormal(&mut basis, h);
    }
    if basis.is_empty() {
        return Ok(ComplexVector::basis(n, 0));
    }

    let gamma: Vec<Cx<T>> = basis.iter().map(|q| q.dot_unchecked(g)).collect();
    let eta: Vec<Cx<T>> = basis.iter().map(|q| q.dot_unchecked(h)).collect();
    let entry = |w: T, c: &[Cx<T>], i: usize, j: usize| {
        let delta = if i == j { T::one() } else { T::zero() };
        Complex::new(delta, T::zero()) + c[i] * c[j].conj() * w
    };

    let (lambda, coeffs) = if basis.len() == 1 {
        let ar = entry(a, &gamma, 0, 0).re;
        let br = entry(b, &eta, 0, 0).re;
        (ar / br, vec![Complex::new(T::one(), T::zero())])
    } else {
        let a11 = entry(a, &gamma, 0, 0).re;
        let a22 = entry(a, &gamma, 1, 1).re;
        let a12 = entry(a, &gamma, 0, 1);
        let b11 = entry(b, &eta, 0, 0).re;
        let b22 = entry(b, &eta, 1, 1).re;
        let b12 = entry(b, &eta, 0, 1);
        let two = T::lit(2.0);
        let qa = b11 * b22 - b12.norm_sqr();
        let qb = -(a11 * b22 + a22 * b11 - two * (a12 * b12.conj()).re);
        let qc = a11 * a22 - a12.norm_sqr();
        let disc = (qb * qb - T::lit(4.0) * qa * qc).max(T::zero());
        let lambda = (-qb + disc.sqrt()) / (two * qa);
        // Null vector of A_r - lambda B_r from whichever row is better conditioned.
        let m11 = a11 - lambda * b11;
        let m22 = a22 - lambda * b22;
        let m12 = a12 - b12 * lambda;
        let y1 = [-m12, Complex::new(m11, T::zero())];
        let y2 = [Complex::new(m22, T::zero()), -m12.conj()];
        let n1 = y1[0].norm_sqr() + y1[1].norm_sqr();
        let n2 = y2[0].norm_sqr() + y2[1].norm_sqr();
        let y = if n1 >= n2 { y1 } else { y2 };
        let coeffs = if n1.max(n2) > T::zero() {
            y.to_vec()
        } else {
            vec![Complex::new(T::one(), T::zero()), Complex::new(T::zero(), T::zero())]
        };
        (lambda, coeffs)
    };

    if basis.len() < n && lambda < T::one() {
        return Ok(orthogonal_complement_vector(&basis, n));
    }

    let mut u = ComplexVector::zeros(n);
    for (q, c) in basis.iter().zip(&coeffs) {
        u.axpy(*c, q)?;
    }
    Ok(u.normalized().unwrap_or_else(|| basis[0].clone()))
}

/// Gram-Schmidt step; skips vectors numerically inside the current span.
fn push_orthonormal<T: Real>(basis: &mut Vec<ComplexVector<T>>, v: &ComplexVector<T>) {
    let scale = v.norm();
    if !(scale > T::zero()) {
        return;
    }
    let mut r = v.clone();
    // Two passes keep the basis orthonormal to rounding.
    for _ in 0..2 {
        for q in basis.iter() {
            let c = q.dot_unchecked(&r);
            let _ = r.axpy(-c, q);
        }
    }
    if r.norm() > T::lit(1e3) * T::epsilon() * scale {
        if let Some(q) = r.normalized() {
            basis.push(q);
        }
    }
}

fn orthogonal_complement_vector<T: Real>(basis: &[ComplexVector<T>], n: usize) -> ComplexVector<T> {
    let mut best = ComplexVector::basis(n, 0);
    let mut best_norm = T::neg_infinity();
    for i in 0..n {
        let mut r = ComplexVector::basis(n, i);
        for _ in 0..2 {
            for q in basis {
                let c = q.dot_unchecked(&r);
                let _ = r.axpy(-c, q);
            }
        }
        let nr = r.norm();
        if nr > best_norm {
            best_norm = nr;
            best = r;
        }
        if nr > T::lit(0.5) {
            break;
        }
    }
    best.normalized().unwrap_or_else(|| ComplexVector::basis(n, 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Cx<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn quadratic_form_identity_and_diagonal() {
        let v = ComplexVector::from_real(&[1.0, 1.0, 1.0]);
        assert_eq!(quadratic_form(&ComplexMatrix::identity(3), &v).unwrap(), 3.0);
        let d = ComplexMatrix::from_diag(&[c(2.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(quadratic_form(&d, &ComplexVector::from_real(&[1.0, 0.0])).unwrap(), 2.0);
    }

    #[test]
    fn quadratic_form_rejects_mismatch() {
        let err = quadratic_form(&ComplexMatrix::<f64>::identity(3), &ComplexVector::zeros(2)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
        let rect = ComplexMatrix::<f64>::zeros(2, 3);
        assert!(quadratic_form(&rect, &ComplexVector::zeros(3)).is_err());
    }

    #[test]
    fn power_iteration_diagonal() {
        let d = ComplexMatrix::from_diag(&[c(2.0, 0.0), c(1.0, 0.0)]);
        let pair = power_iteration(&d, 1e-12, 10_000).unwrap();
        assert!((pair.value - 2.0).abs() < 1e-10);
        assert!((pair.vector[0].norm() - 1.0).abs() < 1e-10);
        assert!(pair.vector[1].norm() < 1e-6);
    }

    #[test]
    fn power_iteration_degenerate_identity() {
        let pair = power_iteration(&ComplexMatrix::<f64>::identity(4), 1e-12, 100).unwrap();
        assert!((pair.value - 1.0).abs() < 1e-14);
        assert!((pair.vector.norm() - 1.0).abs() < 1e-14);
        assert_eq!(pair.iterations, 1);
    }

    #[test]
    fn power_iteration_zero_matrix() {
        let pair = power_iteration(&ComplexMatrix::<f64>::zeros(3, 3), 1e-12, 10).unwrap();
        assert_eq!(pair.value, 0.0);
    }

    #[test]
    fn power_iteration_reports_non_convergence() {
        // Equal-magnitude eigenvalues of opposite sign never settle.
        let a = ComplexMatrix::from_diag(&[c(1.0, 0.0), c(-1.0, 0.0)]);
        match power_iteration(&a, 1e-12, 50) {
            Err(Error::NoConvergence { iterations, residual }) => {
                assert_eq!(iterations, 100);
                assert!(residual > 0.0);
            }
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }

    #[test]
    fn power_iteration_rejects_bad_tolerance() {
        assert!(power_iteration(&ComplexMatrix::<f64>::identity(2), 0.0, 10).is_err());
    }

    #[test]
    fn generalized_eig_single_direction() {
        let e1 = ComplexVector::<f64>::basis(3, 0);
        let u = rank_one_generalized_eig(1.0, &e1, 0.0, &ComplexVector::zeros(3)).unwrap();
        assert!((u[0].norm() - 1.0).abs() < 1e-12);
        let q = rank_one_quotient(1.0, &e1, 0.0, &ComplexVector::zeros(3), &u).unwrap();
        assert!((q - 2.0).abs() < 1e-12);
    }

    #[test]
    fn generalized_eig_identity_numerator_avoids_h() {
        let h = ComplexVector::new(vec![c(1.0, 0.5), c(-0.3, 0.2), c(0.0, 1.0)]);
        let u = rank_one_generalized_eig(0.0, &ComplexVector::zeros(3), 2.0, &h).unwrap();
        assert!(h.dot(&u).unwrap().norm() < 1e-12);
        assert!((u.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn generalized_eig_both_zero_is_unit_vector() {
        let z = ComplexVector::<f64>::zeros(4);
        let u = rank_one_generalized_eig(0.0, &z, 0.0, &z).unwrap();
        assert!((u.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn generalized_eig_parallel_directions() {
        let g = ComplexVector::new(vec![c(1.0, 1.0), c(0.5, 0.0)]);
        let h = g.scale(c(0.0, 2.0));
        // Along g the quotient is (1 + a|g|^2)/(1 + 4b|g|^2) < 1, so the optimum is orthogonal.
        let u = rank_one_generalized_eig(1.0, &g, 1.0, &h).unwrap();
        let q = rank_one_quotient(1.0, &g, 1.0, &h, &u).unwrap();
        assert!((q - 1.0).abs() < 1e-12);
    }
}
