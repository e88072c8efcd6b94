#![allow(dead_code)]

use aogd::numerics::{ComplexMatrix, ComplexVector};
use aogd::secrecy::SecrecyInstance;
use aogd::wsr::WsrInstance;
use aogd::Cx;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn crandn(rng: &mut ChaCha8Rng) -> Cx<f64> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn random_vector(n: usize, rng: &mut ChaCha8Rng) -> ComplexVector<f64> {
    ComplexVector::from_fn(n, |_| crandn(rng))
}

pub fn random_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix<f64> {
    ComplexMatrix::from_fn(rows, cols, |_, _| crandn(rng))
}

/// Unit-scale secrecy instance with a noticeably stronger legitimate link.
pub fn secrecy_instance(m: usize, n_t: usize, seed: u64) -> SecrecyInstance<f64> {
    let mut r = rng(seed);
    let g = random_matrix(m, n_t, &mut r);
    let h_l = random_vector(m, &mut r).scale_real(1.5);
    let h_e = random_vector(m, &mut r).scale_real(0.7);
    SecrecyInstance::new(g, h_l, h_e, 0.5, 0.5, 1.0).unwrap()
}

pub fn wsr_instance(m: usize, n_t: usize, k: usize, seed: u64) -> WsrInstance<f64> {
    let mut r = rng(seed);
    let g = random_matrix(m, n_t, &mut r);
    let h_d = (0..k).map(|_| random_vector(n_t, &mut r).scale_real(0.5)).collect();
    let h_r = (0..k).map(|_| random_vector(m, &mut r).scale_real(0.3)).collect();
    let omega = (0..k).map(|_| 0.5 + r.random::<f64>()).collect();
    WsrInstance::new(g, h_d, h_r, omega, 0.1, 2.0).unwrap()
}

/// Random beamformer matrix scaled to use `fraction` of the power budget.
pub fn random_w(inst: &WsrInstance<f64>, fraction: f64, rng: &mut ChaCha8Rng) -> ComplexMatrix<f64> {
    let w = random_matrix(inst.n_t(), inst.k(), rng);
    let s = (fraction * inst.power / w.frobenius_norm().powi(2)).sqrt();
    w.scale_real(s)
}

/// Central difference of `f` along each coordinate.
pub fn central_differences(theta: &[f64], h: f64, mut f: impl FnMut(&[f64]) -> f64) -> Vec<f64> {
    let mut x = theta.to_vec();
    (0..theta.len())
        .map(|k| {
            x[k] = theta[k] + h;
            let up = f(&x);
            x[k] = theta[k] - h;
            let down = f(&x);
            x[k] = theta[k];
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// `||a - b||_inf / max(||b||_inf, floor)`
pub fn relative_error(a: &[f64], b: &[f64], floor: f64) -> f64 {
    let diff = a.iter().zip(b).fold(0.0f64, |acc, (x, y)| acc.max((x - y).abs()));
    let scale = b.iter().fold(0.0f64, |acc, y| acc.max(y.abs())).max(floor);
    diff / scale
}
