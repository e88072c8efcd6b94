//! Weighted sum-rate maximization for a multi-user MISO downlink assisted by a
//! reflecting surface.
//!
//! The beamformer block is handled with closed-form fractional programming:
//! auxiliaries `p` (Lagrangian-dual transform) and `q` (quadratic transform)
//! have closed-form optima, and `W` takes one projected gradient step per
//! cycle. For fixed `(p, q, W)` the phase subproblem is
//! `min_v f4(v) = v^H R v - 2 Re{v^H e}`.
//!
//! Rates are in nats internally.

use num_complex::Complex;

use crate::ao::{u_map, PhaseVector, SolverOptions, TwoBlockProblem, UnitModulusVector};
use crate::error::{check_dim, Error, Result};
use crate::numerics::{power_iteration, ComplexMatrix, ComplexVector};
use crate::scalar::{Cx, Real};

/// Channels, weights, noise and power budget of one WSR scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct WsrInstance<T> {
    /// AP to surface, `M x N_t`.
    pub g: ComplexMatrix<T>,
    /// Direct AP to user channels, each of length `N_t`.
    pub h_d: Vec<ComplexVector<T>>,
    /// Surface to user channels, each of length `M`.
    pub h_r: Vec<ComplexVector<T>>,
    pub omega: Vec<T>,
    pub sigma2: T,
    /// Total transmit power in watts.
    pub power: T,
    /// `H_{r,k} = diag(h_{r,k}^*) G`.
    h_r_mat: Vec<ComplexMatrix<T>>,
}

impl<T: Real> WsrInstance<T> {
    pub fn new(
        g: ComplexMatrix<T>,
        h_d: Vec<ComplexVector<T>>,
        h_r: Vec<ComplexVector<T>>,
        omega: Vec<T>,
        sigma2: T,
        power: T,
    ) -> Result<Self> {
        let k = h_d.len();
        if k == 0 || g.rows() == 0 || g.cols() == 0 {
            return Err(Error::InvalidInput("WSR instance needs K, M, N_t >= 1".into()));
        }
        check_dim("WsrInstance h_r count", k, h_r.len())?;
        check_dim("WsrInstance omega count", k, omega.len())?;
        for (hd, hr) in h_d.iter().zip(&h_r) {
            check_dim("WsrInstance h_d", g.cols(), hd.len())?;
            check_dim("WsrInstance h_r", g.rows(), hr.len())?;
            if !(hd.is_finite() && hr.is_finite()) {
                return Err(Error::InvalidInput("channels must be finite".into()));
            }
        }
        if !g.is_finite() {
            return Err(Error::InvalidInput("channels must be finite".into()));
        }
        if omega.iter().any(|w| !(*w >= T::zero() && w.is_finite())) || !omega.iter().any(|w| *w > T::zero()) {
            return Err(Error::InvalidInput("weights must be non-negative with at least one positive".into()));
        }
        if !(sigma2 > T::zero() && sigma2.is_finite()) {
            return Err(Error::InvalidInput("noise power must be positive".into()));
        }
        if !(power > T::zero() && power.is_finite()) {
            return Err(Error::InvalidInput("transmit power must be positive".into()));
        }
        let h_r_mat = h_r.iter().map(|hr| g.scale_rows(&hr.conj())).collect::<Result<Vec<_>>>()?;
        Ok(Self {
            g,
            h_d,
            h_r,
            omega,
            sigma2,
            power,
            h_r_mat,
        })
    }

    pub fn k(&self) -> usize {
        self.h_d.len()
    }

    pub fn m(&self) -> usize {
        self.g.rows()
    }

    pub fn n_t(&self) -> usize {
        self.g.cols()
    }

    /// Cached `H_{r,k}`.
    pub fn reflected(&self, k: usize) -> &ComplexMatrix<T> {
        &self.h_r_mat[k]
    }

    /// Effective channels `h_k = h_{d,k} + H_{r,k}^H v`, so that the received
    /// amplitude of stream `i` at user `k` is `h_k^H w_i`.
    pub fn effective_channels(&self, v: &UnitModulusVector<T>) -> Result<Vec<ComplexVector<T>>> {
        check_dim("effective_channels", self.m(), v.len())?;
        Ok(self
            .h_d
            .iter()
            .zip(&self.h_r_mat)
            .map(|(hd, hr)| hd.add(&hr.adjoint_mul_vec(v.as_vector()).expect("checked")).expect("checked"))
            .collect())
    }

    fn check_w(&self, w: &ComplexMatrix<T>) -> Result<()> {
        check_dim("beamformer rows", self.n_t(), w.rows())?;
        check_dim("beamformer columns", self.k(), w.cols())
    }
}

/// `gains[k][i] = h_k^H w_i`
fn gains<T: Real>(channels: &[ComplexVector<T>], w: &ComplexMatrix<T>) -> Vec<Vec<Cx<T>>> {
    channels
        .iter()
        .map(|h| w.adjoint_mul_vec(h).expect("dimensions checked").iter().map(|x| x.conj()).collect())
        .collect()
}

/// Interference-plus-noise-plus-signal power `sum_i |h_k^H w_i|^2 + s` per user.
fn received_power<T: Real>(gains: &[Vec<Cx<T>>], sigma2: T) -> Vec<T> {
    gains.iter().map(|row| row.iter().map(|g| g.norm_sqr()).sum::<T>() + sigma2).collect()
}

fn sinrs_from_gains<T: Real>(gains: &[Vec<Cx<T>>], sigma2: T) -> Vec<T> {
    received_power(gains, sigma2)
        .into_iter()
        .enumerate()
        .map(|(k, total)| {
            let signal = gains[k][k].norm_sqr();
            signal / (total - signal)
        })
        .collect()
}

/// SINR of user `k` (zero-based).
pub fn sinr<T: Real>(inst: &WsrInstance<T>, w: &ComplexMatrix<T>, v: &UnitModulusVector<T>, k: usize) -> Result<T> {
    inst.check_w(w)?;
    if k >= inst.k() {
        return Err(Error::InvalidInput(format!("user index {k} out of range for K = {}", inst.k())));
    }
    let channels = inst.effective_channels(v)?;
    let g = gains(&channels[k..=k], w);
    let total = received_power(&g, inst.sigma2)[0];
    let signal = g[0][k].norm_sqr();
    Ok(signal / (total - signal))
}

fn wsr_from_gains<T: Real>(inst: &WsrInstance<T>, gains: &[Vec<Cx<T>>]) -> T {
    sinrs_from_gains(gains, inst.sigma2)
        .into_iter()
        .zip(&inst.omega)
        .map(|(s, w)| *w * s.ln_1p())
        .sum()
}

/// `sum_k omega_k ln(1 + SINR_k)`
pub fn wsr_objective<T: Real>(inst: &WsrInstance<T>, w: &ComplexMatrix<T>, v: &UnitModulusVector<T>) -> Result<T> {
    inst.check_w(w)?;
    let channels = inst.effective_channels(v)?;
    Ok(wsr_from_gains(inst, &gains(&channels, w)))
}

/// Fractional-programming state: auxiliaries and beamformer.
#[derive(Debug, Clone, PartialEq)]
pub struct FpState<T> {
    pub p: Vec<T>,
    pub q: Vec<Cx<T>>,
    /// `N_t x K`, column `k` is `w_k`.
    pub w: ComplexMatrix<T>,
}

impl<T: Real> FpState<T> {
    /// All-zero state; the inner loop replaces a zero beamformer by matched filtering.
    pub fn zeros(inst: &WsrInstance<T>) -> Self {
        Self {
            p: vec![T::zero(); inst.k()],
            q: vec![Complex::new(T::zero(), T::zero()); inst.k()],
            w: ComplexMatrix::zeros(inst.n_t(), inst.k()),
        }
    }

    pub fn total_power(&self) -> T {
        self.w.frobenius_norm().powi(2)
    }
}

/// `p_k = SINR_k`
pub fn update_p<T: Real>(inst: &WsrInstance<T>, w: &ComplexMatrix<T>, v: &UnitModulusVector<T>) -> Result<Vec<T>> {
    inst.check_w(w)?;
    let channels = inst.effective_channels(v)?;
    Ok(sinrs_from_gains(&gains(&channels, w), inst.sigma2))
}

fn alphas<T: Real>(omega: &[T], p: &[T]) -> Vec<T> {
    omega.iter().zip(p).map(|(w, p)| (*w * (T::one() + *p)).sqrt()).collect()
}

fn q_from_gains<T: Real>(inst: &WsrInstance<T>, p: &[T], gains: &[Vec<Cx<T>>]) -> Vec<Cx<T>> {
    let total = received_power(gains, inst.sigma2);
    alphas(&inst.omega, p)
        .into_iter()
        .enumerate()
        .map(|(k, a)| gains[k][k] * (a / total[k]))
        .collect()
}

/// `q_k = sqrt(omega_k (1 + p_k)) h_k^H w_k / (sum_i |h_k^H w_i|^2 + s)`
pub fn update_q<T: Real>(
    inst: &WsrInstance<T>,
    p: &[T],
    w: &ComplexMatrix<T>,
    v: &UnitModulusVector<T>,
) -> Result<Vec<Cx<T>>> {
    inst.check_w(w)?;
    check_dim("update_q p", inst.k(), p.len())?;
    let channels = inst.effective_channels(v)?;
    Ok(q_from_gains(inst, p, &gains(&channels, w)))
}

fn f2_from_gains<T: Real>(inst: &WsrInstance<T>, p: &[T], q: &[Cx<T>], gains: &[Vec<Cx<T>>]) -> T {
    let total = received_power(gains, inst.sigma2);
    let two = T::lit(2.0);
    let a = alphas(&inst.omega, p);
    (0..inst.k())
        .map(|k| {
            let om = inst.omega[k];
            om * p[k].ln_1p() - om * p[k] + two * a[k] * (q[k].conj() * gains[k][k]).re - q[k].norm_sqr() * total[k]
        })
        .sum()
}

/// FP surrogate
///
/// ```text
/// sum_k omega_k ln(1 + p_k) - omega_k p_k + 2 sqrt(omega_k (1 + p_k)) Re{q_k^* h_k^H w_k}
///       - |q_k|^2 (sum_i |h_k^H w_i|^2 + s)
/// ```
pub fn f2_eval<T: Real>(
    inst: &WsrInstance<T>,
    p: &[T],
    q: &[Cx<T>],
    w: &ComplexMatrix<T>,
    v: &UnitModulusVector<T>,
) -> Result<T> {
    inst.check_w(w)?;
    check_dim("f2 p", inst.k(), p.len())?;
    check_dim("f2 q", inst.k(), q.len())?;
    let channels = inst.effective_channels(v)?;
    Ok(f2_from_gains(inst, p, q, &gains(&channels, w)))
}

fn prox_step<T: Real>(
    inst: &WsrInstance<T>,
    channels: &[ComplexVector<T>],
    p: &[T],
    q: &[Cx<T>],
    w_prev: &ComplexMatrix<T>,
) -> ComplexMatrix<T> {
    let n_t = inst.n_t();
    let one = Complex::new(T::one(), T::zero());
    let mut d = ComplexMatrix::zeros(n_t, n_t);
    for (h, qi) in channels.iter().zip(q) {
        d.add_outer(one * qi.norm_sqr(), h, h).expect("channel length is N_t");
    }
    let lipschitz = match power_iteration(&d, T::lit(1e-6), 500) {
        Ok(pair) => pair.value * T::lit(1.01),
        Err(_) => d.trace().re,
    };
    let step = if lipschitz > T::lit(1e-12) {
        T::one() / lipschitz
    } else {
        T::one()
    };

    let a = alphas(&inst.omega, p);
    let mut columns = Vec::with_capacity(inst.k());
    for k in 0..inst.k() {
        let wk = w_prev.column(k);
        let dw = d.mul_vec_unchecked(&wk);
        let next = ComplexVector::from_fn(n_t, |n| wk[n] + (channels[k][n] * q[k] * a[k] - dw[n]) * step);
        columns.push(next);
    }
    let mut w = ComplexMatrix::from_columns(&columns).expect("K columns of length N_t");
    let total: T = w.frobenius_norm().powi(2);
    if total > inst.power {
        w = w.scale_real((inst.power / total).sqrt());
    }
    w
}

/// One projected gradient ascent step on `f2` in `W` with step `1 / L`,
/// `L = 1.01 lambda_max(sum_i |q_i|^2 h_i h_i^H)`, followed by scaling onto
/// the power ball `sum_k ||w_k||^2 <= P`.
pub fn update_w_prox<T: Real>(
    inst: &WsrInstance<T>,
    p: &[T],
    q: &[Cx<T>],
    v: &UnitModulusVector<T>,
    w_prev: &ComplexMatrix<T>,
) -> Result<ComplexMatrix<T>> {
    inst.check_w(w_prev)?;
    check_dim("update_w_prox p", inst.k(), p.len())?;
    check_dim("update_w_prox q", inst.k(), q.len())?;
    let channels = inst.effective_channels(v)?;
    Ok(prox_step(inst, &channels, p, q, w_prev))
}

/// Matched-filter beamformer at full power, equal split across users. Users
/// with a zero channel get a zero column.
pub fn mrt_beamformer<T: Real>(inst: &WsrInstance<T>, v: &UnitModulusVector<T>) -> Result<ComplexMatrix<T>> {
    let channels = inst.effective_channels(v)?;
    Ok(mrt_from_channels(inst, &channels))
}

fn mrt_from_channels<T: Real>(inst: &WsrInstance<T>, channels: &[ComplexVector<T>]) -> ComplexMatrix<T> {
    let share = (inst.power / T::from_usize(inst.k()).expect("K fits")).sqrt();
    let columns: Vec<_> = channels
        .iter()
        .map(|h| h.normalized().map_or_else(|| ComplexVector::zeros(h.len()), |u| u.scale_real(share)))
        .collect();
    ComplexMatrix::from_columns(&columns).expect("K columns of length N_t")
}

/// Result of [`fp_inner_loop`].
#[derive(Debug, Clone, PartialEq)]
pub struct FpInnerOutcome<T> {
    pub state: FpState<T>,
    /// `f2` after each cycle.
    pub f2_trace: Vec<T>,
    pub cycles: usize,
    pub converged: bool,
}

/// Cycles `p -> q -> W` at fixed `v` until the normalized `f2` increment
/// drops below `xi1` or `max_inner` cycles have run. A zero beamformer is
/// first replaced by [`mrt_beamformer`].
pub fn fp_inner_loop<T: Real>(
    inst: &WsrInstance<T>,
    v: &UnitModulusVector<T>,
    state0: &FpState<T>,
    xi1: T,
    max_inner: usize,
) -> Result<FpInnerOutcome<T>> {
    inst.check_w(&state0.w)?;
    check_dim("fp_inner_loop p", inst.k(), state0.p.len())?;
    check_dim("fp_inner_loop q", inst.k(), state0.q.len())?;
    if max_inner == 0 {
        return Err(Error::InvalidInput("max_inner must be at least 1".into()));
    }
    let channels = inst.effective_channels(v)?;
    let mut state = state0.clone();
    if state.total_power() == T::zero() {
        state.w = mrt_from_channels(inst, &channels);
    }
    let mut f_prev = f2_from_gains(inst, &state.p, &state.q, &gains(&channels, &state.w));
    let mut f2_trace = Vec::new();
    let mut converged = false;
    for cycle in 0..max_inner {
        let g = gains(&channels, &state.w);
        state.p = sinrs_from_gains(&g, inst.sigma2);
        state.q = q_from_gains(inst, &state.p, &g);
        state.w = prox_step(inst, &channels, &state.p, &state.q, &state.w);
        let f = f2_from_gains(inst, &state.p, &state.q, &gains(&channels, &state.w));
        if !f.is_finite() {
            return Err(Error::NonFinite {
                what: "f2",
                iteration: cycle,
            });
        }
        f2_trace.push(f);
        let done = (f - f_prev).abs() / f_prev.abs().max(T::lit(1e-12)) < xi1;
        f_prev = f;
        if done {
            converged = true;
            break;
        }
    }
    Ok(FpInnerOutcome {
        cycles: f2_trace.len(),
        state,
        f2_trace,
        converged,
    })
}

/// Phase-subproblem data `R`, `e` and the vectors they are built from.
#[derive(Debug, Clone, PartialEq)]
pub struct WsrQuadratics<T> {
    pub r: ComplexMatrix<T>,
    pub e: ComplexVector<T>,
    /// `a_bar[i][k] = H_{r,k} w_i`
    pub a_bar: Vec<Vec<ComplexVector<T>>>,
    /// `b_bar[i][k] = h_{d,k}^H w_i`
    pub b_bar: Vec<Vec<Cx<T>>>,
}

impl<T: Real> WsrQuadratics<T> {
    /// Quadratics from given `R` and `e` without the underlying vectors.
    pub fn from_parts(r: ComplexMatrix<T>, e: ComplexVector<T>) -> Result<Self> {
        r.require_square("WsrQuadratics R")?;
        check_dim("WsrQuadratics e", r.rows(), e.len())?;
        Ok(Self {
            r,
            e,
            a_bar: Vec::new(),
            b_bar: Vec::new(),
        })
    }

    pub fn m(&self) -> usize {
        self.e.len()
    }
}

/// ```text
/// R = sum_k |q_k|^2 sum_i a_ik a_ik^H
/// e = sum_k (sqrt(omega_k (1 + p_k)) q_k^* a_kk - |q_k|^2 sum_i b_ik^* a_ik)
/// ```
pub fn build_r_e<T: Real>(inst: &WsrInstance<T>, p: &[T], q: &[Cx<T>], w: &ComplexMatrix<T>) -> Result<WsrQuadratics<T>> {
    inst.check_w(w)?;
    check_dim("build_r_e p", inst.k(), p.len())?;
    check_dim("build_r_e q", inst.k(), q.len())?;
    let k_users = inst.k();
    let m = inst.m();
    let columns = w.columns();
    let a_bar: Vec<Vec<ComplexVector<T>>> = columns
        .iter()
        .map(|wi| inst.h_r_mat.iter().map(|hr| hr.mul_vec_unchecked(wi)).collect())
        .collect();
    let b_bar: Vec<Vec<Cx<T>>> = columns
        .iter()
        .map(|wi| inst.h_d.iter().map(|hd| hd.dot_unchecked(wi)).collect())
        .collect();

    let a = alphas(&inst.omega, p);
    let mut r = ComplexMatrix::zeros(m, m);
    let mut e = ComplexVector::zeros(m);
    for k in 0..k_users {
        let qk2 = q[k].norm_sqr();
        e.axpy(q[k].conj() * a[k], &a_bar[k][k]).expect("length M");
        if qk2 == T::zero() {
            continue;
        }
        let weight = Complex::new(qk2, T::zero());
        for i in 0..k_users {
            r.add_outer(weight, &a_bar[i][k], &a_bar[i][k]).expect("length M");
            e.axpy(-(b_bar[i][k].conj() * qk2), &a_bar[i][k]).expect("length M");
        }
    }
    Ok(WsrQuadratics { r, e, a_bar, b_bar })
}

/// `f4(v) = v^H R v - 2 Re{v^H e}`
pub fn f4_eval<T: Real>(q: &WsrQuadratics<T>, v: &UnitModulusVector<T>) -> T {
    let vv = v.as_vector();
    let rv = q.r.mul_vec_unchecked(vv);
    vv.dot_unchecked(&rv).re - T::lit(2.0) * vv.dot_unchecked(&q.e).re
}

/// Wirtinger gradient `2 (R v - e)` of `f4`.
pub fn f4_wirtinger_gradient<T: Real>(q: &WsrQuadratics<T>, v: &UnitModulusVector<T>) -> ComplexVector<T> {
    let rv = q.r.mul_vec_unchecked(v.as_vector());
    let two = T::lit(2.0);
    ComplexVector::from_fn(v.len(), |k| (rv[k] - q.e[k]) * two)
}

/// `grad_theta f4 = 2 Re{(R v - e)^* . (-j v)}`
pub fn gradient_theta_f4<T: Real>(q: &WsrQuadratics<T>, theta: &PhaseVector<T>) -> Vec<T> {
    let v = u_map(theta);
    let g = f4_wirtinger_gradient(q, &v);
    let j = Complex::new(T::zero(), T::one());
    (0..v.len()).map(|k| (g[k].conj() * (-j * v.as_slice()[k])).re).collect()
}

/// Minimizes `f4` over entry `m` with the others fixed:
/// `v_m = c_m / |c_m|`, `c_m = e_m - sum_{n != m} R_mn v_n`. Keeps `v_m` when `c_m = 0`.
pub fn bcd_update_element_f4<T: Real>(q: &WsrQuadratics<T>, v: &mut UnitModulusVector<T>, m: usize) {
    let row = q.r.row(m);
    let vv = v.as_slice();
    let mut c = q.e[m];
    for (n, (r_mn, v_n)) in row.iter().zip(vv).enumerate() {
        if n != m {
            c -= *r_mn * *v_n;
        }
    }
    if c.norm_sqr() > T::zero() {
        v.set(m, c);
    }
}

/// One in-order sweep of [`bcd_update_element_f4`].
pub fn elementwise_bcd_v<T: Real>(q: &WsrQuadratics<T>, v: &UnitModulusVector<T>) -> UnitModulusVector<T> {
    let mut out = v.clone();
    for m in 0..out.len() {
        bcd_update_element_f4(q, &mut out, m);
    }
    out
}

/// WSR maximization registered as a minimization of `-WSR`.
///
/// The `Q` block is the FP state produced by [`fp_inner_loop`]; the phase
/// gradient is that of `f4` with `R`, `e` built from `p`, `q` re-optimized at
/// the current phases, which equals the gradient of `-WSR` in `theta`.
#[derive(Debug, Clone, Copy)]
pub struct WsrProblem<'a, T> {
    pub instance: &'a WsrInstance<T>,
    pub xi1: T,
    pub max_inner: usize,
    /// Start each inner loop from the previous outer iteration's state.
    pub warm_start: bool,
}

impl<'a, T: Real> WsrProblem<'a, T> {
    pub fn new(instance: &'a WsrInstance<T>, opts: &SolverOptions<T>) -> Self {
        Self {
            instance,
            xi1: opts.xi1,
            max_inner: opts.max_inner,
            warm_start: true,
        }
    }

    pub fn cold_start(mut self) -> Self {
        self.warm_start = false;
        self
    }

    /// `R`, `e` at `(W, v)` with `p`, `q` at their closed-form optima.
    pub fn phase_quadratics(&self, w: &ComplexMatrix<T>, v: &UnitModulusVector<T>) -> Result<WsrQuadratics<T>> {
        let p = update_p(self.instance, w, v)?;
        let q = update_q(self.instance, &p, w, v)?;
        build_r_e(self.instance, &p, &q, w)
    }
}

impl<T: Real> TwoBlockProblem<T> for WsrProblem<'_, T> {
    type Block = FpState<T>;

    fn dim(&self) -> usize {
        self.instance.m()
    }

    fn update_q(&self, theta: &PhaseVector<T>, previous: Option<&Self::Block>) -> Result<Self::Block> {
        let start = match previous {
            Some(prev) if self.warm_start => prev.clone(),
            _ => FpState::zeros(self.instance),
        };
        Ok(fp_inner_loop(self.instance, &u_map(theta), &start, self.xi1, self.max_inner)?.state)
    }

    fn evaluate(&self, q: &Self::Block, theta: &PhaseVector<T>) -> T {
        wsr_objective(self.instance, &q.w, &u_map(theta)).map_or_else(|_| T::nan(), |r| -r)
    }

    fn gradient_theta(&self, q: &Self::Block, theta: &PhaseVector<T>) -> Vec<T> {
        match self.phase_quadratics(&q.w, &u_map(theta)) {
            Ok(quad) => gradient_theta_f4(&quad, theta),
            Err(_) => vec![T::nan(); theta.len()],
        }
    }

    fn outer_tolerance(&self, opts: &SolverOptions<T>) -> T {
        opts.xi2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Cx<f64> {
        Complex::new(re, im)
    }

    fn crandn(rng: &mut ChaCha8Rng) -> Cx<f64> {
        c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    }

    fn random_instance(m: usize, n_t: usize, k: usize, seed: u64) -> WsrInstance<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = ComplexMatrix::from_fn(m, n_t, |_, _| crandn(&mut rng));
        let h_d = (0..k).map(|_| ComplexVector::from_fn(n_t, |_| crandn(&mut rng) * 0.3)).collect();
        let h_r = (0..k).map(|_| ComplexVector::from_fn(m, |_| crandn(&mut rng))).collect();
        let omega = (0..k).map(|i| 1.0 + 0.25 * i as f64).collect();
        WsrInstance::new(g, h_d, h_r, omega, 0.05, 1.0).unwrap()
    }

    fn random_w(inst: &WsrInstance<f64>, seed: u64) -> ComplexMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = ComplexMatrix::from_fn(inst.n_t(), inst.k(), |_, _| crandn(&mut rng));
        let s = (inst.power / w.frobenius_norm().powi(2)).sqrt();
        w.scale_real(s)
    }

    fn random_v(m: usize, seed: u64) -> UnitModulusVector<f64> {
        u_map(&crate::ao::random_phases(m, seed))
    }

    #[test]
    fn rejects_invalid_instances() {
        let g = ComplexMatrix::<f64>::zeros(2, 2);
        let hd = vec![ComplexVector::zeros(2)];
        let hr = vec![ComplexVector::zeros(2)];
        assert!(WsrInstance::new(g.clone(), hd.clone(), hr.clone(), vec![0.0], 1.0, 1.0).is_err());
        assert!(WsrInstance::new(g.clone(), hd.clone(), hr.clone(), vec![1.0], 0.0, 1.0).is_err());
        assert!(WsrInstance::new(g.clone(), hd.clone(), vec![ComplexVector::zeros(3)], vec![1.0], 1.0, 1.0).is_err());
        assert!(WsrInstance::new(g, hd, hr, vec![1.0], 1.0, 1.0).is_ok());
    }

    fn single_path(power: f64) -> WsrInstance<f64> {
        let g = ComplexMatrix::zeros(1, 2);
        let hd = vec![ComplexVector::basis(2, 0)];
        let hr = vec![ComplexVector::zeros(1)];
        WsrInstance::new(g, hd, hr, vec![1.0], 0.5, power).unwrap()
    }

    #[test]
    fn single_path_sinr() {
        let inst = single_path(2.0);
        let v = UnitModulusVector::ones(1);
        let w = ComplexMatrix::from_row_major(2, 1, vec![c(2f64.sqrt(), 0.0), c(0.0, 0.0)]).unwrap();
        assert!((sinr(&inst, &w, &v, 0).unwrap() - 4.0).abs() < 1e-12);
        assert_eq!(update_p(&inst, &w, &v).unwrap(), vec![sinr(&inst, &w, &v, 0).unwrap()]);
        let zero = ComplexMatrix::zeros(2, 1);
        assert_eq!(sinr(&inst, &zero, &v, 0).unwrap(), 0.0);
        assert_eq!(wsr_objective(&inst, &zero, &v).unwrap(), 0.0);
        assert!(sinr(&inst, &w, &v, 1).is_err());
    }

    #[test]
    fn log_identity() {
        let inst = single_path(1.0);
        let v = UnitModulusVector::ones(1);
        // SINR = |w|^2 / 0.5 = e - 1
        let amp = ((std::f64::consts::E - 1.0) * 0.5).sqrt();
        let w = ComplexMatrix::from_row_major(2, 1, vec![c(amp, 0.0), c(0.0, 0.0)]).unwrap();
        assert!((wsr_objective(&inst, &w, &v).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn q_closed_form_scalar() {
        let inst = single_path(2.0);
        let v = UnitModulusVector::ones(1);
        let w = ComplexMatrix::from_row_major(2, 1, vec![c(2f64.sqrt(), 0.0), c(0.0, 0.0)]).unwrap();
        let p = update_p(&inst, &w, &v).unwrap();
        let q = update_q(&inst, &p, &w, &v).unwrap();
        let expected = (1.0 + p[0]).sqrt() * 2f64.sqrt() / (2.0 + 0.5);
        assert!((q[0] - c(expected, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn sinr_matches_explicit_channels() {
        let inst = random_instance(5, 3, 3, 11);
        let w = random_w(&inst, 12);
        let v = random_v(5, 13);
        for k in 0..3 {
            // h_k^H = h_d^H + v^H diag(h_r^*) G
            let mut row = vec![c(0.0, 0.0); 3];
            for (n, r) in row.iter_mut().enumerate() {
                *r = inst.h_d[k][n].conj();
                for m in 0..5 {
                    *r += v.as_slice()[m].conj() * inst.h_r[k][m].conj() * inst.g[(m, n)];
                }
            }
            let amp = |i: usize| (0..3).map(|n| row[n] * w[(n, i)]).sum::<Cx<f64>>().norm_sqr();
            let interference: f64 = (0..3).filter(|i| *i != k).map(amp).sum();
            let expected = amp(k) / (interference + inst.sigma2);
            assert!((sinr(&inst, &w, &v, k).unwrap() - expected).abs() < 1e-12 * expected.max(1.0));
        }
    }

    #[test]
    fn fp_tightness_and_q_stationarity() {
        let inst = random_instance(4, 3, 3, 21);
        let v = random_v(4, 22);
        let w = random_w(&inst, 23);
        let p = update_p(&inst, &w, &v).unwrap();
        let q = update_q(&inst, &p, &w, &v).unwrap();
        let f2 = f2_eval(&inst, &p, &q, &w, &v).unwrap();
        let wsr = wsr_objective(&inst, &w, &v).unwrap();
        assert!((f2 - wsr).abs() <= 1e-9 * wsr.abs());
        for k in 0..3 {
            for d in [c(1e-5, 0.0), c(-1e-5, 0.0), c(0.0, 1e-5), c(0.0, -1e-5)] {
                let mut qp = q.clone();
                qp[k] += d;
                assert!(f2_eval(&inst, &p, &qp, &w, &v).unwrap() <= f2 + 1e-14);
            }
        }
        assert_eq!(f2_eval(&inst, &[0.0; 3], &[c(0.0, 0.0); 3], &w, &v).unwrap(), 0.0);
    }

    #[test]
    fn prox_step_respects_power_and_ascends() {
        let inst = random_instance(4, 3, 3, 31);
        let v = random_v(4, 32);
        let w = random_w(&inst, 33).scale_real(0.5);
        let p = update_p(&inst, &w, &v).unwrap();
        let q = update_q(&inst, &p, &w, &v).unwrap();
        let before = f2_eval(&inst, &p, &q, &w, &v).unwrap();
        let w2 = update_w_prox(&inst, &p, &q, &v, &w).unwrap();
        assert!(w2.frobenius_norm().powi(2) <= inst.power * (1.0 + 1e-12));
        assert!(f2_eval(&inst, &p, &q, &w2, &v).unwrap() >= before - 1e-12);
        let zero_q = vec![c(0.0, 0.0); 3];
        assert_eq!(update_w_prox(&inst, &p, &zero_q, &v, &w).unwrap(), w);
    }

    #[test]
    fn scalar_fixed_point_uses_full_power() {
        let g = ComplexMatrix::zeros(1, 1);
        let hd = vec![ComplexVector::new(vec![c(1.0, 0.0)])];
        let hr = vec![ComplexVector::zeros(1)];
        let inst = WsrInstance::new(g, hd, hr, vec![1.0], 1.0, 1.0).unwrap();
        let v = UnitModulusVector::ones(1);
        let mut state = FpState::zeros(&inst);
        state.w = ComplexMatrix::from_row_major(1, 1, vec![c(0.1, 0.0)]).unwrap();
        let out = fp_inner_loop(&inst, &v, &state, 1e-14, 10_000).unwrap();
        assert!((out.state.total_power() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn inner_loop_is_monotone_and_escapes_zero() {
        let inst = random_instance(6, 4, 4, 41);
        let v = random_v(6, 42);
        let out = fp_inner_loop(&inst, &v, &FpState::zeros(&inst), 1e-8, 500).unwrap();
        assert!(out.f2_trace.windows(2).all(|w| w[1] >= w[0] - 1e-10));
        assert!(out.state.total_power() <= inst.power * (1.0 + 1e-10));
        assert!(wsr_objective(&inst, &out.state.w, &v).unwrap() > 0.0);
        let again = fp_inner_loop(&inst, &v, &out.state, 1e-5, 500).unwrap();
        assert_eq!(again.cycles, 1);
    }

    #[test]
    fn r_e_reproduce_f2_dependence_on_v() {
        let inst = random_instance(5, 3, 3, 51);
        let v0 = random_v(5, 52);
        let w = random_w(&inst, 53);
        let p = update_p(&inst, &w, &v0).unwrap();
        let q = update_q(&inst, &p, &w, &v0).unwrap();
        let quad = build_r_e(&inst, &p, &q, &w).unwrap();
        assert!(quad.r.is_hermitian(1e-12));
        let reference = f2_eval(&inst, &p, &q, &w, &v0).unwrap() + f4_eval(&quad, &v0);
        for s in 0..50 {
            let v = random_v(5, 100 + s);
            let total = f2_eval(&inst, &p, &q, &w, &v).unwrap() + f4_eval(&quad, &v);
            assert!((total - reference).abs() <= 1e-9 * reference.abs().max(1.0));
        }
        let zero = build_r_e(&inst, &p, &[c(0.0, 0.0); 3], &w).unwrap();
        assert_eq!(zero.r.frobenius_norm(), 0.0);
        assert_eq!(zero.e.norm(), 0.0);
    }

    #[test]
    fn f4_small_cases() {
        let quad = WsrQuadratics::from_parts(ComplexMatrix::identity(3), ComplexVector::zeros(3)).unwrap();
        let v = random_v(3, 1);
        assert!((f4_eval(&quad, &v) - 3.0).abs() < 1e-14);
        assert!(gradient_theta_f4(&quad, &v.angles()).iter().all(|g| g.abs() < 1e-14));

        let one = WsrQuadratics::from_parts(ComplexMatrix::identity(1), ComplexVector::new(vec![c(1.0, 0.0)])).unwrap();
        let v1 = UnitModulusVector::ones(1);
        assert!((f4_eval(&one, &v1) + 1.0).abs() < 1e-15);
        assert!(gradient_theta_f4(&one, &PhaseVector::zeros(1))[0].abs() < 1e-15);
    }

    #[test]
    fn f4_matches_naive_loop() {
        let inst = random_instance(4, 2, 2, 61);
        let w = random_w(&inst, 62);
        let v = random_v(4, 63);
        let p = update_p(&inst, &w, &v).unwrap();
        let q = update_q(&inst, &p, &w, &v).unwrap();
        let quad = build_r_e(&inst, &p, &q, &w).unwrap();
        let vv = v.as_slice();
        let mut naive = c(0.0, 0.0);
        for i in 0..4 {
            for j in 0..4 {
                naive += vv[i].conj() * quad.r[(i, j)] * vv[j];
            }
            naive -= vv[i].conj() * quad.e[i] * 2.0;
        }
        // Re{v^H e} doubling: naive holds v^H R v - 2 v^H e; its real part is f4.
        assert!((naive.re - f4_eval(&quad, &v)).abs() < 1e-12);
    }

    #[test]
    fn bcd_with_identity_r_aligns_with_e() {
        let e = ComplexVector::new(vec![c(1.0, 1.0), c(-2.0, 0.0), c(0.0, 0.5)]);
        let quad = WsrQuadratics::from_parts(ComplexMatrix::identity(3), e.clone()).unwrap();
        let out = elementwise_bcd_v(&quad, &UnitModulusVector::ones(3));
        for k in 0..3 {
            assert!((out.as_slice()[k] - e[k] / e[k].norm()).norm() < 1e-14);
        }
    }

    #[test]
    fn bcd_sub_steps_match_grid() {
        let inst = random_instance(4, 3, 3, 71);
        let w = random_w(&inst, 72);
        let v0 = random_v(4, 73);
        let p = update_p(&inst, &w, &v0).unwrap();
        let q = update_q(&inst, &p, &w, &v0).unwrap();
        let quad = build_r_e(&inst, &p, &q, &w).unwrap();
        let mut v = v0.clone();
        for m in 0..4 {
            let before = f4_eval(&quad, &v);
            let grid_best = (0..3600)
                .map(|i| {
                    let mut probe = v.clone();
                    probe.set(m, crate::cis(i as f64 * std::f64::consts::TAU / 3600.0));
                    f4_eval(&quad, &probe)
                })
                .fold(f64::INFINITY, f64::min);
            bcd_update_element_f4(&quad, &mut v, m);
            let after = f4_eval(&quad, &v);
            assert!(after <= before + 1e-12);
            assert!(after <= grid_best + 1e-8);
        }
    }

    #[test]
    fn zero_channels_give_zero_rate() {
        let g = ComplexMatrix::<f64>::zeros(3, 2);
        let inst = WsrInstance::new(
            g,
            vec![ComplexVector::zeros(2); 2],
            vec![ComplexVector::zeros(3); 2],
            vec![1.0, 1.0],
            1.0,
            1.0,
        )
        .unwrap();
        let opts = SolverOptions::wsr();
        let problem = WsrProblem::new(&inst, &opts);
        let sol = crate::ao::solve(&problem, PhaseVector::zeros(3), &opts, crate::ao::StepRule::Tailored).unwrap();
        assert_eq!(sol.objective(), 0.0);
        assert!(sol.iterations() <= 2);
    }
}
