//! Secrecy-rate maximization with one legitimate receiver and one eavesdropper.
//!
//! For a transmit beamformer `w` (`||w||^2 <= P`) and reflection `Phi`, the
//! objective is
//!
//! ```text
//! f(w, Phi) = (1 + |h_l^H Phi G w|^2 / s_l) / (1 + |h_e^H Phi G w|^2 / s_e)
//! ```
//!
//! and the secrecy rate is `max(log2 f, 0)`. With `w` fixed, `f` becomes the
//! ratio `v^H Y_l v / v^H Y_e v` with `Y_i = I/M + a_i a_i^H` and
//! `a_i = diag(h_i^*) G w / sigma_i`. The quadratics are stored in that
//! factored form; [`SecrecyQuadratics::y_l`] and [`SecrecyQuadratics::y_e`]
//! materialize the dense matrices.

use num_complex::Complex;

use crate::ao::{u_map, PhaseVector, TwoBlockProblem, UnitModulusVector};
use crate::error::{check_dim, Error, Result};
use crate::numerics::{rank_one_generalized_eig, ComplexMatrix, ComplexVector};
use crate::scalar::{Cx, Real};

/// Channels, noise variances and power budget of one secrecy scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct SecrecyInstance<T> {
    /// Transmitter to surface, `M x N_t`.
    pub g: ComplexMatrix<T>,
    /// Surface to legitimate receiver, length `M`.
    pub h_l: ComplexVector<T>,
    /// Surface to eavesdropper, length `M`.
    pub h_e: ComplexVector<T>,
    pub sigma2_l: T,
    pub sigma2_e: T,
    /// Transmit power in watts.
    pub power: T,
}

impl<T: Real> SecrecyInstance<T> {
    pub fn new(
        g: ComplexMatrix<T>,
        h_l: ComplexVector<T>,
        h_e: ComplexVector<T>,
        sigma2_l: T,
        sigma2_e: T,
        power: T,
    ) -> Result<Self> {
        check_dim("SecrecyInstance h_l", g.rows(), h_l.len())?;
        check_dim("SecrecyInstance h_e", g.rows(), h_e.len())?;
        if g.rows() == 0 || g.cols() == 0 {
            return Err(Error::InvalidInput("secrecy instance needs M >= 1 and N_t >= 1".into()));
        }
        let positive = |x: T| x > T::zero() && x.is_finite();
        if !positive(sigma2_l) || !positive(sigma2_e) {
            return Err(Error::InvalidInput("noise variances must be positive and finite".into()));
        }
        if !(power >= T::zero() && power.is_finite()) {
            return Err(Error::InvalidInput(format!("transmit power must be non-negative, got {power}")));
        }
        if !(g.is_finite() && h_l.is_finite() && h_e.is_finite()) {
            return Err(Error::InvalidInput("channels must be finite".into()));
        }
        Ok(Self {
            g,
            h_l,
            h_e,
            sigma2_l,
            sigma2_e,
            power,
        })
    }

    /// Number of surface elements `M`.
    pub fn m(&self) -> usize {
        self.g.rows()
    }

    /// Number of transmit antennas `N_t`.
    pub fn n_t(&self) -> usize {
        self.g.cols()
    }

    /// `G^H Phi^H h_i` for both receivers; `Phi^H = diag(v)`.
    pub fn cascaded_channels(&self, v: &UnitModulusVector<T>) -> Result<(ComplexVector<T>, ComplexVector<T>)> {
        check_dim("cascaded_channels", self.m(), v.len())?;
        let g_l = self.g.adjoint_mul_vec(&v.as_vector().hadamard(&self.h_l)?)?;
        let g_e = self.g.adjoint_mul_vec(&v.as_vector().hadamard(&self.h_e)?)?;
        Ok((g_l, g_e))
    }
}

/// Direct evaluation of `f(w, Phi)` from the channels.
pub fn raw_objective<T: Real>(inst: &SecrecyInstance<T>, w: &ComplexVector<T>, v: &UnitModulusVector<T>) -> Result<T> {
    check_dim("raw_objective w", inst.n_t(), w.len())?;
    check_dim("raw_objective v", inst.m(), v.len())?;
    let phi_g_w = v.phi_diag().hadamard(&inst.g.mul_vec(w)?)?;
    let legit = inst.h_l.dot_unchecked(&phi_g_w).norm_sqr() / inst.sigma2_l;
    let eaves = inst.h_e.dot_unchecked(&phi_g_w).norm_sqr() / inst.sigma2_e;
    Ok((T::one() + legit) / (T::one() + eaves))
}

/// Beamformer maximizing `f(., Phi)` under `||w||^2 <= P`, at full power.
///
/// The optimum is `sqrt(P) u` with `u` the principal generalized eigenvector of
/// `(I + P/s_l g_l g_l^H, I + P/s_e g_e g_e^H)`, `g_i = G^H Phi^H h_i`.
pub fn optimal_beamformer<T: Real>(inst: &SecrecyInstance<T>, v: &UnitModulusVector<T>) -> Result<ComplexVector<T>> {
    if inst.power == T::zero() {
        return Ok(ComplexVector::zeros(inst.n_t()));
    }
    let (g_l, g_e) = inst.cascaded_channels(v)?;
    let u = rank_one_generalized_eig(inst.power / inst.sigma2_l, &g_l, inst.power / inst.sigma2_e, &g_e)?;
    Ok(u.scale_real(inst.power.sqrt()))
}

/// Factored `Y_i = (1/M) I + a_i a_i^H`.
#[derive(Debug, Clone, PartialEq)]
pub struct SecrecyQuadratics<T> {
    m: usize,
    a_l: ComplexVector<T>,
    a_e: ComplexVector<T>,
}

impl<T: Real> SecrecyQuadratics<T> {
    /// Builds the quadratics from their rank-one factors.
    pub fn from_factors(a_l: ComplexVector<T>, a_e: ComplexVector<T>) -> Result<Self> {
        check_dim("SecrecyQuadratics factors", a_l.len(), a_e.len())?;
        Ok(Self { m: a_l.len(), a_l, a_e })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn a_l(&self) -> &ComplexVector<T> {
        &self.a_l
    }

    pub fn a_e(&self) -> &ComplexVector<T> {
        &self.a_e
    }

    fn dense(&self, a: &ComplexVector<T>) -> ComplexMatrix<T> {
        let mut y = ComplexMatrix::identity(self.m).scale_real(T::one() / self.inv_m_denominator());
        y.add_outer(Complex::new(T::one(), T::zero()), a, a)
            .expect("factor length equals M");
        y
    }

    fn inv_m_denominator(&self) -> T {
        T::from_usize(self.m).expect("M fits the scalar type")
    }

    /// Dense `Y_l`.
    pub fn y_l(&self) -> ComplexMatrix<T> {
        self.dense(&self.a_l)
    }

    /// Dense `Y_e`.
    pub fn y_e(&self) -> ComplexMatrix<T> {
        self.dense(&self.a_e)
    }

    fn form(&self, a: &ComplexVector<T>, v: &ComplexVector<T>) -> T {
        v.norm_sqr() / self.inv_m_denominator() + a.dot_unchecked(v).norm_sqr()
    }

    fn apply(&self, a: &ComplexVector<T>, v: &ComplexVector<T>) -> ComplexVector<T> {
        let inv_m = T::one() / self.inv_m_denominator();
        let c = a.dot_unchecked(v);
        ComplexVector::from_fn(v.len(), |k| v[k] * inv_m + a[k] * c)
    }

    /// `v^H Y_l v`
    pub fn numerator(&self, v: &UnitModulusVector<T>) -> T {
        self.form(&self.a_l, v.as_vector())
    }

    /// `v^H Y_e v`
    pub fn denominator(&self, v: &UnitModulusVector<T>) -> T {
        self.form(&self.a_e, v.as_vector())
    }
}

/// Quadratics `Y_l`, `Y_e` for a fixed beamformer.
pub fn build_quadratics<T: Real>(inst: &SecrecyInstance<T>, w: &ComplexVector<T>) -> Result<SecrecyQuadratics<T>> {
    check_dim("build_quadratics w", inst.n_t(), w.len())?;
    let gw = inst.g.mul_vec(w)?;
    let factor = |h: &ComplexVector<T>, sigma2: T| {
        let s = T::one() / sigma2.sqrt();
        ComplexVector::from_fn(gw.len(), |k| h[k].conj() * gw[k] * s)
    };
    Ok(SecrecyQuadratics {
        m: inst.m(),
        a_l: factor(&inst.h_l, inst.sigma2_l),
        a_e: factor(&inst.h_e, inst.sigma2_e),
    })
}

/// `f(v) = v^H Y_l v / v^H Y_e v`
pub fn ratio_objective<T: Real>(q: &SecrecyQuadratics<T>, v: &UnitModulusVector<T>) -> T {
    q.numerator(v) / q.denominator(v)
}

/// Exact gradient of `ratio_objective(q, U(theta))` with respect to `theta`:
///
/// ```text
/// 2 Re{(Y_l^* v^*) . (-j v)} / (v^H Y_e v) + 2 Re{(v^H Y_l v)(Y_e^* v^*) . (j v)} / (v^H Y_e v)^2
/// ```
pub fn gradient_theta<T: Real>(q: &SecrecyQuadratics<T>, theta: &PhaseVector<T>) -> Vec<T> {
    let v = u_map(theta);
    let vv = v.as_vector();
    let yl_v = q.apply(&q.a_l, vv);
    let ye_v = q.apply(&q.a_e, vv);
    let num = vv.dot_unchecked(&yl_v).re;
    let den = vv.dot_unchecked(&ye_v).re;
    let two = T::lit(2.0);
    let j = Complex::new(T::zero(), T::one());
    (0..v.len())
        .map(|k| {
            let first = (yl_v[k].conj() * (-j * vv[k])).re / den;
            let second = (ye_v[k].conj() * (j * vv[k])).re * num / (den * den);
            two * (first + second)
        })
        .collect()
}

/// Wirtinger gradient `2 df/dv^*` of the ratio, so that `df = Re{g^H dv}`.
pub fn wirtinger_gradient<T: Real>(q: &SecrecyQuadratics<T>, v: &UnitModulusVector<T>) -> ComplexVector<T> {
    let vv = v.as_vector();
    let yl_v = q.apply(&q.a_l, vv);
    let ye_v = q.apply(&q.a_e, vv);
    let num = vv.dot_unchecked(&yl_v).re;
    let den = vv.dot_unchecked(&ye_v).re;
    let two = T::lit(2.0);
    ComplexVector::from_fn(v.len(), |k| (yl_v[k] * den - ye_v[k] * num) * (two / (den * den)))
}

/// `max(log2 f, 0)` in bits per channel use.
pub fn secrecy_rate<T: Real>(objective_value: T) -> T {
    objective_value.log2().max(T::zero())
}

/// Coefficients of `alpha + p cos(phi) + s sin(phi)` for one entry `v_m = e^{j phi}`.
/// Coefficients of `base + |rest + c v_m|^2` as `a + p cos(phi) + s sin(phi)`,
/// where `dot = a^H v` and `c = conj(a_m)`.
fn element_coefficients<T: Real>(a: &ComplexVector<T>, dot: Cx<T>, v: &ComplexVector<T>, base: T, m: usize) -> (T, T, T) {
    let c = a[m].conj();
    let rest = dot - c * v[m];
    let z = rest.conj() * c;
    let two = T::lit(2.0);
    (base + rest.norm_sqr() + c.norm_sqr(), two * z.re, -two * z.im)
}

/// Replaces `v_m` by a maximizer of the ratio over the unit circle, keeping
/// the other entries fixed. Returns the new objective value, which is never
/// below the old one.
pub fn bcd_update_element<T: Real>(q: &SecrecyQuadratics<T>, v: &mut UnitModulusVector<T>, m: usize) -> T {
    let mut dots = (q.a_l.dot_unchecked(v.as_vector()), q.a_e.dot_unchecked(v.as_vector()));
    update_element_tracked(q, v, m, &mut dots)
}

/// [`bcd_update_element`] with `dots = (a_l^H v, a_e^H v)` supplied and
/// kept current, so a sweep costs `O(M)`.
fn update_element_tracked<T: Real>(
    q: &SecrecyQuadratics<T>,
    v: &mut UnitModulusVector<T>,
    m: usize,
    dots: &mut (Cx<T>, Cx<T>),
) -> T {
    let vv = v.as_vector();
    let base = T::from_usize(vv.len()).expect("M fits the scalar type") / q.inv_m_denominator();
    let (a1, p1, s1) = element_coefficients(&q.a_l, dots.0, vv, base, m);
    let (a2, p2, s2) = element_coefficients(&q.a_e, dots.1, vv, base, m);
    let ratio = |z: Cx<T>| (a1 + p1 * z.re + s1 * z.im) / (a2 + p2 * z.re + s2 * z.im);

    let mut best = ratio(vv[m]);
    let mut best_z = None;

    // Stationary points solve sa sin(phi) + sb cos(phi) + sc = 0, i.e.
    // sin(phi + psi) = -sc / r with e^{j psi} = (sa + j sb) / r.
    let sa = a1 * p2 - a2 * p1;
    let sb = a2 * s1 - a1 * s2;
    let sc = s1 * p2 - p1 * s2;
    let r = sa.hypot(sb);
    let scale = (a1.abs() + p1.abs() + s1.abs()) * (a2.abs() + p2.abs() + s2.abs());
    let mut candidates = [Cx::new(T::zero(), T::zero()); 3];
    let count = if r > T::epsilon() * scale {
        let x = (-sc / r).max(-T::one()).min(T::one());
        let y = (T::one() - x * x).max(T::zero()).sqrt();
        let rot = Cx::new(sa / r, -sb / r);
        candidates[0] = Cx::new(y, x) * rot;
        candidates[1] = Cx::new(-y, x) * rot;
        2
    } else {
        let half = T::lit(0.5);
        let h = T::lit(3.0).sqrt() * half;
        candidates = [Cx::new(T::one(), T::zero()), Cx::new(-half, h), Cx::new(-half, -h)];
        3
    };
    for &z in &candidates[..count] {
        let value = ratio(z);
        if value > best {
            best = value;
            best_z = Some(z);
        }
    }
    if let Some(z) = best_z {
        let old = vv[m];
        v.set(m, z);
        let delta = v.as_slice()[m] - old;
        dots.0 += q.a_l[m].conj() * delta;
        dots.1 += q.a_e[m].conj() * delta;
    }
    best
}

/// One in-order sweep of [`bcd_update_element`] over all entries.
pub fn elementwise_bcd_sweep<T: Real>(q: &SecrecyQuadratics<T>, v: &UnitModulusVector<T>) -> UnitModulusVector<T> {
    let mut out = v.clone();
    let mut dots = (q.a_l.dot_unchecked(out.as_vector()), q.a_e.dot_unchecked(out.as_vector()));
    for m in 0..out.len() {
        update_element_tracked(q, &mut out, m, &mut dots);
    }
    out
}

/// `Q` block of the secrecy problem: the beamformer and its quadratics.
#[derive(Debug, Clone, PartialEq)]
pub struct SecrecyBlock<T> {
    pub w: ComplexVector<T>,
    pub quadratics: SecrecyQuadratics<T>,
}

/// Secrecy maximization registered as a minimization of `-f`.
#[derive(Debug, Clone, Copy)]
pub struct SecrecyProblem<'a, T> {
    pub instance: &'a SecrecyInstance<T>,
}

impl<'a, T: Real> SecrecyProblem<'a, T> {
    pub fn new(instance: &'a SecrecyInstance<T>) -> Self {
        Self { instance }
    }

    /// Secrecy objective `f` (maximization orientation) at `theta` with the
    /// beamformer re-optimized.
    pub fn best_response_objective(&self, theta: &PhaseVector<T>) -> Result<T> {
        let v = u_map(theta);
        let w = optimal_beamformer(self.instance, &v)?;
        raw_objective(self.instance, &w, &v)
    }
}

impl<T: Real> TwoBlockProblem<T> for SecrecyProblem<'_, T> {
    type Block = SecrecyBlock<T>;

    fn dim(&self) -> usize {
        self.instance.m()
    }

    fn update_q(&self, theta: &PhaseVector<T>, _previous: Option<&Self::Block>) -> Result<Self::Block> {
        let w = optimal_beamformer(self.instance, &u_map(theta))?;
        let quadratics = build_quadratics(self.instance, &w)?;
        Ok(SecrecyBlock { w, quadratics })
    }

    fn evaluate(&self, q: &Self::Block, theta: &PhaseVector<T>) -> T {
        -ratio_objective(&q.quadratics, &u_map(theta))
    }

    fn gradient_theta(&self, q: &Self::Block, theta: &PhaseVector<T>) -> Vec<T> {
        gradient_theta(&q.quadratics, theta).into_iter().map(|g| -g).collect()
    }
}
