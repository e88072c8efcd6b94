//! Scenario description and reproducible channel generation.
//!
//! Every link is `sqrt(C0 d^-alpha)` times i.i.d. circularly-symmetric complex
//! Gaussian fading. Powers are configured in dBm and converted to watts.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, ComplexVector};
use crate::scalar::Real;
use crate::secrecy::SecrecyInstance;
use crate::wsr::WsrInstance;

/// Reference path loss used by the secrecy presets. The transmitter and
/// receivers sit hundreds of meters from the surface with exponent 4, so this
/// is chosen to place the cascaded SNR in a non-degenerate range.
pub const SECRECY_C0_DB: f64 = 52.0;

/// Small-scale fading model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fading {
    /// i.i.d. `CN(0, fading_variance)` entries.
    #[default]
    Rayleigh,
    /// Every entry equals one.
    AllOnes,
}

/// Geometry, power and noise settings of one scenario.
///
/// Secrecy scenarios use `r_tr`, `r_rl`, `r_re`, `alpha` and the two receiver
/// noise levels. WSR scenarios place the AP at the origin, the surface at
/// `(irs_x, irs_y)` and draw users uniformly in the disc of radius
/// `user_radius` around `(user_center_x, user_center_y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub n_t: usize,
    pub m: usize,
    pub k_users: usize,
    pub p_dbm: f64,
    pub alpha: f64,
    pub c0_db: f64,
    pub r_tr: f64,
    pub r_rl: f64,
    pub r_re: f64,
    pub sigma2_l_dbm: f64,
    pub sigma2_e_dbm: f64,
    pub sigma2_dbm: f64,
    pub irs_x: f64,
    pub irs_y: f64,
    pub user_center_x: f64,
    pub user_center_y: f64,
    pub user_radius: f64,
    pub alpha_ai: f64,
    pub alpha_iu: f64,
    pub alpha_au: f64,
    /// User weights; empty means all ones.
    pub omega: Vec<f64>,
    pub fading: Fading,
    pub fading_variance: f64,
    pub rng_seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            n_t: 5,
            m: 60,
            k_users: 4,
            p_dbm: 5.0,
            alpha: 4.0,
            c0_db: -30.0,
            r_tr: 250.0,
            r_rl: 160.0,
            r_re: 160.0,
            sigma2_l_dbm: -75.0,
            sigma2_e_dbm: -75.0,
            sigma2_dbm: -80.0,
            irs_x: 50.0,
            irs_y: 0.0,
            user_center_x: 50.0,
            user_center_y: 5.0,
            user_radius: 5.0,
            alpha_ai: 2.2,
            alpha_iu: 2.8,
            alpha_au: 3.5,
            omega: Vec::new(),
            fading: Fading::Rayleigh,
            fading_variance: 1.0,
            rng_seed: 0,
        }
    }
}

impl ScenarioConfig {
    /// Secrecy convergence scenario: `N_t = 5`, `P = 5 dBm`, `alpha = 4`,
    /// `r_tr = 250 m`, `r_rl = r_re = 160 m`.
    pub fn secrecy_convergence(m: usize) -> Self {
        Self {
            m,
            c0_db: SECRECY_C0_DB,
            ..Self::default()
        }
    }

    /// Secrecy rate-versus-M scenario: `N_t = 10`, `P = 5 dBm`, `alpha = 4`,
    /// `r_tr = 200 m`, `r_rl = 150 m`, `r_re = 100 m`.
    pub fn secrecy_sweep(m: usize) -> Self {
        Self {
            n_t: 10,
            m,
            r_tr: 200.0,
            r_rl: 150.0,
            r_re: 100.0,
            c0_db: SECRECY_C0_DB,
            ..Self::default()
        }
    }

    /// WSR scenario: 4 AP antennas, 4 users, `P = 10 dBm`.
    pub fn wsr(m: usize) -> Self {
        Self {
            n_t: 4,
            m,
            k_users: 4,
            p_dbm: 10.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidInput(format!("invalid scenario: {what}")));
        if self.n_t == 0 || self.m == 0 || self.k_users == 0 {
            return bad("n_t, m and k_users must be at least 1");
        }
        let reals = [
            self.p_dbm,
            self.c0_db,
            self.sigma2_l_dbm,
            self.sigma2_e_dbm,
            self.sigma2_dbm,
            self.irs_x,
            self.irs_y,
            self.user_center_x,
            self.user_center_y,
        ];
        if reals.iter().any(|x| !x.is_finite()) {
            return bad("non-finite value");
        }
        let positive = [
            self.alpha,
            self.r_tr,
            self.r_rl,
            self.r_re,
            self.alpha_ai,
            self.alpha_iu,
            self.alpha_au,
            self.fading_variance,
        ];
        if positive.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
            return bad("distances, exponents and fading variance must be positive");
        }
        if !(self.user_radius >= 0.0 && self.user_radius.is_finite()) {
            return bad("user_radius must be non-negative");
        }
        if !self.omega.is_empty() {
            if self.omega.len() != self.k_users {
                return bad("omega must be empty or have k_users entries");
            }
            if self.omega.iter().any(|w| !(*w >= 0.0 && w.is_finite())) || !self.omega.iter().any(|w| *w > 0.0) {
                return bad("omega must be non-negative with one positive entry");
            }
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::InvalidInput(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario config is always serializable")
    }

    fn weights(&self) -> Vec<f64> {
        if self.omega.is_empty() {
            vec![1.0; self.k_users]
        } else {
            self.omega.clone()
        }
    }
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

/// `10^(c0_db / 10) d^-alpha`
pub fn path_loss(d: f64, alpha: f64, c0_db: f64) -> Result<f64> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::InvalidInput(format!("distance must be positive, got {d}")));
    }
    Ok(10f64.powf(c0_db / 10.0) * d.powf(-alpha))
}

/// Seed of realization `index` derived from a base seed (SplitMix64 finalizer).
pub fn child_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Generator seeded with [`child_seed`].
pub fn realization_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(child_seed(seed, index))
}

/// `rows x cols` matrix of i.i.d. `CN(0, 1)` entries, drawn row by row.
pub fn gen_rayleigh<T: Real, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix<T> {
    ComplexMatrix::from_fn(rows, cols, |_, _| cn(rng, 1.0))
}

fn cn<T: Real, R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex<T> {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(T::lit(re * s), T::lit(im * s))
}

fn fading_entry<T: Real, R: Rng + ?Sized>(cfg: &ScenarioConfig, rng: &mut R, gain: f64) -> Complex<T> {
    match cfg.fading {
        Fading::Rayleigh => cn::<T, R>(rng, cfg.fading_variance) * T::lit(gain.sqrt()),
        Fading::AllOnes => Complex::new(T::lit(gain.sqrt()), T::zero()),
    }
}

fn link_matrix<T: Real, R: Rng + ?Sized>(cfg: &ScenarioConfig, rng: &mut R, rows: usize, cols: usize, gain: f64) -> ComplexMatrix<T> {
    ComplexMatrix::from_fn(rows, cols, |_, _| fading_entry(cfg, rng, gain))
}

fn link_vector<T: Real, R: Rng + ?Sized>(cfg: &ScenarioConfig, rng: &mut R, len: usize, gain: f64) -> ComplexVector<T> {
    ComplexVector::from_fn(len, |_| fading_entry(cfg, rng, gain))
}

/// Draws `G`, then `h_l`, then `h_e`.
pub fn gen_secrecy_instance<T: Real, R: Rng + ?Sized>(cfg: &ScenarioConfig, rng: &mut R) -> Result<SecrecyInstance<T>> {
    cfg.validate()?;
    let g = link_matrix(cfg, rng, cfg.m, cfg.n_t, path_loss(cfg.r_tr, cfg.alpha, cfg.c0_db)?);
    let h_l = link_vector(cfg, rng, cfg.m, path_loss(cfg.r_rl, cfg.alpha, cfg.c0_db)?);
    let h_e = link_vector(cfg, rng, cfg.m, path_loss(cfg.r_re, cfg.alpha, cfg.c0_db)?);
    SecrecyInstance::new(
        g,
        h_l,
        h_e,
        T::lit(dbm_to_watts(cfg.sigma2_l_dbm)),
        T::lit(dbm_to_watts(cfg.sigma2_e_dbm)),
        T::lit(dbm_to_watts(cfg.p_dbm)),
    )
}

/// User positions, drawn uniformly in the user disc (two draws per user).
pub fn draw_user_positions<R: Rng + ?Sized>(cfg: &ScenarioConfig, rng: &mut R) -> Vec<(f64, f64)> {
    (0..cfg.k_users)
        .map(|_| {
            let r = cfg.user_radius * rng.random::<f64>().sqrt();
            let phi = std::f64::consts::TAU * rng.random::<f64>();
            (cfg.user_center_x + r * phi.cos(), cfg.user_center_y + r * phi.sin())
        })
        .collect()
}

/// Distances below one meter are clamped to one meter.
fn distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1).max(1.0)
}

/// Draws user positions, then `G`, then per user `h_d` and `h_r`.
pub fn gen_wsr_instance<T: Real, R: Rng + ?Sized>(cfg: &ScenarioConfig, rng: &mut R) -> Result<WsrInstance<T>> {
    cfg.validate()?;
    let users = draw_user_positions(cfg, rng);
    let ap = (0.0, 0.0);
    let irs = (cfg.irs_x, cfg.irs_y);
    let g = link_matrix(cfg, rng, cfg.m, cfg.n_t, path_loss(distance(ap, irs), cfg.alpha_ai, cfg.c0_db)?);
    let mut h_d = Vec::with_capacity(cfg.k_users);
    let mut h_r = Vec::with_capacity(cfg.k_users);
    for user in &users {
        h_d.push(link_vector(cfg, rng, cfg.n_t, path_loss(distance(ap, *user), cfg.alpha_au, cfg.c0_db)?));
        h_r.push(link_vector(cfg, rng, cfg.m, path_loss(distance(irs, *user), cfg.alpha_iu, cfg.c0_db)?));
    }
    WsrInstance::new(
        g,
        h_d,
        h_r,
        cfg.weights().into_iter().map(T::lit).collect(),
        T::lit(dbm_to_watts(cfg.sigma2_dbm)),
        T::lit(dbm_to_watts(cfg.p_dbm)),
    )
}
