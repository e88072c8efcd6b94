//! Exhaustive phase-grid search for very small surfaces, and the local
//! solvers it is compared with.

use std::f64::consts::TAU;

use aogd::ao::{random_phases, solve, u_map, PhaseVector, SolverOptions, StepRule, TwoBlockProblem};
use aogd::baselines::{CircleObjective, CircleProblem};
use aogd::numerics::{rank_one_generalized_eig, rank_one_quotient, ComplexMatrix, ComplexVector};
use aogd::secrecy::{SecrecyInstance, SecrecyProblem};
use aogd::sim::{child_seed, gen_secrecy_instance, gen_wsr_instance, realization_rng, ScenarioConfig};
use aogd::wsr::{elementwise_bcd_v, f4_eval, WsrProblem, WsrQuadratics};
use rayon::prelude::*;

use crate::error::{BenchError, Result};

/// Largest surface the grid search accepts.
pub const MAX_ORACLE_M: usize = 3;

/// What the grid search minimizes.
#[derive(Debug, Clone, Copy)]
pub enum OracleTarget<'a> {
    /// `-f(w*(Theta), Theta)` with the beamformer re-optimized in closed form
    /// at every grid point.
    Secrecy(&'a SecrecyInstance<f64>),
    /// `f4(v)` with `R` and `e` fixed.
    PhaseQuadratic(&'a WsrQuadratics<f64>),
}

impl OracleTarget<'_> {
    pub fn m(&self) -> usize {
        match self {
            OracleTarget::Secrecy(inst) => inst.m(),
            OracleTarget::PhaseQuadratic(q) => q.m(),
        }
    }
}

/// Grid optimum in minimization orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub objective: f64,
    pub theta: PhaseVector<f64>,
    pub evaluations: usize,
}

/// Secrecy objective with the beamformer eliminated: the principal
/// generalized eigenvalue of the pencil at `g_i = B_i v`.
struct SecrecyGridObjective {
    b_l: ComplexMatrix<f64>,
    b_e: ComplexMatrix<f64>,
    a: f64,
    b: f64,
}

impl SecrecyGridObjective {
    fn new(inst: &SecrecyInstance<f64>) -> Self {
        // B_i = G^H diag(h_i), so that B_i v = G^H (v . h_i).
        let cascade = |h: &ComplexVector<f64>| ComplexMatrix::from_fn(inst.n_t(), inst.m(), |n, k| inst.g[(k, n)].conj() * h[k]);
        Self {
            b_l: cascade(&inst.h_l),
            b_e: cascade(&inst.h_e),
            a: inst.power / inst.sigma2_l,
            b: inst.power / inst.sigma2_e,
        }
    }

    fn value(&self, v: &ComplexVector<f64>) -> f64 {
        let g_l = self.b_l.mul_vec(v).expect("grid dimension");
        let g_e = self.b_e.mul_vec(v).expect("grid dimension");
        let u = rank_one_generalized_eig(self.a, &g_l, self.b, &g_e).expect("valid pencil");
        -rank_one_quotient(self.a, &g_l, self.b, &g_e, &u).expect("valid pencil")
    }
}

/// Exhaustive search over `theta_k = 2 pi i_k / n`, `i_k = 0..n`. Points are
/// ordered lexicographically and ties keep the first point.
pub fn brute_force_oracle(target: OracleTarget<'_>, grid_points_per_phase: usize) -> Result<OracleResult> {
    let m = target.m();
    if m > MAX_ORACLE_M {
        return Err(BenchError::Input(format!("grid search supports M <= {MAX_ORACLE_M}, got {m}")));
    }
    if grid_points_per_phase == 0 {
        return Err(BenchError::Input("grid needs at least one point per phase".into()));
    }
    let n = grid_points_per_phase;
    let total = n.pow(m as u32);
    let angle = |i: usize| TAU * i as f64 / n as f64;
    let theta_of = |mut index: usize| {
        let mut digits = vec![0.0; m];
        for k in (0..m).rev() {
            digits[k] = angle(index % n);
            index /= n;
        }
        PhaseVector::new(digits)
    };

    let secrecy = match target {
        OracleTarget::Secrecy(inst) => Some(SecrecyGridObjective::new(inst)),
        OracleTarget::PhaseQuadratic(_) => None,
    };
    let evaluate = |index: usize| {
        let v = u_map(&theta_of(index));
        match (&secrecy, target) {
            (Some(s), _) => s.value(v.as_vector()),
            (None, OracleTarget::PhaseQuadratic(q)) => f4_eval(q, &v),
            (None, OracleTarget::Secrecy(_)) => unreachable!(),
        }
    };

    let better = |a: (f64, usize), b: (f64, usize)| {
        if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) {
            b
        } else {
            a
        }
    };
    let chunk = total.div_ceil(n.max(1)).max(1);
    let (objective, index) = (0..total.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let mut best = (f64::INFINITY, usize::MAX);
            for i in c * chunk..((c + 1) * chunk).min(total) {
                let f = evaluate(i);
                if f < best.0 {
                    best = (f, i);
                }
            }
            best
        })
        .reduce(|| (f64::INFINITY, usize::MAX), better);
    if !objective.is_finite() {
        return Err(BenchError::Solver(aogd::Error::NonFinite {
            what: "grid objective",
            iteration: 0,
        }));
    }
    Ok(OracleResult {
        objective,
        theta: theta_of(index),
        evaluations: total,
    })
}

/// Unit-scale secrecy scenario for grid comparisons: two antennas, two
/// elements, a slightly closer legitimate receiver.
pub fn oracle_secrecy_scenario() -> ScenarioConfig {
    ScenarioConfig {
        n_t: 2,
        m: 2,
        p_dbm: 10.0,
        c0_db: 0.0,
        r_tr: 1.0,
        r_rl: 1.0,
        r_re: 1.2,
        sigma2_l_dbm: 0.0,
        sigma2_e_dbm: 0.0,
        ..ScenarioConfig::default()
    }
}

/// Tight settings for the local solves compared against the grid.
pub fn oracle_solver_options() -> SolverOptions<f64> {
    SolverOptions {
        gamma0: 1.0,
        xi: 1e-12,
        max_iterations: 20_000,
        ..SolverOptions::secrecy()
    }
}

/// Secrecy instance `index` of `cfg`.
pub fn secrecy_oracle_instance(cfg: &ScenarioConfig, seed: u64, index: usize) -> Result<SecrecyInstance<f64>> {
    Ok(gen_secrecy_instance(cfg, &mut realization_rng(seed, index as u64))?)
}

/// `f4` model of WSR instance `index`: `R` and `e` built at random phases
/// from the beamformer the inner loop converges to there.
pub fn f4_oracle_model(cfg: &ScenarioConfig, seed: u64, index: usize) -> Result<WsrQuadratics<f64>> {
    let mut rng = realization_rng(seed, index as u64);
    let inst = gen_wsr_instance::<f64, _>(cfg, &mut rng)?;
    let theta = PhaseVector::random(cfg.m, &mut rng);
    let opts = SolverOptions::wsr();
    let problem = WsrProblem::new(&inst, &opts);
    let state = problem.update_q(&theta, None)?;
    Ok(problem.phase_quadratics(&state.w, &u_map(&theta))?)
}

/// Starting phases of restart `i`.
pub fn restart_phases(m: usize, seed: u64, i: usize) -> PhaseVector<f64> {
    random_phases(m, child_seed(seed ^ 0x5eed, i as u64))
}

/// Best final objective (minimization orientation) of the tailored-step
/// solver over `restarts` random starts.
pub fn aogd_best_of(target: OracleTarget<'_>, restarts: usize, seed: u64, opts: &SolverOptions<f64>) -> Result<f64> {
    let m = target.m();
    let mut best = f64::INFINITY;
    for i in 0..restarts {
        let theta0 = restart_phases(m, seed, i);
        let f = match target {
            OracleTarget::Secrecy(inst) => solve(&SecrecyProblem::new(inst), theta0, opts, StepRule::Tailored)?.objective(),
            OracleTarget::PhaseQuadratic(q) => solve(&CircleProblem::new(q, m), theta0, opts, StepRule::Tailored)?.objective(),
        };
        best = best.min(f);
    }
    Ok(best)
}

/// Repeats BCD sweeps from `v0` until a sweep changes `f4` by at most
/// `1e-15` (relative) or `max_sweeps` sweeps have run. Returns the final value.
pub fn bcd_fixed_point(q: &WsrQuadratics<f64>, theta0: &PhaseVector<f64>, max_sweeps: usize) -> f64 {
    let mut v = u_map(theta0);
    let mut f = q.value(&v);
    for _ in 0..max_sweeps {
        v = elementwise_bcd_v(q, &v);
        let next = q.value(&v);
        let done = (f - next).abs() <= 1e-15 * f.abs().max(1.0);
        f = next;
        if done {
            break;
        }
    }
    f
}

/// Best BCD fixed point over the same starts as [`aogd_best_of`].
pub fn bcd_best_of(q: &WsrQuadratics<f64>, restarts: usize, seed: u64) -> f64 {
    (0..restarts)
        .map(|i| bcd_fixed_point(q, &restart_phases(q.m(), seed, i), 10_000))
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use aogd::ao::UnitModulusVector;
    use aogd::Cx;

    fn cx(re: f64, im: f64) -> Cx<f64> {
        Cx::new(re, im)
    }

    fn scalar_f4(r: f64, e: f64) -> WsrQuadratics<f64> {
        WsrQuadratics::from_parts(
            ComplexMatrix::from_row_major(1, 1, vec![cx(r, 0.0)]).unwrap(),
            ComplexVector::new(vec![cx(e, 0.0)]),
        )
        .unwrap()
    }

    #[test]
    fn scalar_f4_minimum_is_at_zero_phase() {
        let q = scalar_f4(1.0, 1.0);
        let out = brute_force_oracle(OracleTarget::PhaseQuadratic(&q), 360).unwrap();
        assert!((out.objective + 1.0).abs() < 1e-15);
        assert_eq!(out.theta.as_slice(), &[0.0]);
        assert_eq!(out.evaluations, 360);
    }

    #[test]
    fn constant_objective_returns_first_point() {
        let zero = WsrQuadratics::from_parts(ComplexMatrix::zeros(2, 2), ComplexVector::zeros(2)).unwrap();
        let out = brute_force_oracle(OracleTarget::PhaseQuadratic(&zero), 17).unwrap();
        assert_eq!(out.objective, 0.0);
        assert_eq!(out.theta.as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn large_surfaces_and_empty_grids_are_refused() {
        let q = WsrQuadratics::from_parts(ComplexMatrix::zeros(4, 4), ComplexVector::zeros(4)).unwrap();
        assert!(matches!(brute_force_oracle(OracleTarget::PhaseQuadratic(&q), 4), Err(BenchError::Input(_))));
        assert!(matches!(
            brute_force_oracle(OracleTarget::PhaseQuadratic(&scalar_f4(1.0, 1.0)), 0),
            Err(BenchError::Input(_))
        ));
    }

    #[test]
    fn grid_secrecy_value_matches_best_response() {
        let inst = secrecy_oracle_instance(&oracle_secrecy_scenario(), 3, 0).unwrap();
        let fast = SecrecyGridObjective::new(&inst);
        let problem = SecrecyProblem::new(&inst);
        for i in 0..20 {
            let theta = restart_phases(2, 9, i);
            let v: UnitModulusVector<f64> = u_map(&theta);
            let reference = problem.best_response_objective(&theta).unwrap();
            assert!((fast.value(v.as_vector()) + reference).abs() <= 1e-12 * reference);
        }
    }

    #[test]
    fn grid_optimum_is_attained_by_the_returned_phases() {
        let q = f4_oracle_model(&ScenarioConfig::wsr(2), 5, 0).unwrap();
        let out = brute_force_oracle(OracleTarget::PhaseQuadratic(&q), 90).unwrap();
        assert_eq!(q.value(&u_map(&out.theta)), out.objective);
        for i in 0..50 {
            assert!(out.objective <= q.value(&u_map(&restart_phases(2, 6, i))) + 1e-3);
        }
    }
}
