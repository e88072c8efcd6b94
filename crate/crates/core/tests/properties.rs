mod common;

use std::f64::consts::TAU;

use aogd::ao::{u_map, PhaseVector, UnitModulusVector};
use aogd::baselines::{retract, riemannian_gradient, CircleObjective, NegatedRatio};
use aogd::secrecy::{bcd_update_element, build_quadratics, ratio_objective, secrecy_rate};
use aogd::sim::{dbm_to_watts, watts_to_dbm};
use aogd::wsr::{
    bcd_update_element_f4, build_r_e, f2_eval, f4_eval, fp_inner_loop, sinr, update_p, update_q, update_w_prox,
    wsr_objective, FpState,
};
use common::{random_vector, random_w, rng, secrecy_instance, wsr_instance};
use proptest::prelude::*;

fn angles(m: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-20.0..20.0f64, m)
}

fn wrap_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn u_map_is_unit_modulus_and_invertible(theta in (1usize..40).prop_flat_map(angles)) {
        let v = u_map(&PhaseVector::new(theta.clone()));
        prop_assert!(v.max_modulus_error() <= 1e-12);
        for (a, b) in v.angles().as_slice().iter().zip(&theta) {
            prop_assert!(wrap_distance(*a, *b) <= 1e-12);
        }
    }

    #[test]
    fn retraction_stays_on_circle_and_gradient_is_tangent(
        theta in angles(12),
        seed in any::<u64>(),
        step in 0.0..50.0f64,
    ) {
        let v = u_map(&PhaseVector::new(theta));
        let g = random_vector(12, &mut rng(seed)).scale_real(10.0);
        let d = riemannian_gradient(&g, &v).unwrap();
        prop_assert!(d.tangency_residual(&v) <= 1e-10);
        let r = retract(&v, &d, step).unwrap();
        prop_assert!(r.max_modulus_error() <= 1e-15);
    }

    #[test]
    fn secrecy_denominator_is_at_least_one_and_phase_invariant(
        seed in any::<u64>(),
        m in 1usize..20,
        theta_seed in any::<u64>(),
        phi in -10.0..10.0f64,
    ) {
        let inst = secrecy_instance(m, 3, seed);
        let q = build_quadratics(&inst, &random_vector(3, &mut rng(seed ^ 1))).unwrap();
        let v = u_map(&PhaseVector::random(m, &mut rng(theta_seed)));
        prop_assert!(q.denominator(&v) >= 1.0 - 1e-12);
        prop_assert!(q.numerator(&v) >= 1.0 - 1e-12);
        let a = ratio_objective(&q, &v);
        let b = ratio_objective(&q, &v.rotated(phi));
        prop_assert!(close(a, b, 1e-12));
    }

    #[test]
    fn secrecy_bcd_steps_never_decrease_the_ratio(seed in any::<u64>(), m in 1usize..10) {
        let inst = secrecy_instance(m, 2, seed);
        let q = build_quadratics(&inst, &random_vector(2, &mut rng(seed ^ 2))).unwrap();
        let mut v = u_map(&PhaseVector::random(m, &mut rng(seed ^ 3)));
        let mut prev = ratio_objective(&q, &v);
        for k in 0..m {
            let reported = bcd_update_element(&q, &mut v, k);
            let now = ratio_objective(&q, &v);
            prop_assert!(now >= prev - 1e-12 * prev);
            prop_assert!(close(reported, now, 1e-10));
            prev = now;
        }
    }

    #[test]
    fn wsr_bcd_steps_never_increase_f4(seed in any::<u64>(), m in 1usize..10) {
        let inst = wsr_instance(m, 3, 2, seed);
        let w = random_w(&inst, 0.7, &mut rng(seed ^ 4));
        let v0 = u_map(&PhaseVector::random(m, &mut rng(seed ^ 5)));
        let p = update_p(&inst, &w, &v0).unwrap();
        let q = update_q(&inst, &p, &w, &v0).unwrap();
        let quad = build_r_e(&inst, &p, &q, &w).unwrap();
        let mut v = v0;
        let mut prev = f4_eval(&quad, &v);
        for k in 0..m {
            bcd_update_element_f4(&quad, &mut v, k);
            let now = f4_eval(&quad, &v);
            prop_assert!(now <= prev + 1e-10 * prev.abs().max(1.0));
            prev = now;
        }
    }

    #[test]
    fn fp_surrogate_is_tight_after_auxiliary_updates(seed in any::<u64>(), fraction in 0.0..1.0f64) {
        let inst = wsr_instance(6, 3, 3, seed);
        let w = random_w(&inst, fraction, &mut rng(seed ^ 6));
        let v = u_map(&PhaseVector::random(6, &mut rng(seed ^ 7)));
        let p = update_p(&inst, &w, &v).unwrap();
        let q = update_q(&inst, &p, &w, &v).unwrap();
        let f2 = f2_eval(&inst, &p, &q, &w, &v).unwrap();
        let rate = wsr_objective(&inst, &w, &v).unwrap();
        prop_assert!((f2 - rate).abs() <= 1e-9 * rate.abs().max(1e-12));
    }

    #[test]
    fn f2_plus_f4_does_not_depend_on_phases(seed in any::<u64>(), probe in any::<u64>()) {
        let inst = wsr_instance(5, 3, 3, seed);
        let w = random_w(&inst, 0.9, &mut rng(seed ^ 8));
        let v0 = u_map(&PhaseVector::random(5, &mut rng(seed ^ 9)));
        let p = update_p(&inst, &w, &v0).unwrap();
        let q = update_q(&inst, &p, &w, &v0).unwrap();
        let quad = build_r_e(&inst, &p, &q, &w).unwrap();
        prop_assert!(quad.r.is_hermitian(1e-12));
        let reference = f2_eval(&inst, &p, &q, &w, &v0).unwrap() + f4_eval(&quad, &v0);
        let v = u_map(&PhaseVector::random(5, &mut rng(probe)));
        let total = f2_eval(&inst, &p, &q, &w, &v).unwrap() + f4_eval(&quad, &v);
        prop_assert!((total - reference).abs() <= 1e-9 * reference.abs().max(1.0));
    }

    #[test]
    fn beamformer_updates_are_feasible_and_rates_nonnegative(seed in any::<u64>(), fraction in 0.0..1.0f64) {
        let inst = wsr_instance(4, 3, 3, seed);
        let v = u_map(&PhaseVector::random(4, &mut rng(seed ^ 10)));
        let mut w = random_w(&inst, fraction, &mut rng(seed ^ 11));
        for _ in 0..5 {
            let p = update_p(&inst, &w, &v).unwrap();
            prop_assert!(p.iter().all(|x| *x >= 0.0));
            let q = update_q(&inst, &p, &w, &v).unwrap();
            w = update_w_prox(&inst, &p, &q, &v, &w).unwrap();
            prop_assert!(w.frobenius_norm().powi(2) <= inst.power * (1.0 + 1e-10));
            for k in 0..inst.k() {
                prop_assert!(sinr(&inst, &w, &v, k).unwrap() >= 0.0);
            }
            prop_assert!(wsr_objective(&inst, &w, &v).unwrap() >= 0.0);
        }
    }

    #[test]
    fn inner_loop_f2_never_decreases(seed in any::<u64>()) {
        let inst = wsr_instance(6, 3, 3, seed);
        let v = u_map(&PhaseVector::random(6, &mut rng(seed ^ 12)));
        let out = fp_inner_loop(&inst, &v, &FpState::zeros(&inst), 1e-12, 200).unwrap();
        for pair in out.f2_trace.windows(2) {
            prop_assert!(pair[1] >= pair[0] - 1e-10 * pair[0].abs().max(1.0));
        }
        prop_assert!(out.state.total_power() <= inst.power * (1.0 + 1e-10));
    }

    #[test]
    fn dbm_round_trip(dbm in -150.0..60.0f64) {
        prop_assert!((watts_to_dbm(dbm_to_watts(dbm)) - dbm).abs() <= 1e-12);
    }

    #[test]
    fn negated_ratio_model_agrees_with_objective(seed in any::<u64>(), m in 1usize..12) {
        let inst = secrecy_instance(m, 2, seed);
        let q = build_quadratics(&inst, &random_vector(2, &mut rng(seed ^ 13))).unwrap();
        let v: UnitModulusVector<f64> = u_map(&PhaseVector::random(m, &mut rng(seed ^ 14)));
        prop_assert_eq!(NegatedRatio(q.clone()).value(&v), -ratio_objective(&q, &v));
    }
}

#[test]
fn secrecy_rate_examples() {
    assert_eq!(secrecy_rate(2.0f64), 1.0);
    assert_eq!(secrecy_rate(0.5f64), 0.0);
    assert_eq!(secrecy_rate(1.0f64), 0.0);
    assert!((secrecy_rate(8.0f64) - 3.0).abs() < 1e-15);
}
