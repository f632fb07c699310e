use proptest::prelude::*;

use gcg::diagnostics::{
    check_envelope, dyadic_epsilons, envelope_q, first_quadratic_violation, fit_kappa, fit_rate, linear_lambda,
    pre_stagnation_window, quadratic_recursion, power_recursion, residuals, sublinear_constants, KappaFit, Report,
};
use gcg::registry::Problem;
use gcg::{gcg_solve, SolverConfig};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn quadratic_recursion_bound(q in 1e-4f64..=1.0) {
        let h = quadratic_recursion(q, 300).unwrap();
        prop_assert_eq!(first_quadratic_violation(&h, q), None);
    }

    #[test]
    fn power_recursion_bound(
        delta in 0.5f64..0.999,
        beta in 0.05f64..0.95,
        log_c in -3.0f64..3.0,
        h0 in 0.0f64..=1.0,
    ) {
        let r = power_recursion(delta, 10f64.powf(log_c), beta, h0, 300).unwrap();
        prop_assert_eq!(r.first_violation, None);
        prop_assert!(r.sequence.windows(2).all(|w| w[1] <= w[0]));
    }
}

proptest! {
    #[test]
    fn bounds_are_pure(
        r0 in 1e-6f64..10.0,
        alpha in 0.01f64..=0.5,
        gamma in 0.01f64..0.99,
        l in 1e-6f64..10.0,
        m in 1e-3f64..100.0,
        delta in 0.5f64..0.999,
        beta in 0.05f64..0.95,
        c in 1e-3f64..1e3,
    ) {
        prop_assert_eq!(envelope_q(r0, alpha, gamma, l, m).ok(), envelope_q(r0, alpha, gamma, l, m).ok());
        let a = linear_lambda(alpha, gamma, l, c).unwrap();
        let b = linear_lambda(alpha, gamma, l, c).unwrap();
        prop_assert_eq!(a.lambda.to_bits(), b.lambda.to_bits());
        let s = sublinear_constants(delta, beta, c, 0.5).unwrap();
        let t = sublinear_constants(delta, beta, c, 0.5).unwrap();
        prop_assert_eq!(s.n.to_bits(), t.n.to_bits());
        prop_assert_eq!(s.m.map(f64::to_bits), t.m.map(f64::to_bits));
    }

    #[test]
    fn envelope_detects_any_excess(q in 0.01f64..1.0, k in 1usize..40, bump in 1e-6f64..0.5) {
        let mut r: Vec<f64> = (0..40).map(|i| 1.0 / (1.0 + q * i as f64)).collect();
        prop_assert!(check_envelope(&r, q, 0.0).holds);
        r[k] *= 1.0 + bump;
        prop_assert_eq!(check_envelope(&r, q, 0.0).first_violation, Some(k));
    }

    #[test]
    fn kappa_recovers_power_laws(kappa in 0.2f64..3.0, scale in 1e-3f64..1e3) {
        let eps = dyadic_epsilons();
        let m: Vec<f64> = eps.iter().map(|e| scale * e.powf(kappa)).collect();
        let fit = fit_kappa(&eps, &m, f64::INFINITY).unwrap();
        prop_assert!((fit.kappa().unwrap() - kappa).abs() < 1e-9);
    }

    #[test]
    fn rate_recovers_geometric_decay(lambda in 0.05f64..0.99, c in 1e-3f64..1e3) {
        let pts: Vec<(usize, f64)> = (0..30).map(|k| (k, c * lambda.powi(k as i32))).collect();
        let fit = fit_rate(&pts, 0.0).unwrap();
        prop_assert!((fit.lambda_hat - lambda).abs() < 1e-9);
        prop_assert!(fit.r_squared > 1.0 - 1e-9);
    }
}

#[test]
fn vacuous_growth_and_short_windows() {
    let eps = dyadic_epsilons();
    assert_eq!(fit_kappa(&eps, &vec![0.0; eps.len()], 1.0).unwrap(), KappaFit::Vacuous);
    assert!(fit_rate(&[(0, 1.0), (1, 0.5)], 0.0).is_err());
}

#[test]
fn envelope_holds_on_a_real_run() {
    let p = Problem::build("parabolic-ex-1d", 32, 50).unwrap();
    let res = gcg_solve(&p, p.zero_control(), &SolverConfig::default()).unwrap();
    let r = residuals(&res.history, res.final_record().j_value);
    let q = envelope_q(r[0], 0.5, 0.99, p.lipschitz_estimate().unwrap(), res.max_dual_norm).unwrap();
    assert!(check_envelope(&r, q, res.eps_fp).holds);
    let window = pre_stagnation_window(&r, res.eps_fp, res.final_record().gap);
    assert!(window.iter().all(|(_, x)| *x > 10.0 * res.eps_fp));
}

#[test]
fn report_round_trips_through_text() {
    let mut r = Report::new();
    r.push("problem", "stadler-ex1");
    r.push_f64("tol", 1e-10);
    r.push_f64("third", 1.0 / 3.0);
    r.push_opt_f64("missing", None);
    let back = Report::parse(&r.to_string()).unwrap();
    assert_eq!(back.get_f64("third"), Some(1.0 / 3.0));
    assert_eq!(back.get("missing"), Some("none"));
    assert_eq!(back.to_string(), r.to_string());
}
