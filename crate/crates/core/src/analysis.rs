//! End-to-end experiment: solve, re-solve against the converged control, and
//! check the run against the rate theory.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::diagnostics::{
    check_envelope, dyadic_epsilons, envelope_q, fit_kappa, fit_rate, pre_stagnation_window, residuals, EnvelopeCheck,
    KappaFit, RateConstants, RateFit, RateInputs, Report,
};
use crate::error::Result;
use crate::field::ControlField;
use crate::parabolic::TimeProfile;
use crate::registry::Problem;
use crate::solver::{gcg_solve, gcg_solve_observed, CompositeProblem, SolveResult, SolverConfig};
use crate::elliptic::StructureReport;

#[derive(Debug, Clone, Copy)]
pub struct AnalysisOptions {
    /// Re-run with the converged control as reference to fill `err_u`/`err_v`
    /// and to sample the growth ratio along the iterates.
    pub track_errors: bool,
    /// Random feasible points for the growth-constant spot check.
    pub growth_samples: usize,
    pub seed: u64,
    /// Gap tolerance of a separate, tighter run whose final value serves as
    /// the reference optimum. `None` uses the analysed run itself.
    pub reference_tol: Option<f64>,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self { track_errors: true, growth_samples: 100, seed: 0x5eed, reference_tol: None }
    }
}

#[derive(Debug, Clone)]
pub enum Structure {
    Elliptic(StructureReport),
    Parabolic { profile: TimeProfile, zero_or_radius: f64, vanishes_below_threshold: bool },
}

#[derive(Debug, Clone)]
pub struct Experiment {
    /// Run used for the output (with error columns when tracked).
    pub result: SolveResult,
    pub analysis: Analysis,
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub j_ref: f64,
    pub reference_gap: f64,
    pub residuals: Vec<f64>,
    pub l_est: f64,
    pub mstar: f64,
    pub q_env: Option<f64>,
    pub envelope: Option<EnvelopeCheck>,
    /// `min_k Ψ(u^k) − r_k`; the theory says it is `≥ 0`.
    pub gap_minus_residual: f64,
    /// Records violating `r_{k+1} ≤ (1 − α s_k) r_k + ε_fp`.
    pub descent_violations: usize,
    pub window: Vec<(usize, f64)>,
    pub rate: std::result::Result<RateFit, String>,
    pub epsilons: Vec<f64>,
    pub measures: Vec<f64>,
    pub kappa: std::result::Result<KappaFit, String>,
    /// `1 + 1/κ`, with `κ = 1` when the fit is unavailable.
    pub q_growth: f64,
    pub theta_random: Option<f64>,
    pub theta_iterates: Option<f64>,
    pub theta_hat: Option<f64>,
    pub coupling_violations: Option<usize>,
    pub constants: std::result::Result<RateConstants, String>,
    pub structure: Structure,
}

fn growth_ratio(problem: &Problem, ubar: &ControlField, g_bar: f64, pbar: &ControlField, u: &ControlField, q: f64) -> Option<f64> {
    let gu = problem.nonsmooth(u)?;
    let d = u.sub(ubar);
    let dist = problem.dual_norm(&d);
    if dist <= 0.0 {
        return None;
    }
    Some((pbar.dot(&d) + gu - g_bar) / dist.powf(q))
}

/// Solves from the zero control and analyses the run.
pub fn run_experiment(problem: &Problem, config: &SolverConfig, opts: &AnalysisOptions) -> Result<Experiment> {
    let first = gcg_solve(problem, problem.zero_control(), config)?;
    let tight = match opts.reference_tol {
        Some(tol) if tol < config.gap_tol => {
            let mut cfg = config.clone();
            cfg.gap_tol = tol;
            Some(gcg_solve(problem, first.final_iterate.clone(), &cfg)?)
        }
        _ => None,
    };
    let reference = tight.as_ref().unwrap_or(&first);
    let ubar = reference.final_iterate.clone();
    let pbar = reference.final_gradient.clone();
    let g_bar = problem.nonsmooth(&ubar).expect("solver iterates are feasible");
    let j_ref = reference.final_record().j_value.min(first.final_record().j_value);
    let reference_gap = reference.final_record().gap;
    let res = residuals(&first.history, j_ref);
    let window = pre_stagnation_window(&res, first.eps_fp, reference_gap);

    let epsilons = dyadic_epsilons();
    let measures = epsilons.iter().map(|e| problem.growth_measure(&pbar, *e)).collect::<Result<Vec<_>>>()?;
    let kappa = fit_kappa(&epsilons, &measures, problem.growth_total_measure()).map_err(|e| e.to_string());
    let q_growth = match &kappa {
        Ok(KappaFit::Fitted { kappa, .. }) if *kappa > 0.0 => 1.0 + 1.0 / kappa,
        _ => 2.0,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let theta_random = (0..opts.growth_samples)
        .filter_map(|_| growth_ratio(problem, &ubar, g_bar, &pbar, &problem.random_feasible_control(&mut rng), q_growth))
        .reduce(f64::min);

    let in_window = |k: usize| window.iter().any(|(i, _)| *i == k);
    let (result, theta_iterates) = if opts.track_errors {
        let cfg = config.clone().with_reference(ubar.clone());
        let mut theta_it: Option<f64> = None;
        let tracked = gcg_solve_observed(problem, problem.zero_control(), &cfg, |view| {
            if in_window(view.k) {
                if let Some(r) = growth_ratio(problem, &ubar, g_bar, &pbar, view.iterate, q_growth) {
                    theta_it = Some(theta_it.map_or(r, |t| t.min(r)));
                }
            }
        })?;
        (tracked, theta_it)
    } else {
        (first, None)
    };
    let theta_hat = match (theta_random, theta_iterates) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };

    let l_est = problem.lipschitz_estimate()?;
    let mstar = result.max_dual_norm;
    let eps = result.eps_fp;
    let alpha = config.armijo.alpha();
    let gamma = config.armijo.gamma();
    let r0 = res[0];
    let q_env = if r0 > 0.0 && mstar > 0.0 { envelope_q(r0, alpha, gamma, l_est, mstar).ok() } else { None };
    let envelope = q_env.map(|q| check_envelope(&res, q, eps));

    let gap_minus_residual = result
        .history
        .iter()
        .zip(&res)
        .map(|(r, res)| r.gap - res)
        .fold(f64::INFINITY, f64::min);
    let descent_violations = result
        .history
        .windows(2)
        .zip(res.windows(2))
        .filter(|(h, r)| r[1] > (1.0 - alpha * h[0].step) * r[0] + eps)
        .count();

    let rate = fit_rate(&window, 0.0).map_err(|e| e.to_string());

    let coupling_violations = theta_hat.filter(|t| *t > 0.0).map(|theta| {
        result
            .history
            .iter()
            .filter(|r| in_window(r.k))
            .filter(|r| match r.err_u {
                Some(e) => e > (res[r.k].max(0.0) / theta).powf(1.0 / q_growth) * (1.0 + 1e-9) + eps,
                None => false,
            })
            .count()
    });

    let constants = match theta_hat {
        Some(theta) if theta > 0.0 && r0 > 0.0 && mstar > 0.0 => {
            let r_k = res.iter().copied().find(|r| *r <= 1.0).unwrap_or(r0);
            RateConstants::compute(&RateInputs {
                alpha,
                gamma,
                r0,
                r_k,
                l_est,
                mstar,
                theta_hat: theta,
                kappa: 1.0 / (q_growth - 1.0),
            })
            .map_err(|e| e.to_string())
        }
        _ => Err("growth constant unavailable or nonpositive".to_string()),
    };

    let structure = match problem {
        Problem::Elliptic(e) => Structure::Elliptic(e.structure_report(&ubar, &pbar)?),
        Problem::Parabolic(p) => {
            let profile = p.time_profile(&ubar, &pbar)?;
            Structure::Parabolic {
                zero_or_radius: profile.zero_or_radius_fraction(p.ball_radius()),
                vanishes_below_threshold: profile.vanishes_below_threshold(p.reg_alpha(), p.ball_radius()),
                profile,
            }
        }
    };

    let analysis = Analysis {
        j_ref,
        reference_gap,
        residuals: res,
        l_est,
        mstar,
        q_env,
        envelope,
        gap_minus_residual,
        descent_violations,
        window,
        rate,
        epsilons,
        measures,
        kappa,
        q_growth,
        theta_random,
        theta_iterates,
        theta_hat,
        coupling_violations,
        constants,
        structure,
    };
    Ok(Experiment { result, analysis })
}

impl Experiment {
    pub fn report(&self) -> Report {
        let a = &self.analysis;
        let res = &self.result;
        let mut r = Report::new();
        r.push("status", res.status);
        r.push("iterations", res.iterations());
        r.push_f64("final_j", res.final_record().j_value);
        r.push_f64("final_gap", res.final_record().gap);
        r.push_f64("eps_fp", res.eps_fp);
        r.push_f64("l_est", a.l_est);
        r.push_f64("mstar", a.mstar);
        r.push_f64("r0", a.residuals[0]);
        r.push_opt_f64("envelope_q", a.q_env);
        match &a.envelope {
            Some(e) => {
                r.push("envelope_holds", e.holds);
                r.push("envelope_first_violation", e.first_violation.map_or("none".to_string(), |k| k.to_string()));
            }
            None => r.push("envelope_holds", "n/a"),
        }
        r.push_f64("min_gap_minus_residual", a.gap_minus_residual);
        r.push("descent_violations", a.descent_violations);
        r.push("rate_window", a.window.len());
        match &a.rate {
            Ok(f) => {
                r.push_f64("rate_lambda_hat", f.lambda_hat);
                r.push_f64("rate_r_squared", f.r_squared);
            }
            Err(e) => r.push("rate_fit", e),
        }
        match &a.kappa {
            Ok(KappaFit::Fitted { kappa, r_squared, points }) => {
                r.push_f64("kappa_hat", *kappa);
                r.push_f64("kappa_r_squared", *r_squared);
                r.push("kappa_points", points);
            }
            Ok(KappaFit::Vacuous) => r.push("kappa_hat", "vacuous"),
            Err(e) => r.push("kappa_fit", e),
        }
        let pairs: Vec<String> = a.epsilons.iter().zip(&a.measures).map(|(e, m)| format!("{e:?}:{m:?}")).collect();
        r.push("growth_measures", pairs.join(","));
        r.push_f64("q_growth", a.q_growth);
        r.push_opt_f64("theta_random", a.theta_random);
        r.push_opt_f64("theta_iterates", a.theta_iterates);
        r.push_opt_f64("theta_hat", a.theta_hat);
        if let Some(c) = a.coupling_violations {
            r.push("coupling_violations", c);
        }
        match &a.constants {
            Ok(c) => {
                r.push_f64("lambda_bound", c.lambda);
                r.push_f64("c1", c.c1);
                r.push_f64("c2", c.c2);
                r.push_f64("cbar", c.cbar);
                r.push_f64("delta", c.delta);
                r.push_f64("exponent_beta", c.exponent_beta);
                r.push_f64("c_rec", c.c_rec);
                r.push_opt_f64("n_rec", c.n_rec);
                r.push_opt_f64("m_rec", c.m_rec);
            }
            Err(e) => r.push("rate_constants", e),
        }
        match &a.structure {
            Structure::Elliptic(s) => {
                r.push_f64("structure_three_valued", s.three_valued);
                r.push_f64("structure_matches_adjoint", s.matches_adjoint);
            }
            Structure::Parabolic { zero_or_radius, vanishes_below_threshold, .. } => {
                r.push_f64("structure_zero_or_radius", *zero_or_radius);
                r.push("structure_vanishes_below_threshold", vanishes_below_threshold);
            }
        }
        r
    }
}
