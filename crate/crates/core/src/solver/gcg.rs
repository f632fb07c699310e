//! The generalized conditional gradient loop.

use std::fmt;

use crate::error::{GcgError, Result};
use crate::field::ControlField;
use crate::solver::armijo::{armijo_step, ArmijoParams};
use crate::solver::gap::{dual_gap, eps_fp};
use crate::solver::problem::CompositeProblem;

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub gap_tol: f64,
    pub max_iter: usize,
    pub armijo: ArmijoParams,
    /// Reference solution for the `err_u` / `err_v` columns.
    pub record_errors_against: Option<ControlField>,
}

impl SolverConfig {
    pub fn new(gap_tol: f64, max_iter: usize, armijo: ArmijoParams) -> Result<Self> {
        let cfg = Self { gap_tol, max_iter, armijo, record_errors_against: None };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_reference(mut self, reference: ControlField) -> Self {
        self.record_errors_against = Some(reference);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gap_tol >= 0.0 && self.gap_tol.is_finite()) {
            return Err(GcgError::InvalidInput(format!("gap_tol must be >= 0, got {}", self.gap_tol)));
        }
        if self.max_iter == 0 {
            return Err(GcgError::InvalidInput("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { gap_tol: 1e-10, max_iter: 1000, armijo: ArmijoParams::default(), record_errors_against: None }
    }
}

/// State of iterate `k` and the step taken from it (`step = 0` on the last record).
#[derive(Debug, Clone, PartialEq)]
pub struct IterateRecord {
    pub k: usize,
    pub j_value: f64,
    pub gap: f64,
    pub step: f64,
    pub backtracks: u32,
    pub err_u: Option<f64>,
    pub err_v: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxIterReached,
    LineSearchFailed,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveStatus::Converged => "Converged",
            SolveStatus::MaxIterReached => "MaxIterReached",
            SolveStatus::LineSearchFailed => "LineSearchFailed",
        })
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub final_iterate: ControlField,
    /// Gradient of `f` at the final iterate (the adjoint state for PDE problems).
    pub final_gradient: ControlField,
    pub history: Vec<IterateRecord>,
    pub status: SolveStatus,
    /// `max_k max{‖u^k‖*, ‖v^k‖*}` over the run.
    pub max_dual_norm: f64,
    /// Floating-point slack used for this run.
    pub eps_fp: f64,
}

impl SolveResult {
    pub fn iterations(&self) -> usize {
        self.history.len() - 1
    }

    pub fn final_record(&self) -> &IterateRecord {
        self.history.last().expect("history is never empty")
    }
}

/// Runs `u^{k+1} = u^k + s^k (v^k − u^k)` until `Ψ(u^k) ≤ gap_tol`, the
/// iteration budget is spent, or the line search cannot make progress.
pub fn gcg_solve<P: CompositeProblem + ?Sized>(
    problem: &P,
    u0: ControlField,
    config: &SolverConfig,
) -> Result<SolveResult> {
    gcg_solve_observed(problem, u0, config, |_| {})
}

/// What an observer sees at iteration `k`, before the step is taken.
pub struct IterateView<'a> {
    pub k: usize,
    pub iterate: &'a ControlField,
    pub gradient: &'a ControlField,
    pub direction: &'a ControlField,
    pub gap: f64,
}

/// [`gcg_solve`] with a callback on every iterate, for diagnostics that need
/// the fields themselves rather than the history.
pub fn gcg_solve_observed<P: CompositeProblem + ?Sized>(
    problem: &P,
    u0: ControlField,
    config: &SolverConfig,
    mut observe: impl FnMut(&IterateView<'_>),
) -> Result<SolveResult> {
    config.validate()?;
    if !u0.all_finite() {
        return Err(GcgError::InvalidInput("initial control has non-finite values".into()));
    }
    if let Some(r) = &config.record_errors_against {
        u0.check_compatible(r)?;
    }
    let g0 = problem
        .nonsmooth(&u0)
        .ok_or_else(|| GcgError::InvalidInput("initial control is infeasible (g = +inf)".into()))?;
    let mut u = u0;
    let mut history = Vec::new();
    let mut max_dual_norm = 0.0f64;
    let mut slack = None;
    let mut g_u = g0;

    for k in 0.. {
        let (f_u, grad) = problem.smooth(&u)?;
        let j_u = f_u + g_u;
        let slack = *slack.get_or_insert_with(|| eps_fp(j_u));
        let v = problem.lmo(&grad)?;
        let g_v = problem
            .nonsmooth(&v)
            .ok_or_else(|| GcgError::Numerical("linear minimization oracle returned an infeasible point".into()))?;
        let gap = dual_gap(&u, &grad, g_u, &v, g_v, slack)?;
        max_dual_norm = max_dual_norm.max(problem.dual_norm(&u)).max(problem.dual_norm(&v));
        let (err_u, err_v) = match &config.record_errors_against {
            Some(r) => (Some(problem.dual_norm(&u.sub(r))), Some(problem.dual_norm(&v.sub(r)))),
            None => (None, None),
        };
        let mut record = IterateRecord { k, j_value: j_u, gap, step: 0.0, backtracks: 0, err_u, err_v };
        observe(&IterateView { k, iterate: &u, gradient: &grad, direction: &v, gap });

        let stop = if gap <= config.gap_tol {
            Some(SolveStatus::Converged)
        } else if k >= config.max_iter {
            Some(SolveStatus::MaxIterReached)
        } else {
            None
        };
        if let Some(status) = stop {
            history.push(record);
            return Ok(SolveResult {
                final_iterate: u,
                final_gradient: grad,
                history,
                status,
                max_dual_norm,
                eps_fp: slack,
            });
        }

        match armijo_step(&u, &v, gap, problem, &config.armijo) {
            Ok(st) => {
                record.step = st.step;
                record.backtracks = st.backtracks;
                history.push(record);
                u = st.iterate;
                g_u = problem
                    .nonsmooth(&u)
                    .ok_or_else(|| GcgError::Numerical("accepted step left the feasible set".into()))?;
            }
            Err(GcgError::LineSearchFailed { backtracks, .. }) => {
                record.backtracks = backtracks;
                history.push(record);
                return Ok(SolveResult {
                    final_iterate: u,
                    final_gradient: grad,
                    history,
                    status: SolveStatus::LineSearchFailed,
                    max_dual_norm,
                    eps_fp: slack,
                });
            }
            Err(e) => return Err(e),
        }
    }
    unreachable!("the iteration loop only exits by returning")
}
