//! Quasi-Armijo-Goldstein backtracking: `s = γⁿ` with the smallest `n ≥ 0`
//! such that `α γⁿ Ψ(u) ≤ j(u) − j(u + γⁿ(v − u))`.

use crate::error::{ensure_finite, GcgError, Result};
use crate::field::ControlField;
use crate::solver::problem::CompositeProblem;

pub const DEFAULT_MAX_BACKTRACKS: u32 = 5000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmijoParams {
    alpha: f64,
    gamma: f64,
    max_backtracks: u32,
}

impl ArmijoParams {
    pub fn new(alpha: f64, gamma: f64, max_backtracks: u32) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 0.5) {
            return Err(GcgError::InvalidInput(format!("armijo alpha must lie in (0, 1/2], got {alpha}")));
        }
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(GcgError::InvalidInput(format!("armijo gamma must lie in (0, 1), got {gamma}")));
        }
        if max_backtracks == 0 {
            return Err(GcgError::InvalidInput("max_backtracks must be at least 1".into()));
        }
        Ok(Self { alpha, gamma, max_backtracks })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn max_backtracks(&self) -> u32 {
        self.max_backtracks
    }

    /// `γⁿ`
    pub fn step_for(&self, n: u32) -> f64 {
        self.gamma.powi(n as i32)
    }
}

impl Default for ArmijoParams {
    /// `α = 0.5`, `γ = 0.99`.
    fn default() -> Self {
        Self { alpha: 0.5, gamma: 0.99, max_backtracks: DEFAULT_MAX_BACKTRACKS }
    }
}

#[derive(Debug, Clone)]
pub struct ArmijoStep {
    pub step: f64,
    pub backtracks: u32,
    pub j_new: f64,
    pub iterate: ControlField,
}

/// Searches `n = 0, 1, …, max_backtracks` for the first step satisfying the
/// sufficient-decrease condition. Points where `g` is infinite never satisfy it.
pub fn armijo_step<P: CompositeProblem + ?Sized>(
    u: &ControlField,
    v: &ControlField,
    gap: f64,
    problem: &P,
    params: &ArmijoParams,
) -> Result<ArmijoStep> {
    ensure_finite("gap", gap)?;
    if gap <= 0.0 {
        return Err(GcgError::InvalidInput(format!("line search needs a positive gap, got {gap}")));
    }
    u.check_compatible(v)?;
    let g_u = problem
        .nonsmooth(u)
        .ok_or_else(|| GcgError::InvalidInput("line search started from an infeasible point".into()))?;
    let f_seg = problem.smooth_on_segment(u, v)?;
    let j_u = f_seg(0.0)? + g_u;
    for n in 0..=params.max_backtracks {
        let s = params.step_for(n);
        let trial = u.lerp(v, s);
        let Some(g_s) = problem.nonsmooth(&trial) else { continue };
        let j_s = f_seg(s)? + g_s;
        if params.alpha * s * gap <= j_u - j_s {
            return Ok(ArmijoStep { step: s, backtracks: n, j_new: j_s, iterate: trial });
        }
    }
    Err(GcgError::LineSearchFailed { backtracks: params.max_backtracks, gap })
}
