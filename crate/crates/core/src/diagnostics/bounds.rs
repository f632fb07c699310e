//! Closed-form constants of the convergence bounds.

use crate::error::{GcgError, Result};

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(GcgError::InvalidInput(format!("{name} must be positive and finite, got {x}")))
    }
}

/// Rate constant of the sublinear envelope `r_k ≤ r_0 / (1 + q k)`:
/// `q = α min{(1−α) γ r_0 / (2 L M*²), 1}`.
pub fn envelope_q(r0: f64, alpha: f64, gamma: f64, lipschitz: f64, mstar: f64) -> Result<f64> {
    positive("r0", r0)?;
    positive("alpha", alpha)?;
    positive("gamma", gamma)?;
    positive("L", lipschitz)?;
    positive("M*", mstar)?;
    if alpha > 0.5 || gamma >= 1.0 {
        return Err(GcgError::InvalidInput(format!("need alpha <= 1/2 and gamma < 1, got {alpha}, {gamma}")));
    }
    Ok(alpha * ((1.0 - alpha) * gamma * r0 / (2.0 * lipschitz * mstar * mstar)).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearRate {
    pub lambda: f64,
    /// `λ < 1`; anything else means the supplied constants are inconsistent.
    pub contracting: bool,
}

/// `λ = max{1 − 2αγ(1−α)/(L c̄²), 1 − α}`.
pub fn linear_lambda(alpha: f64, gamma: f64, lipschitz: f64, cbar: f64) -> Result<LinearRate> {
    positive("alpha", alpha)?;
    positive("gamma", gamma)?;
    positive("L", lipschitz)?;
    positive("cbar", cbar)?;
    let first = 1.0 - 2.0 * alpha * gamma * (1.0 - alpha) / (lipschitz * cbar * cbar);
    let lambda = first.max(1.0 - alpha);
    Ok(LinearRate { lambda, contracting: lambda < 1.0 })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SublinearConstants {
    pub n: f64,
    /// Bound constant that makes `h_k ≤ M / (k + n)^{1/β}` hold for every
    /// sequence obeying the recursion (always real).
    pub m: Option<f64>,
    /// `max{h_0 n^{1/β}, 1 / (δ (β − (1−β)(2^β − 1) C)^{1/β})}` taken
    /// literally; `None` when the bracket is not positive. This value is
    /// too small in general (see the tests), it is kept for comparison.
    pub m_literal: Option<f64>,
}

/// Constants of the improved bound `h_k ≤ M / (k + n)^{1/β}` for sequences
/// with `h_{k+1} ≤ max{δ, 1 − C h_k^β} h_k`:
///
/// `n = (2 − (1/δ)^β) / ((1/δ)^β − 1)`,
/// `M = max{h_0 (n+1)^{1/β}, 1 / (δ ((β − (1−β)(2^β−1)) C)^{1/β})}`.
///
/// The second term has to scale like `C^{−1/β}`, which is what the recursion
/// forces; the first term covers the step from `k = 0` to `k = 1`, where the
/// contraction `δ` alone is not enough with this `n`.
pub fn sublinear_constants(delta: f64, exponent_beta: f64, c: f64, h0: f64) -> Result<SublinearConstants> {
    if !(0.5..1.0).contains(&delta) {
        return Err(GcgError::InvalidInput(format!("delta must lie in [1/2, 1), got {delta}")));
    }
    if !(exponent_beta > 0.0 && exponent_beta < 1.0) {
        return Err(GcgError::InvalidInput(format!("beta must lie in (0, 1), got {exponent_beta}")));
    }
    positive("C", c)?;
    if !(h0 >= 0.0 && h0.is_finite()) {
        return Err(GcgError::InvalidInput(format!("h0 must be >= 0, got {h0}")));
    }
    let inv = 1.0 / exponent_beta;
    let a = (1.0 / delta).powf(exponent_beta);
    let n = (2.0 - a) / (a - 1.0);
    let bracket = exponent_beta - (1.0 - exponent_beta) * (2f64.powf(exponent_beta) - 1.0);
    let m = (h0 * (n + 1.0).powf(inv)).max(1.0 / (delta * (bracket * c).powf(inv)));
    let literal = exponent_beta - (1.0 - exponent_beta) * (2f64.powf(exponent_beta) - 1.0) * c;
    let m_literal = (literal > 0.0).then(|| (h0 * n.powf(inv)).max(1.0 / (delta * literal.powf(inv))));
    Ok(SublinearConstants { n, m: Some(m).filter(|m| m.is_finite()), m_literal })
}

/// Residual/iterate coupling constants for a growth condition of order `q`:
/// `c₁ = θ^{−1/q}`, `c₂ = (L/θ)^{1/(q−1)} θ^{−1/(q(q−1))}`.
pub fn coupling_constants(theta: f64, lipschitz: f64, q: f64) -> Result<(f64, f64)> {
    positive("theta", theta)?;
    positive("L", lipschitz)?;
    if !(q > 1.0 && q.is_finite()) {
        return Err(GcgError::InvalidInput(format!("q must exceed 1, got {q}")));
    }
    let c1 = (1.0 / theta).powf(1.0 / q);
    let c2 = (lipschitz / theta).powf(1.0 / (q - 1.0)) * (1.0 / theta).powf(1.0 / (q * (q - 1.0)));
    Ok((c1, c2))
}

/// Everything the rate theorems need, assembled from measured problem data.
#[derive(Debug, Clone, PartialEq)]
pub struct RateConstants {
    pub q_env: f64,
    pub lambda: f64,
    pub delta: f64,
    pub exponent_beta: f64,
    pub c_rec: f64,
    pub n_rec: Option<f64>,
    pub m_rec: Option<f64>,
    pub c1: f64,
    pub c2: f64,
    pub cbar: f64,
    pub l_est: f64,
    pub mstar: f64,
    pub theta_hat: f64,
    pub q_growth: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct RateInputs {
    pub alpha: f64,
    pub gamma: f64,
    pub r0: f64,
    /// First residual `≤ 1`, used as the start of the improved sublinear bound.
    pub r_k: f64,
    pub l_est: f64,
    pub mstar: f64,
    pub theta_hat: f64,
    pub kappa: f64,
}

impl RateConstants {
    pub fn compute(inp: &RateInputs) -> Result<Self> {
        positive("kappa", inp.kappa)?;
        let q_growth = 1.0 + 1.0 / inp.kappa;
        let q_env = envelope_q(inp.r0, inp.alpha, inp.gamma, inp.l_est, inp.mstar)?;
        let (c1, c2) = coupling_constants(inp.theta_hat, inp.l_est, q_growth)?;
        let cbar = c1 + c2;
        let lambda = linear_lambda(inp.alpha, inp.gamma, inp.l_est, cbar)?.lambda;
        let delta = 1.0 - inp.alpha;
        let exponent_beta = 1.0 - 2.0 / (q_growth * (q_growth - 1.0));
        let c_rec = 2.0 * inp.alpha * inp.gamma * (1.0 - inp.alpha) / (inp.l_est * cbar * cbar);
        let (n_rec, m_rec) = if exponent_beta > 0.0 && exponent_beta < 1.0 {
            let sc = sublinear_constants(delta, exponent_beta, c_rec, inp.r_k)?;
            (Some(sc.n), sc.m)
        } else {
            (None, None)
        };
        Ok(Self {
            q_env,
            lambda,
            delta,
            exponent_beta,
            c_rec,
            n_rec,
            m_rec,
            c1,
            c2,
            cbar,
            l_est: inp.l_est,
            mstar: inp.mstar,
            theta_hat: inp.theta_hat,
            q_growth,
        })
    }
}
