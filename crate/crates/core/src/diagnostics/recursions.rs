//! Extremal sequences of the two recursion lemmas behind the rate theorems,
//! together with checks of the bounds they are supposed to satisfy.

use crate::diagnostics::bounds::sublinear_constants;
use crate::error::{GcgError, Result};

/// `h₀ = 1`, `h_{k+1} = h_k − q h_k²`.
pub fn quadratic_recursion(q: f64, steps: usize) -> Result<Vec<f64>> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(GcgError::InvalidInput(format!("q must lie in (0, 1], got {q}")));
    }
    let mut h = Vec::with_capacity(steps + 1);
    h.push(1.0);
    for k in 0..steps {
        let x = h[k];
        h.push(x - q * x * x);
    }
    Ok(h)
}

/// First index where `h_k > 1/(1 + qk)`, if any.
pub fn first_quadratic_violation(h: &[f64], q: f64) -> Option<usize> {
    h.iter().enumerate().position(|(k, x)| *x > 1.0 / (1.0 + q * k as f64))
}

#[derive(Debug, Clone)]
pub struct PowerRecursion {
    pub sequence: Vec<f64>,
    pub n: f64,
    pub m: f64,
    pub first_violation: Option<usize>,
    /// First violation of the bound with the literal constant, when it is real.
    pub first_violation_literal: Option<usize>,
}

/// Iterates `h_{k+1} = max{δ, 1 − C h_k^β} h_k` and checks
/// `h_k ≤ M / (k + n)^{1/β}`.
pub fn power_recursion(delta: f64, c: f64, exponent_beta: f64, h0: f64, steps: usize) -> Result<PowerRecursion> {
    let sc = sublinear_constants(delta, exponent_beta, c, h0)?;
    let m = sc
        .m
        .ok_or_else(|| GcgError::InvalidInput(format!("bound constant overflows for C = {c}, beta = {exponent_beta}")))?;
    let mut seq = Vec::with_capacity(steps + 1);
    seq.push(h0);
    for k in 0..steps {
        let x: f64 = seq[k];
        seq.push((delta.max(1.0 - c * x.powf(exponent_beta))) * x);
    }
    let violation = |m: f64| {
        seq.iter()
            .enumerate()
            .position(|(k, x)| *x > m / (k as f64 + sc.n).powf(1.0 / exponent_beta) * (1.0 + 1e-12))
    };
    let first_violation = violation(m);
    let first_violation_literal = sc.m_literal.and_then(violation);
    Ok(PowerRecursion { sequence: seq, n: sc.n, m, first_violation, first_violation_literal })
}
