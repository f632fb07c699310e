//! Post-hoc checks and fits on a convergence history.

use crate::error::{GcgError, Result};
use crate::solver::IterateRecord;

/// Geometric envelopes are fit only on residuals at least this many times
/// the reference gap; below that the reference error dominates.
pub const REFERENCE_MARGIN: f64 = 100.0;

/// `r_j(u^k) = j(u^k) − j_ref` for each record.
pub fn residuals(history: &[IterateRecord], j_ref: f64) -> Vec<f64> {
    history.iter().map(|r| r.j_value - j_ref).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeCheck {
    pub holds: bool,
    pub first_violation: Option<usize>,
}

/// `r_k ≤ r_0 / (1 + q k) + slack` for every `k`.
pub fn check_envelope(residuals: &[f64], q: f64, slack: f64) -> EnvelopeCheck {
    let Some(&r0) = residuals.first() else {
        return EnvelopeCheck { holds: true, first_violation: None };
    };
    let first_violation = residuals
        .iter()
        .enumerate()
        .position(|(k, r)| *r > r0 / (1.0 + q * k as f64) + slack);
    EnvelopeCheck { holds: first_violation.is_none(), first_violation }
}

/// Ordinary least squares `y = a + b x`; returns `(a, b, r²)`.
pub fn linear_regression(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (my - slope * mx, slope, r2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub lambda_hat: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Fits `log r_k ≈ a + k log λ`. Points are `(k, r_k)`; residuals at or
/// below `floor` are dropped. Needs five usable points.
pub fn fit_rate(points: &[(usize, f64)], floor: f64) -> Result<RateFit> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, r)| *r > floor && r.is_finite())
        .map(|(k, r)| (*k as f64, r.ln()))
        .collect();
    if usable.len() < 5 {
        return Err(GcgError::InvalidInput(format!(
            "rate fit needs at least 5 residuals above {floor:e}, found {}",
            usable.len()
        )));
    }
    let (x, y): (Vec<f64>, Vec<f64>) = usable.into_iter().unzip();
    let (_, slope, r2) = linear_regression(&x, &y);
    Ok(RateFit { lambda_hat: slope.exp(), r_squared: r2, points: x.len() })
}

/// `(k, r_k)` pairs from the pre-stagnation part of a run: residuals above
/// `max(10·eps_fp, REFERENCE_MARGIN·reference_gap)`.
pub fn pre_stagnation_window(residuals: &[f64], eps_fp: f64, reference_gap: f64) -> Vec<(usize, f64)> {
    let floor = (10.0 * eps_fp).max(REFERENCE_MARGIN * reference_gap);
    residuals.iter().copied().enumerate().filter(|(_, r)| *r > floor).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KappaFit {
    Fitted { kappa: f64, r_squared: f64, points: usize },
    /// Every measure was zero: the growth bound holds for any exponent.
    Vacuous,
}

impl KappaFit {
    pub fn kappa(&self) -> Option<f64> {
        match self {
            KappaFit::Fitted { kappa, .. } => Some(*kappa),
            KappaFit::Vacuous => None,
        }
    }
}

/// Log-log slope of `measure(ε)` over the samples with nonzero measure.
/// Samples that already cover the whole domain (`measure ≥ total`) carry no
/// information about the exponent and are dropped as well; pass
/// `f64::INFINITY` to keep them.
pub fn fit_kappa(epsilons: &[f64], measures: &[f64], total: f64) -> Result<KappaFit> {
    if epsilons.len() != measures.len() {
        return Err(GcgError::DimensionMismatch { expected: epsilons.len(), got: measures.len() });
    }
    if measures.iter().all(|m| *m == 0.0) {
        return Ok(KappaFit::Vacuous);
    }
    let (x, y): (Vec<f64>, Vec<f64>) = epsilons
        .iter()
        .zip(measures)
        .filter(|(e, m)| **m > 0.0 && **m < total * (1.0 - 1e-12) && **e > 0.0)
        .map(|(e, m)| (e.ln(), m.ln()))
        .unzip();
    if x.len() < 4 {
        return Err(GcgError::InvalidInput(format!(
            "kappa fit needs 4 nonzero unsaturated measures, found {}",
            x.len()
        )));
    }
    let (_, slope, r2) = linear_regression(&x, &y);
    Ok(KappaFit::Fitted { kappa: slope, r_squared: r2, points: x.len() })
}

/// `ε = 2^{-16}, 2^{-15}, …, 2^{-4}`.
pub fn dyadic_epsilons() -> Vec<f64> {
    (4..=16).rev().map(|e| 2f64.powi(-e)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_geometric_fit() {
        let pts: Vec<(usize, f64)> = (0..20).map(|k| (k, 0.5f64.powi(k as i32))).collect();
        let f = fit_rate(&pts, 0.0).unwrap();
        assert!((f.lambda_hat - 0.5).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sublinear_fits_worse() {
        let geo: Vec<(usize, f64)> = (0..30).map(|k| (k, 0.8f64.powi(k as i32))).collect();
        let sub: Vec<(usize, f64)> = (0..30).map(|k| (k, 1.0 / (1.0 + k as f64))).collect();
        let a = fit_rate(&geo, 0.0).unwrap();
        let b = fit_rate(&sub, 0.0).unwrap();
        assert!(b.r_squared < a.r_squared - 0.05, "{} vs {}", b.r_squared, a.r_squared);
    }

    #[test]
    fn too_few_points() {
        let pts = vec![(0, 1.0), (1, 0.5), (2, 1e-20)];
        assert!(fit_rate(&pts, 1e-15).is_err());
    }

    #[test]
    fn exact_power_laws() {
        let eps = dyadic_epsilons();
        let lin: Vec<f64> = eps.iter().map(|e| 3.0 * e).collect();
        let half: Vec<f64> = eps.iter().map(|e| 3.0 * e.sqrt()).collect();
        let inf = f64::INFINITY;
        assert!((fit_kappa(&eps, &lin, inf).unwrap().kappa().unwrap() - 1.0).abs() < 1e-12);
        assert!((fit_kappa(&eps, &half, inf).unwrap().kappa().unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(fit_kappa(&eps, &vec![0.0; eps.len()], inf).unwrap(), KappaFit::Vacuous);
        let mut sparse = vec![0.0; eps.len()];
        sparse[12] = 1.0;
        assert!(fit_kappa(&eps, &sparse, inf).is_err());
    }

    #[test]
    fn saturated_bins_are_dropped() {
        let eps = dyadic_epsilons();
        let clipped: Vec<f64> = eps.iter().map(|e| (200.0 * e).min(0.5)).collect();
        let kept = fit_kappa(&eps, &clipped, 0.5).unwrap();
        assert!((kept.kappa().unwrap() - 1.0).abs() < 1e-12);
        assert!(fit_kappa(&eps, &clipped, f64::INFINITY).unwrap().kappa().unwrap() < 0.9);
    }

    #[test]
    fn envelope_equality_and_violation() {
        let q = 0.3;
        let r: Vec<f64> = (0..10).map(|k| 2.0 / (1.0 + q * k as f64)).collect();
        assert!(check_envelope(&r, q, 0.0).holds);
        let mut bad = r.clone();
        bad[4] *= 1.01;
        assert_eq!(check_envelope(&bad, q, 0.0).first_violation, Some(4));
    }

    #[test]
    fn epsilon_grid() {
        let e = dyadic_epsilons();
        assert_eq!(e.len(), 13);
        assert_eq!(e[0], 2f64.powi(-16));
        assert_eq!(e[12], 0.0625);
    }
}
