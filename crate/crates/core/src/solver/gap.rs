use crate::error::{ensure_finite, GcgError, Result};
use crate::field::ControlField;

/// Slack on every "≥ 0" and descent assertion, relative to `|j(u⁰)| + 1`.
pub const EPS_FP_REL: f64 = 1e-12;

/// Absolute slack for a run whose initial objective is `j0`.
pub fn eps_fp(j0: f64) -> f64 {
    EPS_FP_REL * (j0.abs() + 1.0)
}

/// `Ψ(u) = ⟨∇f(u), u − v⟩ + g(u) − g(v)` for an oracle answer `v`.
///
/// Values in `[−slack, 0)` are rounding noise and clamp to zero; anything
/// more negative means `v` did not minimize the linearized problem.
pub fn dual_gap(
    u: &ControlField,
    grad: &ControlField,
    g_u: f64,
    v: &ControlField,
    g_v: f64,
    slack: f64,
) -> Result<f64> {
    u.check_compatible(grad)?;
    u.check_compatible(v)?;
    ensure_finite("g(u)", g_u)?;
    ensure_finite("g(v)", g_v)?;
    if !(u.all_finite() && grad.all_finite() && v.all_finite()) {
        return Err(GcgError::InvalidInput("non-finite field passed to dual_gap".into()));
    }
    let pairing: f64 = grad
        .values()
        .iter()
        .zip(u.values().iter().zip(v.values()))
        .zip(grad.mass())
        .map(|((p, (a, b)), m)| m * p * (a - b))
        .sum();
    let gap = pairing + g_u - g_v;
    if gap >= 0.0 {
        Ok(gap)
    } else if gap >= -slack {
        Ok(0.0)
    } else {
        Err(GcgError::NegativeGap { gap, slack })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_points_have_zero_gap() {
        let u = ControlField::plain(vec![0.3, -0.2]).unwrap();
        let p = ControlField::plain(vec![1.0, 2.0]).unwrap();
        assert_eq!(dual_gap(&u, &p, 0.7, &u, 0.7, 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn scalar_box_gap_by_hand() {
        // f = (u-1)²/2 at u = -1: grad = -2, oracle answer +1
        let u = ControlField::plain(vec![-1.0]).unwrap();
        let p = ControlField::plain(vec![-2.0]).unwrap();
        let v = ControlField::plain(vec![1.0]).unwrap();
        assert_eq!(dual_gap(&u, &p, 0.0, &v, 0.0, 1e-12).unwrap(), 4.0);
    }

    #[test]
    fn small_negative_clamps_large_negative_errors() {
        let u = ControlField::plain(vec![0.0]).unwrap();
        let p = ControlField::plain(vec![1.0]).unwrap();
        assert_eq!(dual_gap(&u, &p, 0.0, &u, 1e-14, 1e-12).unwrap(), 0.0);
        let err = dual_gap(&u, &p, 0.0, &u, 1e-3, 1e-12).unwrap_err();
        assert!(matches!(err, GcgError::NegativeGap { .. }));
    }

    #[test]
    fn non_finite_inputs_rejected() {
        let u = ControlField::plain(vec![0.0]).unwrap();
        let p = ControlField::plain(vec![f64::NAN]).unwrap();
        assert!(dual_gap(&u, &p, 0.0, &u, 0.0, 1e-12).is_err());
        assert!(dual_gap(&u, &u, f64::INFINITY, &u, 0.0, 1e-12).is_err());
    }
}
