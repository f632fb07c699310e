use crate::error::Result;
use crate::field::ControlField;

/// Smooth part of `j` restricted to the segment `s ↦ u + s(v − u)`.
pub type SegmentFn<'a> = Box<dyn Fn(f64) -> Result<f64> + 'a>;

/// A composite problem `min f(u) + g(u)`: `f` convex and smooth, `g` convex,
/// possibly nonsmooth and extended-valued.
///
/// Implementations must be read-only so the same problem can be solved from
/// several threads at once.
pub trait CompositeProblem {
    /// `f(u)` and its gradient in the mass-weighted pairing.
    fn smooth(&self, u: &ControlField) -> Result<(f64, ControlField)>;

    fn smooth_value(&self, u: &ControlField) -> Result<f64> {
        Ok(self.smooth(u)?.0)
    }

    /// `g(u)`, or `None` when `u` lies outside the domain of `g`.
    fn nonsmooth(&self, u: &ControlField) -> Option<f64>;

    /// A minimizer of `⟨grad, v⟩ + g(v)`. Always feasible.
    fn lmo(&self, grad: &ControlField) -> Result<ControlField>;

    /// The auxiliary norm in which `∇f` is Lipschitz-like.
    fn dual_norm(&self, u: &ControlField) -> f64;

    /// Evaluator for `f(u + s(v − u))`, `s ∈ [0, 1]`. The default rebuilds the
    /// point and calls [`smooth_value`](Self::smooth_value); quadratic
    /// problems override it to reuse two solves for the whole line search.
    fn smooth_on_segment<'a>(&'a self, u: &'a ControlField, v: &'a ControlField) -> Result<SegmentFn<'a>> {
        Ok(Box::new(move |s| self.smooth_value(&u.lerp(v, s))))
    }
}

/// `j(u) = f(u) + g(u)`, `None` when infeasible.
pub fn objective<P: CompositeProblem + ?Sized>(problem: &P, u: &ControlField) -> Result<Option<f64>> {
    match problem.nonsmooth(u) {
        Some(g) => Ok(Some(problem.smooth_value(u)? + g)),
        None => Ok(None),
    }
}

/// Half of a quadratic misfit `½‖r + s w‖²` where `r` and `w` are fixed.
/// Shared by the PDE problems whose state depends linearly on the control.
pub(crate) fn quadratic_segment<'a>(resid: ControlField, dir: ControlField) -> SegmentFn<'a> {
    let rr = resid.dot(&resid);
    let rw = resid.dot(&dir);
    let ww = dir.dot(&dir);
    Box::new(move |s| Ok(0.5 * (rr + s * (2.0 * rw + s * ww))))
}
