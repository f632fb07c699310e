//! Closed-form toy problems, useful for checking the solver by hand.

use crate::error::Result;
use crate::field::ControlField;
use crate::pde::norms::l1;
use crate::solver::problem::CompositeProblem;

/// `f(u) = ½ Σ mᵢ (uᵢ − c)²`, `g` = indicator of the box `[−1, 1]ⁿ`.
#[derive(Debug, Clone, Copy)]
pub struct ScalarBox {
    pub target: f64,
}

impl ScalarBox {
    pub fn new(target: f64) -> Self {
        Self { target }
    }
}

impl CompositeProblem for ScalarBox {
    fn smooth(&self, u: &ControlField) -> Result<(f64, ControlField)> {
        let r: Vec<f64> = u.values().iter().map(|x| x - self.target).collect();
        let grad = u.with_values(r)?;
        Ok((0.5 * grad.dot(&grad), grad))
    }

    fn nonsmooth(&self, u: &ControlField) -> Option<f64> {
        u.values().iter().all(|x| x.abs() <= 1.0).then_some(0.0)
    }

    fn lmo(&self, grad: &ControlField) -> Result<ControlField> {
        let v = grad
            .values()
            .iter()
            .map(|p| {
                if *p > 0.0 {
                    -1.0
                } else if *p < 0.0 {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        grad.with_values(v)
    }

    fn dual_norm(&self, u: &ControlField) -> f64 {
        l1(u)
    }
}
