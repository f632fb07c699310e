//! Elliptic control with `L¹` cost and box constraints:
//!
//! `min ½‖Ku − ŷ_d‖²_{L²} + β‖u‖_{L¹}` subject to `u_a ≤ u ≤ u_b`,
//!
//! where `K` solves `−Δy = u` with homogeneous Dirichlet data. Minimizers take
//! only the values `{u_a, 0, u_b}` wherever `|p̄| ≠ β`.

use std::f64::consts::PI;

use crate::error::{GcgError, Result};
use crate::field::ControlField;
use crate::pde::constants::estimate_c_constant;
use crate::pde::grid::Grid;
use crate::pde::norms::l1;
use crate::pde::operator::{assemble_laplacian, DiscreteOperator};
use crate::solver::problem::{quadratic_segment, CompositeProblem, SegmentFn};

/// Relative tolerance when classifying a nodal value as `u_a`, `0` or `u_b`.
pub const STRUCTURE_TOL: f64 = 1e-6;
/// Relative slack of the box feasibility test.
pub const FEASIBILITY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct EllipticProblem {
    grid: Grid,
    beta: f64,
    lower: ControlField,
    upper: ControlField,
    target: ControlField,
    operator: DiscreteOperator,
    scale: f64,
}

impl EllipticProblem {
    /// `target` is the already shifted `ŷ_d = y_d − Kh`.
    pub fn new(grid: Grid, beta: f64, lower: Vec<f64>, upper: Vec<f64>, target: Vec<f64>) -> Result<Self> {
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(GcgError::InvalidInput(format!("beta must be >= 0, got {beta}")));
        }
        let lower = ControlField::on_grid(&grid, lower)?;
        let upper = ControlField::on_grid(&grid, upper)?;
        let target = ControlField::on_grid(&grid, target)?;
        if let Some(i) = (0..grid.len()).find(|&i| !(lower.values()[i] <= 0.0 && upper.values()[i] >= 0.0)) {
            return Err(GcgError::InvalidInput(format!(
                "bounds must satisfy u_a <= 0 <= u_b (node {i}: [{}, {}])",
                lower.values()[i],
                upper.values()[i]
            )));
        }
        if !target.all_finite() {
            return Err(GcgError::InvalidInput("target state must be finite".into()));
        }
        let scale = lower
            .values()
            .iter()
            .chain(upper.values())
            .fold(0.0f64, |m, x| m.max(x.abs()));
        let scale = if scale > 0.0 { scale } else { 1.0 };
        let operator = assemble_laplacian(&grid)?;
        Ok(Self { grid, beta, lower, upper, target, operator, scale })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn lower(&self) -> &ControlField {
        &self.lower
    }

    pub fn upper(&self) -> &ControlField {
        &self.upper
    }

    pub fn target(&self) -> &ControlField {
        &self.target
    }

    pub fn operator(&self) -> &DiscreteOperator {
        &self.operator
    }

    /// Largest bound magnitude; the unit for feasibility and structure tolerances.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn zero_control(&self) -> ControlField {
        self.target.zeros_like()
    }

    fn check(&self, u: &ControlField) -> Result<()> {
        if u.len() != self.grid.len() {
            return Err(GcgError::DimensionMismatch { expected: self.grid.len(), got: u.len() });
        }
        Ok(())
    }

    /// `y = Ku`.
    pub fn state(&self, u: &ControlField) -> Result<ControlField> {
        self.check(u)?;
        u.with_values(self.operator.solve(u.values())?)
    }

    fn residual(&self, u: &ControlField) -> Result<ControlField> {
        let y = self.state(u)?;
        Ok(y.sub(&self.target))
    }

    /// `f = ½‖Ku − ŷ_d‖²` and `∇f = p = K(Ku − ŷ_d)`.
    pub fn f_and_grad(&self, u: &ControlField) -> Result<(f64, ControlField)> {
        let r = self.residual(u)?;
        let f = 0.5 * r.dot(&r);
        let p = r.with_values(self.operator.solve(r.values())?)?;
        Ok((f, p))
    }

    pub fn g_eval(&self, u: &ControlField) -> Option<f64> {
        let slack = FEASIBILITY_SLACK * self.scale;
        let feasible = u
            .values()
            .iter()
            .zip(self.lower.values().iter().zip(self.upper.values()))
            .all(|(x, (a, b))| *x >= a - slack && *x <= b + slack);
        feasible.then(|| self.beta * l1(u))
    }

    /// Nodewise `u_a` where `p ≥ β`, `u_b` where `p ≤ −β`, else `0`.
    pub fn lmo_elliptic(&self, p: &ControlField) -> Result<ControlField> {
        self.check(p)?;
        let v = p
            .values()
            .iter()
            .zip(self.lower.values().iter().zip(self.upper.values()))
            .map(|(pi, (a, b))| {
                if *pi >= self.beta {
                    *a
                } else if *pi <= -self.beta {
                    *b
                } else {
                    0.0
                }
            })
            .collect();
        p.with_values(v)
    }

    /// Optimality structure of a (converged) control.
    pub fn structure_report(&self, u: &ControlField, p: &ControlField) -> Result<StructureReport> {
        self.check(u)?;
        self.check(p)?;
        let tol = STRUCTURE_TOL * self.scale;
        let close = |x: f64, y: f64| (x - y).abs() <= tol;
        let total = u.total_measure();
        let mut three = 0.0;
        let mut matches = 0.0;
        for i in 0..u.len() {
            let (x, a, b, m) = (u.values()[i], self.lower.values()[i], self.upper.values()[i], u.mass()[i]);
            if close(x, a) || close(x, 0.0) || close(x, b) {
                three += m;
            }
            let pi = p.values()[i];
            let ok = if pi > self.beta {
                close(x, a)
            } else if pi < -self.beta {
                close(x, b)
            } else if pi == self.beta {
                x >= a - tol && x <= tol
            } else if pi == -self.beta {
                x >= -tol && x <= b + tol
            } else {
                close(x, 0.0)
            };
            if ok {
                matches += m;
            }
        }
        Ok(StructureReport { three_valued: three / total, matches_adjoint: matches / total })
    }

    /// Measure of `{x : ||p(x)| − β| ≤ ε}`.
    pub fn growth_measure(&self, p: &ControlField, eps: f64) -> Result<f64> {
        self.check(p)?;
        if !(eps > 0.0) {
            return Err(GcgError::InvalidInput(format!("eps must be positive, got {eps}")));
        }
        Ok(p.values()
            .iter()
            .zip(p.mass())
            .filter(|(pi, _)| (pi.abs() - self.beta).abs() <= eps)
            .map(|(_, m)| m)
            .sum())
    }

    /// `L_{u⁰} = c²` with `c` the discrete `L¹ → L²` constant of `K`.
    pub fn lipschitz_estimate(&self) -> Result<f64> {
        let c = estimate_c_constant(&self.operator, self.target.mass())?;
        Ok(c * c)
    }
}

impl CompositeProblem for EllipticProblem {
    fn smooth(&self, u: &ControlField) -> Result<(f64, ControlField)> {
        self.f_and_grad(u)
    }

    fn smooth_value(&self, u: &ControlField) -> Result<f64> {
        let r = self.residual(u)?;
        Ok(0.5 * r.dot(&r))
    }

    fn nonsmooth(&self, u: &ControlField) -> Option<f64> {
        self.g_eval(u)
    }

    fn lmo(&self, grad: &ControlField) -> Result<ControlField> {
        self.lmo_elliptic(grad)
    }

    fn dual_norm(&self, u: &ControlField) -> f64 {
        l1(u)
    }

    fn smooth_on_segment<'a>(&'a self, u: &'a ControlField, v: &'a ControlField) -> Result<SegmentFn<'a>> {
        let r = self.residual(u)?;
        let w = self.state(&v.sub(u))?;
        Ok(quadratic_segment(r, w))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructureReport {
    /// Measure fraction where `u ∈ {u_a, 0, u_b}`.
    pub three_valued: f64,
    /// Measure fraction where `u` agrees with the case table driven by `p`.
    pub matches_adjoint: f64,
}

/// The two elliptic examples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EllipticExample {
    /// `u_a ≡ −30`, `u_b ≡ 30`, `β = 0.001`.
    StadlerEx1,
    /// Spatially varying upper bound, shifted target, `β = 0.002`.
    StadlerEx3,
}

impl EllipticExample {
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "stadler-ex1" => Ok(Self::StadlerEx1),
            "stadler-ex3" => Ok(Self::StadlerEx3),
            other => Err(GcgError::UnknownProblem(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::StadlerEx1 => "stadler-ex1",
            Self::StadlerEx3 => "stadler-ex3",
        }
    }

    pub fn build(&self, n: usize) -> Result<EllipticProblem> {
        let grid = Grid::square(n)?;
        match self {
            Self::StadlerEx1 => {
                let yd = grid.sample(|x1, x2| (2.0 * PI * x1).sin() * (2.0 * PI * x2).sin() * (2.0 * x1).exp() / 6.0);
                EllipticProblem::new(grid, 0.001, vec![-30.0; grid.len()], vec![30.0; grid.len()], yd)
            }
            Self::StadlerEx3 => {
                let yd = grid.sample(|x1, x2| (4.0 * PI * x1).sin() * (8.0 * PI * x2).cos() * (2.0 * x1).exp());
                let source = grid.sample(|x1, x2| 10.0 * (8.0 * PI * x1).cos() * (8.0 * PI * x2).sin());
                let op = assemble_laplacian(&grid)?;
                let kh = op.solve(&source)?;
                let target = yd.iter().zip(&kh).map(|(a, b)| a - b).collect();
                let upper = grid.sample(|x1, _| if x1 <= 0.25 { 0.0 } else { -5.0 + 20.0 * x1 });
                EllipticProblem::new(grid, 0.002, vec![-10.0; grid.len()], upper, target)
            }
        }
    }
}

pub fn make_example(name: &str, n: usize) -> Result<EllipticProblem> {
    EllipticExample::from_name(name)?.build(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> EllipticProblem {
        make_example("stadler-ex1", 6).unwrap()
    }

    #[test]
    fn exact_tracking_has_zero_cost_and_gradient() {
        let g = Grid::square(5).unwrap();
        let op = assemble_laplacian(&g).unwrap();
        let u: Vec<f64> = g.sample(|x, y| x - 2.0 * y);
        let yd = op.solve(&u).unwrap();
        let prob = EllipticProblem::new(g, 0.1, vec![-5.0; g.len()], vec![5.0; g.len()], yd).unwrap();
        let (f, p) = prob.f_and_grad(&ControlField::on_grid(&g, u).unwrap()).unwrap();
        assert!(f < 1e-28);
        assert!(p.values().iter().all(|x| x.abs() < 1e-14));
    }

    #[test]
    fn g_on_feasible_and_infeasible_points() {
        let prob = small();
        assert_eq!(prob.g_eval(&prob.zero_control()), Some(0.0));
        let ub = prob.upper().clone();
        let g = prob.g_eval(&ub).unwrap();
        assert!((g - 0.001 * l1(&ub)).abs() < 1e-15);
        let mut bad = ub.clone();
        bad.values_mut()[3] = 30.001;
        assert_eq!(prob.g_eval(&bad), None);
    }

    #[test]
    fn lmo_case_table() {
        let prob = small();
        let p0 = prob.zero_control();
        assert!(prob.lmo_elliptic(&p0).unwrap().values().iter().all(|v| *v == 0.0));

        let g = Grid::square(1).unwrap();
        let prob = EllipticProblem::new(g, 0.3, vec![-2.0], vec![4.0], vec![0.0]).unwrap();
        let at = |p: f64| prob.lmo_elliptic(&ControlField::on_grid(&g, vec![p]).unwrap()).unwrap().values()[0];
        assert_eq!(at(0.5), -2.0);
        assert_eq!(at(0.3), -2.0);
        assert_eq!(at(-0.3), 4.0);
        assert_eq!(at(-0.7), 4.0);
        assert_eq!(at(0.29), 0.0);
    }

    #[test]
    fn structure_of_lmo_output_and_midpoint() {
        let prob = small();
        let p = prob.target().scaled(0.01);
        let v = prob.lmo_elliptic(&p).unwrap();
        let rep = prob.structure_report(&v, &p).unwrap();
        assert_eq!(rep.three_valued, 1.0);
        assert_eq!(rep.matches_adjoint, 1.0);
        let g = Grid::square(3).unwrap();
        let asym = EllipticProblem::new(g, 0.1, vec![-1.0; 9], vec![3.0; 9], vec![0.0; 9]).unwrap();
        let mid = asym.lower().lerp(asym.upper(), 0.5);
        assert_eq!(asym.structure_report(&mid, &mid).unwrap().three_valued, 0.0);
    }

    #[test]
    fn growth_measure_limits() {
        let prob = small();
        let p = prob.zero_control();
        assert_eq!(prob.growth_measure(&p, 1e-4).unwrap(), 0.0);
        let total = p.total_measure();
        assert!((prob.growth_measure(&prob.target().clone(), 1e9).unwrap() - total).abs() < 1e-15);
        assert!(prob.growth_measure(&p, 0.0).is_err());
    }

    #[test]
    fn example_parameters() {
        let e1 = make_example("stadler-ex1", 8).unwrap();
        assert_eq!(e1.beta(), 0.001);
        for (a, b) in e1.lower().values().iter().zip(e1.upper().values()) {
            assert_eq!(b - a, 60.0);
        }
        let e3 = make_example("stadler-ex3", 8).unwrap();
        assert_eq!(e3.beta(), 0.002);
        assert!(e3.lower().values().iter().all(|a| *a == -10.0));
        assert!(e3.upper().values().iter().all(|b| *b >= 0.0));
        assert!(matches!(make_example("nope", 4), Err(GcgError::UnknownProblem(_))));
    }

    #[test]
    fn segment_matches_direct_evaluation() {
        let prob = small();
        let u = prob.zero_control();
        let v = prob.upper().scaled(0.5);
        let seg = prob.smooth_on_segment(&u, &v).unwrap();
        for s in [0.0, 0.25, 1.0] {
            let direct = prob.smooth_value(&u.lerp(&v, s)).unwrap();
            assert!((seg(s).unwrap() - direct).abs() <= 1e-13 * (1.0 + direct));
        }
    }
}
