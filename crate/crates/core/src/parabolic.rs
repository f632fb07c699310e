//! Heat-equation control with temporal group sparsity:
//!
//! `min ½∫‖y(t) − y_d(t)‖² dt + α∫‖u(t)‖ dt` subject to `‖u(t)‖_{L²(Ω)} ≤ M`,
//!
//! with `∂t y = aΔy + u`, `y(0) = 0`. Optimal controls vanish on whole time
//! intervals where `‖p̄(t)‖ < α` and sit on the ball boundary where it is larger.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{GcgError, Result};
use crate::field::ControlField;
use crate::pde::constants::heat_c_constant;
use crate::pde::grid::{Grid, SpaceTimeGrid};
use crate::pde::heat::HeatSolver;
use crate::pde::norms::{group_l1_time, l2, slice_l2_norms};
use crate::solver::problem::{quadratic_segment, CompositeProblem, SegmentFn};

/// Relative slack of the per-slice ball constraint.
pub const FEASIBILITY_SLACK: f64 = 1e-12;
/// Relative tolerance when classifying `‖u(t)‖` as `0` or `M`.
pub const STRUCTURE_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct ParabolicProblem {
    reg_alpha: f64,
    ball_radius: f64,
    target: ControlField,
    solver: HeatSolver,
}

impl ParabolicProblem {
    pub fn new(grid: SpaceTimeGrid, reg_alpha: f64, ball_radius: f64, conductivity: f64, target: Vec<f64>) -> Result<Self> {
        if !(reg_alpha >= 0.0 && reg_alpha.is_finite()) {
            return Err(GcgError::InvalidInput(format!("regularization weight must be >= 0, got {reg_alpha}")));
        }
        if !(ball_radius > 0.0 && ball_radius.is_finite()) {
            return Err(GcgError::InvalidInput(format!("ball radius must be > 0, got {ball_radius}")));
        }
        let target = ControlField::on_space_time(&grid, target)?;
        if !target.all_finite() {
            return Err(GcgError::InvalidInput("target state must be finite".into()));
        }
        let solver = HeatSolver::new(grid, conductivity)?;
        Ok(Self { reg_alpha, ball_radius, target, solver })
    }

    pub fn grid(&self) -> &SpaceTimeGrid {
        self.solver.grid()
    }

    pub fn reg_alpha(&self) -> f64 {
        self.reg_alpha
    }

    pub fn ball_radius(&self) -> f64 {
        self.ball_radius
    }

    pub fn conductivity(&self) -> f64 {
        self.solver.conductivity()
    }

    pub fn target(&self) -> &ControlField {
        &self.target
    }

    pub fn heat(&self) -> &HeatSolver {
        &self.solver
    }

    pub fn zero_control(&self) -> ControlField {
        self.target.zeros_like()
    }

    fn check(&self, u: &ControlField) -> Result<()> {
        if u.len() != self.grid().len() {
            return Err(GcgError::DimensionMismatch { expected: self.grid().len(), got: u.len() });
        }
        Ok(())
    }

    pub fn state(&self, u: &ControlField) -> Result<ControlField> {
        self.check(u)?;
        self.solver.forward(u)
    }

    fn residual(&self, u: &ControlField) -> Result<ControlField> {
        Ok(self.state(u)?.sub(&self.target))
    }

    /// `f = ½ Σ_m τ‖yᵐ − y_dᵐ‖²` and its gradient, the discrete adjoint state.
    pub fn f_and_grad(&self, u: &ControlField) -> Result<(f64, ControlField)> {
        let r = self.residual(u)?;
        let f = 0.5 * r.dot(&r);
        Ok((f, self.solver.adjoint(&r)?))
    }

    pub fn g_eval(&self, u: &ControlField) -> Option<f64> {
        let cap = self.ball_radius * (1.0 + FEASIBILITY_SLACK);
        slice_l2_norms(u)
            .iter()
            .all(|n| *n <= cap)
            .then(|| self.reg_alpha * group_l1_time(u))
    }

    /// Slicewise `−M p(t)/‖p(t)‖` where `‖p(t)‖ ≥ α`, else `0`.
    /// A zero slice always maps to zero.
    pub fn lmo_parabolic(&self, p: &ControlField) -> Result<ControlField> {
        self.check(p)?;
        let n = self.grid().space().len();
        let norms = slice_l2_norms(p);
        let mut v = vec![0.0; p.len()];
        for (m, nrm) in norms.iter().enumerate() {
            if *nrm >= self.reg_alpha && *nrm > 0.0 {
                let c = -self.ball_radius / nrm;
                for (o, pi) in v[m * n..(m + 1) * n].iter_mut().zip(&p.values()[m * n..(m + 1) * n]) {
                    *o = c * pi;
                }
            }
        }
        p.with_values(v)
    }

    pub fn time_profile(&self, u: &ControlField, p: &ControlField) -> Result<TimeProfile> {
        self.check(u)?;
        self.check(p)?;
        Ok(TimeProfile { tau: self.grid().tau(), u_norms: slice_l2_norms(u), p_norms: slice_l2_norms(p) })
    }

    /// τ-weighted measure of slices with `|‖p(t)‖ − α| ≤ ε`.
    pub fn growth_measure_time(&self, p: &ControlField, eps: f64) -> Result<f64> {
        self.check(p)?;
        if !(eps > 0.0) {
            return Err(GcgError::InvalidInput(format!("eps must be positive, got {eps}")));
        }
        let tau = self.grid().tau();
        Ok(slice_l2_norms(p).iter().filter(|n| (*n - self.reg_alpha).abs() <= eps).count() as f64 * tau)
    }

    /// `L_{u⁰} = c²` with `c` the exact `L¹(I;L²) → L²(Q)` constant of the solution operator.
    pub fn lipschitz_estimate(&self) -> f64 {
        let c = heat_c_constant(&self.solver);
        c * c
    }

    /// Uniform draw of each time slice from the `L²` ball of radius `M`.
    pub fn random_feasible_control(&self, rng: &mut impl Rng) -> ControlField {
        let space = self.grid().space();
        let n = space.len();
        let w = space.cell_measure();
        let mut vals = Vec::with_capacity(self.grid().len());
        for _ in 0..self.grid().nt() {
            let dir: Vec<f64> = (0..n).map(|_| standard_normal(rng)).collect();
            let nrm = (w * dir.iter().map(|x| x * x).sum::<f64>()).sqrt();
            let radius = self.ball_radius * rng.gen::<f64>().powf(1.0 / n as f64);
            let c = if nrm > 0.0 { radius / nrm } else { 0.0 };
            vals.extend(dir.iter().map(|x| c * x));
        }
        self.target.with_values(vals).expect("layout matches")
    }

    /// `(⟨p̄, u − ū⟩ + g(u) − g(ū)) / ‖u − ū‖^q_{L¹(I;L²)}`; `None` when `u`
    /// is infeasible or indistinguishable from `ū`.
    pub fn first_order_growth_ratio(&self, ubar: &ControlField, pbar: &ControlField, u: &ControlField, q: f64) -> Option<f64> {
        let gu = self.g_eval(u)?;
        let gbar = self.g_eval(ubar)?;
        let d = u.sub(ubar);
        let dist = group_l1_time(&d);
        if dist <= 1e-12 * self.ball_radius * self.grid().horizon() {
            return None;
        }
        Some((pbar.dot(&d) + gu - gbar) / dist.powf(q))
    }
}

impl CompositeProblem for ParabolicProblem {
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
        self.lmo_parabolic(grad)
    }

    fn dual_norm(&self, u: &ControlField) -> f64 {
        group_l1_time(u)
    }

    fn smooth_on_segment<'a>(&'a self, u: &'a ControlField, v: &'a ControlField) -> Result<SegmentFn<'a>> {
        let r = self.residual(u)?;
        let w = self.state(&v.sub(u))?;
        Ok(quadratic_segment(r, w))
    }
}

/// Per-slice `‖u(t_m)‖` and `‖p(t_m)‖`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeProfile {
    pub tau: f64,
    pub u_norms: Vec<f64>,
    pub p_norms: Vec<f64>,
}

impl TimeProfile {
    /// τ-measure fraction of slices with `‖u(t)‖ ∈ {0, M}`.
    pub fn zero_or_radius_fraction(&self, radius: f64) -> f64 {
        let tol = STRUCTURE_TOL * radius;
        let hits = self.u_norms.iter().filter(|n| n.abs() <= tol || (*n - radius).abs() <= tol).count();
        hits as f64 / self.u_norms.len() as f64
    }

    /// Whether `‖u(t)‖` vanishes on every slice where `‖p(t)‖ < α`.
    pub fn vanishes_below_threshold(&self, alpha: f64, radius: f64) -> bool {
        let tol = STRUCTURE_TOL * radius;
        self.u_norms.iter().zip(&self.p_norms).all(|(u, p)| *p >= alpha || *u <= tol)
    }
}

/// Infimum over random `‖v‖ ≤ 1` of `(‖p‖ − (p,v)) / (2‖p‖‖u − v‖²)` with
/// `u = p/‖p‖`. Draws with `‖u − v‖ ≤ 1e-8` are skipped.
pub fn power_convexity_check(p: &ControlField, trials: usize, seed: u64) -> Result<f64> {
    let pn = l2(p);
    if !(pn > 0.0) {
        return Err(GcgError::InvalidInput("power convexity check needs p != 0".into()));
    }
    let unit = p.scaled(1.0 / pn);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = p.len();
    let mut best = f64::INFINITY;
    for t in 0..trials {
        let v = if t == 0 {
            unit.scaled(-1.0)
        } else {
            let dir: Vec<f64> = (0..dim).map(|_| standard_normal(&mut rng)).collect();
            let dir = p.with_values(dir)?;
            let r: f64 = rng.gen::<f64>();
            dir.scaled(r / l2(&dir))
        };
        let diff = l2(&unit.sub(&v));
        if diff <= 1e-8 {
            continue;
        }
        let ratio = (pn - p.dot(&v)) / (2.0 * pn * diff * diff);
        best = best.min(ratio);
    }
    Ok(best)
}

fn standard_normal(rng: &mut impl Rng) -> f64 {
    // Box-Muller
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParabolicExample {
    /// Unit square, `T = 1`, `a = 0.7`, weight `0.0035`, `M = 0.8`.
    Square,
    /// One-dimensional variant of the same setting for cheap runs.
    Line,
}

impl ParabolicExample {
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "parabolic-ex" => Ok(Self::Square),
            "parabolic-ex-1d" => Ok(Self::Line),
            other => Err(GcgError::UnknownProblem(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Square => "parabolic-ex",
            Self::Line => "parabolic-ex-1d",
        }
    }

    pub fn build(&self, nx: usize, nt: usize) -> Result<ParabolicProblem> {
        let (space, yd): (Grid, fn(f64, f64, f64) -> f64) = match self {
            Self::Square => (Grid::square(nx)?, |x1, x2, t| {
                (2.0 * PI * x1).sin() * (2.0 * PI * x2).sin() * (PI * t).sin() * (2.0 * x1).exp() / 6.0
            }),
            Self::Line => (Grid::line(nx)?, |x1, _, t| (2.0 * PI * x1).sin() * (PI * t).sin() * (2.0 * x1).exp() / 6.0),
        };
        let grid = SpaceTimeGrid::new(space, nt, 1.0)?;
        let target = grid.sample(yd);
        ParabolicProblem::new(grid, 0.0035, 0.8, 0.7, target)
    }
}

pub fn make_example(name: &str, nx: usize, nt: usize) -> Result<ParabolicProblem> {
    ParabolicExample::from_name(name)?.build(nx, nt)
}
