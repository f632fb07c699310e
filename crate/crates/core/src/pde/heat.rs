//! Implicit Euler for `∂t y = aΔy + u`, `y(0) = 0`, and its exact discrete
//! transpose.

use crate::error::{GcgError, Result};
use crate::field::ControlField;
use crate::pde::grid::SpaceTimeGrid;
use crate::pde::operator::DiscreteOperator;

/// Time stepper with the factored step matrix `I + τ a A` cached.
#[derive(Debug, Clone)]
pub struct HeatSolver {
    grid: SpaceTimeGrid,
    conductivity: f64,
    step: DiscreteOperator,
}

impl HeatSolver {
    pub fn new(grid: SpaceTimeGrid, conductivity: f64) -> Result<Self> {
        if !(conductivity > 0.0 && conductivity.is_finite()) {
            return Err(GcgError::InvalidInput(format!("conductivity must be positive, got {conductivity}")));
        }
        let step = DiscreteOperator::new(*grid.space(), 1.0, grid.tau() * conductivity)?;
        Ok(Self { grid, conductivity, step })
    }

    pub fn grid(&self) -> &SpaceTimeGrid {
        &self.grid
    }

    pub fn conductivity(&self) -> f64 {
        self.conductivity
    }

    pub fn step_operator(&self) -> &DiscreteOperator {
        &self.step
    }

    fn check(&self, f: &ControlField) -> Result<()> {
        if f.len() != self.grid.len() {
            return Err(GcgError::DimensionMismatch { expected: self.grid.len(), got: f.len() });
        }
        Ok(())
    }

    /// `(I + τaA) yᵐ = yᵐ⁻¹ + τ uᵐ` for `m = 1..nt`, `y⁰ = 0`.
    pub fn forward(&self, u: &ControlField) -> Result<ControlField> {
        self.check(u)?;
        let n = self.grid.space().len();
        let tau = self.grid.tau();
        let mut out = Vec::with_capacity(u.len());
        let mut prev = vec![0.0; n];
        for src in u.values().chunks(n) {
            let rhs: Vec<f64> = prev.iter().zip(src).map(|(y, s)| y + tau * s).collect();
            let next = self.step.solve(&rhs)?;
            out.extend_from_slice(&next);
            prev = next;
        }
        u.with_values(out)
    }

    /// Transpose of [`forward`](Self::forward): `zᵐ = B⁻¹(rᵐ + zᵐ⁺¹)` backwards
    /// from `z^{nt+1} = 0`, returning `p = τ z`. Because the space-time
    /// weights are uniform this is also the adjoint in the weighted pairing.
    pub fn adjoint(&self, resid: &ControlField) -> Result<ControlField> {
        self.check(resid)?;
        let n = self.grid.space().len();
        let tau = self.grid.tau();
        let nt = self.grid.nt();
        let mut out = vec![0.0; resid.len()];
        let mut next = vec![0.0; n];
        for m in (0..nt).rev() {
            let r = &resid.values()[m * n..(m + 1) * n];
            let rhs: Vec<f64> = next.iter().zip(r).map(|(z, r)| z + r).collect();
            let z = self.step.solve(&rhs)?;
            for (o, zi) in out[m * n..(m + 1) * n].iter_mut().zip(&z) {
                *o = tau * zi;
            }
            next = z;
        }
        resid.with_values(out)
    }
}

pub fn heat_forward(u: &ControlField, grid: &SpaceTimeGrid, a: f64) -> Result<ControlField> {
    HeatSolver::new(*grid, a)?.forward(u)
}

pub fn heat_adjoint(resid: &ControlField, grid: &SpaceTimeGrid, a: f64) -> Result<ControlField> {
    HeatSolver::new(*grid, a)?.adjoint(resid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pde::grid::Grid;
    use crate::pde::norms::slice_l2_norms;
    use crate::pde::operator::solve_poisson;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(st: &SpaceTimeGrid, rng: &mut ChaCha8Rng) -> ControlField {
        ControlField::on_space_time(st, (0..st.len()).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
    }

    #[test]
    fn zero_source_stays_zero() {
        let st = SpaceTimeGrid::new(Grid::square(4).unwrap(), 5, 1.0).unwrap();
        let u = ControlField::on_space_time(&st, vec![0.0; st.len()]).unwrap();
        let y = heat_forward(&u, &st, 0.7).unwrap();
        assert!(y.values().iter().all(|v| *v == 0.0));
        let p = heat_adjoint(&u, &st, 0.7).unwrap();
        assert!(p.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn scalar_implicit_step() {
        let st = SpaceTimeGrid::new(Grid::square(1).unwrap(), 1, 1.0).unwrap();
        let u = ControlField::on_space_time(&st, vec![1.0]).unwrap();
        let y = heat_forward(&u, &st, 1.0).unwrap();
        assert!((y.values()[0] - 1.0 / 17.0).abs() < 1e-16);
        let p = heat_adjoint(&u, &st, 1.0).unwrap();
        assert_eq!(p.values(), y.values());
    }

    #[test]
    fn steady_source_approaches_poisson() {
        let g = Grid::square(5).unwrap();
        let a = 0.7;
        let st = SpaceTimeGrid::new(g, 400, 20.0).unwrap();
        let src: Vec<f64> = g.sample(|x, y| 1.0 + x - y);
        let mut vals = Vec::new();
        for _ in 0..st.nt() {
            vals.extend_from_slice(&src);
        }
        let u = ControlField::on_space_time(&st, vals).unwrap();
        let y = heat_forward(&u, &st, a).unwrap();
        let last = &y.values()[(st.nt() - 1) * g.len()..];
        let op = DiscreteOperator::new(g, 0.0, a).unwrap();
        let steady = solve_poisson(&op, &ControlField::on_grid(&g, src).unwrap()).unwrap();
        for (x, s) in last.iter().zip(steady.values()) {
            assert!((x - s).abs() < 1e-8 * s.abs().max(1e-3), "{x} vs {s}");
        }
    }

    #[test]
    fn adjoint_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let st = SpaceTimeGrid::new(Grid::square(6).unwrap(), 9, 1.0).unwrap();
        let solver = HeatSolver::new(st, 0.7).unwrap();
        for _ in 0..10 {
            let u = random_field(&st, &mut rng);
            let w = random_field(&st, &mut rng);
            let lhs = solver.forward(&u).unwrap().dot(&w);
            let rhs = u.dot(&solver.adjoint(&w).unwrap());
            let scale = u.dot(&u).sqrt() * w.dot(&w).sqrt();
            assert!((lhs - rhs).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn unconditionally_stable() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let st = SpaceTimeGrid::new(Grid::square(5).unwrap(), 12, 3.0).unwrap();
        let solver = HeatSolver::new(st, 2.0).unwrap();
        let u = random_field(&st, &mut rng);
        let y = solver.forward(&u).unwrap();
        let yn = slice_l2_norms(&y);
        let un = slice_l2_norms(&u);
        let mut prev = 0.0;
        for (m, (ym, um)) in yn.iter().zip(&un).enumerate() {
            assert!(*ym <= prev + st.tau() * um + 1e-14, "slot {m}");
            prev = *ym;
        }
    }
}
