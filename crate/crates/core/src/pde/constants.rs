//! Computable surrogates for the `L¹ → L²` bound of the solution operators.

use crate::error::{GcgError, Result};
use crate::pde::heat::HeatSolver;
use crate::pde::operator::DiscreteOperator;

/// Largest `‖K e_j‖_{L²} / m_j` over all nodes, where `K = op⁻¹`.
///
/// The `L¹` unit ball is the convex hull of the atoms `±e_j / m_j`, so this
/// column maximum is the exact discrete constant in `‖Ku‖_{L²} ≤ c‖u‖_{L¹}`.
/// One solve per node.
pub fn estimate_c_constant(op: &DiscreteOperator, mass: &[f64]) -> Result<f64> {
    if mass.len() != op.len() {
        return Err(GcgError::DimensionMismatch { expected: op.len(), got: mass.len() });
    }
    let mut e = vec![0.0; op.len()];
    let mut best = 0.0f64;
    for j in 0..op.len() {
        e[j] = 1.0;
        let col = op.solve(&e)?;
        e[j] = 0.0;
        let l2 = col.iter().zip(mass).map(|(c, m)| m * c * c).sum::<f64>().sqrt();
        best = best.max(l2 / mass[j]);
    }
    Ok(best)
}

/// Exact discrete constant in `‖Ku‖_{L²(Q)} ≤ c ‖u‖_{L¹(I;L²(Ω))}` for the
/// implicit Euler solution operator.
///
/// An atom at time slot `m` with spatial profile `w` produces
/// `yᵐ' = τ B^{-(m'-m+1)} w`, so the ratio is maximised by the first slot and
/// the lowest eigenvector of `B = I + τaA`: `c² = τ Σ_{j=1}^{nt} μ^{2j}` with
/// `μ = 1/(1 + τ a λ_min(A))`.
pub fn heat_c_constant(solver: &HeatSolver) -> f64 {
    let st = solver.grid();
    let tau = st.tau();
    let mu = 1.0 / (1.0 + tau * solver.conductivity() * st.space().min_laplacian_eigenvalue());
    let mu2 = mu * mu;
    let mut acc = 0.0;
    let mut pow = 1.0;
    for _ in 0..st.nt() {
        pow *= mu2;
        acc += pow;
    }
    (tau * acc).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ControlField;
    use crate::pde::grid::{Grid, SpaceTimeGrid};
    use crate::pde::norms::{group_l1_time, l2};
    use crate::pde::operator::assemble_laplacian;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_node_constant() {
        let g = Grid::square(1).unwrap();
        let op = assemble_laplacian(&g).unwrap();
        let c = estimate_c_constant(&op, &[g.cell_measure()]).unwrap();
        assert!((c - 0.125).abs() < 1e-15);
    }

    #[test]
    fn permutation_invariant() {
        // the columns of the operator are permuted along with the mass,
        // so the max over a reversed scan must coincide
        let g = Grid::square(4).unwrap();
        let op = assemble_laplacian(&g).unwrap();
        let mass = vec![g.cell_measure(); g.len()];
        let c = estimate_c_constant(&op, &mass).unwrap();
        let mut ratios = Vec::new();
        for j in (0..g.len()).rev() {
            let mut e = vec![0.0; g.len()];
            e[j] = 1.0;
            let col = op.solve(&e).unwrap();
            ratios.push(col.iter().map(|x| mass[0] * x * x).sum::<f64>().sqrt() / mass[j]);
        }
        let rev = ratios.into_iter().fold(0.0, f64::max);
        assert_eq!(c, rev);
    }

    #[test]
    fn heat_constant_bounds_random_controls_and_is_attained() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = Grid::square(4).unwrap();
        let st = SpaceTimeGrid::new(g, 6, 1.0).unwrap();
        let solver = HeatSolver::new(st, 0.7).unwrap();
        let c = heat_c_constant(&solver);
        for _ in 0..50 {
            let u = ControlField::on_space_time(&st, (0..st.len()).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .unwrap();
            let y = solver.forward(&u).unwrap();
            assert!(l2(&y) <= c * group_l1_time(&u) * (1.0 + 1e-12));
        }
        // first-slot atom along the lowest sine mode
        let pi = std::f64::consts::PI;
        let mode = g.sample(|x, y| (pi * x).sin() * (pi * y).sin());
        let mut vals = vec![0.0; st.len()];
        vals[..g.len()].copy_from_slice(&mode);
        let u = ControlField::on_space_time(&st, vals).unwrap();
        let ratio = l2(&solver.forward(&u).unwrap()) / group_l1_time(&u);
        assert!((ratio - c).abs() < 1e-12 * c);
    }
}
