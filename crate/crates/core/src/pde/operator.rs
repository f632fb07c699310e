//! Dirichlet Laplacian on uniform grids, with a cached banded Cholesky factor.

use crate::error::{GcgError, Result};
use crate::field::ControlField;
use crate::pde::grid::{Dim, Grid};

/// Target relative residual of every linear solve.
pub const SOLVE_RTOL: f64 = 1e-12;

/// Symmetric positive definite operator `shift·I + scale·A`, where `A` is the
/// 5-point (3-point in 1D) Dirichlet stencil divided by `h²`.
///
/// The factorization is computed once at construction; the operator is
/// immutable afterwards and can be shared across threads.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    grid: Grid,
    shift: f64,
    scale: f64,
    chol: BandedCholesky,
}

impl DiscreteOperator {
    pub fn new(grid: Grid, shift: f64, scale: f64) -> Result<Self> {
        if !(scale > 0.0) || shift < 0.0 || !shift.is_finite() || !scale.is_finite() {
            return Err(GcgError::InvalidInput(format!(
                "operator needs scale > 0 and shift >= 0, got scale={scale}, shift={shift}"
            )));
        }
        let bw = match grid.dim() {
            Dim::One => 1,
            Dim::Two => grid.nx(),
        };
        let mut chol = BandedCholesky::zeros(grid.len(), bw);
        for i in 0..grid.len() {
            for (j, a) in stencil_row(&grid, shift, scale, i) {
                if j <= i {
                    chol.set(i, j, a);
                }
            }
        }
        chol.factor()?;
        Ok(Self { grid, shift, scale, chol })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Nonzeros `(column, value)` of row `i`.
    pub fn row(&self, i: usize) -> Vec<(usize, f64)> {
        stencil_row(&self.grid, self.shift, self.scale, i)
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; x.len()];
        self.apply_into(x, &mut y);
        y
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        let g = &self.grid;
        let nx = g.nx();
        let ny = g.ny();
        let inv_h2 = self.scale / (g.h() * g.h());
        let diag = self.shift
            + inv_h2
                * match g.dim() {
                    Dim::One => 2.0,
                    Dim::Two => 4.0,
                };
        for j in 0..ny {
            for i in 0..nx {
                let k = j * nx + i;
                let mut acc = diag * x[k];
                if i > 0 {
                    acc -= inv_h2 * x[k - 1];
                }
                if i + 1 < nx {
                    acc -= inv_h2 * x[k + 1];
                }
                if g.dim() == Dim::Two {
                    if j > 0 {
                        acc -= inv_h2 * x[k - nx];
                    }
                    if j + 1 < ny {
                        acc -= inv_h2 * x[k + nx];
                    }
                }
                y[k] = acc;
            }
        }
    }

    /// Solves `op · y = rhs` by the cached factorization, with one step of
    /// iterative refinement and a CG polish if the residual is still above
    /// [`SOLVE_RTOL`].
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        if rhs.len() != self.len() {
            return Err(GcgError::DimensionMismatch { expected: self.len(), got: rhs.len() });
        }
        let bnorm = norm2(rhs);
        if bnorm == 0.0 {
            return Ok(vec![0.0; rhs.len()]);
        }
        let mut y = self.chol.solve(rhs);
        let mut r = self.residual(&y, rhs);
        if norm2(&r) <= SOLVE_RTOL * bnorm {
            return Ok(y);
        }
        let dy = self.chol.solve(&r);
        for (a, d) in y.iter_mut().zip(&dy) {
            *a += d;
        }
        r = self.residual(&y, rhs);
        if norm2(&r) <= SOLVE_RTOL * bnorm {
            return Ok(y);
        }
        self.cg(rhs, Some(y), SOLVE_RTOL, 10 * self.len() + 100)
    }

    fn residual(&self, y: &[f64], rhs: &[f64]) -> Vec<f64> {
        let ay = self.apply(y);
        rhs.iter().zip(&ay).map(|(b, a)| b - a).collect()
    }

    /// Unpreconditioned conjugate gradients to relative residual `rtol`.
    pub fn cg(&self, rhs: &[f64], x0: Option<Vec<f64>>, rtol: f64, max_iter: usize) -> Result<Vec<f64>> {
        let n = self.len();
        let bnorm = norm2(rhs);
        let mut x = x0.unwrap_or_else(|| vec![0.0; n]);
        if bnorm == 0.0 {
            return Ok(vec![0.0; n]);
        }
        let mut r = self.residual(&x, rhs);
        let mut p = r.clone();
        let mut rr = dot(&r, &r);
        let mut ap = vec![0.0; n];
        for _ in 0..max_iter {
            if rr.sqrt() <= rtol * bnorm {
                return Ok(x);
            }
            self.apply_into(&p, &mut ap);
            let pap = dot(&p, &ap);
            if !(pap > 0.0) {
                return Err(GcgError::Numerical("CG breakdown: operator not positive definite".into()));
            }
            let step = rr / pap;
            for i in 0..n {
                x[i] += step * p[i];
                r[i] -= step * ap[i];
            }
            let rr_new = dot(&r, &r);
            let beta = rr_new / rr;
            rr = rr_new;
            for i in 0..n {
                p[i] = r[i] + beta * p[i];
            }
        }
        // the recurrence residual can drift from the true one
        let true_r = norm2(&self.residual(&x, rhs));
        if true_r <= rtol * bnorm {
            Ok(x)
        } else {
            Err(GcgError::Numerical(format!(
                "CG did not reach relative residual {rtol:e} in {max_iter} iterations (got {:e})",
                true_r / bnorm
            )))
        }
    }
}

fn stencil_row(grid: &Grid, shift: f64, scale: f64, k: usize) -> Vec<(usize, f64)> {
    let nx = grid.nx();
    let ny = grid.ny();
    let c = scale / (grid.h() * grid.h());
    let i = k % nx;
    let j = k / nx;
    let mut row = Vec::with_capacity(5);
    match grid.dim() {
        Dim::One => {
            if i > 0 {
                row.push((k - 1, -c));
            }
            row.push((k, shift + 2.0 * c));
            if i + 1 < nx {
                row.push((k + 1, -c));
            }
        }
        Dim::Two => {
            if j > 0 {
                row.push((k - nx, -c));
            }
            if i > 0 {
                row.push((k - 1, -c));
            }
            row.push((k, shift + 4.0 * c));
            if i + 1 < nx {
                row.push((k + 1, -c));
            }
            if j + 1 < ny {
                row.push((k + nx, -c));
            }
        }
    }
    row
}

/// Homogeneous Dirichlet Laplacian `−Δ_h` on `grid`.
pub fn assemble_laplacian(grid: &Grid) -> Result<DiscreteOperator> {
    DiscreteOperator::new(*grid, 0.0, 1.0)
}

/// `y = K rhs`, the discrete solution operator of `−Δy = rhs` with `y = 0`
/// on the boundary.
pub fn solve_poisson(op: &DiscreteOperator, rhs: &ControlField) -> Result<ControlField> {
    let y = op.solve(rhs.values())?;
    rhs.with_values(y)
}

/// Lower-triangular Cholesky factor in row band storage.
#[derive(Debug, Clone)]
struct BandedCholesky {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl BandedCholesky {
    fn zeros(n: usize, bw: usize) -> Self {
        Self { n, bw, data: vec![0.0; n * (bw + 1)] }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && i - j <= self.bw);
        i * (self.bw + 1) + (j + self.bw - i)
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    fn factor(&mut self) -> Result<()> {
        let (n, bw) = (self.n, self.bw);
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            for j in lo..=i {
                let mut sum = self.data[self.idx(i, j)];
                let klo = lo.max(j.saturating_sub(bw));
                for k in klo..j {
                    sum -= self.data[self.idx(i, k)] * self.data[self.idx(j, k)];
                }
                let at = self.idx(i, j);
                if i == j {
                    if !(sum > 0.0) {
                        return Err(GcgError::Numerical(format!("matrix not positive definite at pivot {i}")));
                    }
                    self.data[at] = sum.sqrt();
                } else {
                    self.data[at] = sum / self.data[self.idx(j, j)];
                }
            }
        }
        Ok(())
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let (n, bw) = (self.n, self.bw);
        let mut z = b.to_vec();
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let mut s = z[i];
            for k in lo..i {
                s -= self.data[self.idx(i, k)] * z[k];
            }
            z[i] = s / self.data[self.idx(i, i)];
        }
        for i in (0..n).rev() {
            let hi = (i + bw).min(n - 1);
            let mut s = z[i];
            for k in i + 1..=hi {
                s -= self.data[self.idx(k, i)] * z[k];
            }
            z[i] = s / self.data[self.idx(i, i)];
        }
        z
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn dense(op: &DiscreteOperator) -> Vec<Vec<f64>> {
        let n = op.len();
        let mut m = vec![vec![0.0; n]; n];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, a) in op.row(i) {
                row[j] = a;
            }
        }
        m
    }

    #[test]
    fn single_node_stencil() {
        let op = assemble_laplacian(&Grid::square(1).unwrap()).unwrap();
        assert_eq!(dense(&op), vec![vec![16.0]]);
    }

    #[test]
    fn one_d_stencil_by_hand() {
        let op = assemble_laplacian(&Grid::line(3).unwrap()).unwrap();
        let expect = vec![vec![32.0, -16.0, 0.0], vec![-16.0, 32.0, -16.0], vec![0.0, -16.0, 32.0]];
        assert_eq!(dense(&op), expect);
    }

    #[test]
    fn stencil_is_symmetric() {
        let op = assemble_laplacian(&Grid::square(5).unwrap()).unwrap();
        let m = dense(&op);
        for i in 0..m.len() {
            for j in 0..m.len() {
                assert_eq!(m[i][j], m[j][i]);
            }
        }
    }

    #[test]
    fn one_d_quadratic_is_exact() {
        let g = Grid::line(3).unwrap();
        let op = assemble_laplacian(&g).unwrap();
        let rhs = ControlField::on_grid(&g, vec![1.0; 3]).unwrap();
        let y = solve_poisson(&op, &rhs).unwrap();
        let expect = [0.09375, 0.125, 0.09375];
        for (a, b) in y.values().iter().zip(expect) {
            assert_relative_eq!(*a, b, max_relative = 1e-14);
        }
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let g = Grid::square(6).unwrap();
        let op = assemble_laplacian(&g).unwrap();
        let rhs = ControlField::on_grid(&g, vec![0.0; g.len()]).unwrap();
        assert!(solve_poisson(&op, &rhs).unwrap().values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn factor_and_cg_agree() {
        let g = Grid::square(12).unwrap();
        let op = DiscreteOperator::new(g, 0.3, 0.7).unwrap();
        let rhs: Vec<f64> = (0..g.len()).map(|i| ((i * 37 % 11) as f64 - 5.0) / 3.0).collect();
        let a = op.solve(&rhs).unwrap();
        let b = op.cg(&rhs, None, 1e-13, 5000).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() <= 1e-10 * (1.0 + x.abs()));
        }
        let r = op.residual(&a, &rhs);
        assert!(norm2(&r) <= SOLVE_RTOL * norm2(&rhs));
    }

    #[test]
    fn rejects_bad_coefficients() {
        let g = Grid::square(2).unwrap();
        assert!(DiscreteOperator::new(g, 0.0, 0.0).is_err());
        assert!(DiscreteOperator::new(g, -1.0, 1.0).is_err());
    }
}
