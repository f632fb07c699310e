use crate::error::{GcgError, Result};

/// Spatial dimension of a uniform grid on the unit interval or unit square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dim {
    One,
    Two,
}

/// Uniform grid of interior nodes on `[0,1]` or `[0,1]²` with homogeneous
/// Dirichlet boundary. Node `(i, j)` sits at `((i+1)h, (j+1)h)`; nodes are
/// stored row-major, `index = j * n + i`, so `x₁` varies fastest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: Dim,
    n: usize,
    h: f64,
}

impl Grid {
    pub fn new(dim: Dim, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(GcgError::InvalidInput("grid needs at least one interior node".into()));
        }
        Ok(Self { dim, n, h: 1.0 / (n + 1) as f64 })
    }

    pub fn square(n: usize) -> Result<Self> {
        Self::new(Dim::Two, n)
    }

    pub fn line(n: usize) -> Result<Self> {
        Self::new(Dim::One, n)
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    /// Interior nodes per dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn nx(&self) -> usize {
        self.n
    }

    pub fn ny(&self) -> usize {
        match self.dim {
            Dim::One => 1,
            Dim::Two => self.n,
        }
    }

    /// Total number of unknowns.
    pub fn len(&self) -> usize {
        self.nx() * self.ny()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Quadrature weight of one node (composite midpoint rule).
    pub fn cell_measure(&self) -> f64 {
        match self.dim {
            Dim::One => self.h,
            Dim::Two => self.h * self.h,
        }
    }

    /// Coordinates of node `idx`; `x₂` is 0 on a 1D grid.
    pub fn coords(&self, idx: usize) -> (f64, f64) {
        let i = idx % self.nx();
        let j = idx / self.nx();
        let x1 = (i + 1) as f64 * self.h;
        let x2 = match self.dim {
            Dim::One => 0.0,
            Dim::Two => (j + 1) as f64 * self.h,
        };
        (x1, x2)
    }

    /// Samples `f(x₁, x₂)` at every node.
    pub fn sample(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        (0..self.len())
            .map(|k| {
                let (x1, x2) = self.coords(k);
                f(x1, x2)
            })
            .collect()
    }

    /// Smallest eigenvalue of the scaled Dirichlet stencil on this grid.
    pub fn min_laplacian_eigenvalue(&self) -> f64 {
        let s = (std::f64::consts::PI * self.h / 2.0).sin();
        let one_d = 4.0 / (self.h * self.h) * s * s;
        match self.dim {
            Dim::One => one_d,
            Dim::Two => 2.0 * one_d,
        }
    }
}

/// Uniform time stepping on `[0, T]` with levels `t_m = m·τ`, `m = 1..=nt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceTimeGrid {
    space: Grid,
    nt: usize,
    horizon: f64,
    tau: f64,
}

impl SpaceTimeGrid {
    pub fn new(space: Grid, nt: usize, horizon: f64) -> Result<Self> {
        if nt == 0 {
            return Err(GcgError::InvalidInput("need at least one time step".into()));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(GcgError::InvalidInput(format!("time horizon must be positive, got {horizon}")));
        }
        Ok(Self { space, nt, horizon, tau: horizon / nt as f64 })
    }

    pub fn space(&self) -> &Grid {
        &self.space
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.nt * self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Time of level `m` (zero-based slot, so slot 0 is `t = τ`).
    pub fn time(&self, slot: usize) -> f64 {
        (slot + 1) as f64 * self.tau
    }

    /// Space-time quadrature weight `τ·h^d`.
    pub fn cell_measure(&self) -> f64 {
        self.tau * self.space.cell_measure()
    }

    /// Samples `f(x₁, x₂, t)` on every space-time node, time-major.
    pub fn sample(&self, f: impl Fn(f64, f64, f64) -> f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        for m in 0..self.nt {
            let t = self.time(m);
            for k in 0..self.space.len() {
                let (x1, x2) = self.space.coords(k);
                out.push(f(x1, x2, t));
            }
        }
        out
    }
}
