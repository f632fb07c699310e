//! Named example problems.

use rand::Rng;

use crate::elliptic::{self, EllipticProblem};
use crate::error::{GcgError, Result};
use crate::field::ControlField;
use crate::parabolic::{self, ParabolicProblem};
use crate::solver::{CompositeProblem, SegmentFn};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Elliptic,
    Parabolic,
}

#[derive(Debug, Clone, Copy)]
pub struct ProblemInfo {
    pub name: &'static str,
    pub kind: ProblemKind,
    pub description: &'static str,
    /// Spatial nodes per direction used when none is given.
    pub default_n: usize,
    /// Time steps used when none is given (parabolic only).
    pub default_nt: usize,
}

/// Sorted by name.
pub const PROBLEMS: [ProblemInfo; 4] = [
    ProblemInfo {
        name: "parabolic-ex",
        kind: ProblemKind::Parabolic,
        description: "heat equation on the unit square, temporal group sparsity, a=0.7, weight 0.0035, M=0.8",
        default_n: 32,
        default_nt: 100,
    },
    ProblemInfo {
        name: "parabolic-ex-1d",
        kind: ProblemKind::Parabolic,
        description: "one-dimensional variant of parabolic-ex for quick runs (not a published example)",
        default_n: 64,
        default_nt: 100,
    },
    ProblemInfo {
        name: "stadler-ex1",
        kind: ProblemKind::Elliptic,
        description: "Poisson tracking, L1 cost 0.001, box [-30, 30]",
        default_n: 64,
        default_nt: 0,
    },
    ProblemInfo {
        name: "stadler-ex3",
        kind: ProblemKind::Elliptic,
        description: "Poisson tracking with source term, L1 cost 0.002, spatially varying upper bound",
        default_n: 64,
        default_nt: 0,
    },
];

pub fn lookup(name: &str) -> Result<&'static ProblemInfo> {
    PROBLEMS
        .iter()
        .find(|p| p.name == name)
        .ok_or_else(|| GcgError::UnknownProblem(name.to_string()))
}

/// One-line-per-problem listing.
pub fn listing() -> String {
    PROBLEMS.iter().map(|p| format!("{:<16} {}\n", p.name, p.description)).collect()
}

/// A registered problem of either class.
#[derive(Debug, Clone)]
pub enum Problem {
    Elliptic(EllipticProblem),
    Parabolic(ParabolicProblem),
}

impl Problem {
    /// `nt` is ignored for elliptic problems.
    pub fn build(name: &str, n: usize, nt: usize) -> Result<Self> {
        match lookup(name)?.kind {
            ProblemKind::Elliptic => Ok(Self::Elliptic(elliptic::make_example(name, n)?)),
            ProblemKind::Parabolic => Ok(Self::Parabolic(parabolic::make_example(name, n, nt)?)),
        }
    }

    pub fn kind(&self) -> ProblemKind {
        match self {
            Self::Elliptic(_) => ProblemKind::Elliptic,
            Self::Parabolic(_) => ProblemKind::Parabolic,
        }
    }

    pub fn zero_control(&self) -> ControlField {
        match self {
            Self::Elliptic(p) => p.zero_control(),
            Self::Parabolic(p) => p.zero_control(),
        }
    }

    /// Surrogate for the Lipschitz-type constant `L_{u⁰}` of `∇f` in the dual norm.
    pub fn lipschitz_estimate(&self) -> Result<f64> {
        match self {
            Self::Elliptic(p) => p.lipschitz_estimate(),
            Self::Parabolic(p) => Ok(p.lipschitz_estimate()),
        }
    }

    /// Measure of the `ε`-band around the switching level of the adjoint.
    pub fn growth_measure(&self, p: &ControlField, eps: f64) -> Result<f64> {
        match self {
            Self::Elliptic(e) => e.growth_measure(p, eps),
            Self::Parabolic(q) => q.growth_measure_time(p, eps),
        }
    }

    /// Value of [`growth_measure`](Self::growth_measure) once the band covers everything.
    pub fn growth_total_measure(&self) -> f64 {
        match self {
            Self::Elliptic(e) => e.zero_control().total_measure(),
            Self::Parabolic(p) => p.grid().tau() * p.grid().nt() as f64,
        }
    }

    /// A random point of the feasible set: nodewise uniform in the box, or
    /// slicewise uniform in the ball.
    pub fn random_feasible_control(&self, rng: &mut impl Rng) -> ControlField {
        match self {
            Self::Elliptic(e) => {
                let vals = e
                    .lower()
                    .values()
                    .iter()
                    .zip(e.upper().values())
                    .map(|(a, b)| a + (b - a) * rng.gen::<f64>())
                    .collect();
                e.zero_control().with_values(vals).expect("layout matches")
            }
            Self::Parabolic(p) => p.random_feasible_control(rng),
        }
    }
}

impl CompositeProblem for Problem {
    fn smooth(&self, u: &ControlField) -> Result<(f64, ControlField)> {
        match self {
            Self::Elliptic(p) => p.smooth(u),
            Self::Parabolic(p) => p.smooth(u),
        }
    }

    fn smooth_value(&self, u: &ControlField) -> Result<f64> {
        match self {
            Self::Elliptic(p) => p.smooth_value(u),
            Self::Parabolic(p) => p.smooth_value(u),
        }
    }

    fn nonsmooth(&self, u: &ControlField) -> Option<f64> {
        match self {
            Self::Elliptic(p) => p.nonsmooth(u),
            Self::Parabolic(p) => p.nonsmooth(u),
        }
    }

    fn lmo(&self, grad: &ControlField) -> Result<ControlField> {
        match self {
            Self::Elliptic(p) => p.lmo(grad),
            Self::Parabolic(p) => p.lmo(grad),
        }
    }

    fn dual_norm(&self, u: &ControlField) -> f64 {
        match self {
            Self::Elliptic(p) => p.dual_norm(u),
            Self::Parabolic(p) => p.dual_norm(u),
        }
    }

    fn smooth_on_segment<'a>(&'a self, u: &'a ControlField, v: &'a ControlField) -> Result<SegmentFn<'a>> {
        match self {
            Self::Elliptic(p) => p.smooth_on_segment(u, v),
            Self::Parabolic(p) => p.smooth_on_segment(u, v),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn sorted_and_closed() {
        let names: Vec<&str> = PROBLEMS.iter().map(|p| p.name).collect();
        let mut sorted = names.clone();
        sorted.sort_unstable();
        assert_eq!(names, sorted);
        assert_eq!(listing().lines().count(), 4);
        for p in &PROBLEMS {
            let prob = Problem::build(p.name, 3, 4).unwrap();
            assert_eq!(prob.kind(), p.kind);
        }
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(Problem::build("nope", 3, 3), Err(GcgError::UnknownProblem(_))));
    }

    #[test]
    fn random_controls_are_feasible() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for name in ["stadler-ex1", "stadler-ex3", "parabolic-ex-1d"] {
            let p = Problem::build(name, 4, 3).unwrap();
            for _ in 0..10 {
                assert!(p.nonsmooth(&p.random_feasible_control(&mut rng)).is_some());
            }
        }
    }
}
