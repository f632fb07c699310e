//! Theory-side constants, recursion oracles, and fits used to check observed
//! convergence against the rate bounds.

pub mod bounds;
pub mod fit;
pub mod recursions;
pub mod report;

pub use bounds::{
    coupling_constants, envelope_q, linear_lambda, sublinear_constants, LinearRate, RateConstants, RateInputs,
    SublinearConstants,
};
pub use fit::{
    check_envelope, dyadic_epsilons, fit_kappa, fit_rate, pre_stagnation_window, residuals, EnvelopeCheck, KappaFit,
    RateFit,
};
pub use recursions::{first_quadratic_violation, quadratic_recursion, power_recursion, PowerRecursion};
pub use report::Report;
