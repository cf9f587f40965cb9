//! Solvers for the one-dimensional space-fractional advection-dispersion
//! equation
//!
//! ```text
//! ∂c/∂t = -ν ∂c/∂x + d D^α_θ c + r(x),   0 < x < L,  0 < t ≤ T,
//! c(x, 0) = g0(x),  c(0, t) = c(L, t) = 0,
//! ```
//!
//! where `D^α_θ` is the Riesz-Feller derivative of order `1 < α ≤ 2` and
//! skewness `θ`, defined through its Fourier symbol.
//!
//! * [`fractional`]: model parameters, Grünwald weights, skew coefficients
//!   and the Riesz-Feller symbol.
//! * [`forward`]: implicit shifted-Grünwald finite differences and the dense
//!   source-to-observation map `Y = K r`.
//! * [`analytic`]: the whole-line fundamental solution evaluated by Fourier
//!   quadrature, used as an independent reference.
//! * [`inversion`]: Tikhonov reconstruction of the source, L-curve selection
//!   and ill-posedness diagnostics.

pub mod analytic;
pub mod error;
pub mod forward;
pub mod fractional;
pub mod inversion;

pub use analytic::{
    analytic_solution, green_eval, green_hat, time_integral_kernel, AnalyticSolver, GreenKernel,
    GreenValue, SpectralConfig,
};
pub use error::{FadeError, Result};
pub use forward::{
    assemble_forward_map, assemble_operators, observation_vector, solve_forward, step_implicit,
    ForwardMap, Grid, MapConstruction, StateVector, SystemMatrices,
};
pub use fractional::{
    grunwald_weights, riesz_feller_symbol, skew_coefficients, validate_params, GrunwaldWeights,
    ModelParams, SkewCoefficients,
};
pub use inversion::{
    add_noise, default_lambda_grid, difference_matrix, invert, l_curve_select,
    perturbation_decay_test, perturbation_response, relative_error, svd_spectrum, tikhonov_solve,
    InversionResult, LCurve, LCurvePoint, NoiseSpec, PerturbationResponse, RegularizationConfig,
    StabilizerOrder,
};
