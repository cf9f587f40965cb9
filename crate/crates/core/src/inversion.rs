//! Source reconstruction from a final-time observation.
//!
//! The discrete problem `Y = K r` inherits the smoothing of the forward
//! evolution, so `K` is badly conditioned and the plain inverse amplifies
//! measurement noise. The estimate here minimizes
//!
//! ```text
//! J_λ(r) = ‖Y - K r‖² + λ ‖D r‖²
//! ```
//!
//! with `D` the identity or a first difference, and λ picked at the corner of
//! the L-curve.

use std::f64::consts::PI;

use log::warn;
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{FadeError, Result};
use crate::forward::{assemble_forward_map, ForwardMap, Grid, StateVector};
use crate::fractional::ModelParams;

/// Which derivative of the source the stabilizer penalizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilizerOrder {
    /// ‖r‖
    Zero,
    /// ‖r'‖
    One,
}

impl TryFrom<u32> for StabilizerOrder {
    type Error = FadeError;

    fn try_from(order: u32) -> Result<Self> {
        match order {
            0 => Ok(Self::Zero),
            1 => Ok(Self::One),
            other => Err(FadeError::InvalidRegularization(format!(
                "stabilizer order must be 0 or 1, got {other}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegularizationConfig {
    pub order: StabilizerOrder,
    /// Candidate λ values, strictly increasing and positive.
    pub lambda_grid: Vec<f64>,
    /// Skips the L-curve when set.
    pub fixed_lambda: Option<f64>,
}

impl RegularizationConfig {
    pub fn new(
        order: StabilizerOrder,
        lambda_grid: Vec<f64>,
        fixed_lambda: Option<f64>,
    ) -> Result<Self> {
        if lambda_grid.iter().any(|&l| !(l.is_finite() && l > 0.0)) {
            return Err(FadeError::InvalidRegularization(
                "lambda grid values must be finite and positive".into(),
            ));
        }
        if lambda_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(FadeError::InvalidRegularization(
                "lambda grid must be strictly increasing".into(),
            ));
        }
        match fixed_lambda {
            Some(l) if !(l.is_finite() && l > 0.0) => {
                return Err(FadeError::InvalidRegularization(format!(
                    "fixed lambda must be positive, got {l}"
                )))
            }
            None if lambda_grid.is_empty() => {
                return Err(FadeError::InvalidRegularization(
                    "lambda grid is empty".into(),
                ))
            }
            _ => {}
        }
        Ok(Self {
            order,
            lambda_grid,
            fixed_lambda,
        })
    }
}

/// `count` values log-spaced over `[lo, hi]`.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..count)
                .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
                .collect()
        }
    }
}

/// Log-spaced grid over `[rel_min, rel_max] · ‖K‖₂² / ‖D‖₂²`, the ratio at
/// which both terms of the cost are comparable.
pub fn default_lambda_grid(
    operator: &DMatrix<f64>,
    stabilizer: &DMatrix<f64>,
    rel_min: f64,
    rel_max: f64,
    count: usize,
) -> Result<Vec<f64>> {
    let k_norm = spectral_norm(operator)?;
    let d_norm = spectral_norm(stabilizer)?;
    let scale = (k_norm / d_norm).powi(2);
    Ok(log_spaced(rel_min * scale, rel_max * scale, count))
}

fn spectral_norm(m: &DMatrix<f64>) -> Result<f64> {
    Ok(svd_spectrum(m)?.first().copied().unwrap_or(0.0))
}

/// Relative measurement noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub level: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(level: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&level) {
            return Err(FadeError::InvalidRegularization(format!(
                "noise level must be in [0, 1], got {level}"
            )));
        }
        Ok(Self { level, seed })
    }
}

/// Y_i (1 + level ζ_i) with ζ_i standard normal from a generator seeded by
/// `spec.seed`.
pub fn add_noise(y: &DVector<f64>, spec: &NoiseSpec) -> DVector<f64> {
    if spec.level == 0.0 {
        return y.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    y.map(|v| {
        let z: f64 = StandardNormal.sample(&mut rng);
        v * (1.0 + spec.level * z)
    })
}

/// Identity (order 0) or the forward difference with rows
/// `(…, -1/Δx, 1/Δx, …)` of shape (n-1)×n (order 1).
pub fn difference_matrix(order: StabilizerOrder, n: usize, dx: f64) -> Result<DMatrix<f64>> {
    if n < 2 {
        return Err(FadeError::InvalidRegularization(format!(
            "need at least two unknowns, got {n}"
        )));
    }
    Ok(match order {
        StabilizerOrder::Zero => DMatrix::identity(n, n),
        StabilizerOrder::One => {
            let mut d = DMatrix::zeros(n - 1, n);
            for i in 0..n - 1 {
                d[(i, i)] = -1.0 / dx;
                d[(i, i + 1)] = 1.0 / dx;
            }
            d
        }
    })
}

/// Minimizer of ‖Y - K r‖² + λ‖D r‖², by QR on the stacked system
/// `[K; √λ D] r ≈ [Y; 0]`.
pub fn tikhonov_solve(
    operator: &DMatrix<f64>,
    observation: &DVector<f64>,
    lambda: f64,
    stabilizer: &DMatrix<f64>,
) -> Result<DVector<f64>> {
    let (m, n) = operator.shape();
    if observation.len() != m {
        return Err(FadeError::DimensionMismatch {
            expected: m,
            found: observation.len(),
        });
    }
    if stabilizer.ncols() != n {
        return Err(FadeError::DimensionMismatch {
            expected: n,
            found: stabilizer.ncols(),
        });
    }
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(FadeError::InvalidRegularization(format!(
            "lambda must be non-negative, got {lambda}"
        )));
    }

    let p = if lambda > 0.0 { stabilizer.nrows() } else { 0 };
    let mut stacked = DMatrix::zeros(m + p, n);
    stacked.rows_mut(0, m).copy_from(operator);
    let mut rhs = DVector::zeros(m + p);
    rhs.rows_mut(0, m).copy_from(observation);
    if p > 0 {
        stacked.rows_mut(m, p).copy_from(&(stabilizer * lambda.sqrt()));
    }
    if m + p < n {
        return Err(FadeError::RankDeficient);
    }

    let qr = stacked.qr();
    let r = qr.r();
    let diag = r.diagonal();
    let max = diag.amax();
    if max == 0.0 || diag.iter().any(|d| d.abs() <= 1e-14 * max) {
        return Err(FadeError::RankDeficient);
    }
    let qtb = qr.q().transpose() * rhs;
    r.solve_upper_triangular(&qtb)
        .ok_or(FadeError::RankDeficient)
}

/// 100 ‖est - truth‖₂ / ‖truth‖₂
pub fn relative_error(estimate: &DVector<f64>, truth: &DVector<f64>) -> Result<f64> {
    if estimate.len() != truth.len() {
        return Err(FadeError::DimensionMismatch {
            expected: truth.len(),
            found: estimate.len(),
        });
    }
    let norm = truth.norm();
    if norm == 0.0 {
        return Err(FadeError::ZeroReference);
    }
    Ok(100.0 * (estimate - truth).norm() / norm)
}

/// Singular values in descending order.
pub fn svd_spectrum(operator: &DMatrix<f64>) -> Result<Vec<f64>> {
    let svd = operator
        .clone()
        .try_svd(false, false, f64::EPSILON, 0)
        .ok_or(FadeError::Decomposition("SVD did not converge"))?;
    let mut values: Vec<f64> = svd.singular_values.iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// One λ of an L-curve sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LCurvePoint {
    pub lambda: f64,
    pub residual_norm: f64,
    pub seminorm: f64,
    /// Signed curvature of the (ln residual, ln seminorm) polyline; `None`
    /// at the two ends.
    pub curvature: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct LCurve {
    pub points: Vec<LCurvePoint>,
    pub estimates: Vec<DVector<f64>>,
    pub selected: usize,
    /// All residuals equal; the median λ was taken.
    pub degenerate: bool,
}

impl LCurve {
    pub fn selected_point(&self) -> &LCurvePoint {
        &self.points[self.selected]
    }

    pub fn selected_estimate(&self) -> &DVector<f64> {
        &self.estimates[self.selected]
    }

    /// Residual non-decreasing and seminorm non-increasing in λ, up to a
    /// relative slack `tol`.
    pub fn is_monotone(&self, tol: f64) -> bool {
        self.points.windows(2).all(|w| {
            w[1].residual_norm >= w[0].residual_norm * (1.0 - tol)
                && w[1].seminorm <= w[0].seminorm * (1.0 + tol)
        })
    }
}

/// Menger curvature through three points, positive for a left turn.
fn three_point_curvature(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    let (ux, uy) = (b.0 - a.0, b.1 - a.1);
    let (vx, vy) = (c.0 - b.0, c.1 - b.1);
    let (wx, wy) = (c.0 - a.0, c.1 - a.1);
    let lengths = ux.hypot(uy) * vx.hypot(vy) * wx.hypot(wy);
    if lengths == 0.0 {
        return 0.0;
    }
    2.0 * (ux * vy - uy * vx) / lengths
}

/// Solves for every λ in the grid and takes the point of maximum curvature
/// of the log-log L-curve, ties going to the larger λ.
pub fn l_curve_select(
    operator: &DMatrix<f64>,
    observation: &DVector<f64>,
    cfg: &RegularizationConfig,
    dx: f64,
) -> Result<LCurve> {
    if cfg.lambda_grid.is_empty() {
        return Err(FadeError::InvalidRegularization(
            "lambda grid is empty".into(),
        ));
    }
    let stabilizer = difference_matrix(cfg.order, operator.ncols(), dx)?;
    let mut points = Vec::with_capacity(cfg.lambda_grid.len());
    let mut estimates = Vec::with_capacity(cfg.lambda_grid.len());
    for &lambda in &cfg.lambda_grid {
        let estimate = tikhonov_solve(operator, observation, lambda, &stabilizer)?;
        points.push(LCurvePoint {
            lambda,
            residual_norm: (observation - operator * &estimate).norm(),
            seminorm: (&stabilizer * &estimate).norm(),
            curvature: None,
        });
        estimates.push(estimate);
    }

    let log_pts: Vec<(f64, f64)> = points
        .iter()
        .map(|p| {
            (
                p.residual_norm.max(f64::MIN_POSITIVE).ln(),
                p.seminorm.max(f64::MIN_POSITIVE).ln(),
            )
        })
        .collect();
    for i in 1..points.len().saturating_sub(1) {
        points[i].curvature = Some(three_point_curvature(
            log_pts[i - 1],
            log_pts[i],
            log_pts[i + 1],
        ));
    }

    let (min_res, max_res) = points.iter().fold((f64::INFINITY, 0.0f64), |acc, p| {
        (acc.0.min(p.residual_norm), acc.1.max(p.residual_norm))
    });
    let degenerate = points.len() > 1 && max_res - min_res <= 1e-12 * max_res;
    let selected = if degenerate {
        warn!("degenerate L-curve (constant residual); using the median lambda");
        points.len() / 2
    } else {
        let mut best = points.len() - 1;
        let mut best_curv = f64::NEG_INFINITY;
        for (i, p) in points.iter().enumerate() {
            if let Some(c) = p.curvature {
                if c >= best_curv {
                    best_curv = c;
                    best = i;
                }
            }
        }
        best
    };
    if points.len() > 2 && (selected == 0 || selected == points.len() - 1) {
        warn!("L-curve selected an endpoint of the lambda grid");
    }
    let curve = LCurve {
        points,
        estimates,
        selected,
        degenerate,
    };
    if !curve.is_monotone(1e-6) {
        warn!("L-curve is not monotone in lambda; the solves may be inaccurate");
    }
    Ok(curve)
}

/// Output of an inversion.
#[derive(Debug, Clone, PartialEq)]
pub struct InversionResult {
    pub r_est: StateVector,
    pub lambda_used: f64,
    pub residual_norm: f64,
    pub solution_seminorm: f64,
    pub relative_error_pct: Option<f64>,
}

/// Reconstructs the source from `observation`, with the fixed λ of `cfg` if
/// set and by L-curve otherwise. The curve is returned when one was traced.
pub fn invert(
    map: &ForwardMap,
    observation: &StateVector,
    cfg: &RegularizationConfig,
    truth: Option<&StateVector>,
) -> Result<(InversionResult, Option<LCurve>)> {
    let k = &map.operator;
    let y = observation.as_vector();
    let dx = map.grid.dx();
    let stabilizer = difference_matrix(cfg.order, k.ncols(), dx)?;
    let (estimate, lambda, curve) = match cfg.fixed_lambda {
        Some(lambda) => (tikhonov_solve(k, y, lambda, &stabilizer)?, lambda, None),
        None => {
            let curve = l_curve_select(k, y, cfg, dx)?;
            let est = curve.selected_estimate().clone();
            (est, curve.selected_point().lambda, Some(curve))
        }
    };
    let relative_error_pct = truth
        .map(|t| relative_error(&estimate, t.as_vector()))
        .transpose()?;
    let result = InversionResult {
        residual_norm: (y - k * &estimate).norm(),
        solution_seminorm: (&stabilizer * &estimate).norm(),
        lambda_used: lambda,
        relative_error_pct,
        r_est: StateVector::from(estimate),
    };
    Ok((result, curve))
}

/// Response of the forward map to δ_n(x) = A sin(nπx/L).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationResponse {
    pub mode: usize,
    /// (Δx Σ δ_n²)^{1/2}, ≈ A √(L/2).
    pub input_norm: f64,
    /// (Δx Σ (K δ_n)²)^{1/2}
    pub output_norm: f64,
}

pub fn perturbation_response(
    map: &ForwardMap,
    amplitude: f64,
    modes: &[usize],
) -> Result<Vec<PerturbationResponse>> {
    let grid = &map.grid;
    let length = map.params.length;
    let weight = grid.dx().sqrt();
    modes
        .iter()
        .map(|&mode| {
            if mode == 0 {
                return Err(FadeError::InvalidRegularization(
                    "perturbation modes start at 1".into(),
                ));
            }
            let delta = grid.sample(|x| amplitude * (mode as f64 * PI * x / length).sin());
            let response = map.apply(&delta)?;
            Ok(PerturbationResponse {
                mode,
                input_norm: weight * delta.as_vector().norm(),
                output_norm: weight * response.as_vector().norm(),
            })
        })
        .collect()
}

/// Assembles K for `(params, grid)` and measures [`perturbation_response`].
pub fn perturbation_decay_test(
    params: &ModelParams,
    grid: &Grid,
    amplitude: f64,
    modes: &[usize],
) -> Result<Vec<PerturbationResponse>> {
    let map = assemble_forward_map(params, grid)?;
    perturbation_response(&map, amplitude, modes)
}
