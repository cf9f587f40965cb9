//! Whole-line fundamental solution by Fourier quadrature.
//!
//! With the transform convention `f̂(k) = ∫ f(x) e^{ikx} dx`, the source and
//! initial data extended by zero outside `(0, L)` evolve as
//!
//! ```text
//! û(k, t) = Ĝ(k, t) ĝ0(k) + W(k, t) f̂(k),
//! Ĝ(k, t) = exp((iνk - d ψ(k)) t),
//! W(k, t) = ∫_0^t Ĝ(k, t - τ) dτ = (exp((iνk - dψ) t) - 1) / (iνk - dψ),
//! ```
//!
//! and `u(x, t) = (1/2π) ∫ e^{-ikx} û(k, t) dk`. The k-integral is a uniform
//! trapezoidal rule on `[-k_max, k_max]` whose nodes include `k = 0`.
//!
//! The extension by zero makes `u` discontinuous at the ends of the interval
//! whenever the data do not vanish there; the truncated quadrature then rings
//! (Gibbs) near `x = 0` and `x = L`. This is not suppressed.

use std::f64::consts::{FRAC_PI_2, PI};

use log::warn;
use num_complex::Complex64;

use crate::error::{FadeError, Result};
use crate::fractional::{riesz_feller_symbol, ModelParams};

/// Tail bound e^{-d k_max^α cos(θπ/2) t} targeted by [`SpectralConfig::auto`].
pub const AUTO_TAIL: f64 = 1e-12;
/// Tail bound above which evaluations log a truncation warning.
pub const WARN_TAIL: f64 = 1e-8;
/// Largest frequency cutoff [`SpectralConfig::auto`] will choose.
pub const K_MAX_CAP: f64 = 2.0e3;
/// Default padding on each side of `[0, L]` covered by one aliasing period.
pub const DEFAULT_PAD: f64 = 100.0;

/// Truncation and resolution of the k-quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralConfig {
    /// Frequency cutoff.
    pub k_max: f64,
    /// Number of trapezoid intervals on `[-k_max, k_max]` (even, ≥ 64).
    pub n_k: usize,
    /// Padding beyond `[0, L]` that one period 2π/Δk must cover; the
    /// quadrature solution is periodic and its images sit this far away.
    pub x_pad: f64,
}

impl SpectralConfig {
    pub fn new(k_max: f64, n_k: usize, x_pad: f64) -> Result<Self> {
        if !(k_max.is_finite() && k_max > 0.0) {
            return Err(FadeError::InvalidSpectralConfig(format!(
                "k_max must be positive, got {k_max}"
            )));
        }
        if n_k < 64 || !n_k.is_multiple_of(2) {
            return Err(FadeError::InvalidSpectralConfig(format!(
                "n_k must be even and at least 64, got {n_k}"
            )));
        }
        if !(x_pad.is_finite() && x_pad >= 0.0) {
            return Err(FadeError::InvalidSpectralConfig(format!(
                "x_pad must be non-negative, got {x_pad}"
            )));
        }
        Ok(Self { k_max, n_k, x_pad })
    }

    /// Cutoff such that the kernel tail at `t_min` is below [`AUTO_TAIL`],
    /// with enough nodes that one period spans `L + 2 x_pad`.
    pub fn auto(params: &ModelParams, t_min: f64) -> Result<Self> {
        Self::auto_with(params, t_min, 0.0, DEFAULT_PAD)
    }

    /// Like [`auto`](Self::auto) but never below `k_floor`. Source terms
    /// decay only algebraically in k and want a larger cutoff.
    pub fn auto_with(params: &ModelParams, t_min: f64, k_floor: f64, x_pad: f64) -> Result<Self> {
        if !(t_min > 0.0) {
            return Err(FadeError::NonPositive {
                name: "t",
                value: t_min,
            });
        }
        let rate = params.dispersion * (params.theta * FRAC_PI_2).cos() * t_min;
        let needed = (-AUTO_TAIL.ln() / rate).powf(1.0 / params.alpha);
        if needed > K_MAX_CAP {
            return Err(FadeError::TimeTooSmall {
                t: t_min,
                needed,
                cap: K_MAX_CAP,
            });
        }
        let k_max = needed.max(k_floor);
        let period = params.length + 2.0 * x_pad;
        let dk_target = 2.0 * PI / period;
        let mut n_k = ((2.0 * k_max / dk_target).ceil() as usize).max(64);
        n_k += n_k % 2;
        Self::new(k_max, n_k, x_pad)
    }

    pub fn dk(&self) -> f64 {
        2.0 * self.k_max / self.n_k as f64
    }

    /// Period 2π/Δk of the quadrature solution in x.
    pub fn period(&self) -> f64 {
        2.0 * PI / self.dk()
    }

    /// Nodes k_j and trapezoid weights.
    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let dk = self.dk();
        let half = (self.n_k / 2) as isize;
        (-half..=half).map(move |j| {
            let w = if j.abs() == half { 0.5 * dk } else { dk };
            (j as f64 * dk, w)
        })
    }

    /// e^{-d k_max^α cos(θπ/2) t}
    pub fn tail_bound(&self, params: &ModelParams, t: f64) -> f64 {
        (-params.dispersion * self.k_max.powf(params.alpha) * (params.theta * FRAC_PI_2).cos() * t)
            .exp()
    }
}

/// Ĝ(k, t) = exp((iνk - d ψ(k)) t)
pub fn green_hat(k: f64, t: f64, params: &ModelParams) -> Complex64 {
    (exponent(k, params) * t).exp()
}

/// iνk - d ψ(k)
fn exponent(k: f64, params: &ModelParams) -> Complex64 {
    Complex64::new(0.0, params.nu * k)
        - riesz_feller_symbol(k, params.alpha, params.theta) * params.dispersion
}

/// ∫_0^T Ĝ(k, T - τ) dτ = (e^{zT} - 1)/z with z = iνk - dψ(k); equals T at z = 0.
pub fn time_integral_kernel(k: f64, horizon: f64, params: &ModelParams) -> Complex64 {
    let z = exponent(k, params);
    let zt = z * horizon;
    if zt.norm() < 1e-4 {
        // T (1 + zT/2 + (zT)²/6 + (zT)³/24 + (zT)⁴/120)
        let series = 1.0 + zt * (0.5 + zt * (1.0 / 6.0 + zt * (1.0 / 24.0 + zt / 120.0)));
        series * horizon
    } else {
        (zt.exp() - 1.0) / z
    }
}

/// A real-space value with the imaginary part left over by the quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenValue {
    pub value: f64,
    pub imag_residue: f64,
    /// Kernel magnitude at the cutoff; see [`WARN_TAIL`].
    pub tail_bound: f64,
}

/// Samples of Ĝ(·, t) on the quadrature grid.
#[derive(Debug, Clone)]
pub struct GreenKernel {
    pub params: ModelParams,
    pub t: f64,
    pub config: SpectralConfig,
    /// (k_j, w_j Ĝ(k_j, t))
    samples: Vec<(f64, Complex64)>,
    tail_bound: f64,
}

impl GreenKernel {
    pub fn new(params: &ModelParams, t: f64, config: &SpectralConfig) -> Result<Self> {
        params.validate()?;
        if !(t > 0.0) {
            return Err(FadeError::NonPositive { name: "t", value: t });
        }
        let tail_bound = config.tail_bound(params, t);
        if tail_bound > WARN_TAIL {
            warn!(
                "k_max = {} too small at t = {t}: kernel tail {tail_bound:.2e} > {WARN_TAIL:.0e}",
                config.k_max
            );
        }
        let samples = config
            .nodes()
            .map(|(k, w)| (k, green_hat(k, t, params) * w))
            .collect();
        Ok(Self {
            params: *params,
            t,
            config: *config,
            samples,
            tail_bound,
        })
    }

    /// Ĝ(k_j, t) on the quadrature nodes, unweighted.
    pub fn samples(&self) -> Vec<(f64, Complex64)> {
        self.config
            .nodes()
            .zip(&self.samples)
            .map(|((k, w), &(_, s))| (k, s / w))
            .collect()
    }

    pub fn eval(&self, x: f64) -> GreenValue {
        let sum = inverse_sum(&self.samples, x);
        GreenValue {
            value: sum.re,
            imag_residue: sum.im,
            tail_bound: self.tail_bound,
        }
    }

    /// ∫ G dx over one period of the quadrature solution, by the rectangle
    /// rule on 2 n_k points (exact for the trigonometric sum).
    pub fn window_integral(&self) -> f64 {
        let period = self.config.period();
        let count = 2 * self.config.n_k;
        let h = period / count as f64;
        let start = self.params.nu * self.t - 0.5 * period;
        (0..count)
            .map(|i| self.eval(start + i as f64 * h).value)
            .sum::<f64>()
            * h
    }
}

/// (1/2π) Σ_j c_j e^{-i k_j x}
fn inverse_sum(weighted: &[(f64, Complex64)], x: f64) -> Complex64 {
    let sum: Complex64 = weighted
        .iter()
        .map(|&(k, c)| {
            let (s, co) = (k * x).sin_cos();
            c * Complex64::new(co, -s)
        })
        .sum();
    sum / (2.0 * PI)
}

/// G(x, t) = (1/2π) ∫ e^{-ikx} Ĝ(k, t) dk.
pub fn green_eval(
    x: f64,
    t: f64,
    params: &ModelParams,
    config: &SpectralConfig,
) -> Result<GreenValue> {
    Ok(GreenKernel::new(params, t, config)?.eval(x))
}

/// Composite 8-point Gauss-Legendre nodes on [-1, 1].
const GL_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Quadrature nodes and weights for ∫_0^L, fine enough to resolve e^{iky}
/// up to `k_max` and narrow features of the data.
fn interval_rule(length: f64, k_max: f64) -> Vec<(f64, f64)> {
    let panels = ((k_max * length / 2.0).ceil() as usize).max(256);
    let h = length / panels as f64;
    let mut rule = Vec::with_capacity(panels * 8);
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        for (&x, &w) in GL_NODES.iter().zip(&GL_WEIGHTS) {
            rule.push((mid - 0.5 * h * x, 0.5 * h * w));
            rule.push((mid + 0.5 * h * x, 0.5 * h * w));
        }
    }
    rule
}

/// ∫_0^L f(y) e^{iky} dy at each k node.
fn transform_on_interval(
    f: &dyn Fn(f64) -> f64,
    length: f64,
    config: &SpectralConfig,
) -> Vec<Complex64> {
    let rule: Vec<(f64, f64)> = interval_rule(length, config.k_max)
        .into_iter()
        .map(|(y, w)| (y, w * f(y)))
        .filter(|&(_, fw)| fw != 0.0)
        .collect();
    config
        .nodes()
        .map(|(k, _)| {
            rule.iter()
                .map(|&(y, fw)| {
                    let (s, c) = (k * y).sin_cos();
                    Complex64::new(fw * c, fw * s)
                })
                .sum()
        })
        .collect()
}

/// The solution u(·, t) of the whole-line problem for fixed source and
/// initial data, with transforms precomputed on the k-grid.
#[derive(Debug, Clone)]
pub struct AnalyticSolver {
    pub params: ModelParams,
    pub t: f64,
    pub config: SpectralConfig,
    /// (k_j, w_j û(k_j, t))
    spectrum: Vec<(f64, Complex64)>,
    tail_bound: f64,
}

impl AnalyticSolver {
    /// `source` and `initial` are read on `[0, L]` only; `None` means zero.
    pub fn new(
        params: &ModelParams,
        t: f64,
        config: &SpectralConfig,
        source: Option<&dyn Fn(f64) -> f64>,
        initial: Option<&dyn Fn(f64) -> f64>,
    ) -> Result<Self> {
        let kernel = GreenKernel::new(params, t, config)?;
        let mut spectrum: Vec<(f64, Complex64)> = config
            .nodes()
            .map(|(k, _)| (k, Complex64::new(0.0, 0.0)))
            .collect();
        if let Some(g0) = initial {
            let transform = transform_on_interval(g0, params.length, config);
            for ((slot, &(_, g)), gh) in spectrum.iter_mut().zip(&kernel.samples).zip(transform) {
                slot.1 += g * gh;
            }
        }
        if let Some(f) = source {
            let transform = transform_on_interval(f, params.length, config);
            for ((slot, (k, w)), fh) in spectrum.iter_mut().zip(config.nodes()).zip(transform) {
                slot.1 += time_integral_kernel(k, t, params) * fh * w;
            }
        }
        Ok(Self {
            params: *params,
            t,
            config: *config,
            spectrum,
            tail_bound: kernel.tail_bound,
        })
    }

    pub fn eval(&self, x: f64) -> GreenValue {
        let sum = inverse_sum(&self.spectrum, x);
        GreenValue {
            value: sum.re,
            imag_residue: sum.im,
            tail_bound: self.tail_bound,
        }
    }

    pub fn profile(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.eval(x).value).collect()
    }
}

/// u(x, t) = ∫∫_0^t G(x-y, t-τ) dτ f(y) dy + ∫ G(x-y, t) g0(y) dy.
pub fn analytic_solution(
    x: f64,
    t: f64,
    source: &dyn Fn(f64) -> f64,
    initial: &dyn Fn(f64) -> f64,
    params: &ModelParams,
    config: &SpectralConfig,
) -> Result<f64> {
    Ok(AnalyticSolver::new(params, t, config, Some(source), Some(initial))?
        .eval(x)
        .value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn reference() -> ModelParams {
        ModelParams::new(0.3, 3.0, 1.5, 0.3, 7.0, 1.0).unwrap()
    }

    fn heat(nu: f64, d: f64) -> ModelParams {
        ModelParams::new(nu, d, 2.0, 0.0, 7.0, 1.0).unwrap()
    }

    #[test]
    fn green_hat_reference_values() {
        let p = reference();
        for k in [-3.0, 0.0, 0.7, 40.0] {
            assert_eq!(green_hat(k, 0.0, &p), Complex64::new(1.0, 0.0));
        }
        for t in [0.0, 0.5, 10.0] {
            assert_eq!(green_hat(0.0, t, &p), Complex64::new(1.0, 0.0));
        }
        // 40-digit evaluation of e^{-3cos(0.15π)} e^{i(0.3 - 3 sin(0.15π))}
        let g = green_hat(1.0, 1.0, &p);
        assert_relative_eq!(g.re, 0.033_634_594_939_392_03, max_relative = 1e-13);
        assert_relative_eq!(g.im, -0.060_296_841_163_399_32, max_relative = 1e-13);
        assert_relative_eq!(g.norm(), 0.069_043_428_586_804_57, max_relative = 1e-13);
    }

    #[test]
    fn green_hat_factorizes() {
        let p = reference();
        for i in -200..=200 {
            let k = i as f64 * 0.173;
            for t in [0.1, 1.0, 2.5] {
                let drift = Complex64::new(0.0, p.nu * k * t).exp();
                let stable = (-riesz_feller_symbol(k, p.alpha, p.theta) * p.dispersion * t).exp();
                let g = green_hat(k, t, &p);
                // |Ĝ| ≤ 1, so this is relative to the unit bound
                assert!((g - drift * stable).norm() <= 1e-14);
                assert!((green_hat(-k, t, &p) - g.conj()).norm() <= 1e-15);
            }
        }
    }

    #[test]
    fn green_hat_magnitude_decreases() {
        let p = reference();
        for t in [0.05, 1.0] {
            let mags: Vec<f64> = (1..2000)
                .map(|i| green_hat(i as f64 * 0.005, t, &p).norm())
                .collect();
            assert!(mags.windows(2).all(|w| w[1] < w[0]));
            let neg: Vec<f64> = (1..2000)
                .map(|i| green_hat(-(i as f64) * 0.005, t, &p).norm())
                .collect();
            assert!(neg.windows(2).all(|w| w[1] < w[0]));
            assert!(mags.iter().all(|&m| m <= 1.0));
        }
    }

    #[test]
    fn config_validation() {
        assert!(SpectralConfig::new(0.0, 128, 10.0).is_err());
        assert!(SpectralConfig::new(10.0, 63, 10.0).is_err());
        assert!(SpectralConfig::new(10.0, 65, 10.0).is_err());
        assert!(SpectralConfig::new(10.0, 128, -1.0).is_err());
        let cfg = SpectralConfig::new(10.0, 128, 10.0).unwrap();
        let nodes: Vec<_> = cfg.nodes().collect();
        assert_eq!(nodes.len(), 129);
        assert_eq!(nodes[64].0, 0.0);
        assert_relative_eq!(nodes.iter().map(|n| n.1).sum::<f64>(), 20.0, epsilon = 1e-12);

        let p = reference();
        let auto = SpectralConfig::auto(&p, 0.1).unwrap();
        assert!(auto.tail_bound(&p, 0.1) <= 1.0001 * AUTO_TAIL);
        assert!(auto.period() >= p.length + 2.0 * DEFAULT_PAD);
        assert!(matches!(
            SpectralConfig::auto(&p, 1e-7),
            Err(FadeError::TimeTooSmall { .. })
        ));
    }

    #[test]
    fn truncation_is_reported() {
        let p = reference();
        let cfg = SpectralConfig::new(2.0, 64, 0.0).unwrap();
        let v = green_eval(0.0, 0.1, &p, &cfg).unwrap();
        assert!(v.tail_bound > WARN_TAIL);
        assert!(green_eval(0.0, 0.0, &p, &cfg).is_err());
    }

    #[test]
    fn kernel_is_normalized_and_real() {
        let p = reference();
        for t in [0.1, 1.0] {
            let cfg = SpectralConfig::auto(&p, t).unwrap();
            let kernel = GreenKernel::new(&p, t, &cfg).unwrap();
            assert!((kernel.window_integral() - 1.0).abs() < 1e-6);
            for i in -50..=50 {
                let v = kernel.eval(i as f64 * 0.2);
                assert!(v.imag_residue.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn heat_kernel_limit() {
        let d = 3.0;
        let p = heat(0.0, d);
        for t in [0.1, 0.5] {
            let cfg = SpectralConfig::auto(&p, t).unwrap();
            let kernel = GreenKernel::new(&p, t, &cfg).unwrap();
            let reach = 10.0 * (d * t).sqrt();
            for i in -100..=100 {
                let x = reach * i as f64 / 100.0;
                let exact = (-x * x / (4.0 * d * t)).exp() / (4.0 * PI * d * t).sqrt();
                assert!((kernel.eval(x).value - exact).abs() < 1e-8, "x = {x}");
            }
        }
    }

    fn peak_location(kernel: &GreenKernel, lo: f64, hi: f64) -> f64 {
        // golden-section search on a unimodal kernel
        let ratio = (5f64.sqrt() - 1.0) / 2.0;
        let (mut a, mut b) = (lo, hi);
        while b - a > 1e-9 {
            let c = b - ratio * (b - a);
            let e = a + ratio * (b - a);
            if kernel.eval(c).value > kernel.eval(e).value {
                b = e;
            } else {
                a = c;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn drift_translates_kernel() {
        let t = 0.5;
        let shift = 0.8;
        let base = heat(0.3, 3.0);
        let moved = heat(0.3 + shift, 3.0);
        let cfg = SpectralConfig::auto(&base, t).unwrap();
        let k0 = GreenKernel::new(&base, t, &cfg).unwrap();
        let k1 = GreenKernel::new(&moved, t, &cfg).unwrap();
        let p0 = peak_location(&k0, -3.0, 3.0);
        let p1 = peak_location(&k1, -3.0, 3.0);
        assert_relative_eq!(p0, 0.3 * t, epsilon = 1e-6);
        assert_relative_eq!(p1 - p0, shift * t, epsilon = 1e-6);

        let frac = reference();
        let moved = ModelParams {
            nu: frac.nu + shift,
            ..frac
        };
        let cfg = SpectralConfig::auto(&frac, t).unwrap();
        let k0 = GreenKernel::new(&frac, t, &cfg).unwrap();
        let k1 = GreenKernel::new(&moved, t, &cfg).unwrap();
        let cell = 0.01;
        let d = peak_location(&k1, -3.0, 3.0) - peak_location(&k0, -3.0, 3.0);
        assert!((d - shift * t).abs() < cell);
    }

    #[test]
    fn time_integral_reference_values() {
        let p = reference();
        assert_eq!(time_integral_kernel(0.0, 1.3, &p), Complex64::new(1.3, 0.0));
        let h = ModelParams::new(0.0, 1.0, 2.0, 0.0, 7.0, 1.0).unwrap();
        let v = time_integral_kernel(1.0, 1.0, &h);
        assert_relative_eq!(v.re, 0.632_120_558_828_557_7, epsilon = 1e-15);
        assert_eq!(v.im, 0.0);
        // continuity across the series switch
        let a = time_integral_kernel(1e-5, 1.0, &p);
        let b = time_integral_kernel(1.2e-5, 1.0, &p);
        assert!((a - b).norm() < 1e-5);
    }

    #[test]
    fn time_integral_matches_tau_quadrature() {
        let p = reference();
        let horizon = 1.0;
        let panels = 200;
        let h = horizon / panels as f64;
        for k in [-7.0, -0.4, 1e-3, 0.9, 3.3, 25.0] {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..panels {
                let mid = (i as f64 + 0.5) * h;
                for (&x, &w) in GL_NODES.iter().zip(&GL_WEIGHTS) {
                    for tau in [mid - 0.5 * h * x, mid + 0.5 * h * x] {
                        acc += green_hat(k, horizon - tau, &p) * (0.5 * h * w);
                    }
                }
            }
            let v = time_integral_kernel(k, horizon, &p);
            assert!((v - acc).norm() < 1e-12 * acc.norm().max(1.0), "k = {k}");
        }
    }

    #[test]
    fn uniqueness_kernel_never_vanishes() {
        let p = reference();
        let min = (0..10_000)
            .map(|i| -100.0 + 200.0 * i as f64 / 9_999.0)
            .map(|k| time_integral_kernel(k, p.final_time, &p).norm())
            .fold(f64::INFINITY, f64::min);
        assert!(min > 0.0);
    }

    #[test]
    fn zero_data_gives_zero() {
        let p = reference();
        let cfg = SpectralConfig::auto(&p, 0.5).unwrap();
        let zero = |_: f64| 0.0;
        let u = analytic_solution(2.0, 0.5, &zero, &zero, &p, &cfg).unwrap();
        assert_eq!(u, 0.0);
    }

    fn gaussian(center: f64, width: f64) -> impl Fn(f64) -> f64 {
        move |x| (-(x - center).powi(2) / (2.0 * width * width)).exp()
    }

    /// Whole-line heat evolution of exp(-(x-c)²/2s²): a Gaussian of
    /// variance s² + 2dt and amplitude s/√(s² + 2dt).
    fn evolved_gaussian(x: f64, t: f64, d: f64, c: f64, s: f64) -> f64 {
        let var = s * s + 2.0 * d * t;
        (s * s / var).sqrt() * (-(x - c).powi(2) / (2.0 * var)).exp()
    }

    #[test]
    fn heat_convolution_of_gaussian() {
        let d = 3.0;
        let p = heat(0.0, d);
        let t = 0.1;
        let g0 = gaussian(3.5, 0.3);
        let cfg = SpectralConfig::auto(&p, t).unwrap();
        let solver = AnalyticSolver::new(&p, t, &cfg, None, Some(&g0)).unwrap();
        for i in 0..=70 {
            let x = i as f64 * 0.1;
            let exact = evolved_gaussian(x, t, d, 3.5, 0.3);
            let v = solver.eval(x);
            assert!((v.value - exact).abs() < 1e-6, "x = {x}");
            assert!(v.imag_residue.abs() < 1e-10);
        }
        let single = analytic_solution(3.2, t, &|_| 0.0, &g0, &p, &cfg).unwrap();
        assert!((single - evolved_gaussian(3.2, t, d, 3.5, 0.3)).abs() < 1e-6);
    }

    #[test]
    fn heat_source_term_matches_duhamel_quadrature() {
        // v(x, t) = ∫_0^t (evolved source over t - τ) dτ, with the Gaussian
        // evolution known in closed form.
        let d = 1.0;
        let p = heat(0.0, d);
        let t = 0.4;
        let f = gaussian(3.5, 0.4);
        let cfg = SpectralConfig::auto_with(&p, t, 60.0, DEFAULT_PAD).unwrap();
        let solver = AnalyticSolver::new(&p, t, &cfg, Some(&f), None).unwrap();
        for x in [2.0, 3.0, 3.5, 4.2, 5.5] {
            let panels = 100;
            let h = t / panels as f64;
            let mut exact = 0.0;
            for i in 0..panels {
                let mid = (i as f64 + 0.5) * h;
                for (&n, &w) in GL_NODES.iter().zip(&GL_WEIGHTS) {
                    for tau in [mid - 0.5 * h * n, mid + 0.5 * h * n] {
                        exact += 0.5 * h * w * evolved_gaussian(x, t - tau, d, 3.5, 0.4);
                    }
                }
            }
            assert!((solver.eval(x).value - exact).abs() < 1e-6, "x = {x}");
        }
    }
}
