//! Run configuration: a flat TOML table, every key optional.
//!
//! Missing keys fall back to the reference experiment (ν = 0.3, d = 3,
//! α = 1.5, θ = 0.3 on [0, 7] up to T = 1, r(x) = 5 sin(2πx/7), zero initial
//! state, N = M = 100).

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use fade_core::{
    default_lambda_grid, difference_matrix, ForwardMap, Grid, ModelParams, NoiseSpec,
    RegularizationConfig, SpectralConfig, StabilizerOrder,
};

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RawConfig {
    pub nu: f64,
    pub dispersion: f64,
    pub alpha: f64,
    pub theta: f64,
    pub length: f64,
    pub final_time: f64,
    pub n_space: usize,
    pub n_time: usize,

    pub source: ProfileKind,
    pub source_amplitude: f64,
    pub source_wavenumber: f64,
    pub source_center: Option<f64>,
    pub source_width: f64,
    pub source_table: Vec<[f64; 2]>,

    pub ic: ProfileKind,
    pub ic_amplitude: f64,
    pub ic_wavenumber: f64,
    pub ic_center: Option<f64>,
    pub ic_width: f64,
    pub ic_table: Vec<[f64; 2]>,

    pub noise_level: f64,
    pub seed: u64,

    pub reg_order: u32,
    pub lambda_grid: Option<Vec<f64>>,
    pub lambda_rel_min: f64,
    pub lambda_rel_max: f64,
    pub lambda_count: usize,
    pub fixed_lambda: Option<f64>,

    pub out_dir: PathBuf,
    /// Also evaluate the Fourier-quadrature solution in `forward`.
    pub analytic: bool,
    /// Rerun `forward` on a grid with N and M doubled.
    pub refine: bool,
    pub spectral_k_max: Option<f64>,
    pub spectral_nodes: Option<usize>,
    pub perturb_amplitude: f64,
    pub perturb_modes: Vec<usize>,
    /// Replace K by the identity in `diagnose`, for checking the plumbing.
    pub identity_operator: bool,
}

impl Default for RawConfig {
    fn default() -> Self {
        Self {
            nu: 0.3,
            dispersion: 3.0,
            alpha: 1.5,
            theta: 0.3,
            length: 7.0,
            final_time: 1.0,
            n_space: 100,
            n_time: 100,
            source: ProfileKind::Sine,
            source_amplitude: 5.0,
            source_wavenumber: 2.0,
            source_center: None,
            source_width: 0.5,
            source_table: Vec::new(),
            ic: ProfileKind::Zero,
            ic_amplitude: 1.0,
            ic_wavenumber: 1.0,
            ic_center: None,
            ic_width: 0.5,
            ic_table: Vec::new(),
            noise_level: 0.0,
            seed: 0,
            reg_order: 1,
            lambda_grid: None,
            lambda_rel_min: 1e-8,
            lambda_rel_max: 1e2,
            lambda_count: 30,
            fixed_lambda: None,
            out_dir: PathBuf::from("out"),
            analytic: false,
            refine: false,
            spectral_k_max: None,
            spectral_nodes: None,
            perturb_amplitude: 1.0,
            perturb_modes: vec![1, 2, 4, 8, 16, 32],
            identity_operator: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    Zero,
    Sine,
    Gaussian,
    Table,
}

/// A function on [0, L] given by a preset or by tabulated samples.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    Zero,
    /// A sin(qπx/L)
    Sine { amplitude: f64, wavenumber: f64, length: f64 },
    /// A exp(-(x - x0)² / 2w²)
    Gaussian { amplitude: f64, center: f64, width: f64 },
    /// Piecewise linear through the points, zero outside their range.
    Table(Vec<[f64; 2]>),
}

impl Profile {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Profile::Zero => 0.0,
            Profile::Sine { amplitude, wavenumber, length } => {
                amplitude * (wavenumber * PI * x / length).sin()
            }
            Profile::Gaussian { amplitude, center, width } => {
                amplitude * (-(x - center).powi(2) / (2.0 * width * width)).exp()
            }
            Profile::Table(points) => {
                let i = points.partition_point(|p| p[0] < x);
                if i == points.len() {
                    return 0.0;
                }
                let [x1, y1] = points[i];
                if x1 == x {
                    return y1;
                }
                if i == 0 {
                    return 0.0;
                }
                let [x0, y0] = points[i - 1];
                y0 + (y1 - y0) * (x - x0) / (x1 - x0)
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Profile::Zero)
    }

    fn build(
        name: &str,
        kind: ProfileKind,
        amplitude: f64,
        wavenumber: f64,
        center: Option<f64>,
        width: f64,
        table: &[[f64; 2]],
        length: f64,
    ) -> Result<Self, CliError> {
        let bad = |msg: &str| Err(CliError::Config(format!("{name}: {msg}")));
        if kind != ProfileKind::Table && !table.is_empty() {
            return bad("a table is given but the profile is not `table`");
        }
        match kind {
            ProfileKind::Zero => Ok(Profile::Zero),
            ProfileKind::Sine => {
                if !amplitude.is_finite() || !wavenumber.is_finite() {
                    return bad("amplitude and wavenumber must be finite");
                }
                Ok(Profile::Sine { amplitude, wavenumber, length })
            }
            ProfileKind::Gaussian => {
                let center = center.unwrap_or(length / 2.0);
                if !(width > 0.0) || !amplitude.is_finite() || !center.is_finite() {
                    return bad("needs a finite amplitude and center and a positive width");
                }
                Ok(Profile::Gaussian { amplitude, center, width })
            }
            ProfileKind::Table => {
                if table.len() < 2 {
                    return bad("a table needs at least two points");
                }
                if table.iter().flatten().any(|v| !v.is_finite()) {
                    return bad("table entries must be finite");
                }
                if table.windows(2).any(|w| w[1][0] <= w[0][0]) {
                    return bad("table abscissae must be strictly increasing");
                }
                Ok(Profile::Table(table.to_vec()))
            }
        }
    }
}

/// Where the λ candidates come from.
#[derive(Debug, Clone, PartialEq)]
pub enum LambdaSource {
    Explicit(Vec<f64>),
    /// Log-spaced, relative to ‖K‖₂² / ‖D‖₂².
    Relative { min: f64, max: f64, count: usize },
}

/// Validated configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: ModelParams,
    pub grid: Grid,
    pub source: Profile,
    pub initial: Profile,
    pub noise: NoiseSpec,
    pub order: StabilizerOrder,
    pub lambdas: LambdaSource,
    pub fixed_lambda: Option<f64>,
    pub out_dir: PathBuf,
    pub analytic: bool,
    pub refine: bool,
    pub spectral: Option<(f64, usize)>,
    pub perturb_amplitude: f64,
    pub perturb_modes: Vec<usize>,
    pub identity_operator: bool,
}

impl RunConfig {
    /// Reads a config file, with `seed` and `out_dir` overridden when given.
    pub fn load(path: &Path, seed: Option<u64>, out_dir: Option<PathBuf>) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut raw = parse(&text)?;
        if let Some(seed) = seed {
            raw.seed = seed;
        }
        if let Some(dir) = out_dir {
            raw.out_dir = dir;
        }
        Self::from_raw(raw)
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        Self::from_raw(parse(text)?)
    }

    pub fn from_raw(raw: RawConfig) -> Result<Self, CliError> {
        let params = ModelParams::new(
            raw.nu,
            raw.dispersion,
            raw.alpha,
            raw.theta,
            raw.length,
            raw.final_time,
        )
        .map_err(config_error)?;
        let grid = Grid::new(&params, raw.n_space, raw.n_time).map_err(config_error)?;
        let source = Profile::build(
            "source",
            raw.source,
            raw.source_amplitude,
            raw.source_wavenumber,
            raw.source_center,
            raw.source_width,
            &raw.source_table,
            raw.length,
        )?;
        let initial = Profile::build(
            "ic",
            raw.ic,
            raw.ic_amplitude,
            raw.ic_wavenumber,
            raw.ic_center,
            raw.ic_width,
            &raw.ic_table,
            raw.length,
        )?;
        let noise = NoiseSpec::new(raw.noise_level, raw.seed).map_err(config_error)?;
        let order = StabilizerOrder::try_from(raw.reg_order).map_err(config_error)?;
        let lambdas = match raw.lambda_grid {
            Some(grid) => LambdaSource::Explicit(grid),
            None => {
                let ok = raw.lambda_rel_min > 0.0
                    && raw.lambda_rel_max >= raw.lambda_rel_min
                    && raw.lambda_rel_max.is_finite()
                    && raw.lambda_count > 0;
                if !ok {
                    return Err(CliError::Config(
                        "relative λ range needs 0 < lambda_rel_min ≤ lambda_rel_max and lambda_count ≥ 1"
                            .into(),
                    ));
                }
                LambdaSource::Relative {
                    min: raw.lambda_rel_min,
                    max: raw.lambda_rel_max,
                    count: raw.lambda_count,
                }
            }
        };
        if let LambdaSource::Explicit(grid) = &lambdas {
            // shared validation with the inversion module
            RegularizationConfig::new(order, grid.clone(), raw.fixed_lambda)
                .map_err(config_error)?;
        }
        if let Some(lambda) = raw.fixed_lambda {
            RegularizationConfig::new(order, vec![], Some(lambda)).map_err(config_error)?;
        }
        let spectral = match (raw.spectral_k_max, raw.spectral_nodes) {
            (None, None) => None,
            (Some(k), Some(n)) => {
                SpectralConfig::new(k, n, fade_core::analytic::DEFAULT_PAD)
                    .map_err(config_error)?;
                Some((k, n))
            }
            _ => {
                return Err(CliError::Config(
                    "spectral_k_max and spectral_nodes must be given together".into(),
                ))
            }
        };
        if !(raw.perturb_amplitude > 0.0) || !raw.perturb_amplitude.is_finite() {
            return Err(CliError::Config("perturb_amplitude must be positive".into()));
        }
        if raw.perturb_modes.contains(&0) {
            return Err(CliError::Config("perturb_modes start at 1".into()));
        }
        Ok(Self {
            params,
            grid,
            source,
            initial,
            noise,
            order,
            lambdas,
            fixed_lambda: raw.fixed_lambda,
            out_dir: raw.out_dir,
            analytic: raw.analytic,
            refine: raw.refine,
            spectral,
            perturb_amplitude: raw.perturb_amplitude,
            perturb_modes: raw.perturb_modes,
            identity_operator: raw.identity_operator,
        })
    }

    /// Regularization settings for `map`, resolving a relative λ range
    /// against its operator.
    pub fn regularization(&self, map: &ForwardMap) -> Result<RegularizationConfig, CliError> {
        let grid = match &self.lambdas {
            LambdaSource::Explicit(grid) => grid.clone(),
            LambdaSource::Relative { min, max, count } => {
                let n = map.operator.ncols();
                let d = difference_matrix(self.order, n, map.grid.dx())?;
                default_lambda_grid(&map.operator, &d, *min, *max, *count)?
            }
        };
        RegularizationConfig::new(self.order, grid, self.fixed_lambda).map_err(config_error)
    }

    pub fn spectral_config(&self, params: &ModelParams) -> Result<SpectralConfig, CliError> {
        Ok(match self.spectral {
            Some((k, n)) => SpectralConfig::new(k, n, fade_core::analytic::DEFAULT_PAD)?,
            None => SpectralConfig::auto(params, params.final_time)?,
        })
    }
}

fn parse(text: &str) -> Result<RawConfig, CliError> {
    toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
}

fn config_error(e: fade_core::FadeError) -> CliError {
    CliError::Config(e.to_string())
}
