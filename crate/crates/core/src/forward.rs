//! Implicit Euler / shifted Grünwald finite differences on `[0, L]` with zero
//! Dirichlet data, and the dense source-to-observation map.
//!
//! With `c^j` the interior values at `t_j = j Δt`, one step solves
//!
//! ```text
//! S c^{j+1} = c^j + Δt r,   S = I + D + V,
//! ```
//!
//! where `D` is the two-sided fractional stencil (scaled by `d Δt / Δx^α`)
//! and `V` the implicit upwind difference for `ν ∂/∂x`. Writing `A = S⁻¹`,
//! induction over `M` steps gives
//!
//! ```text
//! c^M - A^M c^0 = Δt (I - A)⁻¹ (I - A^M) A r = K r.
//! ```

use log::{debug, warn};
use nalgebra::{DMatrix, DVector, LU};

use crate::error::{FadeError, Result};
use crate::fractional::{grunwald_weights, ModelParams};

/// Uniform space/time discretization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    n_space: usize,
    n_time: usize,
    dx: f64,
    dt: f64,
}

impl Grid {
    /// `n_space` intervals on `[0, L]` (so `n_space - 1` unknowns) and
    /// `n_time` steps on `[0, T]`.
    pub fn new(params: &ModelParams, n_space: usize, n_time: usize) -> Result<Self> {
        if n_space < 3 {
            return Err(FadeError::InvalidGrid(format!(
                "need at least 3 space intervals, got {n_space}"
            )));
        }
        if n_time < 1 {
            return Err(FadeError::InvalidGrid("need at least one time step".into()));
        }
        Ok(Self {
            n_space,
            n_time,
            dx: params.length / n_space as f64,
            dt: params.final_time / n_time as f64,
        })
    }

    pub fn n_space(&self) -> usize {
        self.n_space
    }

    pub fn n_time(&self) -> usize {
        self.n_time
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Number of interior unknowns, N - 1.
    pub fn interior(&self) -> usize {
        self.n_space - 1
    }

    /// Interior node coordinates x_i = i Δx, i = 1..N-1.
    pub fn nodes(&self) -> Vec<f64> {
        (1..self.n_space).map(|i| i as f64 * self.dx).collect()
    }

    /// Samples `f` on the interior nodes.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> StateVector {
        StateVector(DVector::from_iterator(
            self.interior(),
            self.nodes().into_iter().map(f),
        ))
    }
}

/// Interior concentrations at one time level; boundary values are
/// implicitly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(DVector<f64>);

impl StateVector {
    pub fn zeros(len: usize) -> Self {
        Self(DVector::zeros(len))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn into_vector(self) -> DVector<f64> {
        self.0
    }
}

impl From<DVector<f64>> for StateVector {
    fn from(v: DVector<f64>) -> Self {
        Self(v)
    }
}

impl From<Vec<f64>> for StateVector {
    fn from(v: Vec<f64>) -> Self {
        Self(DVector::from_vec(v))
    }
}

/// Assembled matrices of the implicit scheme.
#[derive(Debug, Clone)]
pub struct SystemMatrices {
    /// Right-sided (left-looking) Grünwald part, `d Δt/Δx^α a_r ξ_{m-n+1}`.
    pub right_sided: DMatrix<f64>,
    /// Left-sided (right-looking) Grünwald part, `d Δt/Δx^α a_l ξ_{n-m+1}`.
    pub left_sided: DMatrix<f64>,
    /// Implicit upwind advection, `ν Δt/Δx` on the diagonal and its negative
    /// on the subdiagonal.
    pub advection: DMatrix<f64>,
    /// S = I + right_sided + left_sided + advection.
    pub system: DMatrix<f64>,
    /// One-step propagator A = S⁻¹.
    pub propagator: DMatrix<f64>,
    lu: LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    dt: f64,
}

impl SystemMatrices {
    pub fn dim(&self) -> usize {
        self.system.nrows()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// The full fractional stencil D.
    pub fn fractional(&self) -> DMatrix<f64> {
        &self.right_sided + &self.left_sided
    }

    /// Solves S x = b with the stored factorization.
    pub fn solve(&self, b: &DVector<f64>) -> Result<DVector<f64>> {
        self.lu
            .solve(b)
            .ok_or(FadeError::Singular("implicit system matrix"))
    }
}

/// Relative pivot size below which S is treated as singular.
const PIVOT_TOL: f64 = 1e-13;

fn lu_is_singular(lu: &LU<f64, nalgebra::Dyn, nalgebra::Dyn>) -> bool {
    let u = lu.u();
    let diag = u.diagonal();
    let max = diag.amax();
    !max.is_finite() || max == 0.0 || diag.iter().any(|d| d.abs() <= PIVOT_TOL * max)
}

/// Builds S = I + D + V and A = S⁻¹.
///
/// Row m of D is `d Δt/Δx^α (a_r Σ ξ_{m-n+1} + a_l Σ ξ_{n-m+1})` over interior
/// columns n, i.e. the minus sign of the Grünwald approximation of the
/// Riesz-Feller derivative is already folded in; sums are truncated to the
/// interior since the exterior values vanish.
pub fn assemble_operators(params: &ModelParams, grid: &Grid) -> Result<SystemMatrices> {
    params.validate()?;
    let n = grid.interior();
    let weights = grunwald_weights(params.alpha, n + 1)?;
    let skew = params.skew();
    let scale = params.dispersion * grid.dt / grid.dx.powf(params.alpha);

    let right_sided = DMatrix::from_fn(n, n, |m, col| {
        if col <= m + 1 {
            scale * skew.right * weights.get(m + 1 - col)
        } else {
            0.0
        }
    });
    let left_sided = DMatrix::from_fn(n, n, |m, col| {
        if col + 1 >= m {
            scale * skew.left * weights.get(col + 1 - m)
        } else {
            0.0
        }
    });

    let courant = params.nu * grid.dt / grid.dx;
    let mut advection = DMatrix::zeros(n, n);
    for m in 0..n {
        advection[(m, m)] = courant;
        if m > 0 {
            advection[(m, m - 1)] = -courant;
        }
    }

    let system = DMatrix::identity(n, n) + (&right_sided + &left_sided) + &advection;
    let lu = system.clone().lu();
    if lu_is_singular(&lu) {
        return Err(FadeError::Singular("implicit system matrix"));
    }
    let propagator = lu
        .try_inverse()
        .ok_or(FadeError::Singular("implicit system matrix"))?;
    debug!(
        "assembled {n}x{n} system, scale = {scale:.4e}, courant = {courant:.4e}"
    );
    Ok(SystemMatrices {
        right_sided,
        left_sided,
        advection,
        system,
        propagator,
        lu,
        dt: grid.dt,
    })
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(FadeError::DimensionMismatch { expected, found })
    }
}

/// One implicit step, c^{j+1} = A (c^j + Δt r), by a triangular solve.
pub fn step_implicit(
    mats: &SystemMatrices,
    c_prev: &StateVector,
    source: &StateVector,
) -> Result<StateVector> {
    check_len(mats.dim(), c_prev.len())?;
    check_len(mats.dim(), source.len())?;
    let rhs = &c_prev.0 + &source.0 * mats.dt;
    mats.solve(&rhs).map(StateVector)
}

/// Trajectory c^0..c^M, with c^0 = g0.
pub fn solve_forward(
    params: &ModelParams,
    grid: &Grid,
    initial: &StateVector,
    source: &StateVector,
) -> Result<Vec<StateVector>> {
    let mats = assemble_operators(params, grid)?;
    march(&mats, grid.n_time(), initial, source)
}

/// Steps an already assembled scheme `steps` times.
pub fn march(
    mats: &SystemMatrices,
    steps: usize,
    initial: &StateVector,
    source: &StateVector,
) -> Result<Vec<StateVector>> {
    check_len(mats.dim(), initial.len())?;
    let mut trajectory = Vec::with_capacity(steps + 1);
    trajectory.push(initial.clone());
    for _ in 0..steps {
        let next = step_implicit(mats, trajectory.last().expect("non-empty"), source)?;
        trajectory.push(next);
    }
    Ok(trajectory)
}

/// How [`ForwardMap::operator`] was built.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapConstruction {
    /// Δt (I - A)⁻¹ (I - A^M) A
    ClosedForm,
    /// Δt Σ_{j=1..M} A^j, used when I - A is numerically singular.
    Accumulated,
}

/// The linear map from source samples r to the observation
/// Y = c^M - A^M c^0, i.e. Y = K r (Δt is folded into K).
#[derive(Debug, Clone)]
pub struct ForwardMap {
    pub operator: DMatrix<f64>,
    /// A^M, for removing the initial-condition contribution.
    pub propagator_power: DMatrix<f64>,
    pub grid: Grid,
    pub params: ModelParams,
    pub construction: MapConstruction,
}

impl ForwardMap {
    pub fn apply(&self, source: &StateVector) -> Result<StateVector> {
        check_len(self.operator.ncols(), source.len())?;
        Ok(StateVector(&self.operator * &source.0))
    }
}

/// Assembles K from the closed form, falling back to accumulating powers of A.
pub fn assemble_forward_map(params: &ModelParams, grid: &Grid) -> Result<ForwardMap> {
    let mats = assemble_operators(params, grid)?;
    forward_map_from(&mats, params, grid)
}

pub fn forward_map_from(
    mats: &SystemMatrices,
    params: &ModelParams,
    grid: &Grid,
) -> Result<ForwardMap> {
    let n = mats.dim();
    let a = &mats.propagator;
    let identity = DMatrix::<f64>::identity(n, n);
    let a_pow = matrix_power(a, grid.n_time());

    let one_minus_a = &identity - a;
    let lu = one_minus_a.lu();
    let (operator, construction) = if lu_is_singular(&lu) {
        warn!("I - A is numerically singular; accumulating powers of A instead");
        (accumulate_powers(a, grid.n_time(), grid.dt()), MapConstruction::Accumulated)
    } else {
        let rhs = (&identity - &a_pow) * a;
        match lu.solve(&rhs) {
            Some(k) => (k * grid.dt(), MapConstruction::ClosedForm),
            None => (
                accumulate_powers(a, grid.n_time(), grid.dt()),
                MapConstruction::Accumulated,
            ),
        }
    };
    Ok(ForwardMap {
        operator,
        propagator_power: a_pow,
        grid: *grid,
        params: *params,
        construction,
    })
}

/// Δt Σ_{j=1..M} A^j
pub fn accumulate_powers(a: &DMatrix<f64>, steps: usize, dt: f64) -> DMatrix<f64> {
    let n = a.nrows();
    let mut power = DMatrix::<f64>::identity(n, n);
    let mut sum = DMatrix::<f64>::zeros(n, n);
    for _ in 0..steps {
        power = a * &power;
        sum += &power;
    }
    sum * dt
}

/// A^m by repeated squaring.
fn matrix_power(a: &DMatrix<f64>, mut m: usize) -> DMatrix<f64> {
    let n = a.nrows();
    let mut result = DMatrix::<f64>::identity(n, n);
    let mut base = a.clone();
    while m > 0 {
        if m & 1 == 1 {
            result = &result * &base;
        }
        m >>= 1;
        if m > 0 {
            base = &base * &base;
        }
    }
    result
}

/// Y = c^M - A^M c^0
pub fn observation_vector(
    final_state: &StateVector,
    propagator_power: &DMatrix<f64>,
    initial: &StateVector,
) -> Result<StateVector> {
    check_len(propagator_power.nrows(), final_state.len())?;
    check_len(propagator_power.ncols(), initial.len())?;
    Ok(StateVector(&final_state.0 - propagator_power * &initial.0))
}
