//! Model parameters and the fractional-calculus building blocks shared by the
//! finite-difference and spectral solvers.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{FadeError, Result};

/// Physical and model constants of the advection-dispersion problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Average velocity ν.
    pub nu: f64,
    /// Dispersion coefficient d (length^α / time).
    pub dispersion: f64,
    /// Fractional order α, 1 < α ≤ 2.
    pub alpha: f64,
    /// Skewness θ, |θ| ≤ min(α, 2 - α).
    pub theta: f64,
    /// Domain length L.
    pub length: f64,
    /// Final time T.
    pub final_time: f64,
}

impl ModelParams {
    /// Builds and validates a parameter set.
    pub fn new(
        nu: f64,
        dispersion: f64,
        alpha: f64,
        theta: f64,
        length: f64,
        final_time: f64,
    ) -> Result<Self> {
        validate_params(Self {
            nu,
            dispersion,
            alpha,
            theta,
            length,
            final_time,
        })
    }

    /// Checks every admissibility constraint.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("nu", self.nu),
            ("dispersion", self.dispersion),
            ("alpha", self.alpha),
            ("theta", self.theta),
            ("length", self.length),
            ("final_time", self.final_time),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(FadeError::NonFinite { name, value });
            }
        }
        check_order(self.alpha)?;
        let bound = skew_bound(self.alpha);
        if self.theta.abs() > bound {
            return Err(FadeError::SkewOutOfRange {
                theta: self.theta.abs(),
                bound,
            });
        }
        for (name, value) in [
            ("dispersion", self.dispersion),
            ("length", self.length),
            ("final_time", self.final_time),
        ] {
            if value <= 0.0 {
                return Err(FadeError::NonPositive { name, value });
            }
        }
        Ok(())
    }

    pub fn skew(&self) -> SkewCoefficients {
        skew_coefficients(self.alpha, self.theta)
    }
}

/// Returns `p` unchanged if it is admissible.
pub fn validate_params(p: ModelParams) -> Result<ModelParams> {
    p.validate()?;
    Ok(p)
}

/// min(α, 2 - α)
fn skew_bound(alpha: f64) -> f64 {
    alpha.min(2.0 - alpha)
}

fn check_order(alpha: f64) -> Result<()> {
    if alpha > 1.0 && alpha <= 2.0 {
        Ok(())
    } else {
        Err(FadeError::OrderOutOfRange(alpha))
    }
}

/// Normalized Grünwald weights ξ_{α,k} = Γ(k-α) / (Γ(-α) Γ(k+1)).
#[derive(Debug, Clone, PartialEq)]
pub struct GrunwaldWeights {
    alpha: f64,
    values: Vec<f64>,
}

impl GrunwaldWeights {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// ξ_k, or zero past the computed range.
    pub fn get(&self, k: usize) -> f64 {
        self.values.get(k).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Weights ξ_{α,0..=max_index} from the recurrence ξ_k = ξ_{k-1} (k-1-α)/k.
///
/// The Gamma-ratio form overflows for k around 170; the recurrence does not.
pub fn grunwald_weights(alpha: f64, max_index: usize) -> Result<GrunwaldWeights> {
    check_order(alpha)?;
    let mut values = Vec::with_capacity(max_index + 1);
    values.push(1.0);
    let mut prev = 1.0;
    for k in 1..=max_index {
        let kf = k as f64;
        prev *= (kf - 1.0 - alpha) / kf;
        values.push(prev);
    }
    Ok(GrunwaldWeights { alpha, values })
}

/// Weights of the right- and left-sided derivatives in the two-sided
/// shifted Grünwald approximation of the Riesz-Feller derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkewCoefficients {
    /// a_r = sin((α-θ)π/2) / sin(απ)
    pub right: f64,
    /// a_l = sin((α+θ)π/2) / sin(απ)
    pub left: f64,
}

/// `1/sin(απ)` is a 0/0 form at α = 2 (where θ must vanish). There the
/// continuous limit -1/2 is returned, which turns the stencil into the
/// classical central second difference.
pub fn skew_coefficients(alpha: f64, theta: f64) -> SkewCoefficients {
    if alpha == 2.0 {
        return SkewCoefficients {
            right: -0.5,
            left: -0.5,
        };
    }
    let denom = (alpha * PI).sin();
    SkewCoefficients {
        right: ((alpha - theta) * FRAC_PI_2).sin() / denom,
        left: ((alpha + theta) * FRAC_PI_2).sin() / denom,
    }
}

/// ψ_θ^α(k) = |k|^α exp(i sign(k) θ π/2), so that F{D^α_θ c} = -ψ ĉ.
pub fn riesz_feller_symbol(k: f64, alpha: f64, theta: f64) -> Complex64 {
    if k == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let magnitude = k.abs().powf(alpha);
    let phase = k.signum() * theta * FRAC_PI_2;
    Complex64::from_polar(magnitude, phase)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn reference() -> ModelParams {
        ModelParams {
            nu: 0.3,
            dispersion: 3.0,
            alpha: 1.5,
            theta: 0.3,
            length: 7.0,
            final_time: 1.0,
        }
    }

    #[test]
    fn accepts_reference_configuration() {
        let p = reference();
        assert_eq!(validate_params(p).unwrap(), p);
        let p2 = ModelParams {
            alpha: 2.0,
            theta: 0.0,
            ..p
        };
        assert!(validate_params(p2).is_ok());
    }

    #[test]
    fn rejects_out_of_range() {
        let p = reference();
        let skew = ModelParams { theta: 0.6, ..p };
        assert!(matches!(
            validate_params(skew),
            Err(FadeError::SkewOutOfRange { .. })
        ));
        let neg = ModelParams { theta: -0.6, ..p };
        assert!(matches!(
            validate_params(neg),
            Err(FadeError::SkewOutOfRange { .. })
        ));
        for alpha in [1.0, 0.5, 2.01, f64::NAN] {
            let bad = ModelParams { alpha, ..p };
            assert!(validate_params(bad).is_err(), "alpha = {alpha}");
        }
        let theta_at_two = ModelParams {
            alpha: 2.0,
            theta: 1e-3,
            ..p
        };
        assert!(validate_params(theta_at_two).is_err());
        for (d, l, t) in [(0.0, 7.0, 1.0), (3.0, -1.0, 1.0), (3.0, 7.0, 0.0)] {
            let bad = ModelParams {
                dispersion: d,
                length: l,
                final_time: t,
                ..p
            };
            assert!(matches!(
                validate_params(bad),
                Err(FadeError::NonPositive { .. })
            ));
        }
    }

    #[test]
    fn weights_small_cases() {
        let w = grunwald_weights(1.5, 3).unwrap();
        assert_eq!(w.values(), &[1.0, -1.5, 0.375, 0.0625]);
        let w = grunwald_weights(2.0, 3).unwrap();
        assert_eq!(w.values(), &[1.0, -2.0, 1.0, 0.0]);
        assert_eq!(grunwald_weights(1.5, 0).unwrap().values(), &[1.0]);
        assert!(grunwald_weights(1.0, 3).is_err());
        assert_eq!(w.get(100), 0.0);
    }

    #[test]
    fn weights_partial_sum_vanishes() {
        // Partial sum of the binomial series of (1-1)^1.5 to k = 1000,
        // evaluated at 40 digits: -8.9239675567055e-6.
        let w = grunwald_weights(1.5, 1000).unwrap();
        let sum: f64 = w.values().iter().sum();
        assert!(sum.abs() < 1e-4);
        assert_relative_eq!(sum, -8.923967556705513e-6, max_relative = 1e-9);
    }

    /// Γ(x) sign and log-magnitude, with reflection for negative arguments.
    fn signed_ln_gamma(x: f64) -> (f64, f64) {
        if x > 0.0 {
            (1.0, ln_gamma_pos(x))
        } else {
            // Γ(x) = π / (sin(πx) Γ(1-x))
            let s = (PI * x).sin();
            (s.signum(), PI.ln() - s.abs().ln() - ln_gamma_pos(1.0 - x))
        }
    }

    /// Lanczos (g = 7, n = 9) approximation of ln Γ(x), x > 0.
    fn ln_gamma_pos(x: f64) -> f64 {
        const G: f64 = 7.0;
        const C: [f64; 9] = [
            0.999_999_999_999_809_9,
            676.520_368_121_885_1,
            -1_259.139_216_722_402_8,
            771.323_428_777_653_1,
            -176.615_029_162_140_6,
            12.507_343_278_686_905,
            -0.138_571_095_265_720_12,
            9.984_369_578_019_572e-6,
            1.505_632_735_149_311_6e-7,
        ];
        if x < 0.5 {
            return PI.ln() - (PI * x).sin().abs().ln() - ln_gamma_pos(1.0 - x);
        }
        let x = x - 1.0;
        let mut a = C[0];
        let t = x + G + 0.5;
        for (i, c) in C.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
    }

    #[test]
    fn weights_match_gamma_ratio() {
        for alpha in [1.1, 1.5, 1.9] {
            let w = grunwald_weights(alpha, 50).unwrap();
            let (s0, l0) = signed_ln_gamma(-alpha);
            for k in 0..=50usize {
                let (sk, lk) = signed_ln_gamma(k as f64 - alpha);
                let lf = ln_gamma_pos(k as f64 + 1.0);
                let direct = sk * s0 * (lk - l0 - lf).exp();
                assert_relative_eq!(w.get(k), direct, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn skew_reference_values() {
        // 40-digit evaluations of the defining sine ratios.
        let c = skew_coefficients(1.5, 0.0);
        assert_relative_eq!(c.right, -0.707_106_781_186_547_5, epsilon = 1e-15);
        assert_eq!(c.right, c.left);
        let c = skew_coefficients(1.5, 0.3);
        assert_relative_eq!(c.right, -0.951_056_516_295_153_6, epsilon = 1e-15);
        assert_relative_eq!(c.left, -0.309_016_994_374_947_4, epsilon = 1e-15);
        let c = skew_coefficients(2.0, 0.0);
        assert_eq!((c.right, c.left), (-0.5, -0.5));
        // continuity of the limit
        let near = skew_coefficients(2.0 - 1e-7, 0.0);
        assert_relative_eq!(near.right, -0.5, epsilon = 1e-6);
    }

    #[test]
    fn symbol_reference_values() {
        assert_eq!(riesz_feller_symbol(0.0, 1.5, 0.3), Complex64::new(0.0, 0.0));
        let s = riesz_feller_symbol(1.0, 2.0, 0.0);
        assert_relative_eq!(s.re, 1.0, epsilon = 1e-15);
        assert_eq!(s.im, 0.0);
        let s = riesz_feller_symbol(-2.0, 1.5, 0.3);
        assert_relative_eq!(s.re, 2.520_147_021_340_202, epsilon = 1e-14);
        assert_relative_eq!(s.im, -1.284_079_043_840_412_3, epsilon = 1e-14);
    }

    fn admissible() -> impl Strategy<Value = (f64, f64, f64)> {
        (1.0001f64..=2.0, -1.0f64..=1.0, -50.0f64..50.0).prop_map(|(alpha, frac, k)| {
            let theta = frac * skew_bound(alpha);
            (alpha, theta, k)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn symbol_real_part_positive((alpha, theta, k) in admissible()) {
            prop_assume!(k != 0.0);
            let s = riesz_feller_symbol(k, alpha, theta);
            prop_assert!(s.re > 0.0);
            let expected = k.abs().powf(alpha) * (theta * FRAC_PI_2).cos();
            prop_assert!((s.re - expected).abs() <= 1e-12 * expected.max(1.0));
        }

        #[test]
        fn symbol_conjugate_symmetric((alpha, theta, k) in admissible()) {
            let a = riesz_feller_symbol(-k, alpha, theta);
            let b = riesz_feller_symbol(k, alpha, theta).conj();
            prop_assert!((a - b).norm() <= 1e-12 * b.norm().max(1.0));
        }

        #[test]
        fn skew_swaps_under_reflection((alpha, theta, _k) in admissible()) {
            prop_assume!(alpha < 2.0);
            let a = skew_coefficients(alpha, theta);
            let b = skew_coefficients(alpha, -theta);
            prop_assert_eq!(a.right, b.left);
            prop_assert_eq!(a.left, b.right);
        }

        #[test]
        fn weights_follow_recurrence(alpha in 1.0001f64..=2.0, len in 2usize..300) {
            let w = grunwald_weights(alpha, len).unwrap();
            prop_assert_eq!(w.get(0), 1.0);
            prop_assert_eq!(w.get(1), -alpha);
            for k in 2..=len {
                let expected = w.get(k - 1) * ((k as f64 - 1.0 - alpha) / k as f64);
                prop_assert_eq!(w.get(k), expected);
                if alpha < 2.0 {
                    prop_assert!(w.get(k) > 0.0);
                }
            }
        }
    }
}
