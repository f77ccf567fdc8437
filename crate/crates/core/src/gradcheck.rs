//! Finite-difference oracle for the analytic derivatives, and measurement of
//! the derivative jump at the origin.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::activation::{self, ShapeParam};
use crate::error::{Error, Result};

/// Inputs with `|x|` below this are skipped by the randomized check: a stencil
/// there straddles or hugs the branch point.
pub const KINK_BAND: f64 = 1e-3;

/// Offset left of zero used to estimate the left limit of a derivative.
pub const LEFT_PROBE: f64 = 1e-9;

/// `eps^(1/3) * max(1, |v|)`, the usual step for a central difference.
pub fn step_size(v: f64) -> f64 {
    f64::EPSILON.cbrt() * v.abs().max(1.0)
}

/// `(f(x + h) - f(x - h)) / (2h)`.
pub fn central_difference(mut f: impl FnMut(f64) -> f64, x: f64, h: f64) -> Result<f64> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidConfig(format!("step must be finite and > 0, got {h}")));
    }
    let hi = f(x + h);
    let lo = f(x - h);
    if !(hi.is_finite() && lo.is_finite()) {
        return Err(Error::NonFiniteStencil { x, h });
    }
    Ok((hi - lo) / (2.0 * h))
}

/// Error of `analytic` against `numeric`, relative to `max(1, |analytic|)`.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckConfig {
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    /// `x` is drawn uniformly from this closed range.
    pub x_range: (f64, f64),
    /// `alpha` is drawn log-uniformly from this closed range.
    pub alpha_range: (f64, f64),
    pub kink_band: f64,
}

impl Default for GradCheckConfig {
    fn default() -> Self {
        GradCheckConfig {
            samples: 1000,
            seed: 1,
            tol: 1e-6,
            x_range: (-6.0, 6.0),
            alpha_range: (1.0 / 16.0, 16.0),
            kink_band: KINK_BAND,
        }
    }
}

impl GradCheckConfig {
    fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if self.samples == 0 {
            return bad("gradcheck needs at least one sample");
        }
        if !(self.tol.is_finite() && self.tol >= 0.0) {
            return bad("tolerance must be finite and >= 0");
        }
        let (xl, xh) = self.x_range;
        if !(xl.is_finite() && xh.is_finite() && xl <= xh) {
            return bad("x range must be finite and ordered");
        }
        if !(self.kink_band >= 0.0) {
            return bad("kink band must be >= 0");
        }
        if xl > -self.kink_band && xh < self.kink_band {
            return bad("x range lies inside the kink band");
        }
        let (al, ah) = self.alpha_range;
        ShapeParam::new(al)?;
        ShapeParam::new(ah)?;
        if al > ah {
            return bad("alpha range must be ordered");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub samples: usize,
    pub max_rel_err_dx: f64,
    pub max_rel_err_dalpha: f64,
    /// `(x, alpha)` with the largest error of either kind.
    pub worst_input: (f64, f64),
    pub tol: f64,
    pub passed: bool,
}

impl GradCheckReport {
    pub fn max_rel_err(&self) -> f64 {
        self.max_rel_err_dx.max(self.max_rel_err_dalpha)
    }
}

/// Randomized check of [`activation::celu_dx`] and [`activation::celu_dalpha`]
/// with the default sampling ranges.
pub fn check_celu_gradients(samples: usize, seed: u64, tol: f64) -> Result<GradCheckReport> {
    check_celu_gradients_with(&GradCheckConfig {
        samples,
        seed,
        tol,
        ..GradCheckConfig::default()
    })
}

pub fn check_celu_gradients_with(cfg: &GradCheckConfig) -> Result<GradCheckReport> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (xl, xh) = cfg.x_range;
    let (ln_al, ln_ah) = (cfg.alpha_range.0.ln(), cfg.alpha_range.1.ln());

    let mut max_dx: f64 = 0.0;
    let mut max_da: f64 = 0.0;
    let mut worst = (f64::NAN, f64::NAN);
    let mut worst_err = -1.0;

    for _ in 0..cfg.samples {
        let x = loop {
            let x = rng.gen_range(xl..=xh);
            if x.abs() >= cfg.kink_band {
                break x;
            }
        };
        let alpha = ShapeParam::new(rng.gen_range(ln_al..=ln_ah).exp())?;
        let a = alpha.get();

        let num_dx = central_difference(|t| activation::celu(t, alpha), x, step_size(x))?;
        let h_alpha = step_size(a).min(0.5 * a);
        // alpha +- h_alpha stays positive by construction of h_alpha
        let num_da = central_difference(
            |s| activation::celu(x, ShapeParam::new(s).expect("positive alpha")),
            a,
            h_alpha,
        )?;

        let err_dx = relative_error(activation::celu_dx(x, alpha), num_dx);
        let err_da = relative_error(activation::celu_dalpha(x, alpha), num_da);
        max_dx = max_dx.max(err_dx);
        max_da = max_da.max(err_da);
        let err = err_dx.max(err_da);
        if err > worst_err {
            worst_err = err;
            worst = (x, a);
        }
    }

    Ok(GradCheckReport {
        samples: cfg.samples,
        max_rel_err_dx: max_dx,
        max_rel_err_dalpha: max_da,
        worst_input: worst,
        tol: cfg.tol,
        passed: max_dx <= cfg.tol && max_da <= cfg.tol,
    })
}

/// Derivative at `0` against its value just left of `0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscontinuityReport {
    pub alpha: f64,
    pub left_limit_estimate: f64,
    pub right_value: f64,
    pub gap: f64,
}

impl DiscontinuityReport {
    fn from_derivative(alpha: ShapeParam, dx: impl Fn(f64, ShapeParam) -> f64) -> Self {
        let left = dx(-LEFT_PROBE, alpha);
        let right = dx(0.0, alpha);
        DiscontinuityReport {
            alpha: alpha.get(),
            left_limit_estimate: left,
            right_value: right,
            gap: (left - right).abs(),
        }
    }
}

/// ELU's derivative jumps by about `|alpha - 1|` at the origin.
pub fn measure_elu_discontinuity(alpha: ShapeParam) -> DiscontinuityReport {
    DiscontinuityReport::from_derivative(alpha, activation::elu_dx)
}

/// CELU's gap is at most `LEFT_PROBE / alpha` for every `alpha`.
pub fn measure_celu_discontinuity(alpha: ShapeParam) -> DiscontinuityReport {
    DiscontinuityReport::from_derivative(alpha, activation::celu_dx)
}

#[cfg(test)]
mod tests {
    use super::*;

    const E_M1: f64 = 0.367_879_441_171_442_321_595_523_770_161;

    fn a(alpha: f64) -> ShapeParam {
        ShapeParam::new(alpha).unwrap()
    }

    #[test]
    fn central_difference_examples() {
        for x in [-3.0, 0.0, 0.7, 1e3] {
            let d = central_difference(|t| t, x, 1e-4).unwrap();
            assert!((d - 1.0).abs() < 1e-9, "{d}");
        }
        let d = central_difference(|t| activation::celu(t, ShapeParam::ONE), -1.0, 1e-5).unwrap();
        assert!((d - E_M1).abs() < 1e-8);
        assert_eq!(central_difference(|_| 0.0, 2.0, 1e-3).unwrap(), 0.0);
    }

    #[test]
    fn central_difference_rejects_bad_stencils() {
        assert!(matches!(
            central_difference(|t| 1.0 / t, 0.0, 0.0),
            Err(Error::InvalidConfig(_))
        ));
        assert!(matches!(
            central_difference(|t| (t - 1.0).ln(), 1.0, 0.5),
            Err(Error::NonFiniteStencil { .. })
        ));
    }

    #[test]
    fn default_check_passes() {
        let r = check_celu_gradients(1000, 1, 1e-6).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.samples, 1000);
        assert!(r.worst_input.0.abs() >= KINK_BAND);
    }

    #[test]
    fn positive_inputs_have_rounding_level_errors() {
        let r = check_celu_gradients_with(&GradCheckConfig {
            x_range: (0.01, 6.0),
            ..GradCheckConfig::default()
        })
        .unwrap();
        assert!(r.max_rel_err_dx < 1e-9, "{r:?}");
        assert_eq!(r.max_rel_err_dalpha, 0.0);
    }

    #[test]
    fn zero_tolerance_fails() {
        let r = check_celu_gradients(200, 1, 0.0).unwrap();
        assert!(!r.passed);
        assert!(r.max_rel_err() > 0.0);
    }

    #[test]
    fn invalid_configs() {
        assert!(check_celu_gradients(0, 1, 1e-6).is_err());
        assert!(check_celu_gradients(10, 1, -1.0).is_err());
        assert!(check_celu_gradients(10, 1, f64::NAN).is_err());
        let inside_band = GradCheckConfig {
            x_range: (-1e-4, 1e-4),
            ..GradCheckConfig::default()
        };
        assert!(check_celu_gradients_with(&inside_band).is_err());
    }

    #[test]
    fn deterministic_under_seed() {
        assert_eq!(
            check_celu_gradients(300, 9, 1e-6).unwrap(),
            check_celu_gradients(300, 9, 1e-6).unwrap()
        );
    }

    #[test]
    fn elu_discontinuity_examples() {
        assert!(measure_elu_discontinuity(a(1.0)).gap <= 1e-8);
        assert!((measure_elu_discontinuity(a(3.0)).gap - 2.0).abs() <= 1e-6);
        assert!((measure_elu_discontinuity(a(0.25)).gap - 0.75).abs() <= 1e-6);
        let r = measure_elu_discontinuity(a(3.0));
        assert_eq!(r.right_value, 1.0);
        assert_eq!(r.gap, (r.left_limit_estimate - r.right_value).abs());
    }

    #[test]
    fn celu_discontinuity_examples() {
        assert!(measure_celu_discontinuity(a(3.0)).gap <= 1e-8);
        assert!(measure_celu_discontinuity(a(0.25)).gap <= 1e-7);
        assert!(measure_celu_discontinuity(a(1.0)).gap <= 1e-8);
    }

    #[test]
    fn discontinuity_law() {
        for al in [0.25, 0.5, 2.0, 3.0, 4.0] {
            let elu = measure_elu_discontinuity(a(al)).gap;
            assert!((elu - (al - 1.0).abs()).abs() <= 1e-5, "alpha {al}: {elu}");
            assert!(measure_celu_discontinuity(a(al)).gap <= 1e-7);
        }
    }

    #[test]
    fn exploding_gain_contrast() {
        let alpha = a(4.0);
        let xs = (1..=10_000).map(|i| -(i as f64) / 10_000.0);
        let (mut elu_max, mut celu_max) = (0.0_f64, 0.0_f64);
        for x in xs {
            elu_max = elu_max.max(activation::elu_dx(x, alpha));
            celu_max = celu_max.max(activation::celu_dx(x, alpha));
        }
        assert!(elu_max >= 3.9);
        assert!(celu_max <= 1.0);
    }
}
