//! Scalar ELU and CELU activations together with their analytic derivatives.
//!
//! Both rectifiers are the identity for `x >= 0`. On the negative side ELU is
//! `alpha * (exp(x) - 1)` while CELU rescales the input by the shape parameter,
//! `alpha * (exp(x / alpha) - 1)`, which makes its derivative equal to one at the
//! origin for every `alpha`.
//!
//! All functions here are total: NaN propagates, `-inf` saturates to `-alpha`
//! and `+inf` passes through. The negative branch is evaluated from a single
//! exponential per call (see [`celu_eval`]).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Strictly positive, finite shape parameter `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ShapeParam(f64);

impl ShapeParam {
    pub const ONE: ShapeParam = ShapeParam(1.0);

    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 0.0 {
            Ok(ShapeParam(alpha))
        } else {
            Err(Error::InvalidAlpha(alpha))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// Clamps `alpha` into `[lo, hi]`. Both bounds must be valid shape parameters.
    pub fn clamp(alpha: f64, lo: ShapeParam, hi: ShapeParam) -> ShapeParam {
        if alpha.is_nan() {
            return lo;
        }
        ShapeParam(alpha.clamp(lo.0, hi.0))
    }
}

impl TryFrom<f64> for ShapeParam {
    type Error = Error;

    fn try_from(alpha: f64) -> Result<Self> {
        ShapeParam::new(alpha)
    }
}

impl From<ShapeParam> for f64 {
    fn from(alpha: ShapeParam) -> f64 {
        alpha.0
    }
}

impl fmt::Display for ShapeParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl FromStr for ShapeParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let alpha: f64 = s
            .trim()
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("cannot parse alpha from {s:?}")))?;
        ShapeParam::new(alpha)
    }
}

/// Parses a comma separated list of shape parameters, e.g. `"0.25,0.5,1"`.
pub fn parse_alpha_list(s: &str) -> Result<Vec<ShapeParam>> {
    let alphas = s
        .split(',')
        .filter(|part| !part.trim().is_empty())
        .map(str::parse)
        .collect::<Result<Vec<ShapeParam>>>()?;
    if alphas.is_empty() {
        return Err(Error::InvalidConfig("empty alpha list".into()));
    }
    Ok(alphas)
}

/// Activation value and its derivatives with respect to the input and to `alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActivationEval {
    pub value: f64,
    pub dx: f64,
    pub dalpha: f64,
}

impl ActivationEval {
    /// Value, `d/dx` and `d/dalpha` of the positive (identity) branch.
    pub const IDENTITY: ActivationEval = ActivationEval {
        value: 0.0,
        dx: 1.0,
        dalpha: 0.0,
    };

    fn identity(x: f64) -> Self {
        ActivationEval {
            value: x,
            ..Self::IDENTITY
        }
    }
}

/// Horizontal and vertical offset applied by [`celu_shifted`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Shift {
    dx_shift: f64,
    dy_shift: f64,
}

impl Shift {
    pub fn new(dx_shift: f64, dy_shift: f64) -> Result<Self> {
        if dx_shift.is_finite() && dy_shift.is_finite() {
            Ok(Shift { dx_shift, dy_shift })
        } else {
            Err(Error::InvalidShift {
                dx: dx_shift,
                dy: dy_shift,
            })
        }
    }

    pub fn dx_shift(&self) -> f64 {
        self.dx_shift
    }

    pub fn dy_shift(&self) -> f64 {
        self.dy_shift
    }
}

/// Returns `(exp(u) - 1, exp(u))` computed from one exponential.
///
/// Near zero the pair is derived from `exp_m1`, which keeps `exp(u) - 1`
/// accurate to the last bit where a plain subtraction would cancel. Further
/// out `exp` is used directly so that tiny values of `exp(u)` stay resolved.
#[inline(always)]
fn exp_pair(u: f64) -> (f64, f64) {
    if u >= -1.0 {
        let em1 = u.exp_m1();
        (em1, em1 + 1.0)
    } else {
        let e = u.exp();
        (e - 1.0, e)
    }
}

/// `x` for `x >= 0`, else `alpha * (exp(x) - 1)`.
#[inline]
pub fn elu(x: f64, alpha: ShapeParam) -> f64 {
    if x >= 0.0 {
        x
    } else {
        alpha.0 * exp_pair(x).0
    }
}

/// Derivative of [`elu`] with respect to `x`: `1` for `x >= 0`, else `alpha * exp(x)`.
///
/// Jumps from `alpha` to `1` at the origin whenever `alpha != 1`.
#[inline]
pub fn elu_dx(x: f64, alpha: ShapeParam) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        alpha.0 * exp_pair(x).1
    }
}

/// Derivative of [`elu`] with respect to `alpha`: `exp(x) - 1` on the negative side.
#[inline]
pub fn elu_dalpha(x: f64, _alpha: ShapeParam) -> f64 {
    if x >= 0.0 {
        0.0
    } else {
        exp_pair(x).0
    }
}

/// Fused ELU evaluation sharing one `exp(x)`.
#[inline]
pub fn elu_eval(x: f64, alpha: ShapeParam) -> ActivationEval {
    if x >= 0.0 {
        return ActivationEval::identity(x);
    }
    let (em1, e) = exp_pair(x);
    ActivationEval {
        value: alpha.0 * em1,
        dx: alpha.0 * e,
        dalpha: em1,
    }
}

/// `x` for `x >= 0`, else `alpha * (exp(x / alpha) - 1)`.
///
/// With `alpha == 1` the quotient is exact and the result is bit-identical to
/// [`elu`]. When `x / alpha` is far enough below zero that the exponential
/// underflows the result is exactly `-alpha`.
#[inline]
pub fn celu(x: f64, alpha: ShapeParam) -> f64 {
    if x >= 0.0 {
        x
    } else {
        alpha.0 * exp_pair(x / alpha.0).0
    }
}

/// Derivative of [`celu`] with respect to `x`: `1` for `x >= 0`, else `exp(x / alpha)`.
///
/// Always in `(0, 1]` unless `exp(x / alpha)` underflows to zero.
#[inline]
pub fn celu_dx(x: f64, alpha: ShapeParam) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        exp_pair(x / alpha.0).1
    }
}

#[inline(always)]
fn celu_dalpha_from(u: f64, em1: f64, e: f64) -> f64 {
    // exp(u) * (1 - u) - 1 == (exp(u) - 1) - u * exp(u)
    if u == f64::NEG_INFINITY {
        return -1.0;
    }
    em1 - u * e
}

/// Derivative of [`celu`] with respect to `alpha`.
///
/// Zero for `x >= 0`, else `exp(u) * (1 - u) - 1` with `u = x / alpha`, which is
/// negative and tends to `-1` as `u -> -inf`.
#[inline]
pub fn celu_dalpha(x: f64, alpha: ShapeParam) -> f64 {
    if x >= 0.0 {
        return 0.0;
    }
    let u = x / alpha.0;
    let (em1, e) = exp_pair(u);
    celu_dalpha_from(u, em1, e)
}

/// Value and both derivatives of CELU from a single exponential.
///
/// Every field is bit-identical to the matching standalone function.
#[inline]
pub fn celu_eval(x: f64, alpha: ShapeParam) -> ActivationEval {
    if x >= 0.0 {
        return ActivationEval::identity(x);
    }
    let u = x / alpha.0;
    let (em1, e) = exp_pair(u);
    ActivationEval {
        value: alpha.0 * em1,
        dx: e,
        dalpha: celu_dalpha_from(u, em1, e),
    }
}

/// `celu(x - dx_shift, alpha) + dy_shift`.
#[inline]
pub fn celu_shifted(x: f64, alpha: ShapeParam, shift: Shift) -> f64 {
    celu(x - shift.dx_shift, alpha) + shift.dy_shift
}

/// `max(0, x)`, propagating NaN.
#[inline]
pub fn relu(x: f64) -> f64 {
    if x < 0.0 {
        0.0
    } else {
        x
    }
}

/// Absolute discrepancy `|celu(x, alpha) - celu(scale * x, scale * alpha) / scale|`.
///
/// Fails if `scale` is not a finite positive number or if `scale * alpha` is
/// not a valid shape parameter.
pub fn check_scale_similarity(x: f64, alpha: ShapeParam, scale: f64) -> Result<f64> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::InvalidScale(scale));
    }
    let scaled_alpha = ShapeParam::new(scale * alpha.0)?;
    let lhs = celu(x, alpha);
    let rhs = celu(scale * x, scaled_alpha) / scale;
    Ok((lhs - rhs).abs())
}

/// Elementwise activation family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Activation {
    Elu,
    Celu,
    Relu,
    Linear,
}

impl Activation {
    pub const ALL: [Activation; 4] = [
        Activation::Elu,
        Activation::Celu,
        Activation::Relu,
        Activation::Linear,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Activation::Elu => "elu",
            Activation::Celu => "celu",
            Activation::Relu => "relu",
            Activation::Linear => "linear",
        }
    }

    /// Whether `alpha` enters the activation at all.
    pub fn uses_alpha(self) -> bool {
        matches!(self, Activation::Elu | Activation::Celu)
    }

    #[inline]
    pub fn apply(self, x: f64, alpha: ShapeParam) -> f64 {
        match self {
            Activation::Elu => elu(x, alpha),
            Activation::Celu => celu(x, alpha),
            Activation::Relu => relu(x),
            Activation::Linear => x,
        }
    }

    /// Value and derivatives. ReLU uses the subgradient `1` at `x = 0`.
    #[inline]
    pub fn eval(self, x: f64, alpha: ShapeParam) -> ActivationEval {
        match self {
            Activation::Elu => elu_eval(x, alpha),
            Activation::Celu => celu_eval(x, alpha),
            Activation::Relu => ActivationEval {
                value: relu(x),
                dx: if x < 0.0 { 0.0 } else { 1.0 },
                dalpha: 0.0,
            },
            Activation::Linear => ActivationEval::identity(x),
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "elu" => Ok(Activation::Elu),
            "celu" => Ok(Activation::Celu),
            "relu" => Ok(Activation::Relu),
            "linear" | "identity" => Ok(Activation::Linear),
            other => Err(Error::InvalidConfig(format!("unknown activation {other:?}"))),
        }
    }
}
