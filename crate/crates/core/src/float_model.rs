//! Floating-point model descriptors and the underflow-driven window limits
//! they impose on a tanh-sinh node table.
//!
//! Every limit is evaluated in the log domain in `f64`, so the extended model
//! (whose underflow level is far below anything `f64` can hold) is handled by
//! the same code as single and double.

use std::f64::consts::{FRAC_PI_2, LN_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::QuadError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelName {
    Single,
    Double,
    Extended,
}

impl ModelName {
    pub const ALL: [ModelName; 3] = [ModelName::Single, ModelName::Double, ModelName::Extended];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelName::Single => "single",
            ModelName::Double => "double",
            ModelName::Extended => "extended",
        }
    }
}

impl fmt::Display for ModelName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelName {
    type Err = QuadError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "single" | "f32" => Ok(ModelName::Single),
            "double" | "f64" => Ok(ModelName::Double),
            "extended" | "f80" => Ok(ModelName::Extended),
            other => Err(QuadError::invalid(format!("unknown float model '{other}'"))),
        }
    }
}

/// IEEE 754 binary format parameters relevant to underflow analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FloatModel {
    pub name: ModelName,
    /// Smallest normalized exponent; the underflow level is `2^min_exponent`.
    pub min_exponent: i32,
    /// Spacing between 1 and the next representable number.
    pub machine_epsilon: f64,
    pub significand_bits: u32,
}

impl FloatModel {
    pub const SINGLE: FloatModel = FloatModel {
        name: ModelName::Single,
        min_exponent: -126,
        machine_epsilon: f32::EPSILON as f64,
        significand_bits: 24,
    };

    pub const DOUBLE: FloatModel = FloatModel {
        name: ModelName::Double,
        min_exponent: -1022,
        machine_epsilon: f64::EPSILON,
        significand_bits: 53,
    };

    /// x87 80-bit extended precision (64-bit significand, explicit integer bit).
    pub const EXTENDED: FloatModel = FloatModel {
        name: ModelName::Extended,
        min_exponent: -16382,
        machine_epsilon: 1.0 / 9_223_372_036_854_775_808.0, // 2^-63
        significand_bits: 64,
    };

    pub const fn new(name: ModelName) -> Self {
        match name {
            ModelName::Single => Self::SINGLE,
            ModelName::Double => Self::DOUBLE,
            ModelName::Extended => Self::EXTENDED,
        }
    }

    /// The underflow level as an `f64`, or `None` when it is not representable.
    pub fn ufl(&self) -> Option<f64> {
        if self.min_exponent >= f64::MIN_EXP - 1 {
            Some(2f64.powi(self.min_exponent))
        } else {
            None
        }
    }

    pub fn ln_ufl(&self) -> f64 {
        self.min_exponent as f64 * LN_2
    }

    /// Underflow level as `(mantissa, exponent)` in base ten, for display.
    pub fn ufl_decimal(&self) -> (f64, i32) {
        let log10 = self.min_exponent as f64 * std::f64::consts::LOG10_2;
        let exp10 = log10.floor();
        (10f64.powf(log10 - exp10), exp10 as i32)
    }

    /// Whether a native Rust float type implements this model.
    pub fn is_native(&self) -> bool {
        matches!(self.name, ModelName::Single | ModelName::Double)
    }
}

/// The intrinsic window limits of one model at one integral dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowLimits {
    pub t_max_x: f64,
    pub t_max_w: f64,
    pub t_max_xw: f64,
    pub dimension: usize,
    pub weight_power: u32,
}

/// Weight power used for a `dimension`-dimensional product rule: `max(1, dimension - 1)`.
pub fn weight_power(dimension: usize) -> u32 {
    dimension.saturating_sub(1).max(1) as u32
}

/// `ln Ψ'(t)` for the tanh-sinh weight function, free of underflow for any `t`.
pub fn ln_psi_prime(t: f64) -> f64 {
    let u = FRAC_PI_2 * t.sinh().abs();
    let ln_cosh_t = t.abs() + (-2.0 * t.abs()).exp().ln_1p() - LN_2;
    // ln sech u = ln 2 - u - ln(1 + e^{-2u})
    let ln_sech_u = LN_2 - u - (-2.0 * u).exp().ln_1p();
    FRAC_PI_2.ln() + ln_cosh_t + 2.0 * ln_sech_u
}

/// `ln(1 - |Ψ(t)|)`, free of underflow for any `t`.
pub fn ln_endpoint_distance(t: f64) -> f64 {
    let u = FRAC_PI_2 * t.sinh().abs();
    // 1 - tanh u = 2 e^{-2u} / (1 + e^{-2u})
    LN_2 - 2.0 * u - (-2.0 * u).exp().ln_1p()
}

/// Transformed coordinate at which the endpoint distance `1 - |Ψ(t)|` equals
/// `exp(ln_y)`. Inverse of [`ln_endpoint_distance`] on `t >= 0`.
pub fn inverse_endpoint_distance(ln_y: f64) -> f64 {
    // ln(2/y - 1) = ln(2/y) + ln(1 - y/2)
    let ln_two_over_y = LN_2 - ln_y;
    let correction = (-0.5 * ln_y.exp()).ln_1p();
    ((ln_two_over_y + correction) / PI).asinh()
}

/// Largest `t` whose endpoint distance `1 - Ψ(t)` is still at least the UFL.
pub fn intrinsic_abscissa_limit(model: &FloatModel) -> f64 {
    let ln_ufl = model.ln_ufl();
    let mut t = inverse_endpoint_distance(ln_ufl);
    // The closed form may land a rounding step past the root; walk back onto it.
    while ln_endpoint_distance(t) < ln_ufl {
        t = t.next_down();
    }
    t
}

const WEIGHT_BRACKET: (f64, f64) = (1.0, 60.0);
const WEIGHT_TOLERANCE: f64 = 1e-9;

/// Largest `t` with `Ψ'(t)^D >= UFL`, `D = max(1, dimension - 1)`.
pub fn intrinsic_weight_limit(model: &FloatModel, dimension: usize) -> f64 {
    assert!(dimension >= 1, "dimension must be at least 1");
    let power = weight_power(dimension) as f64;
    let ln_ufl = model.ln_ufl();
    let holds = |t: f64| power * ln_psi_prime(t) >= ln_ufl;

    // Ψ' is strictly decreasing on [1, ∞), holds(1) and !holds(60) for every model.
    let (mut lo, mut hi) = WEIGHT_BRACKET;
    debug_assert!(holds(lo) && !holds(hi));
    while hi - lo > WEIGHT_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if holds(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

pub fn window_limits(model: &FloatModel, dimension: usize) -> WindowLimits {
    assert!(dimension >= 1, "dimension must be at least 1");
    let t_max_x = intrinsic_abscissa_limit(model);
    let t_max_w = intrinsic_weight_limit(model, dimension);
    WindowLimits {
        t_max_x,
        t_max_w,
        t_max_xw: t_max_x.min(t_max_w),
        dimension,
        weight_power: weight_power(dimension),
    }
}
