//! Native floating-point types that node tables and integrations run in.

use std::fmt::{Debug, Display};

use num_traits::Float;

use crate::float_model::{FloatModel, ModelName};

/// A hardware float type that carries one of the supported [`FloatModel`]s.
///
/// All arithmetic of a quadrature run (nodes, integrand, accumulation) is
/// performed in `Self`, so `f32` runs really are limited to single precision.
pub trait Real: Float + Debug + Display + Send + Sync + 'static {
    const MODEL: ModelName;

    fn from_f64(v: f64) -> Self;
    fn to_f64(self) -> f64;
    /// Largest representable value strictly below `self`.
    fn next_below(self) -> Self;

    fn model() -> FloatModel {
        FloatModel::new(Self::MODEL)
    }

    fn lit(v: f64) -> Self {
        Self::from_f64(v)
    }
}

impl Real for f32 {
    const MODEL: ModelName = ModelName::Single;

    #[inline]
    fn from_f64(v: f64) -> Self {
        v as f32
    }

    #[inline]
    fn to_f64(self) -> f64 {
        self as f64
    }

    #[inline]
    fn next_below(self) -> Self {
        self.next_down()
    }
}

impl Real for f64 {
    const MODEL: ModelName = ModelName::Double;

    #[inline]
    fn from_f64(v: f64) -> Self {
        v
    }

    #[inline]
    fn to_f64(self) -> f64 {
        self
    }

    #[inline]
    fn next_below(self) -> Self {
        self.next_down()
    }
}
