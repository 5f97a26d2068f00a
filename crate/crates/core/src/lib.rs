//! Tanh-sinh (double-exponential) quadrature that stays clear of numerical
//! underflow in single and double precision, for one- and multi-dimensional
//! integrals with end-point singularities.
//!
//! The window of transformed abscissae is bounded by limits derived from the
//! floating-point model ([`float_model`]), node tables are built in that
//! model's arithmetic ([`nodes`]), and the spacing follows either the optimal
//! Lambert-W rule or the fixed-window maximal rule ([`spacing`]).

pub mod baseline;
pub mod cases;
pub mod engine;
pub mod error;
pub mod float_model;
pub mod nodes;
pub mod real;
pub mod spacing;
pub mod summation;

pub use engine::{
    effective_window, integrate_1d, integrate_adaptive, integrate_nd, node_table, EvaluationPoint,
    FnIntegrand, Integrand, IntegrationResult, Interval, TanhSinh,
};
pub use error::{QuadError, Result};
pub use float_model::{window_limits, FloatModel, ModelName, WindowLimits};
pub use nodes::{build_table, build_table_for, Node, NodeTable, NodeTableDocument, Side};
pub use real::Real;
pub use spacing::{h_maximal, h_optimal, lambert_w0, max_order, SpacingKind, SpacingStrategy};
