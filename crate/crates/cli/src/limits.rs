use std::fmt;

use deq_core::{
    node_table, window_limits, FloatModel, ModelName, NodeTableDocument, SpacingStrategy,
};
use serde::{Deserialize, Serialize};

use crate::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitsReport {
    pub model: ModelName,
    pub dimension: usize,
    pub min_exponent: i32,
    /// `ufl = ufl_mantissa · 10^ufl_exponent`, which also covers extended.
    pub ufl_mantissa: f64,
    pub ufl_exponent: i32,
    pub t_max_x: f64,
    pub t_max_w: f64,
    pub t_max_xw: f64,
    pub n_max: usize,
}

pub fn cmd_limits(model: ModelName, dimension: usize) -> CliResult<LimitsReport> {
    if !(1..=3).contains(&dimension) {
        return Err(CliError::Invalid(format!(
            "dimension must be 1, 2 or 3, got {dimension}"
        )));
    }
    let m = FloatModel::new(model);
    let lim = window_limits(&m, dimension);
    let (ufl_mantissa, ufl_exponent) = m.ufl_decimal();
    Ok(LimitsReport {
        model,
        dimension,
        min_exponent: m.min_exponent,
        ufl_mantissa,
        ufl_exponent,
        t_max_x: lim.t_max_x,
        t_max_w: lim.t_max_w,
        t_max_xw: lim.t_max_xw,
        n_max: SpacingStrategy::optimal()
            .order_limit(lim.t_max_xw)
            .expect("optimal spacing has an order limit"),
    })
}

/// `x` cut (not rounded) to three decimals, so a printed limit is never
/// larger than the true one.
pub fn truncate_3(x: f64) -> String {
    format!("{:.3}", (x * 1000.0).floor() / 1000.0)
}

impl LimitsReport {
    pub const HEADER: &'static str = "model     e_min   ufl          dim  t_max_x  t_max_w  t_max_xw  n_max";
}

impl fmt::Display for LimitsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<9} {:<7} {:<12} {:<4} {:<8} {:<8} {:<9} {}",
            self.model.as_str(),
            self.min_exponent,
            format!("{:.3}e{}", self.ufl_mantissa, self.ufl_exponent),
            self.dimension,
            truncate_3(self.t_max_x),
            truncate_3(self.t_max_w),
            truncate_3(self.t_max_xw),
            self.n_max
        )
    }
}

/// Node table document for the intrinsic window of `dimension` axes.
pub fn cmd_nodes(
    model: ModelName,
    n: usize,
    strategy: SpacingStrategy,
    dimension: usize,
) -> CliResult<NodeTableDocument> {
    if !(1..=3).contains(&dimension) {
        return Err(CliError::Invalid(format!(
            "dimension must be 1, 2 or 3, got {dimension}"
        )));
    }
    let table = node_table(&FloatModel::new(model), strategy, n, dimension, None)?;
    Ok(table.to_document())
}
