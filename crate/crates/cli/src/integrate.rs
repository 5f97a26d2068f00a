use std::fmt;

use deq_core::cases::{case_by_name, BenchmarkCase};
use deq_core::{IntegrationResult, ModelName, QuadError, Real, SpacingKind, SpacingStrategy, TanhSinh};
use serde::{Deserialize, Serialize};

use crate::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stopping {
    /// Double the order until successive estimates agree to `rel_tol`.
    Tolerance {
        rel_tol: f64,
        n_start: usize,
        n_limit: Option<usize>,
    },
    Order(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrateRequest {
    pub case: String,
    pub model: ModelName,
    pub strategy: SpacingStrategy,
    pub stopping: Stopping,
    pub delta: f64,
    pub guard_a: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegrateReport {
    pub case: String,
    pub model: ModelName,
    pub strategy: SpacingKind,
    pub value: f64,
    pub exact: f64,
    pub relative_error: f64,
    pub n: usize,
    pub evaluations: u64,
    pub converged: bool,
    /// Last doubling difference; absent for a fixed order.
    pub error_estimate: Option<f64>,
    pub t_max: f64,
    pub h: f64,
}

/// Highest adaptive order for a dimension when none is given.
fn default_order_limit(dimension: usize) -> usize {
    match dimension {
        1 => 8192,
        2 => 1024,
        _ => 128,
    }
}

fn run<T: Real>(case: &BenchmarkCase, req: &IntegrateRequest) -> Result<IntegrationResult, QuadError> {
    let engine = TanhSinh::new(req.strategy).concurrent(true);
    match req.stopping {
        Stopping::Order(n) => engine.integrate_nd::<T, _>(&case.integrand, &case.domains, n),
        Stopping::Tolerance {
            rel_tol,
            n_start,
            n_limit,
        } => engine.integrate_adaptive::<T, _>(
            &case.integrand,
            &case.domains,
            rel_tol,
            n_start,
            n_limit.unwrap_or_else(|| default_order_limit(case.dimension)),
        ),
    }
}

/// Integrates a registered case; an unmet tolerance is reported with
/// `converged = false` rather than as an error.
pub fn cmd_integrate(req: &IntegrateRequest) -> CliResult<IntegrateReport> {
    let case = case_by_name(&req.case, req.delta, req.guard_a)?;
    let outcome = match req.model {
        ModelName::Single => run::<f32>(&case, req),
        ModelName::Double => run::<f64>(&case, req),
        ModelName::Extended => Err(QuadError::UnsupportedModel(ModelName::Extended)),
    };
    let result = match outcome {
        Ok(r) => r,
        Err(QuadError::NotConverged(best)) => *best,
        Err(e) => return Err(CliError::Quad(e)),
    };
    Ok(IntegrateReport {
        case: case.name.clone(),
        model: req.model,
        strategy: req.strategy.kind,
        value: result.value,
        exact: case.exact_value,
        relative_error: ((result.value - case.exact_value) / case.exact_value).abs(),
        n: result.order,
        evaluations: result.evaluations,
        converged: result.converged,
        error_estimate: (!result.error_estimate.is_nan()).then_some(result.error_estimate),
        t_max: result.t_max_used,
        h: result.h_used,
    })
}

impl fmt::Display for IntegrateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "case            {}", self.case)?;
        writeln!(f, "model           {}", self.model)?;
        writeln!(f, "value           {:.16e}", self.value)?;
        writeln!(f, "exact           {:.16e}", self.exact)?;
        writeln!(f, "relative error  {:.3e}", self.relative_error)?;
        writeln!(f, "n               {}", self.n)?;
        writeln!(f, "evaluations     {}", self.evaluations)?;
        if let Some(e) = self.error_estimate {
            writeln!(f, "error estimate  {e:.3e}")?;
        }
        write!(f, "converged       {}", self.converged)
    }
}
