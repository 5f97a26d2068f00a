use std::fs::File;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use deq_core::baseline::integrate_gl_nd;
use deq_core::cases::{case_by_name, BenchmarkCase};
use deq_core::{IntegrationResult, ModelName, QuadError, Real, SpacingStrategy, TanhSinh};
use serde::{Deserialize, Serialize};

use crate::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    TsOptimal,
    TsMaximal,
    GaussLegendre,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::TsOptimal => "ts_optimal",
            Method::TsMaximal => "ts_maximal",
            Method::GaussLegendre => "gauss_legendre",
        }
    }
}

/// One CSV row; the field order is the column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub n: usize,
    pub evaluations: u64,
    pub method: Method,
    pub model: ModelName,
    pub relative_error: f64,
    pub wall_time_ns: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergeRequest {
    pub case: String,
    pub models: Vec<ModelName>,
    /// Orders `1..=n_max` are swept.
    pub n_max: usize,
    pub delta: f64,
    pub guard_a: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Sweep {
    /// Sorted by method, model, then n.
    pub records: Vec<SweepRecord>,
    /// Sentinel comments for optimal-spacing orders that were skipped.
    pub omitted: Vec<String>,
}

fn tanh_sinh<T: Real>(
    case: &BenchmarkCase,
    strategy: SpacingStrategy,
    n: usize,
) -> Result<IntegrationResult, QuadError> {
    TanhSinh::new(strategy)
        .concurrent(true)
        .integrate_nd::<T, _>(&case.integrand, &case.domains, n)
}

fn timed<F: FnOnce() -> Result<IntegrationResult, QuadError>>(
    f: F,
) -> Result<(IntegrationResult, u64), QuadError> {
    let start = Instant::now();
    let r = f()?;
    Ok((r, start.elapsed().as_nanos() as u64))
}

pub fn cmd_converge(req: &ConvergeRequest) -> CliResult<Sweep> {
    if req.n_max == 0 {
        return Err(CliError::Invalid("the order schedule 1..=n_max is empty".into()));
    }
    if req.models.is_empty() {
        return Err(CliError::Invalid("no float model given".into()));
    }
    if let Some(m) = req.models.iter().find(|m| **m == ModelName::Extended) {
        return Err(QuadError::UnsupportedModel(*m).into());
    }
    let case = case_by_name(&req.case, req.delta, req.guard_a)?;
    let exact = case.exact_value;
    let rel = |v: f64| ((v - exact) / exact).abs();

    let mut sweep = Sweep::default();
    for (method, strategy) in [
        (Method::TsOptimal, SpacingStrategy::optimal()),
        (Method::TsMaximal, SpacingStrategy::maximal()),
    ] {
        for &model in &req.models {
            for n in 1..=req.n_max {
                let outcome = timed(|| match model {
                    ModelName::Single => tanh_sinh::<f32>(&case, strategy, n),
                    _ => tanh_sinh::<f64>(&case, strategy, n),
                });
                match outcome {
                    Ok((r, ns)) => sweep.records.push(SweepRecord {
                        n,
                        evaluations: r.evaluations,
                        method,
                        model,
                        relative_error: rel(r.value),
                        wall_time_ns: ns,
                    }),
                    Err(QuadError::OrderExceedsMax { n_max, .. }) => {
                        sweep.omitted.push(format!(
                            "{} {}: orders {}..={} omitted, above the maximal order {}",
                            method.as_str(),
                            model,
                            n_max + 1,
                            req.n_max,
                            n_max
                        ));
                        break;
                    }
                    Err(e) => return Err(e.into()),
                }
            }
        }
    }
    // the baseline always runs in double with 2n+1 points per axis
    for n in 1..=req.n_max {
        let (r, ns) = timed(|| integrate_gl_nd(&case.integrand, &case.domains, 2 * n + 1))?;
        sweep.records.push(SweepRecord {
            n,
            evaluations: r.evaluations,
            method: Method::GaussLegendre,
            model: ModelName::Double,
            relative_error: rel(r.value),
            wall_time_ns: ns,
        });
    }
    Ok(sweep)
}

/// Writes the header, the rows and then one `# ` line per omission.
pub fn write_csv(sweep: &Sweep, path: &Path) -> CliResult<()> {
    let io_err = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let csv_err = |source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    let mut wtr = csv::Writer::from_writer(file);
    if sweep.records.is_empty() {
        wtr.write_record(["n", "evaluations", "method", "model", "relative_error", "wall_time_ns"])
            .map_err(csv_err)?;
    }
    for rec in &sweep.records {
        wtr.serialize(rec).map_err(csv_err)?;
    }
    let mut file = wtr.into_inner().map_err(|e| io_err(e.into_error()))?;
    for line in &sweep.omitted {
        writeln!(file, "# {line}").map_err(io_err)?;
    }
    Ok(())
}

/// Reads a sweep CSV back, skipping comment lines.
pub fn read_csv(path: &Path) -> CliResult<Vec<SweepRecord>> {
    let csv_err = |source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(csv_err)?;
    rdr.deserialize().collect::<Result<_, _>>().map_err(csv_err)
}
