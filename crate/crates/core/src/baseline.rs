//! Double-precision Gauss-Legendre quadrature, the comparison baseline.

use std::f64::consts::PI;

use crate::engine::{EvaluationPoint, Integrand, IntegrationResult, Interval};
use crate::error::{QuadError, Result};
use crate::nodes::Side;
use crate::summation::CompensatedSum;

pub const MAX_POINTS: usize = 20_001;
const NEWTON_MAX_ITER: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendreRule {
    pub points: usize,
    /// Ascending roots of `P_N`.
    pub abscissae: Vec<f64>,
    pub weights: Vec<f64>,
}

/// `(P_N(x), P_{N-1}(x))` by the three-term recurrence.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 2..=n {
        let k = k as f64;
        let next = ((2.0 * k - 1.0) * x * p - (k - 1.0) * p_prev) / k;
        p_prev = p;
        p = next;
    }
    (p, p_prev)
}

/// N-point rule from Newton iteration on `P_N` with the cosine initial guess.
pub fn gauss_legendre_rule(n: usize) -> Result<GaussLegendreRule> {
    if !(1..=MAX_POINTS).contains(&n) {
        return Err(QuadError::invalid(format!(
            "Gauss-Legendre needs 1..={MAX_POINTS} points, got {n}"
        )));
    }
    let nf = n as f64;
    let derivative = |x: f64| {
        let (p, q) = legendre_pair(n, x);
        (p, nf * (x * p - q) / (x * x - 1.0))
    };

    let half = n / 2;
    let mut positive = Vec::with_capacity(half);
    // the largest roots come first for i = 1, 2, ...
    for i in 1..=half {
        let mut x = (PI * (i as f64 - 0.25) / (nf + 0.5)).cos();
        let mut converged = false;
        for _ in 0..NEWTON_MAX_ITER {
            let (p, dp) = derivative(x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= 2.0 * f64::EPSILON {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(QuadError::NoConvergence {
                routine: "gauss_legendre_rule",
                iterations: NEWTON_MAX_ITER,
            });
        }
        let (_, dp) = derivative(x);
        positive.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }

    let mut abscissae = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for &(x, w) in &positive {
        abscissae.push(-x);
        weights.push(w);
    }
    if n % 2 == 1 {
        // P_N'(0) for odd N from the recurrence at the exact center
        let (_, dp) = derivative(0.0);
        abscissae.push(0.0);
        weights.push(2.0 / (dp * dp));
    }
    for &(x, w) in positive.iter().rev() {
        abscissae.push(x);
        weights.push(w);
    }
    Ok(GaussLegendreRule {
        points: n,
        abscissae,
        weights,
    })
}

fn point(rule_x: f64, domain: &Interval, axis: usize) -> EvaluationPoint<f64> {
    let scale = domain.half_width();
    let dist_lower = scale * (1.0 + rule_x);
    let dist_upper = scale * (1.0 - rule_x);
    let (x, side) = if rule_x < 0.0 {
        (domain.lower + dist_lower, Side::Left)
    } else if rule_x > 0.0 {
        (domain.upper - dist_upper, Side::Right)
    } else {
        (domain.lower + scale, Side::Center)
    };
    EvaluationPoint {
        x,
        dist_lower,
        dist_upper,
        side,
        axis,
    }
}

/// Affine-mapped N-point rule on one interval.
pub fn integrate_gl<F: Integrand<f64> + ?Sized>(
    f: &F,
    domain: Interval,
    n: usize,
) -> Result<IntegrationResult> {
    if f.arity() != 1 {
        return Err(QuadError::DimensionMismatch {
            arity: f.arity(),
            domains: 1,
        });
    }
    integrate_gl_nd(f, &[domain], n)
}

/// Tensor product of N-point rules, N points per axis.
///
/// The returned `order` is N; `t_max_used` and `h_used` are NaN.
pub fn integrate_gl_nd<F: Integrand<f64> + ?Sized>(
    f: &F,
    domains: &[Interval],
    n: usize,
) -> Result<IntegrationResult> {
    if domains.is_empty() || f.arity() != domains.len() {
        return Err(QuadError::DimensionMismatch {
            arity: f.arity(),
            domains: domains.len(),
        });
    }
    let rule = gauss_legendre_rule(n)?;
    let axes: Vec<Vec<EvaluationPoint<f64>>> = domains
        .iter()
        .enumerate()
        .map(|(axis, d)| rule.abscissae.iter().map(|&x| point(x, d, axis)).collect())
        .collect();

    let dim = domains.len();
    let mut idx = vec![0usize; dim];
    let mut pt = Vec::with_capacity(dim);
    let mut sum = CompensatedSum::<f64>::new();
    let mut evaluations = 0u64;
    'outer: loop {
        pt.clear();
        pt.extend(idx.iter().enumerate().map(|(k, &i)| axes[k][i]));
        let value = f.eval(&pt);
        if !value.is_finite() {
            return Err(QuadError::EvaluationFailure {
                point: pt.iter().map(|p| p.x).collect(),
                value,
            });
        }
        let w = idx.iter().fold(1.0, |acc, &i| acc * rule.weights[i]);
        sum.add(w * value);
        evaluations += 1;

        for k in (0..dim).rev() {
            idx[k] += 1;
            if idx[k] < n {
                continue 'outer;
            }
            idx[k] = 0;
        }
        break;
    }
    let scale: f64 = domains.iter().map(Interval::half_width).product();
    Ok(IntegrationResult {
        value: sum.value() * scale,
        order: n,
        evaluations,
        error_estimate: f64::NAN,
        converged: true,
        t_max_used: f64::NAN,
        h_used: f64::NAN,
        min_partial_weight: rule.weights.iter().copied().fold(f64::INFINITY, f64::min),
    })
}
