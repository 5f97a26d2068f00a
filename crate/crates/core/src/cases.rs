//! Benchmark integrands with end-point singularities, their exact values,
//! and the integrand-specific window guards that keep their evaluation sound.

use std::collections::BTreeMap;
use std::f64::consts::{LN_2, PI, SQRT_2};

use serde::Serialize;

use crate::engine::{EvaluationPoint, Integrand, Interval};
use crate::error::{QuadError, Result};
use crate::float_model::{inverse_endpoint_distance, FloatModel};
use crate::real::Real;
use crate::summation::CompensatedSum;

/// Catalan's constant `Ti₂(1)`.
pub const CATALAN: f64 = 0.915_965_594_177_219_015_054_603_514_932_384_110_774;

pub const DEFAULT_DELTA: f64 = 1e-6;
pub const DEFAULT_GUARD_A: f64 = 100.0;

pub const CASE_NAMES: [&str; 4] = ["reciprocal", "f1", "f2", "f3"];

const TI2_TERM_CAP: usize = 200_000;

/// Inverse tangent integral `Ti₂(x) = Σ (-1)^k x^{2k+1} / (2k+1)²`, `|x| <= 1`.
pub fn inverse_tangent_integral(x: f64) -> f64 {
    assert!(x.abs() <= 1.0, "Ti2 series needs |x| <= 1, got {x}");
    if x == 0.0 {
        return 0.0;
    }
    let x2 = x * x;
    let mut power = x;
    let mut sum = CompensatedSum::<f64>::new();
    let mut sign = 1.0;
    for k in 0..TI2_TERM_CAP {
        let denom = (2 * k + 1) as f64;
        let term = power / (denom * denom);
        sum.add(sign * term);
        if term.abs() < 1e-18 * sum.value().abs() {
            return sum.value();
        }
        power *= x2;
        sign = -sign;
    }
    // Near |x| = 1 the series is only algebraically convergent. Averaging the
    // last two partial sums cancels the leading alternating tail.
    let denom = (2 * TI2_TERM_CAP + 1) as f64;
    sum.add(0.5 * sign * power / (denom * denom));
    sum.value()
}

pub fn exact_fdim(dimension: usize) -> f64 {
    match dimension {
        1 => 2.0,
        2 => 2.0 * (1.0 + SQRT_2).ln(),
        3 => {
            3.0 * (inverse_tangent_integral(3.0 - 2.0 * SQRT_2) - CATALAN)
                + 0.75 * PI * (2.0 * SQRT_2 / 3.0).atanh()
        }
        _ => panic!("singular benchmark exists for dimensions 1..=3 only"),
    }
}

/// The benchmark integrands, usable in any [`Real`] precision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CaseIntegrand {
    /// `1/x` on `[δ, 1]`; the window keeps `(x_{-n} - δ)/δ > a·ε_m`.
    Reciprocal { delta: f64, a: f64 },
    /// `1/√x`, `1/√(x²+y²)` or `1/(x²+y²+z²)` on `(0, 1]^D`; for `D >= 2` the
    /// window keeps the smallest abscissa at or above `√UFL`.
    Singular { dimension: usize },
}

impl CaseIntegrand {
    /// Integrand-specific window limit `t_max^f` for `model`.
    pub fn guard_window(&self, model: &FloatModel) -> Option<f64> {
        match *self {
            CaseIntegrand::Reciprocal { delta, a } => {
                // dist = (1-δ)/2 · y must exceed a·ε·δ
                let y_min = 2.0 * a * model.machine_epsilon * delta / (1.0 - delta);
                Some(inverse_endpoint_distance(y_min.ln()))
            }
            CaseIntegrand::Singular { dimension: 1 } => None,
            CaseIntegrand::Singular { .. } => {
                // dist = y/2 must stay >= √UFL
                let ln_y_min = LN_2 + 0.5 * model.ln_ufl();
                Some(inverse_endpoint_distance(ln_y_min))
            }
        }
    }
}

impl<T: Real> Integrand<T> for CaseIntegrand {
    fn arity(&self) -> usize {
        match *self {
            CaseIntegrand::Reciprocal { .. } => 1,
            CaseIntegrand::Singular { dimension } => dimension,
        }
    }

    fn eval(&self, p: &[EvaluationPoint<T>]) -> T {
        match *self {
            // x = δ + dist_lower on the left half, so no cancellation near δ
            CaseIntegrand::Reciprocal { .. } => p[0].x.recip(),
            CaseIntegrand::Singular { dimension: 1 } => p[0].x.sqrt().recip(),
            CaseIntegrand::Singular { dimension: 2 } => {
                (p[0].x * p[0].x + p[1].x * p[1].x).sqrt().recip()
            }
            CaseIntegrand::Singular { .. } => {
                p.iter().fold(T::zero(), |acc, q| acc + q.x * q.x).recip()
            }
        }
    }

    fn window_limit(&self, model: &FloatModel) -> Option<f64> {
        self.guard_window(model)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkCase {
    pub name: String,
    pub dimension: usize,
    pub domains: Vec<Interval>,
    pub integrand: CaseIntegrand,
    pub exact_value: f64,
    pub guard: String,
    pub parameters: BTreeMap<String, f64>,
}

/// `∫_δ^1 dx/x = -ln δ`.
pub fn case_reciprocal(delta: f64, a: f64) -> Result<BenchmarkCase> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(QuadError::invalid(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    if !(a >= 1.0 && a.is_finite()) {
        return Err(QuadError::invalid(format!(
            "guard factor a must be >= 1, got {a}"
        )));
    }
    Ok(BenchmarkCase {
        name: "reciprocal".into(),
        dimension: 1,
        domains: vec![Interval::new(delta, 1.0)?],
        integrand: CaseIntegrand::Reciprocal { delta, a },
        exact_value: -delta.ln(),
        guard: format!("(x_-n - delta)/delta > {a}·eps_m"),
        parameters: BTreeMap::from([("delta".into(), delta), ("a".into(), a)]),
    })
}

/// `∫_(0,1]^D f_D` with the singular integrands of dimension 1, 2 or 3.
pub fn case_fdim(dimension: usize) -> Result<BenchmarkCase> {
    if !(1..=3).contains(&dimension) {
        return Err(QuadError::invalid(format!(
            "singular benchmark exists for dimensions 1..=3, got {dimension}"
        )));
    }
    let guard = if dimension == 1 {
        "none".to_string()
    } else {
        "x_-n >= sqrt(ufl)".to_string()
    };
    Ok(BenchmarkCase {
        name: format!("f{dimension}"),
        dimension,
        domains: vec![Interval::unit(); dimension],
        integrand: CaseIntegrand::Singular { dimension },
        exact_value: exact_fdim(dimension),
        guard,
        parameters: BTreeMap::new(),
    })
}

/// Registry lookup; `delta` and `a` apply to the reciprocal case only.
pub fn case_by_name(name: &str, delta: f64, a: f64) -> Result<BenchmarkCase> {
    match name {
        "reciprocal" => case_reciprocal(delta, a),
        "f1" => case_fdim(1),
        "f2" => case_fdim(2),
        "f3" => case_fdim(3),
        other => Err(QuadError::UnknownCase(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::integrate_1d;
    use crate::spacing::SpacingStrategy;

    /// Alternating series at x = 1 with the averaged-partial-sum correction.
    fn catalan_series(terms: usize) -> f64 {
        // pairs (1/(4j+1)² - 1/(4j+3)²) are positive, summed smallest first
        let mut pairs: Vec<f64> = (0..terms / 2)
            .map(|j| {
                let a = (4 * j + 1) as f64;
                let b = (4 * j + 3) as f64;
                (b * b - a * a) / (a * a * b * b)
            })
            .collect();
        let last = (2 * terms + 1) as f64;
        pairs.push(0.5 / (last * last));
        pairs.iter().rev().sum()
    }

    /// Composite Simpson rule for ∫_0^x arctan(t)/t dt.
    fn ti2_simpson(x: f64, intervals: usize) -> f64 {
        let f = |t: f64| if t == 0.0 { 1.0 } else { t.atan() / t };
        let h = x / intervals as f64;
        let mut s = f(0.0) + f(x);
        for i in 1..intervals {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn catalan_literal_matches_series() {
        assert!((catalan_series(200_000) - CATALAN).abs() < 1e-15);
        assert!((inverse_tangent_integral(1.0) - CATALAN).abs() < 1e-15);
    }

    #[test]
    fn ti2_values() {
        assert_eq!(inverse_tangent_integral(0.0), 0.0);
        let x = 3.0 - 2.0 * SQRT_2;
        assert!((inverse_tangent_integral(x) - ti2_simpson(x, 20_000)).abs() < 1e-12);
        assert_eq!(inverse_tangent_integral(-x), -inverse_tangent_integral(x));
        assert!((inverse_tangent_integral(0.5) - ti2_simpson(0.5, 20_000)).abs() < 1e-12);
    }

    #[test]
    fn exact_values() {
        assert_eq!(exact_fdim(1), 2.0);
        assert!((exact_fdim(2) - 1.762_747_174_039_09).abs() < 1e-14);
        // 1.918531055610933 from an independent 40-digit evaluation
        assert!((exact_fdim(3) - 1.918_531_055_610_933).abs() < 1e-13);
        assert!((exact_fdim(3) - 1.91851).abs() < 5e-5);
    }

    /// Midpoint rule on m³ cells; cell centres never hit the singular corner.
    fn f3_midpoint(m: usize) -> f64 {
        let h = 1.0 / m as f64;
        let c: Vec<f64> = (0..m).map(|i| (i as f64 + 0.5) * h).collect();
        let mut s = 0.0;
        for &x in &c {
            for &y in &c {
                let r2 = x * x + y * y;
                for &z in &c {
                    s += 1.0 / (r2 + z * z);
                }
            }
        }
        s * h * h * h
    }

    #[test]
    fn f3_closed_form_against_brute_force() {
        // 10^6 cells plus one Richardson step against the O(h) corner error
        let brute = 2.0 * f3_midpoint(100) - f3_midpoint(50);
        assert!((brute - exact_fdim(3)).abs() < 1e-3, "{brute}");
    }

    #[test]
    fn reciprocal_case() {
        let c = case_reciprocal(1e-6, 100.0).unwrap();
        assert!((c.exact_value - 13.815_510_557_964_3).abs() < 1e-12);
        let c = case_reciprocal(0.5, 100.0).unwrap();
        assert!((c.exact_value - LN_2).abs() < 1e-15);
        assert!(case_reciprocal(0.0, 100.0).is_err());
        assert!(case_reciprocal(0.5, 0.5).is_err());
    }

    #[test]
    fn stricter_guard_shrinks_window() {
        for model in [FloatModel::SINGLE, FloatModel::DOUBLE] {
            let w100 = CaseIntegrand::Reciprocal {
                delta: 1e-6,
                a: 100.0,
            }
            .guard_window(&model)
            .unwrap();
            let w1000 = CaseIntegrand::Reciprocal {
                delta: 1e-6,
                a: 1000.0,
            }
            .guard_window(&model)
            .unwrap();
            assert!(w1000 <= w100);
        }
    }

    #[test]
    fn guard_keeps_abscissae_distinguishable() {
        let case = case_reciprocal(1e-6, 100.0).unwrap();
        let t_f = case.integrand.guard_window(&FloatModel::DOUBLE).unwrap();
        // the smallest mapped distance at t_f is a·ε·δ
        let y = crate::nodes::endpoint_distance(t_f);
        let dist = 0.5 * (1.0 - 1e-6) * y;
        assert!((dist / (1e-6 * 100.0 * f64::EPSILON) - 1.0).abs() < 1e-9);

        // record every abscissa the engine visits and check they are distinct
        for n in [10usize, 50, 200] {
            let xs = std::sync::Mutex::new(Vec::new());
            let f = crate::engine::FnIntegrand::new(1, |p: &[EvaluationPoint<f64>]| {
                // only the end near δ is guarded; near 1 the abscissae may round to 1
                if p[0].x < 0.5 {
                    xs.lock().unwrap().push(p[0].x);
                }
                p[0].x.recip()
            })
            .with_window_limit(t_f);
            integrate_1d(&f, case.domains[0], SpacingStrategy::maximal(), n).unwrap();
            let mut xs = xs.into_inner().unwrap();
            xs.sort_by(f64::total_cmp);
            assert!(
                xs.windows(2).all(|w| w[0] < w[1]),
                "coincident abscissae at n = {n}"
            );
            assert!(xs[0] > 1e-6);
        }
    }

    #[test]
    fn singular_guard_keeps_squares_normal() {
        for model in [FloatModel::SINGLE, FloatModel::DOUBLE] {
            let t = CaseIntegrand::Singular { dimension: 2 }
                .guard_window(&model)
                .unwrap();
            let y = crate::float_model::ln_endpoint_distance(t).exp();
            let smallest = 0.5 * y;
            assert!((smallest * smallest / model.ufl().unwrap() - 1.0).abs() < 1e-9);
        }
        assert_eq!(
            CaseIntegrand::Singular { dimension: 1 }.guard_window(&FloatModel::DOUBLE),
            None
        );
    }

    #[test]
    fn registry() {
        for name in CASE_NAMES {
            let c = case_by_name(name, DEFAULT_DELTA, DEFAULT_GUARD_A).unwrap();
            assert_eq!(c.name, name);
            assert_eq!(c.domains.len(), c.dimension);
            assert_eq!(
                <CaseIntegrand as Integrand<f64>>::arity(&c.integrand),
                c.dimension
            );
            assert!(c.exact_value.is_finite());
        }
        assert!(matches!(
            case_by_name("f4", 1e-6, 100.0),
            Err(QuadError::UnknownCase(_))
        ));
        assert!(case_fdim(4).is_err());
    }
}
