//! Abscissae spacing: the optimal rule `h = (2/N)·W(2dN)` and the maximal
//! rule `h = t_max / n`, plus the largest order the optimal rule may use.

use std::f64::consts::{E, FRAC_PI_2};

use serde::{Deserialize, Serialize};

use crate::error::{QuadError, Result};

const LAMBERT_MAX_ITER: usize = 50;

/// Principal branch `W₀(z)` for `z >= 0`, by Halley iteration.
pub fn lambert_w0(z: f64) -> Result<f64> {
    if z.is_nan() || z < 0.0 || z.is_infinite() {
        return Err(QuadError::invalid(format!(
            "lambert_w0 needs a finite z >= 0, got {z}"
        )));
    }
    if z == 0.0 {
        return Ok(0.0);
    }

    let mut w = if z < 1.0 {
        z
    } else if z < E {
        // linear blend of the neighbouring guesses z|_{z=1} = 1 and
        // (ln z - ln ln z)|_{z=e} = 1, which is constant
        1.0
    } else {
        let l = z.ln();
        l - l.ln()
    };

    let tol = 4.0 * f64::EPSILON * z.max(1.0);
    for _ in 0..LAMBERT_MAX_ITER {
        let ew = w.exp();
        let f = w * ew - z;
        if f.abs() <= tol {
            return Ok(polish(w, z));
        }
        // Halley step with e^w factored out of the correction term, so
        // that nothing of size e^{2w} is formed
        let step = f / (ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0));
        w -= step;
        // For large z the residual floor is set by the conditioning of e^w,
        // not by the iteration; a sub-ulp step means we are there.
        if step.abs() <= 2.0 * f64::EPSILON * w.abs() {
            return Ok(polish(w, z));
        }
    }
    Err(QuadError::NoConvergence {
        routine: "lambert_w0",
        iterations: LAMBERT_MAX_ITER,
    })
}

/// Picks the neighbour of `w` with the smallest evaluated residual.
fn polish(w: f64, z: f64) -> f64 {
    let residual = |v: f64| (v * v.exp() - z).abs();
    [w.next_down(), w, w.next_up()]
        .into_iter()
        .filter(|v| *v >= 0.0)
        .min_by(|a, b| residual(*a).total_cmp(&residual(*b)))
        .unwrap_or(w)
}

/// `h_opt(n) = (2/N)·W(2dN)` with `N = 2n + 1`.
pub fn h_optimal(n: usize, d: f64) -> f64 {
    assert!(n >= 1 && d > 0.0);
    let big_n = (2 * n + 1) as f64;
    let w = lambert_w0(2.0 * d * big_n).expect("W converges for positive finite arguments");
    2.0 / big_n * w
}

/// `h_max(n) = t_max / n`.
pub fn h_maximal(n: usize, t_max: f64) -> f64 {
    assert!(n >= 1 && t_max > 0.0);
    t_max / n as f64
}

/// Largest `n` with `n·h_opt(n, d) <= t_max`, or 0 when not even `n = 1` fits.
pub fn max_order(t_max: f64, d: f64) -> usize {
    assert!(t_max > 0.0 && d > 0.0);
    let fits = |n: usize| n as f64 * h_optimal(n, d) <= t_max;
    if !fits(1) {
        return 0;
    }
    // n·h_opt(n) grows like ln n, so the bracket stays modest even for wide windows.
    let mut lo = 1;
    let mut hi = 2;
    while fits(hi) {
        lo = hi;
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpacingKind {
    Optimal,
    Maximal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacingStrategy {
    pub kind: SpacingKind,
    /// Regularity strip half-width; only the optimal rule uses it.
    pub strip_width_d: f64,
}

impl SpacingStrategy {
    pub const DEFAULT_STRIP_WIDTH: f64 = FRAC_PI_2;

    pub fn optimal() -> Self {
        Self {
            kind: SpacingKind::Optimal,
            strip_width_d: Self::DEFAULT_STRIP_WIDTH,
        }
    }

    pub fn optimal_with_strip(d: f64) -> Result<Self> {
        if !(d > 0.0 && d <= FRAC_PI_2) {
            return Err(QuadError::invalid(format!(
                "strip width must lie in (0, pi/2], got {d}"
            )));
        }
        Ok(Self {
            kind: SpacingKind::Optimal,
            strip_width_d: d,
        })
    }

    pub fn maximal() -> Self {
        Self {
            kind: SpacingKind::Maximal,
            strip_width_d: Self::DEFAULT_STRIP_WIDTH,
        }
    }

    /// Spacing for order `n` under window limit `t_max`.
    pub fn spacing(&self, n: usize, t_max: f64) -> f64 {
        match self.kind {
            SpacingKind::Optimal => h_optimal(n, self.strip_width_d),
            SpacingKind::Maximal => h_maximal(n, t_max),
        }
    }

    /// Highest order admissible under `t_max`; unbounded for maximal spacing.
    pub fn order_limit(&self, t_max: f64) -> Option<usize> {
        match self.kind {
            SpacingKind::Optimal => Some(max_order(t_max, self.strip_width_d)),
            SpacingKind::Maximal => None,
        }
    }
}

impl std::str::FromStr for SpacingKind {
    type Err = QuadError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "optimal" => Ok(SpacingKind::Optimal),
            "maximal" => Ok(SpacingKind::Maximal),
            other => Err(QuadError::invalid(format!(
                "unknown spacing strategy '{other}'"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::float_model::{window_limits, FloatModel};
    use std::f64::consts::PI;

    #[test]
    fn lambert_trivial_points() {
        assert_eq!(lambert_w0(0.0).unwrap(), 0.0);
        assert!((lambert_w0(E).unwrap() - 1.0).abs() <= 2.0 * f64::EPSILON);
        let w = lambert_w0(2780.4).unwrap();
        assert!((w * w.exp() - 2780.4).abs() <= 1e-12 * 2780.4);
        assert!((w - 6.119).abs() < 5e-4);
        assert!(lambert_w0(-1.0).is_err());
        assert!(lambert_w0(f64::NAN).is_err());
    }

    #[test]
    fn lambert_residual_on_log_grid() {
        for k in 0..1000 {
            let z = 10f64.powf(-3.0 + 9.0 * k as f64 / 999.0);
            let w = lambert_w0(z).unwrap();
            let res = (w * w.exp() - z).abs();
            // adjacent doubles near W = 10 already differ by about 9ε·z in w·e^w
            assert!(
                res <= 8.0 * f64::EPSILON * z.max(1.0),
                "z={z} residual={res:e}"
            );
        }
    }

    #[test]
    fn lambert_reference_values() {
        // 50-digit reference evaluations, rounded to double
        for (z, w) in [
            (1e-3, 0.000_999_001_497_338_530_8),
            (1.0, 0.567_143_290_409_783_8),
            (10.0, 1.745_528_002_740_699_4),
            (1e6, 11.383_358_086_140_053),
            (1e300, 684.247_208_629_760_8),
        ] {
            let got = lambert_w0(z).unwrap();
            assert!(
                (got - w).abs() <= 2.0 * f64::EPSILON * w,
                "W({z}) = {got}, want {w}"
            );
        }
    }

    #[test]
    fn lambert_converges_up_to_huge_arguments() {
        for z in [1e-300, 1e-10, 0.5, 1.0, 2.0, 1e10, 1e100, 1e300] {
            let w = lambert_w0(z).unwrap();
            // check the inverse relation in the log domain for large z
            if z > 1.0 {
                assert!((w.ln() + w - z.ln()).abs() <= 4.0 * f64::EPSILON * z.ln().abs().max(1.0));
            } else {
                assert!((w * w.exp() - z).abs() <= 4.0 * f64::EPSILON * z.max(1.0));
            }
        }
    }

    #[test]
    fn h_optimal_small_order() {
        let expected = 2.0 / 3.0 * lambert_w0(3.0 * PI).unwrap();
        assert_eq!(h_optimal(1, FRAC_PI_2), expected);
    }

    #[test]
    fn h_optimal_below_log_approximation() {
        for n in [10usize, 100, 1000] {
            let big_n = (2 * n + 1) as f64;
            assert!(h_optimal(n, FRAC_PI_2) < 2.0 / big_n * (PI * big_n).ln());
        }
    }

    #[test]
    fn h_optimal_decreasing_and_window_increasing() {
        let mut prev_h = f64::INFINITY;
        let mut prev_window = 0.0;
        for n in 1..=20_000 {
            let h = h_optimal(n, FRAC_PI_2);
            let window = n as f64 * h;
            assert!(h > 0.0 && h < prev_h, "h not decreasing at {n}");
            assert!(window > prev_window, "n·h not increasing at {n}");
            prev_h = h;
            prev_window = window;
        }
    }

    #[test]
    fn h_maximal_values() {
        assert!((h_maximal(100, 6.112) - 0.06112).abs() < 1e-15);
        assert_eq!(18.0 * h_maximal(18, 3.425), 3.425);
        for n in [1usize, 3, 7, 100, 441] {
            let t = 6.112;
            let h = h_maximal(n, t);
            let h2 = h_maximal(2 * n, t);
            assert_eq!(h2 * 2.0, h);
            for i in 0..=n {
                assert_eq!(i as f64 * h, (2 * i) as f64 * h2);
            }
            let window = n as f64 * h;
            assert!((window - t).abs() <= t * f64::EPSILON);
        }
    }

    #[test]
    fn intrinsic_maximal_orders() {
        let cases = [
            (FloatModel::SINGLE, 1, 37),
            (FloatModel::SINGLE, 3, 18),
            (FloatModel::DOUBLE, 1, 442),
            (FloatModel::DOUBLE, 3, 201),
            (FloatModel::EXTENDED, 1, 10228),
            (FloatModel::EXTENDED, 3, 4725),
        ];
        for (model, dim, expected) in cases {
            let lim = window_limits(&model, dim);
            assert_eq!(
                max_order(lim.t_max_xw, FRAC_PI_2),
                expected,
                "{} D={dim}",
                model.name
            );
        }
    }

    #[test]
    fn max_order_with_rounded_windows() {
        assert_eq!(max_order(3.425, FRAC_PI_2), 18);
        // 442·h_opt(442) = 6.11202 exceeds the three-decimal rounding 6.112
        assert_eq!(max_order(6.112, FRAC_PI_2), 441);
        assert_eq!(max_order(6.1125, FRAC_PI_2), 442);
        assert_eq!(max_order(0.1, FRAC_PI_2), 0);
    }

    #[test]
    fn strategy_construction() {
        assert!(SpacingStrategy::optimal_with_strip(0.0).is_err());
        assert!(SpacingStrategy::optimal_with_strip(2.0).is_err());
        assert!(SpacingStrategy::optimal_with_strip(1.0).is_ok());
        assert_eq!(
            "Maximal".parse::<SpacingKind>().unwrap(),
            SpacingKind::Maximal
        );
        assert_eq!(SpacingStrategy::maximal().order_limit(6.0), None);
        assert_eq!(SpacingStrategy::optimal().order_limit(3.425), Some(18));
    }
}
