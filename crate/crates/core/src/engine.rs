//! Tanh-sinh integration over finite boxes.
//!
//! A run builds one node table for the requested order (with the window set
//! by the float model, the dimension and the integrand), maps it onto every
//! axis and accumulates the tensor-product sum in `T` arithmetic.
//!
//! Accumulation order: index tuples are visited as sorted representatives
//! `p_0 <= p_1 <= ...` of their axis-permutation orbit, where positions run
//! from the outermost nodes inward (`-n, n, -(n-1), n-1, ..., 0`). The terms of
//! one orbit are sorted before they enter the compensated sum. Each term is
//! `(w_(1) ⋯ w_(D-1) · f) · w_(D)` with the weights in descending order, so the
//! smallest weight is applied last, after the function value. The result is
//! bit-identical under any permutation of the integrand's axes, and identical
//! whether or not the outer loop runs concurrently.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{QuadError, Result};
use crate::float_model::{window_limits, FloatModel, ModelName};
use crate::nodes::{build_table, NodeTable, Side};
use crate::real::Real;
use crate::spacing::{SpacingKind, SpacingStrategy};
use crate::summation::{two_sum, CompensatedSum};

/// Finite integration interval `[lower, upper]` with `lower < upper`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite() && lower < upper) {
            return Err(QuadError::invalid(format!(
                "interval [{lower}, {upper}] must be finite with lower < upper"
            )));
        }
        Ok(Self { lower, upper })
    }

    pub fn unit() -> Self {
        Self {
            lower: 0.0,
            upper: 1.0,
        }
    }

    pub fn symmetric() -> Self {
        Self {
            lower: -1.0,
            upper: 1.0,
        }
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.upper - self.lower)
    }
}

/// One coordinate of an evaluation point.
///
/// The distances to both interval ends are derived from the stored endpoint
/// distance `y` of the node, never by subtracting `x` from an endpoint, so
/// they keep full relative precision right up to the boundary. `x` itself is
/// `lower + dist_lower` on the left half and `upper - dist_upper` on the right.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluationPoint<T> {
    pub x: T,
    pub dist_lower: T,
    pub dist_upper: T,
    pub side: Side,
    pub axis: usize,
}

/// A function integrated by the engine.
pub trait Integrand<T: Real>: Sync {
    fn arity(&self) -> usize;

    fn eval(&self, point: &[EvaluationPoint<T>]) -> T;

    /// Integrand-specific window limit `t_max^f` under `model`, if any.
    fn window_limit(&self, _model: &FloatModel) -> Option<f64> {
        None
    }
}

/// Adapts a closure over evaluation points into an [`Integrand`].
pub struct FnIntegrand<F> {
    arity: usize,
    window_limit: Option<f64>,
    f: F,
}

impl<F> FnIntegrand<F> {
    pub fn new(arity: usize, f: F) -> Self {
        Self {
            arity,
            window_limit: None,
            f,
        }
    }

    pub fn with_window_limit(mut self, t_max: f64) -> Self {
        self.window_limit = Some(t_max);
        self
    }
}

impl<T: Real, F> Integrand<T> for FnIntegrand<F>
where
    F: Fn(&[EvaluationPoint<T>]) -> T + Sync,
{
    fn arity(&self) -> usize {
        self.arity
    }

    fn eval(&self, point: &[EvaluationPoint<T>]) -> T {
        (self.f)(point)
    }

    fn window_limit(&self, _model: &FloatModel) -> Option<f64> {
        self.window_limit
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegrationResult {
    pub value: f64,
    pub order: usize,
    /// Integrand evaluations actually performed, across all orders of an
    /// adaptive run.
    pub evaluations: u64,
    /// `|I_2n - I_n|` of the last doubling; NaN for a single fixed-order run.
    pub error_estimate: f64,
    /// True for a finished fixed-order run or a met tolerance.
    pub converged: bool,
    pub t_max_used: f64,
    pub h_used: f64,
    /// Smallest product of all but the last-applied weight over the terms
    /// (the weight itself in one dimension).
    pub min_partial_weight: f64,
}

/// `min(t_max^xw(model, dimension), integrand_limit)`.
pub fn effective_window(model: &FloatModel, dimension: usize, integrand_limit: Option<f64>) -> f64 {
    let intrinsic = window_limits(model, dimension).t_max_xw;
    match integrand_limit {
        Some(limit) => intrinsic.min(limit),
        None => intrinsic,
    }
}

/// Tanh-sinh quadrature with a fixed spacing strategy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TanhSinh {
    pub strategy: SpacingStrategy,
    /// Evaluate outer slices on the rayon pool. Accumulation order is unaffected.
    pub concurrent: bool,
}

impl TanhSinh {
    pub fn new(strategy: SpacingStrategy) -> Self {
        Self {
            strategy,
            concurrent: false,
        }
    }

    pub fn concurrent(mut self, yes: bool) -> Self {
        self.concurrent = yes;
        self
    }

    pub fn integrate_1d<T: Real, F: Integrand<T> + ?Sized>(
        &self,
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
        self.integrate_nd(f, &[domain], n)
    }

    pub fn integrate_nd<T: Real, F: Integrand<T> + ?Sized>(
        &self,
        f: &F,
        domains: &[Interval],
        n: usize,
    ) -> Result<IntegrationResult> {
        let setup = Setup::new(f, domains, self.strategy)?;
        setup.check_order(n)?;
        let table = setup.table::<T>(n)?;
        let grid = Grid::<T>::new(&table, domains);
        let acc = grid.accumulate(f, Visit::All, self.concurrent)?;
        Ok(acc.result(&grid, &setup, f64::NAN, true))
    }

    /// Doubles the order from `n_start` until `|I_2n - I_n| <= rel_tol·|I_2n|`.
    ///
    /// Maximal spacing keeps the window fixed, so the order-`n` grid is a
    /// subset of the order-`2n` grid and only the new points are evaluated.
    /// Optimal spacing recomputes every order and stops at `n_max`.
    pub fn integrate_adaptive<T: Real, F: Integrand<T> + ?Sized>(
        &self,
        f: &F,
        domains: &[Interval],
        rel_tol: f64,
        n_start: usize,
        n_limit: usize,
    ) -> Result<IntegrationResult> {
        if rel_tol.is_nan() || rel_tol <= 0.0 {
            return Err(QuadError::invalid("rel_tol must be positive"));
        }
        if n_start == 0 || n_limit < n_start {
            return Err(QuadError::invalid(format!(
                "need 1 <= n_start <= n_limit, got {n_start} and {n_limit}"
            )));
        }
        let setup = Setup::new(f, domains, self.strategy)?;
        setup.check_order(n_start)?;
        match self.strategy.kind {
            SpacingKind::Maximal => {
                self.adaptive_nested(f, domains, &setup, rel_tol, n_start, n_limit)
            }
            SpacingKind::Optimal => {
                self.adaptive_optimal(f, domains, &setup, rel_tol, n_start, n_limit)
            }
        }
    }

    fn adaptive_nested<T: Real, F: Integrand<T> + ?Sized>(
        &self,
        f: &F,
        domains: &[Interval],
        setup: &Setup,
        rel_tol: f64,
        n_start: usize,
        n_limit: usize,
    ) -> Result<IntegrationResult> {
        let mut table = setup.table::<T>(n_start)?;
        let mut grid = Grid::<T>::new(&table, domains);
        let mut acc = grid.accumulate(f, Visit::All, self.concurrent)?;
        let mut evaluations = acc.evaluations;
        let mut previous = acc.result(&grid, setup, f64::NAN, false);

        while 2 * table.order() <= n_limit {
            let n = 2 * table.order();
            // halving in T is exact, so every old node reappears bit-for-bit
            let h = table.spacing() * 0.5;
            table = build_table::<T>(n, h, setup.t_max, domains.len())?;
            grid = Grid::<T>::new(&table, domains);
            let fresh = grid.accumulate(f, Visit::OddOnly, self.concurrent)?;
            evaluations += fresh.evaluations;
            acc.merge(fresh);
            acc.evaluations = evaluations;

            let mut current = acc.result(&grid, setup, f64::NAN, false);
            current.error_estimate = (current.value - previous.value).abs();
            if current.error_estimate <= rel_tol * current.value.abs() {
                current.converged = true;
                return Ok(current);
            }
            previous = current;
        }
        Err(QuadError::NotConverged(Box::new(previous)))
    }

    fn adaptive_optimal<T: Real, F: Integrand<T> + ?Sized>(
        &self,
        f: &F,
        domains: &[Interval],
        setup: &Setup,
        rel_tol: f64,
        n_start: usize,
        n_limit: usize,
    ) -> Result<IntegrationResult> {
        let ceiling = setup.n_max.unwrap_or(usize::MAX).min(n_limit);
        let mut evaluations = 0;
        let mut n = n_start;
        let mut previous: Option<IntegrationResult> = None;
        loop {
            let table = setup.table::<T>(n)?;
            let grid = Grid::<T>::new(&table, domains);
            let acc = grid.accumulate(f, Visit::All, self.concurrent)?;
            evaluations += acc.evaluations;
            let mut current = acc.result(&grid, setup, f64::NAN, false);
            current.evaluations = evaluations;
            if let Some(prev) = &previous {
                current.error_estimate = (current.value - prev.value).abs();
                if current.error_estimate <= rel_tol * current.value.abs() {
                    current.converged = true;
                    return Ok(current);
                }
            }
            if n >= ceiling {
                return Err(QuadError::NotConverged(Box::new(current)));
            }
            n = (2 * n).min(ceiling);
            previous = Some(current);
        }
    }
}

/// The order-`n` table the integrator uses for `dimension` axes in `model`.
///
/// Fails with [`QuadError::OrderExceedsMax`] for optimal spacing beyond the
/// maximal order and with [`QuadError::UnsupportedModel`] for extended.
pub fn node_table(
    model: &FloatModel,
    strategy: SpacingStrategy,
    n: usize,
    dimension: usize,
    integrand_limit: Option<f64>,
) -> Result<NodeTable> {
    if dimension == 0 {
        return Err(QuadError::invalid("dimension must be at least 1"));
    }
    let setup = Setup::for_model(*model, strategy, dimension, integrand_limit)?;
    setup.check_order(n)?;
    match model.name {
        ModelName::Single => setup.table::<f32>(n),
        ModelName::Double => setup.table::<f64>(n),
        ModelName::Extended => Err(QuadError::UnsupportedModel(ModelName::Extended)),
    }
}

/// Fixed-order integration over one interval.
pub fn integrate_1d<T: Real, F: Integrand<T> + ?Sized>(
    f: &F,
    domain: Interval,
    strategy: SpacingStrategy,
    n: usize,
) -> Result<IntegrationResult> {
    TanhSinh::new(strategy).integrate_1d(f, domain, n)
}

/// Fixed-order tensor-product integration over a box.
pub fn integrate_nd<T: Real, F: Integrand<T> + ?Sized>(
    f: &F,
    domains: &[Interval],
    strategy: SpacingStrategy,
    n: usize,
) -> Result<IntegrationResult> {
    TanhSinh::new(strategy).integrate_nd(f, domains, n)
}

/// Order-doubling integration; see [`TanhSinh::integrate_adaptive`].
pub fn integrate_adaptive<T: Real, F: Integrand<T> + ?Sized>(
    f: &F,
    domains: &[Interval],
    strategy: SpacingStrategy,
    rel_tol: f64,
    n_start: usize,
    n_limit: usize,
) -> Result<IntegrationResult> {
    TanhSinh::new(strategy).integrate_adaptive(f, domains, rel_tol, n_start, n_limit)
}

/// Window and order limits of one integration, fixed before any table is built.
const WINDOW_MARGIN_EPS: f64 = 64.0;

struct Setup {
    model: FloatModel,
    strategy: SpacingStrategy,
    t_max: f64,
    n_max: Option<usize>,
    dimension: usize,
}

impl Setup {
    fn new<T: Real, F: Integrand<T> + ?Sized>(
        f: &F,
        domains: &[Interval],
        strategy: SpacingStrategy,
    ) -> Result<Self> {
        if domains.is_empty() || f.arity() != domains.len() {
            return Err(QuadError::DimensionMismatch {
                arity: f.arity(),
                domains: domains.len(),
            });
        }
        for d in domains {
            Interval::new(d.lower, d.upper)?;
        }
        let model = T::model();
        Self::for_model(model, strategy, domains.len(), f.window_limit(&model))
    }

    fn for_model(
        model: FloatModel,
        strategy: SpacingStrategy,
        dimension: usize,
        integrand_limit: Option<f64>,
    ) -> Result<Self> {
        // The window limits put the outermost values exactly on the underflow
        // level; rounding in T could push a node at t_max just below it.
        let t_max = effective_window(&model, dimension, integrand_limit)
            * (1.0 - WINDOW_MARGIN_EPS * model.machine_epsilon);
        if t_max.is_nan() || t_max <= 0.0 {
            return Err(QuadError::invalid(format!(
                "window limit {t_max} is not positive"
            )));
        }
        Ok(Self {
            model,
            strategy,
            t_max,
            n_max: strategy.order_limit(t_max),
            dimension,
        })
    }

    fn check_order(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(QuadError::invalid("order n must be at least 1"));
        }
        match self.n_max {
            Some(n_max) if n > n_max => Err(QuadError::OrderExceedsMax { n, n_max }),
            _ => Ok(()),
        }
    }

    fn table<T: Real>(&self, n: usize) -> Result<NodeTable> {
        let h = match self.strategy.kind {
            SpacingKind::Optimal => self.strategy.spacing(n, self.t_max),
            SpacingKind::Maximal => {
                // keep n·h at or below t_max after rounding h to T
                let mut h = T::from_f64(self.strategy.spacing(n, self.t_max));
                while (T::from_f64(n as f64) * h).to_f64() > self.t_max {
                    h = h.next_below();
                }
                h.to_f64()
            }
        };
        debug_assert_eq!(self.model, T::model());
        build_table::<T>(n, h, self.t_max, self.dimension)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Visit {
    All,
    /// Only tuples with at least one odd node index: the points an order
    /// doubling adds to a nested grid.
    OddOnly,
}

/// Node values of one table mapped onto every axis, in accumulation order.
struct Grid<T> {
    /// Node index at each accumulation position.
    index: Vec<i64>,
    weight: Vec<T>,
    /// `axes[k][p]` is the point of axis `k` at position `p`.
    axes: Vec<Vec<EvaluationPoint<T>>>,
    spacing: T,
    half_widths: Vec<T>,
}

impl<T: Real> Grid<T> {
    fn new(table: &NodeTable, domains: &[Interval]) -> Self {
        let n = table.order() as i64;
        let mut index = Vec::with_capacity(table.len());
        for k in (1..=n).rev() {
            index.push(-k);
            index.push(k);
        }
        index.push(0);

        let nodes: Vec<_> = index.iter().map(|&i| table.node(i)).collect();
        let weight = nodes.iter().map(|nd| T::from_f64(nd.weight)).collect();
        let half_widths: Vec<T> = domains
            .iter()
            .map(|d| T::from_f64(d.half_width()))
            .collect();
        let axes = domains
            .iter()
            .zip(&half_widths)
            .enumerate()
            .map(|(axis, (dom, &scale))| {
                let lower = T::from_f64(dom.lower);
                let upper = T::from_f64(dom.upper);
                let two = T::lit(2.0);
                nodes
                    .iter()
                    .map(|nd| {
                        let y = T::from_f64(nd.y);
                        let near = scale * y;
                        let far = scale * (two - y);
                        match nd.side {
                            Side::Left => EvaluationPoint {
                                x: lower + near,
                                dist_lower: near,
                                dist_upper: far,
                                side: nd.side,
                                axis,
                            },
                            Side::Right => EvaluationPoint {
                                x: upper - near,
                                dist_lower: far,
                                dist_upper: near,
                                side: nd.side,
                                axis,
                            },
                            Side::Center => EvaluationPoint {
                                x: lower + scale,
                                dist_lower: scale,
                                dist_upper: scale,
                                side: nd.side,
                                axis,
                            },
                        }
                    })
                    .collect()
            })
            .collect();
        Self {
            index,
            weight,
            axes,
            spacing: T::from_f64(table.spacing()),
            half_widths,
        }
    }

    fn dimension(&self) -> usize {
        self.axes.len()
    }

    fn accumulate<F: Integrand<T> + ?Sized>(
        &self,
        f: &F,
        visit: Visit,
        concurrent: bool,
    ) -> Result<Accumulator<T>> {
        let len = self.index.len();
        let slices: Vec<Result<Accumulator<T>>> = if concurrent {
            (0..len)
                .into_par_iter()
                .map(|p0| self.accumulate_slice(f, visit, p0))
                .collect()
        } else {
            (0..len)
                .map(|p0| self.accumulate_slice(f, visit, p0))
                .collect()
        };
        let mut total = Accumulator::new();
        for slice in slices {
            total.merge(slice?);
        }
        Ok(total)
    }

    /// All sorted representatives whose first position is `p0`.
    fn accumulate_slice<F: Integrand<T> + ?Sized>(
        &self,
        f: &F,
        visit: Visit,
        p0: usize,
    ) -> Result<Accumulator<T>> {
        let dim = self.dimension();
        let len = self.index.len();
        let mut acc = Accumulator::new();
        let mut rep = vec![p0; dim];
        let mut perm = vec![0usize; dim];
        let mut point = Vec::with_capacity(dim);
        let mut terms: Vec<T> = Vec::with_capacity(6);

        loop {
            let wanted = match visit {
                Visit::All => true,
                Visit::OddOnly => rep.iter().any(|&p| self.index[p] % 2 != 0),
            };
            if wanted {
                let (partial, last) = self.weight_factors(&rep);
                acc.min_partial_weight = acc.min_partial_weight.min(partial.to_f64());

                terms.clear();
                perm.copy_from_slice(&rep);
                loop {
                    point.clear();
                    point.extend(perm.iter().enumerate().map(|(axis, &p)| self.axes[axis][p]));
                    let value = f.eval(&point);
                    if !value.is_finite() {
                        return Err(QuadError::EvaluationFailure {
                            point: point.iter().map(|q| q.x.to_f64()).collect(),
                            value: value.to_f64(),
                        });
                    }
                    terms.push(match last {
                        Some(w) => partial * value * w,
                        None => partial * value,
                    });
                    if !next_permutation(&mut perm) {
                        break;
                    }
                }
                acc.evaluations += terms.len() as u64;
                add_orbit(&mut acc.sum, &mut terms);
            }

            // next non-decreasing tuple with rep[0] fixed
            let mut k = dim;
            loop {
                if k == 1 {
                    return Ok(acc);
                }
                k -= 1;
                if rep[k] + 1 < len {
                    let next = rep[k] + 1;
                    rep[k..].iter_mut().for_each(|p| *p = next);
                    break;
                }
            }
        }
    }

    /// Product of the `D - 1` largest weights of a tuple, and the smallest
    /// weight (absent in one dimension, where the product is the weight).
    fn weight_factors(&self, rep: &[usize]) -> (T, Option<T>) {
        let mut w: Vec<T> = rep.iter().map(|&p| self.weight[p]).collect();
        if w.len() == 1 {
            return (w[0], None);
        }
        w.sort_by(|a, b| b.partial_cmp(a).expect("weights are finite"));
        let last = w.pop();
        let partial = w.into_iter().fold(T::one(), |acc, x| acc * x);
        (partial, last)
    }
}

/// Adds the terms of one permutation orbit in a permutation-independent order.
fn add_orbit<T: Real>(sum: &mut CompensatedSum<T>, terms: &mut [T]) {
    match terms {
        [a] => sum.add(*a),
        [a, b] => {
            let (s, e) = two_sum(*a, *b);
            sum.add(s);
            sum.add(e);
        }
        _ => {
            terms.sort_by(|a, b| a.partial_cmp(b).expect("terms are finite"));
            for &t in terms.iter() {
                sum.add(t);
            }
        }
    }
}

/// Lexicographic successor of `v` among the distinct permutations of its
/// elements; `false` once `v` is the last (non-increasing) one.
fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

struct Accumulator<T> {
    sum: CompensatedSum<T>,
    evaluations: u64,
    min_partial_weight: f64,
}

impl<T: Real> Accumulator<T> {
    fn new() -> Self {
        Self {
            sum: CompensatedSum::new(),
            evaluations: 0,
            min_partial_weight: f64::INFINITY,
        }
    }

    fn merge(&mut self, other: Accumulator<T>) {
        self.sum.merge(&other.sum);
        self.evaluations += other.evaluations;
        self.min_partial_weight = self.min_partial_weight.min(other.min_partial_weight);
    }

    fn result(
        &self,
        grid: &Grid<T>,
        setup: &Setup,
        error_estimate: f64,
        converged: bool,
    ) -> IntegrationResult {
        let factor = grid
            .half_widths
            .iter()
            .fold(T::one(), |acc, &s| acc * (grid.spacing * s));
        IntegrationResult {
            value: (self.sum.value() * factor).to_f64(),
            order: (grid.index.len() - 1) / 2,
            evaluations: self.evaluations,
            error_estimate,
            converged,
            t_max_used: setup.t_max,
            h_used: grid.spacing.to_f64(),
            min_partial_weight: self.min_partial_weight,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant<T: Real>(
        arity: usize,
        c: f64,
    ) -> FnIntegrand<impl Fn(&[EvaluationPoint<T>]) -> T + Sync> {
        FnIntegrand::new(arity, move |_: &[EvaluationPoint<T>]| T::from_f64(c))
    }

    #[test]
    fn next_permutation_enumerates_distinct_orderings() {
        let mut v = vec![0, 1, 2];
        let mut count = 1;
        while next_permutation(&mut v) {
            count += 1;
        }
        assert_eq!(count, 6);
        let mut v = vec![0, 0, 1];
        let mut seen = vec![v.clone()];
        while next_permutation(&mut v) {
            seen.push(v.clone());
        }
        assert_eq!(seen, vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]);
        let mut v = vec![3];
        assert!(!next_permutation(&mut v));
    }

    #[test]
    fn effective_window_takes_minimum() {
        let d = FloatModel::DOUBLE;
        assert_eq!(effective_window(&d, 1, None), window_limits(&d, 1).t_max_xw);
        assert_eq!(effective_window(&d, 1, Some(5.0)), 5.0);
        let s3 = window_limits(&FloatModel::SINGLE, 3).t_max_w;
        assert_eq!(effective_window(&FloatModel::SINGLE, 3, Some(10.0)), s3);
        assert_eq!(effective_window(&FloatModel::SINGLE, 3, Some(3.0)), 3.0);
    }

    #[test]
    fn unit_integrand_one_dimension() {
        let r = integrate_1d::<f64, _>(
            &constant(1, 1.0),
            Interval::symmetric(),
            SpacingStrategy::maximal(),
            30,
        )
        .unwrap();
        assert!((r.value - 2.0).abs() <= 1e-14 * 2.0, "{}", r.value);
        assert_eq!(r.evaluations, 61);
        assert!(r.error_estimate.is_nan());
        assert!(r.converged);
    }

    #[test]
    fn unit_integrand_two_dimensions() {
        let r = integrate_nd::<f64, _>(
            &constant(2, 1.0),
            &[Interval::symmetric(), Interval::symmetric()],
            SpacingStrategy::maximal(),
            30,
        )
        .unwrap();
        assert!((r.value - 4.0).abs() <= 1e-13 * 4.0, "{}", r.value);
        assert_eq!(r.evaluations, 61 * 61);
    }

    #[test]
    fn three_dimensional_evaluation_count() {
        let r = integrate_nd::<f64, _>(
            &constant(3, 1.0),
            &[Interval::unit(); 3],
            SpacingStrategy::maximal(),
            6,
        )
        .unwrap();
        assert_eq!(r.evaluations, 13 * 13 * 13);
    }

    #[test]
    fn affine_substitution() {
        let f = FnIntegrand::new(1, |p: &[EvaluationPoint<f64>]| p[0].x);
        let r = integrate_1d(
            &f,
            Interval::new(0.0, 2.0).unwrap(),
            SpacingStrategy::maximal(),
            40,
        )
        .unwrap();
        assert!((r.value - 2.0).abs() <= 1e-13, "{}", r.value);
    }

    #[test]
    fn distances_are_consistent_with_abscissae() {
        let dom = Interval::new(1.0, 3.0).unwrap();
        let f = FnIntegrand::new(1, move |p: &[EvaluationPoint<f64>]| {
            let q = p[0];
            assert!(q.dist_lower > 0.0 && q.dist_upper > 0.0);
            assert!((q.dist_lower + q.dist_upper - 2.0).abs() < 1e-14);
            match q.side {
                Side::Left => assert_eq!(q.x, 1.0 + q.dist_lower),
                Side::Right => assert_eq!(q.x, 3.0 - q.dist_upper),
                Side::Center => assert_eq!(q.x, 2.0),
            }
            1.0
        });
        integrate_1d(&f, dom, SpacingStrategy::maximal(), 15).unwrap();
    }

    #[test]
    fn optimal_order_ceiling() {
        let f = constant::<f64>(1, 1.0);
        let err =
            integrate_1d(&f, Interval::symmetric(), SpacingStrategy::optimal(), 443).unwrap_err();
        assert!(
            matches!(err, QuadError::OrderExceedsMax { n: 443, n_max: 442 }),
            "{err}"
        );
        let r = integrate_1d(&f, Interval::symmetric(), SpacingStrategy::optimal(), 442).unwrap();
        assert!((r.value - 2.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_mismatched_arity_and_zero_order() {
        let f = constant::<f64>(2, 1.0);
        assert!(matches!(
            integrate_nd(&f, &[Interval::unit()], SpacingStrategy::maximal(), 5),
            Err(QuadError::DimensionMismatch {
                arity: 2,
                domains: 1
            })
        ));
        assert!(matches!(
            integrate_1d(&f, Interval::unit(), SpacingStrategy::maximal(), 5),
            Err(QuadError::DimensionMismatch { .. })
        ));
        let g = constant::<f64>(1, 1.0);
        assert!(integrate_1d(&g, Interval::unit(), SpacingStrategy::maximal(), 0).is_err());
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn evaluation_failure_reports_point() {
        let f = FnIntegrand::new(
            1,
            |p: &[EvaluationPoint<f64>]| if p[0].x > 0.9 { f64::NAN } else { 1.0 },
        );
        match integrate_1d(&f, Interval::unit(), SpacingStrategy::maximal(), 10) {
            Err(QuadError::EvaluationFailure { point, value }) => {
                assert!(point[0] > 0.9);
                assert!(value.is_nan());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn integrand_window_limit_is_honoured() {
        let f = constant::<f64>(1, 1.0);
        let limited = FnIntegrand::new(1, |_: &[EvaluationPoint<f64>]| 1.0).with_window_limit(3.0);
        let r = integrate_1d(&limited, Interval::unit(), SpacingStrategy::maximal(), 10).unwrap();
        assert!(r.t_max_used <= 3.0 && r.t_max_used > 3.0 * (1.0 - 1e-13));
        assert!(r.h_used * 10.0 <= r.t_max_used);
        assert!((r.h_used * 10.0 - 3.0).abs() < 1e-13);
        let r = integrate_1d(&f, Interval::unit(), SpacingStrategy::maximal(), 10).unwrap();
        assert!(r.t_max_used > 6.1);
    }

    #[test]
    fn concurrent_matches_sequential_bitwise() {
        let f = FnIntegrand::new(2, |p: &[EvaluationPoint<f64>]| {
            (p[0].x * 3.0).sin() + p[1].x.exp() * p[0].x
        });
        let doms = [Interval::new(-1.0, 2.0).unwrap(), Interval::unit()];
        let seq = TanhSinh::new(SpacingStrategy::maximal())
            .integrate_nd(&f, &doms, 25)
            .unwrap();
        let par = TanhSinh::new(SpacingStrategy::maximal())
            .concurrent(true)
            .integrate_nd(&f, &doms, 25)
            .unwrap();
        assert_eq!(seq.value.to_bits(), par.value.to_bits());
        assert_eq!(seq.evaluations, par.evaluations);
    }

    #[test]
    fn adaptive_constant_converges_at_first_doubling() {
        for rel_tol in [1e-12, 1e-6] {
            let r = integrate_adaptive(
                &constant::<f64>(1, 3.0),
                &[Interval::unit()],
                SpacingStrategy::maximal(),
                rel_tol,
                30,
                1000,
            )
            .unwrap();
            assert!(r.converged);
            assert_eq!(r.order, 60);
            assert!((r.value - 3.0).abs() < 1e-14);
        }
        let r = integrate_adaptive(
            &constant::<f32>(1, 3.0),
            &[Interval::unit()],
            SpacingStrategy::maximal(),
            1e-5,
            10,
            1000,
        )
        .unwrap();
        assert_eq!(r.order, 20);
    }

    #[test]
    fn adaptive_reuses_nested_points() {
        let f = FnIntegrand::new(2, |p: &[EvaluationPoint<f64>]| p[0].x * p[1].x * p[1].x);
        let doms = [Interval::unit(), Interval::unit()];
        let r = integrate_adaptive(&f, &doms, SpacingStrategy::maximal(), 1e-12, 4, 1000).unwrap();
        let side = 2 * r.order as u64 + 1;
        assert_eq!(r.evaluations, side * side);
        assert!((r.value - 1.0 / 6.0).abs() < 1e-13);
    }

    #[test]
    fn adaptive_optimal_clamps_at_n_max() {
        // 1/sqrt(1 - x^2) on [-1, 1] converges well before n_max
        let f = FnIntegrand::new(1, |p: &[EvaluationPoint<f64>]| {
            let q = p[0];
            1.0 / (q.dist_lower * q.dist_upper).sqrt()
        });
        let r = integrate_adaptive(
            &f,
            &[Interval::symmetric()],
            SpacingStrategy::optimal(),
            1e-13,
            3,
            10_000,
        )
        .unwrap();
        assert!((r.value - std::f64::consts::PI).abs() < 1e-13);

        // a kink at 0.3 keeps successive orders apart; stops at n_max = 442
        let kink = FnIntegrand::new(1, |p: &[EvaluationPoint<f64>]| (p[0].x - 0.3).abs());
        let err = integrate_adaptive(
            &kink,
            &[Interval::symmetric()],
            SpacingStrategy::optimal(),
            1e-30,
            3,
            10_000,
        )
        .unwrap_err();
        match err {
            QuadError::NotConverged(best) => assert_eq!(best.order, 442),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn adaptive_argument_validation() {
        let f = constant::<f64>(1, 1.0);
        let doms = [Interval::unit()];
        assert!(integrate_adaptive(&f, &doms, SpacingStrategy::maximal(), 0.0, 4, 100).is_err());
        assert!(integrate_adaptive(&f, &doms, SpacingStrategy::maximal(), 1e-6, 0, 100).is_err());
        assert!(integrate_adaptive(&f, &doms, SpacingStrategy::maximal(), 1e-6, 50, 10).is_err());
        assert!(matches!(
            integrate_adaptive(&f, &doms, SpacingStrategy::optimal(), 1e-6, 500, 1000),
            Err(QuadError::OrderExceedsMax { .. })
        ));
    }
}
