//! The tanh-sinh transform and underflow-checked node tables.
//!
//! Node values are computed in the arithmetic of the table's float model and
//! only then widened to `f64` for storage, so a single-precision table holds
//! exactly the numbers a single-precision implementation would see.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{QuadError, Result};
use crate::float_model::{FloatModel, ModelName};
use crate::real::Real;

/// Abscissa `Ψ(t) = tanh(π/2 · sinh t)`.
pub fn psi<T: Real>(t: T) -> T {
    (T::lit(FRAC_PI_2) * t.sinh()).tanh()
}

/// `sech u = 2e^{-|u|} / (1 + e^{-2|u|})`, never overflowing.
#[inline]
fn sech_parts<T: Real>(u: T) -> (T, T) {
    let e = (-u.abs()).exp();
    let two = T::lit(2.0);
    (e, two * e / (T::one() + e * e))
}

/// Weight `Ψ'(t) = π/2 · cosh t / cosh²(π/2 · sinh t)`.
///
/// Evaluated as `(π/2 · cosh t · sech u) · sech u` so that neither `cosh² u`
/// overflows nor an intermediate underflows before the result does.
pub fn psi_prime<T: Real>(t: T) -> T {
    let lambda = T::lit(FRAC_PI_2);
    let (_, sech) = sech_parts(lambda * t.sinh());
    if sech == T::zero() {
        return T::zero();
    }
    lambda * t.cosh() * sech * sech
}

/// `1 - |Ψ(t)|`, the distance from the abscissa to the nearer endpoint of
/// `[-1, 1]`, computed as `e^{-|u|} · sech u` without cancellation.
pub fn endpoint_distance<T: Real>(t: T) -> T {
    let (e, sech) = sech_parts(T::lit(FRAC_PI_2) * t.sinh());
    e * sech
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Center,
    Right,
}

impl Side {
    fn of(index: i64) -> Self {
        match index.signum() {
            -1 => Side::Left,
            0 => Side::Center,
            _ => Side::Right,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub index: i64,
    pub t: f64,
    pub x: f64,
    /// `1 - |x|`.
    pub y: f64,
    pub weight: f64,
    pub side: Side,
}

/// One non-negative-index node; the negative half is its mirror image.
#[derive(Debug, Clone, Copy, PartialEq)]
struct HalfNode {
    t: f64,
    x: f64,
    y: f64,
    w: f64,
}

/// Nodes `t_i = i·h` for `i = -n..=n` of one float model.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeTable {
    model: FloatModel,
    order: usize,
    spacing: f64,
    dimension_hint: usize,
    half: Vec<HalfNode>,
}

impl NodeTable {
    pub fn model(&self) -> &FloatModel {
        &self.model
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// `t_n = n·h`, as stored.
    pub fn window(&self) -> f64 {
        self.half[self.order].t
    }

    pub fn dimension_hint(&self) -> usize {
        self.dimension_hint
    }

    pub fn len(&self) -> usize {
        2 * self.order + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Node with index `i`, `-n <= i <= n`.
    pub fn node(&self, index: i64) -> Node {
        let k = index.unsigned_abs() as usize;
        assert!(k <= self.order, "node index {index} out of range");
        let h = &self.half[k];
        let (t, x) = if index < 0 { (-h.t, -h.x) } else { (h.t, h.x) };
        Node {
            index,
            t,
            x,
            y: h.y,
            weight: h.w,
            side: Side::of(index),
        }
    }

    /// All `2n + 1` nodes in increasing index order.
    pub fn nodes(&self) -> impl Iterator<Item = Node> + '_ {
        let n = self.order as i64;
        (-n..=n).map(move |i| self.node(i))
    }

    pub fn min_weight(&self) -> f64 {
        self.half.iter().map(|h| h.w).fold(f64::INFINITY, f64::min)
    }

    pub fn min_distance(&self) -> f64 {
        self.half.iter().map(|h| h.y).fold(f64::INFINITY, f64::min)
    }

    pub fn to_document(&self) -> NodeTableDocument {
        NodeTableDocument {
            version: NodeTableDocument::VERSION,
            model: self.model.name,
            n: self.order,
            h: self.spacing,
            dimension: self.dimension_hint,
            t: self.half.iter().map(|h| h.t).collect(),
            x: self.half.iter().map(|h| h.x).collect(),
            y: self.half.iter().map(|h| h.y).collect(),
            w: self.half.iter().map(|h| h.w).collect(),
        }
    }

    pub fn from_document(doc: &NodeTableDocument) -> Result<Self> {
        if doc.version != NodeTableDocument::VERSION {
            return Err(QuadError::invalid(format!(
                "unsupported node table version {}",
                doc.version
            )));
        }
        let len = doc.n + 1;
        if doc.n == 0
            || [&doc.t, &doc.x, &doc.y, &doc.w]
                .iter()
                .any(|v| v.len() != len)
        {
            return Err(QuadError::invalid(format!(
                "node table arrays must hold n + 1 = {len} entries"
            )));
        }
        let half = (0..len)
            .map(|i| HalfNode {
                t: doc.t[i],
                x: doc.x[i],
                y: doc.y[i],
                w: doc.w[i],
            })
            .collect();
        Ok(NodeTable {
            model: FloatModel::new(doc.model),
            order: doc.n,
            spacing: doc.h,
            dimension_hint: doc.dimension.max(1),
            half,
        })
    }
}

/// Versioned JSON form of a [`NodeTable`]; arrays hold indices `0..=n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeTableDocument {
    pub version: u32,
    pub model: ModelName,
    pub n: usize,
    pub h: f64,
    pub dimension: usize,
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub w: Vec<f64>,
}

impl NodeTableDocument {
    pub const VERSION: u32 = 1;
}

/// Builds the order-`n` table with spacing `h` in the arithmetic of `T`.
///
/// `h` is rounded to `T` first; the stored spacing is that rounded value.
/// `n·h` may exceed `window_limit` by at most a few units of rounding.
pub fn build_table<T: Real>(
    n: usize,
    h: f64,
    window_limit: f64,
    dimension_hint: usize,
) -> Result<NodeTable> {
    if n == 0 {
        return Err(QuadError::invalid("order n must be at least 1"));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(QuadError::invalid(format!(
            "spacing must be positive, got {h}"
        )));
    }
    let model = T::model();
    let h_t = T::from_f64(h);
    let window = (T::from_f64(n as f64) * h_t).to_f64();
    if window > window_limit * (1.0 + 4.0 * model.machine_epsilon) {
        return Err(QuadError::WindowExceeded {
            window,
            limit: window_limit,
        });
    }
    let ufl = model.ufl().expect("native models have a representable UFL");

    let mut half = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let t = T::from_f64(i as f64) * h_t;
        let node = HalfNode {
            t: t.to_f64(),
            x: psi(t).to_f64(),
            y: endpoint_distance(t).to_f64(),
            w: psi_prime(t).to_f64(),
        };
        for (quantity, value) in [("weight", node.w), ("endpoint distance", node.y)] {
            if value < ufl {
                return Err(QuadError::UnderflowDetected {
                    index: i,
                    quantity,
                    value,
                    ufl,
                });
            }
        }
        half.push(node);
    }
    // i = 0 is the exact center.
    half[0].y = 1.0;

    Ok(NodeTable {
        model,
        order: n,
        spacing: h_t.to_f64(),
        dimension_hint: dimension_hint.max(1),
        half,
    })
}

/// [`build_table`] dispatched on a runtime model.
pub fn build_table_for(
    model: &FloatModel,
    n: usize,
    h: f64,
    window_limit: f64,
    dimension_hint: usize,
) -> Result<NodeTable> {
    match model.name {
        ModelName::Single => build_table::<f32>(n, h, window_limit, dimension_hint),
        ModelName::Double => build_table::<f64>(n, h, window_limit, dimension_hint),
        ModelName::Extended => Err(QuadError::UnsupportedModel(ModelName::Extended)),
    }
}
