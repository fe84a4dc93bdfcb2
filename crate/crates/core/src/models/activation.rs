//! Activation functions with exact Lipschitz and range data.
//!
//! Certificates need a rational Lipschitz constant and (for the product
//! nonlinearities) a rational bound on `sup |f|`. The built-in activations
//! carry those constants exactly; piecewise-linear tables compute them from
//! their nodes.

use super::ModelError;
use crate::rational::{rat, rat_int, rat_to_f64, Rat};
use num_traits::{Signed, Zero};

/// Rational upper bound on `sup |arctan| = pi/2`: `3927/2500 = 1.5708`.
pub fn arctan_sup_bound() -> Rat {
    rat(3927, 2500)
}

/// A scalar activation with exact slope and range bounds.
#[derive(Debug, Clone, PartialEq)]
pub enum Activation {
    /// `tanh(u)`; slope bound 1, range bound 1.
    Tanh,
    /// `arctan(u)`; slope bound 1, range bound [`arctan_sup_bound`].
    Arctan,
    /// `clamp(u, -1, 1)`; slope bound 1, range bound 1.
    SatLinear,
    /// Piecewise-linear interpolation through fixed nodes, constant outside.
    Table(PiecewiseLinear),
}

impl Activation {
    pub fn apply(&self, u: f64) -> f64 {
        match self {
            Activation::Tanh => u.tanh(),
            Activation::Arctan => u.atan(),
            Activation::SatLinear => u.clamp(-1.0, 1.0),
            Activation::Table(t) => t.apply(u),
        }
    }

    /// Exact global Lipschitz constant.
    pub fn lipschitz(&self) -> Rat {
        match self {
            Activation::Tanh | Activation::Arctan | Activation::SatLinear => rat_int(1),
            Activation::Table(t) => t.lipschitz.clone(),
        }
    }

    /// Exact bound on `sup_u |f(u)|`.
    pub fn sup_bound(&self) -> Rat {
        match self {
            Activation::Tanh | Activation::SatLinear => rat_int(1),
            Activation::Arctan => arctan_sup_bound(),
            Activation::Table(t) => t.sup_bound.clone(),
        }
    }
}

/// Continuous piecewise-linear function through `(x, y)` nodes with strictly
/// increasing `x`, clamped to the end values outside the node range.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    xs: Vec<f64>,
    ys: Vec<f64>,
    lipschitz: Rat,
    sup_bound: Rat,
}

impl PiecewiseLinear {
    pub fn new(nodes: Vec<(Rat, Rat)>) -> Result<Self, ModelError> {
        if nodes.is_empty() {
            return Err(ModelError::BadDescriptor(
                "piecewise-linear activation needs at least one node".into(),
            ));
        }
        let mut lipschitz = Rat::zero();
        let mut sup_bound = Rat::zero();
        for window in nodes.windows(2) {
            let (x0, y0) = &window[0];
            let (x1, y1) = &window[1];
            if x1 <= x0 {
                return Err(ModelError::BadDescriptor(
                    "piecewise-linear nodes must have strictly increasing x".into(),
                ));
            }
            let slope = ((y1 - y0) / (x1 - x0)).abs();
            lipschitz = lipschitz.max(slope);
        }
        for (_, y) in &nodes {
            sup_bound = sup_bound.max(y.abs());
        }
        Ok(PiecewiseLinear {
            xs: nodes.iter().map(|(x, _)| rat_to_f64(x)).collect(),
            ys: nodes.iter().map(|(_, y)| rat_to_f64(y)).collect(),
            lipschitz,
            sup_bound,
        })
    }

    pub fn apply(&self, u: f64) -> f64 {
        let n = self.xs.len();
        if u <= self.xs[0] {
            return self.ys[0];
        }
        if u >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        // first node strictly to the right of u; u is interior, so 1 <= hi < n
        let hi = self.xs.partition_point(|&x| x <= u);
        let (x0, x1) = (self.xs[hi - 1], self.xs[hi]);
        let (y0, y1) = (self.ys[hi - 1], self.ys[hi]);
        y0 + (y1 - y0) * (u - x0) / (x1 - x0)
    }
}
