//! Networks with second-order (product) interaction terms.
//!
//! Step rule:
//!
//! ```text
//! x_i(m+1) = c_i(m) x_i(m - tau)
//!          + sum_j a_ij(m) f_j(x_j(m - s_ij(m)))
//!          + sum_j sum_l b_ijl(m) g_j(x_j(m - d_ijl(m))) g_l(x_l(m - e_ijl(m)))
//!          + I_i(m)
//! ```
//!
//! A product `g_j g_l` is jointly Lipschitz because each `g` is bounded:
//! with `m_j = sup|g_j|` and `G_j = Lip(g_j)`,
//! `|g_j(u) g_l(v) - g_j(u') g_l(v')| <= m_j G_l |v - v'| + m_l G_j |u - u'|`.
//! Collecting contributions per source channel gives the exact interaction
//! matrix used by the certificates:
//!
//! ```text
//! H_iq = sup|a_iq| F_q + G_q ( sum_j sup|b_ijq| m_j + sum_l sup|b_iql| m_l )
//! ```

use super::{
    check_leakage_samples, lcm_periods, resolve_weights, Activation, DelayDescriptor, Descriptor,
    ModelError,
};
use crate::certificates::{comparison_matrix, weighted_margins, LipschitzData};
use crate::rational::{format_rat, rat_int, rat_to_f64, Rat};
use crate::state::{CoefficientFn, HistoryState, NonlinearityFn, SystemDefinition};
use num_traits::Zero;
use std::sync::Arc;

#[derive(Debug, Clone)]
pub struct HighOrderSpec {
    leakage_delay: u32,
    leakage: Vec<Descriptor>,
    first_weights: Vec<Vec<Descriptor>>,
    first_delays: Vec<Vec<DelayDescriptor>>,
    second_weights: Vec<Vec<Vec<Descriptor>>>,
    second_delays_left: Vec<Vec<Vec<DelayDescriptor>>>,
    second_delays_right: Vec<Vec<Vec<DelayDescriptor>>>,
    f_activations: Vec<Activation>,
    g_activations: Vec<Activation>,
    inputs: Vec<Descriptor>,
    period: u32,
}

/// Constructor bundle for [`HighOrderSpec`]. First-order grids are `[i][j]`;
/// second-order grids are `[i][j][l]`, with `left` delays applied to the
/// `g_j` factor and `right` delays to the `g_l` factor.
pub struct HighOrderParts {
    pub leakage_delay: u32,
    pub leakage: Vec<Descriptor>,
    pub first_weights: Vec<Vec<Descriptor>>,
    pub first_delays: Vec<Vec<DelayDescriptor>>,
    pub second_weights: Vec<Vec<Vec<Descriptor>>>,
    pub second_delays_left: Vec<Vec<Vec<DelayDescriptor>>>,
    pub second_delays_right: Vec<Vec<Vec<DelayDescriptor>>>,
    pub f_activations: Vec<Activation>,
    pub g_activations: Vec<Activation>,
    pub inputs: Vec<Descriptor>,
}

impl HighOrderSpec {
    pub fn new(parts: HighOrderParts) -> Result<Self, ModelError> {
        let n = parts.leakage.len();
        if n == 0 {
            return Err(ModelError::Dimension("need at least one channel".into()));
        }
        check_square("first-order weight", &parts.first_weights, n)?;
        check_square("first-order delay", &parts.first_delays, n)?;
        check_cube("second-order weight", &parts.second_weights, n)?;
        check_cube("left second-order delay", &parts.second_delays_left, n)?;
        check_cube("right second-order delay", &parts.second_delays_right, n)?;
        if parts.f_activations.len() != n || parts.g_activations.len() != n {
            return Err(ModelError::Dimension(
                "need one f and one g activation per channel".into(),
            ));
        }
        if parts.inputs.len() != n {
            return Err(ModelError::Dimension(format!(
                "{} input streams for {n} channels",
                parts.inputs.len()
            )));
        }
        for d in parts
            .leakage
            .iter()
            .chain(parts.inputs.iter())
            .chain(parts.first_weights.iter().flatten())
            .chain(parts.second_weights.iter().flatten().flatten())
        {
            d.validate()?;
        }
        check_leakage_samples(&parts.leakage)?;
        let period = lcm_periods(
            parts
                .leakage
                .iter()
                .chain(parts.inputs.iter())
                .chain(parts.first_weights.iter().flatten())
                .chain(parts.second_weights.iter().flatten().flatten())
                .map(Descriptor::period)
                .chain(
                    parts
                        .first_delays
                        .iter()
                        .flatten()
                        .chain(parts.second_delays_left.iter().flatten().flatten())
                        .chain(parts.second_delays_right.iter().flatten().flatten())
                        .map(DelayDescriptor::period),
                ),
        )?;
        Ok(HighOrderSpec {
            leakage_delay: parts.leakage_delay,
            leakage: parts.leakage,
            first_weights: parts.first_weights,
            first_delays: parts.first_delays,
            second_weights: parts.second_weights,
            second_delays_left: parts.second_delays_left,
            second_delays_right: parts.second_delays_right,
            f_activations: parts.f_activations,
            g_activations: parts.g_activations,
            inputs: parts.inputs,
            period,
        })
    }

    pub fn channels(&self) -> usize {
        self.leakage.len()
    }

    pub fn leakage_delay(&self) -> u32 {
        self.leakage_delay
    }

    pub fn period(&self) -> u32 {
        self.period
    }

    pub fn window_start(&self) -> i64 {
        let first = self
            .first_delays
            .iter()
            .flatten()
            .map(DelayDescriptor::max_delay)
            .max()
            .unwrap_or(0);
        let second = self
            .second_delays_left
            .iter()
            .flatten()
            .flatten()
            .chain(self.second_delays_right.iter().flatten().flatten())
            .map(DelayDescriptor::max_delay)
            .max()
            .unwrap_or(0);
        -i64::from(self.leakage_delay.max(first).max(second))
    }

    /// Builds the runnable system. First-order terms are accumulated in
    /// source order, then products in `(j, l)` lexicographic order, then the
    /// input, so repeated lowering reproduces trajectories bitwise.
    pub fn lower(&self) -> SystemDefinition {
        let spec = Arc::new(self.clone());
        let n = self.channels();
        let for_leak = Arc::clone(&spec);
        let leakage: CoefficientFn = Arc::new(move |i, m| for_leak.leakage[i].value(m));
        let nonlinearity: NonlinearityFn = Arc::new(move |i, m, window: &HistoryState| {
            let mut acc = 0.0;
            for j in 0..n {
                let s = spec.first_delays[i][j].delay_at(m);
                acc += spec.first_weights[i][j].value(m)
                    * spec.f_activations[j].apply(window.value(j, -i64::from(s)));
            }
            for j in 0..n {
                for l in 0..n {
                    let b = spec.second_weights[i][j][l].value(m);
                    let dl = spec.second_delays_left[i][j][l].delay_at(m);
                    let dr = spec.second_delays_right[i][j][l].delay_at(m);
                    acc += b
                        * spec.g_activations[j].apply(window.value(j, -i64::from(dl)))
                        * spec.g_activations[l].apply(window.value(l, -i64::from(dr)));
                }
            }
            acc + spec.inputs[i].value(m)
        });
        SystemDefinition::new(
            n,
            self.leakage_delay,
            self.window_start(),
            leakage,
            nonlinearity,
        )
        .expect("validated at construction")
        .with_period(self.period)
    }

    /// Exact leakage bounds and the interaction matrix from the module-level
    /// product bound.
    pub fn lipschitz_data(&self) -> Result<LipschitzData, ModelError> {
        let n = self.channels();
        let mut c_plus = Vec::with_capacity(n);
        for (idx, d) in self.leakage.iter().enumerate() {
            let bound = d.analytic_sup();
            if bound >= rat_int(1) {
                return Err(ModelError::LeakageBoundTooLarge {
                    channel: idx + 1,
                    bound: format_rat(&bound),
                });
            }
            c_plus.push(bound);
        }
        let g_lip: Vec<Rat> = self
            .g_activations
            .iter()
            .map(Activation::lipschitz)
            .collect();
        let g_sup: Vec<Rat> = self
            .g_activations
            .iter()
            .map(Activation::sup_bound)
            .collect();
        let mut h = vec![vec![Rat::zero(); n]; n];
        for i in 0..n {
            for q in 0..n {
                let mut entry =
                    self.first_weights[i][q].analytic_sup() * self.f_activations[q].lipschitz();
                let mut through_q = Rat::zero();
                for j in 0..n {
                    through_q += self.second_weights[i][j][q].analytic_sup() * &g_sup[j];
                }
                for l in 0..n {
                    through_q += self.second_weights[i][q][l].analytic_sup() * &g_sup[l];
                }
                entry += &g_lip[q] * through_q;
                h[i][q] = entry;
            }
        }
        Ok(LipschitzData::new(c_plus, h)?)
    }

    /// The matrix `I - diag(sup|c_i|) - H` tested for the nonsingular
    /// M-matrix property.
    pub fn m_matrix(&self) -> Result<Vec<Vec<Rat>>, ModelError> {
        Ok(comparison_matrix(&self.lipschitz_data()?))
    }

    /// Exact stability-condition margins for a candidate weight vector `d`:
    /// `d_i (1 - sup|c_i|) - sum_q H_iq d_q`. All positive means the weighted
    /// row-dominance condition holds; for the witness returned by the
    /// M-matrix test the margins are exactly one.
    pub fn condition_margins(&self, d: &[Rat]) -> Result<Vec<Rat>, ModelError> {
        Ok(weighted_margins(&self.lipschitz_data()?, d)?)
    }

    /// Time-dependent row Lipschitz profile of the (optionally `w`-rescaled)
    /// system. A product term contributes through both factors:
    /// `|b_ijl(m)| (sup|g_l| Lip(g_j) w_j + sup|g_j| Lip(g_l) w_l)`, which
    /// collapses to the row sums of [`Self::lipschitz_data`] after taking
    /// sups over `m`.
    pub fn row_lipschitz(&self, weights: Option<&[f64]>) -> Result<CoefficientFn, ModelError> {
        let w = resolve_weights(weights, self.channels())?;
        let f_lip: Vec<f64> = self
            .f_activations
            .iter()
            .map(|a| rat_to_f64(&a.lipschitz()))
            .collect();
        let g_lip: Vec<f64> = self
            .g_activations
            .iter()
            .map(|a| rat_to_f64(&a.lipschitz()))
            .collect();
        let g_sup: Vec<f64> = self
            .g_activations
            .iter()
            .map(|a| rat_to_f64(&a.sup_bound()))
            .collect();
        let spec = Arc::new(self.clone());
        Ok(Arc::new(move |i, m| {
            let n = spec.channels();
            let mut acc = 0.0;
            for q in 0..n {
                acc += spec.first_weights[i][q].value(m).abs() * f_lip[q] * w[q];
            }
            for j in 0..n {
                for l in 0..n {
                    let b = spec.second_weights[i][j][l].value(m).abs();
                    if b != 0.0 {
                        acc += b * (g_sup[l] * g_lip[j] * w[j] + g_sup[j] * g_lip[l] * w[l]);
                    }
                }
            }
            acc / w[i]
        }))
    }
}

fn check_square<T>(what: &str, grid: &[Vec<T>], n: usize) -> Result<(), ModelError> {
    if grid.len() != n || grid.iter().any(|row| row.len() != n) {
        return Err(ModelError::Dimension(format!(
            "{what} grid must be {n} x {n}"
        )));
    }
    Ok(())
}

fn check_cube<T>(what: &str, grid: &[Vec<Vec<T>>], n: usize) -> Result<(), ModelError> {
    if grid.len() != n
        || grid
            .iter()
            .any(|plane| plane.len() != n || plane.iter().any(|row| row.len() != n))
    {
        return Err(ModelError::Dimension(format!(
            "{what} grid must be {n} x {n} x {n}"
        )));
    }
    Ok(())
}
