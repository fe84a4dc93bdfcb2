//! Multi-term recurrent (Hopfield-style) networks.
//!
//! Step rule, for channels `i = 1..N` and term index `k = 1..K`:
//!
//! ```text
//! x_i(m+1) = c_i(m) x_i(m - tau)
//!          + sum_j sum_k b_ijk(m) f_ijk(x_j(m - d_ijk(m))) + I_i(m)
//! ```
//!
//! The interaction term is Lipschitz in each delayed coordinate, with the
//! exact per-pair constant `H_ij = sum_k sup|b_ijk| * Lip(f_ijk)`.

use super::{
    check_leakage_samples, lcm_periods, resolve_weights, Activation, DelayDescriptor, Descriptor,
    ModelError,
};
use crate::certificates::{comparison_matrix, LipschitzData};
use crate::rational::{format_rat, rat_int, rat_to_f64, Rat};
use crate::state::{CoefficientFn, HistoryState, NonlinearityFn, SystemDefinition};
use num_traits::Zero;
use std::sync::Arc;

#[derive(Debug, Clone)]
pub struct HopfieldSpec {
    leakage_delay: u32,
    leakage: Vec<Descriptor>,
    weights: Vec<Vec<Vec<Descriptor>>>,
    delays: Vec<Vec<Vec<DelayDescriptor>>>,
    activations: Vec<Vec<Vec<Activation>>>,
    inputs: Vec<Descriptor>,
    period: u32,
}

impl HopfieldSpec {
    /// Builds and validates a spec. All grids are indexed `[i][j][k]`
    /// (receiving channel, source channel, term).
    pub fn new(
        leakage_delay: u32,
        leakage: Vec<Descriptor>,
        weights: Vec<Vec<Vec<Descriptor>>>,
        delays: Vec<Vec<Vec<DelayDescriptor>>>,
        activations: Vec<Vec<Vec<Activation>>>,
        inputs: Vec<Descriptor>,
    ) -> Result<Self, ModelError> {
        let n = leakage.len();
        if n == 0 {
            return Err(ModelError::Dimension("need at least one channel".into()));
        }
        if inputs.len() != n {
            return Err(ModelError::Dimension(format!(
                "{} input streams for {} channels",
                inputs.len(),
                n
            )));
        }
        let terms = weights
            .first()
            .and_then(|row| row.first())
            .map(Vec::len)
            .unwrap_or(0);
        if terms == 0 {
            return Err(ModelError::Dimension("need at least one term".into()));
        }
        check_grid_shape("weight", &weights, n, terms)?;
        check_grid_shape("activation", &activations, n, terms)?;
        check_grid_shape("delay", &delays, n, terms)?;
        for d in leakage.iter().chain(inputs.iter()) {
            d.validate()?;
        }
        for row in &weights {
            for cell in row {
                for d in cell {
                    d.validate()?;
                }
            }
        }
        check_leakage_samples(&leakage)?;
        let period = lcm_periods(
            leakage
                .iter()
                .chain(inputs.iter())
                .map(Descriptor::period)
                .chain(weights.iter().flatten().flatten().map(Descriptor::period))
                .chain(
                    delays
                        .iter()
                        .flatten()
                        .flatten()
                        .map(DelayDescriptor::period),
                ),
        )?;
        Ok(HopfieldSpec {
            leakage_delay,
            leakage,
            weights,
            delays,
            activations,
            inputs,
            period,
        })
    }

    pub fn channels(&self) -> usize {
        self.leakage.len()
    }

    pub fn terms(&self) -> usize {
        self.weights[0][0].len()
    }

    pub fn leakage_delay(&self) -> u32 {
        self.leakage_delay
    }

    /// Common period of all coefficient streams.
    pub fn period(&self) -> u32 {
        self.period
    }

    /// Left end of the history window: minus the largest delay in the model.
    pub fn window_start(&self) -> i64 {
        let max_term_delay = self
            .delays
            .iter()
            .flatten()
            .flatten()
            .map(DelayDescriptor::max_delay)
            .max()
            .unwrap_or(0);
        -i64::from(self.leakage_delay.max(max_term_delay))
    }

    /// Builds the runnable system. Interaction terms are accumulated source
    /// channel first, then term index, and the input is added last, so
    /// repeated lowering reproduces trajectories bitwise.
    pub fn lower(&self) -> SystemDefinition {
        let spec = Arc::new(self.clone());
        let for_leak = Arc::clone(&spec);
        let leakage: CoefficientFn = Arc::new(move |i, m| for_leak.leakage[i].value(m));
        let nonlinearity: NonlinearityFn = Arc::new(move |i, m, window: &HistoryState| {
            let mut acc = 0.0;
            for j in 0..spec.channels() {
                for k in 0..spec.terms() {
                    let b = spec.weights[i][j][k].value(m);
                    let d = spec.delays[i][j][k].delay_at(m);
                    acc += b * spec.activations[i][j][k].apply(window.value(j, -i64::from(d)));
                }
            }
            acc + spec.inputs[i].value(m)
        });
        SystemDefinition::new(
            self.channels(),
            self.leakage_delay,
            self.window_start(),
            leakage,
            nonlinearity,
        )
        .expect("validated at construction")
        .with_period(self.period)
    }

    /// Contribution of source channel `j` to the interaction term of channel
    /// `i`, with the external input split evenly across source channels so
    /// that the components sum to the full term. Differences of this
    /// quantity across windows isolate the per-pair Lipschitz behaviour.
    pub fn h_component(&self, i: usize, j: usize, m: i64, window: &HistoryState) -> f64 {
        let mut acc = 0.0;
        for k in 0..self.terms() {
            let b = self.weights[i][j][k].value(m);
            let d = self.delays[i][j][k].delay_at(m);
            acc += b * self.activations[i][j][k].apply(window.value(j, -i64::from(d)));
        }
        acc + self.inputs[i].value(m) / self.channels() as f64
    }

    /// Exact leakage bounds `sup|c_i|` and interaction matrix
    /// `H_ij = sum_k sup|b_ijk| * Lip(f_ijk)`.
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
        let mut h = vec![vec![Rat::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..self.terms() {
                    h[i][j] += self.weights[i][j][k].analytic_sup()
                        * self.activations[i][j][k].lipschitz();
                }
            }
        }
        Ok(LipschitzData::new(c_plus, h)?)
    }

    /// The matrix `I - diag(sup|c_i|) - H` whose nonsingular M-matrix
    /// property certifies stability.
    pub fn m_matrix(&self) -> Result<Vec<Vec<Rat>>, ModelError> {
        Ok(comparison_matrix(&self.lipschitz_data()?))
    }

    /// Time-dependent row Lipschitz profile
    /// `L_i(m) = sum_j sum_k |b_ijk(m)| Lip(f_ijk) w_j / w_i`, bounding the
    /// functional part of the `w`-rescaled system (unit weights when `None`):
    /// `|h_i(m, u) - h_i(m, v)| <= L_i(m) dist(u, v)`. Pointwise sharper than
    /// the sup-based row sums of [`Self::lipschitz_data`].
    pub fn row_lipschitz(&self, weights: Option<&[f64]>) -> Result<CoefficientFn, ModelError> {
        let w = resolve_weights(weights, self.channels())?;
        let lips: Vec<Vec<Vec<f64>>> = self
            .activations
            .iter()
            .map(|row| {
                row.iter()
                    .map(|cell| cell.iter().map(|a| rat_to_f64(&a.lipschitz())).collect())
                    .collect()
            })
            .collect();
        let spec = Arc::new(self.clone());
        Ok(Arc::new(move |i, m| {
            let mut acc = 0.0;
            for j in 0..spec.channels() {
                let mut through_j = 0.0;
                for k in 0..spec.terms() {
                    through_j += spec.weights[i][j][k].value(m).abs() * lips[i][j][k];
                }
                acc += through_j * w[j];
            }
            acc / w[i]
        }))
    }
}

fn check_grid_shape<T>(
    what: &str,
    grid: &[Vec<Vec<T>>],
    n: usize,
    terms: usize,
) -> Result<(), ModelError> {
    if grid.len() != n {
        return Err(ModelError::Dimension(format!(
            "{what} grid has {} rows for {n} channels",
            grid.len()
        )));
    }
    for (i, row) in grid.iter().enumerate() {
        if row.len() != n {
            return Err(ModelError::Dimension(format!(
                "{what} row {} has {} columns for {n} channels",
                i + 1,
                row.len()
            )));
        }
        for (j, cell) in row.iter().enumerate() {
            if cell.len() != terms {
                return Err(ModelError::Dimension(format!(
                    "{what} cell ({}, {}) has {} terms, expected {terms}",
                    i + 1,
                    j + 1,
                    cell.len()
                )));
            }
        }
    }
    Ok(())
}
