//! Two-layer bidirectional associative networks.
//!
//! Layer `x` (size `n1`) is driven by activations of layer `y` (size `n2`)
//! and vice versa, each through an instantaneous and a delayed weight:
//!
//! ```text
//! x_i(m+1) = c_i(m) x_i(m - tau)
//!          + sum_j [ a_ij(m) f_j(y_j(m)) + b_ij(m) f_j(y_j(m - d_ij(m))) ] + I_i(m)
//! y_j(m+1) = e_j(m) y_j(m - tau)
//!          + sum_i [ p_ji(m) g_i(x_i(m)) + q_ji(m) g_i(x_i(m - s_ji(m))) ] + J_j(m)
//! ```
//!
//! Lowering stacks the layers into one state vector, `x` channels first, so
//! the interaction matrix is block off-diagonal:
//! `H[i][n1+j] = (sup|a_ij| + sup|b_ij|) Lip(f_j)` and
//! `H[n1+j][i] = (sup|p_ji| + sup|q_ji|) Lip(g_i)`.

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
pub struct BamSpec {
    leakage_delay: u32,
    x_leakage: Vec<Descriptor>,
    y_leakage: Vec<Descriptor>,
    x_instant: Vec<Vec<Descriptor>>,
    x_delayed: Vec<Vec<Descriptor>>,
    x_delays: Vec<Vec<DelayDescriptor>>,
    x_inputs: Vec<Descriptor>,
    y_instant: Vec<Vec<Descriptor>>,
    y_delayed: Vec<Vec<Descriptor>>,
    y_delays: Vec<Vec<DelayDescriptor>>,
    y_inputs: Vec<Descriptor>,
    f_activations: Vec<Activation>,
    g_activations: Vec<Activation>,
    period: u32,
}

pub struct BamLayers {
    pub leakage_delay: u32,
    pub x_leakage: Vec<Descriptor>,
    pub y_leakage: Vec<Descriptor>,
    pub x_instant: Vec<Vec<Descriptor>>,
    pub x_delayed: Vec<Vec<Descriptor>>,
    pub x_delays: Vec<Vec<DelayDescriptor>>,
    pub x_inputs: Vec<Descriptor>,
    pub y_instant: Vec<Vec<Descriptor>>,
    pub y_delayed: Vec<Vec<Descriptor>>,
    pub y_delays: Vec<Vec<DelayDescriptor>>,
    pub y_inputs: Vec<Descriptor>,
    pub f_activations: Vec<Activation>,
    pub g_activations: Vec<Activation>,
}

impl BamSpec {
    pub fn new(layers: BamLayers) -> Result<Self, ModelError> {
        let n1 = layers.x_leakage.len();
        let n2 = layers.y_leakage.len();
        if n1 == 0 || n2 == 0 {
            return Err(ModelError::Dimension(
                "both layers need at least one channel".into(),
            ));
        }
        check_matrix_shape("x instant weight", &layers.x_instant, n1, n2)?;
        check_matrix_shape("x delayed weight", &layers.x_delayed, n1, n2)?;
        check_matrix_shape("x delay", &layers.x_delays, n1, n2)?;
        check_matrix_shape("y instant weight", &layers.y_instant, n2, n1)?;
        check_matrix_shape("y delayed weight", &layers.y_delayed, n2, n1)?;
        check_matrix_shape("y delay", &layers.y_delays, n2, n1)?;
        check_len("x input", layers.x_inputs.len(), n1)?;
        check_len("y input", layers.y_inputs.len(), n2)?;
        check_len("f activation", layers.f_activations.len(), n2)?;
        check_len("g activation", layers.g_activations.len(), n1)?;
        for d in layers
            .x_leakage
            .iter()
            .chain(layers.y_leakage.iter())
            .chain(layers.x_inputs.iter())
            .chain(layers.y_inputs.iter())
            .chain(layers.x_instant.iter().flatten())
            .chain(layers.x_delayed.iter().flatten())
            .chain(layers.y_instant.iter().flatten())
            .chain(layers.y_delayed.iter().flatten())
        {
            d.validate()?;
        }
        check_leakage_samples(&layers.x_leakage)?;
        check_leakage_samples(&layers.y_leakage)?;
        let period = lcm_periods(
            layers
                .x_leakage
                .iter()
                .chain(layers.y_leakage.iter())
                .chain(layers.x_inputs.iter())
                .chain(layers.y_inputs.iter())
                .chain(layers.x_instant.iter().flatten())
                .chain(layers.x_delayed.iter().flatten())
                .chain(layers.y_instant.iter().flatten())
                .chain(layers.y_delayed.iter().flatten())
                .map(Descriptor::period)
                .chain(
                    layers
                        .x_delays
                        .iter()
                        .flatten()
                        .chain(layers.y_delays.iter().flatten())
                        .map(DelayDescriptor::period),
                ),
        )?;
        Ok(BamSpec {
            leakage_delay: layers.leakage_delay,
            x_leakage: layers.x_leakage,
            y_leakage: layers.y_leakage,
            x_instant: layers.x_instant,
            x_delayed: layers.x_delayed,
            x_delays: layers.x_delays,
            x_inputs: layers.x_inputs,
            y_instant: layers.y_instant,
            y_delayed: layers.y_delayed,
            y_delays: layers.y_delays,
            y_inputs: layers.y_inputs,
            f_activations: layers.f_activations,
            g_activations: layers.g_activations,
            period,
        })
    }

    pub fn x_channels(&self) -> usize {
        self.x_leakage.len()
    }

    pub fn y_channels(&self) -> usize {
        self.y_leakage.len()
    }

    /// Total channels after stacking (`x` first, then `y`).
    pub fn channels(&self) -> usize {
        self.x_channels() + self.y_channels()
    }

    pub fn leakage_delay(&self) -> u32 {
        self.leakage_delay
    }

    pub fn period(&self) -> u32 {
        self.period
    }

    pub fn window_start(&self) -> i64 {
        let max_delay = self
            .x_delays
            .iter()
            .flatten()
            .chain(self.y_delays.iter().flatten())
            .map(DelayDescriptor::max_delay)
            .max()
            .unwrap_or(0);
        -i64::from(self.leakage_delay.max(max_delay))
    }

    pub fn lower(&self) -> SystemDefinition {
        let spec = Arc::new(self.clone());
        let n1 = self.x_channels();
        let for_leak = Arc::clone(&spec);
        let leakage: CoefficientFn = Arc::new(move |ch, m| {
            if ch < n1 {
                for_leak.x_leakage[ch].value(m)
            } else {
                for_leak.y_leakage[ch - n1].value(m)
            }
        });
        let nonlinearity: NonlinearityFn = Arc::new(move |ch, m, window: &HistoryState| {
            let mut acc = 0.0;
            if ch < n1 {
                let i = ch;
                for j in 0..spec.y_channels() {
                    let f = &spec.f_activations[j];
                    acc += spec.x_instant[i][j].value(m) * f.apply(window.value(n1 + j, 0));
                    let d = spec.x_delays[i][j].delay_at(m);
                    acc += spec.x_delayed[i][j].value(m)
                        * f.apply(window.value(n1 + j, -i64::from(d)));
                }
                acc + spec.x_inputs[i].value(m)
            } else {
                let j = ch - n1;
                for i in 0..n1 {
                    let g = &spec.g_activations[i];
                    acc += spec.y_instant[j][i].value(m) * g.apply(window.value(i, 0));
                    let d = spec.y_delays[j][i].delay_at(m);
                    acc += spec.y_delayed[j][i].value(m) * g.apply(window.value(i, -i64::from(d)));
                }
                acc + spec.y_inputs[j].value(m)
            }
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

    /// Contribution of stacked source channel `col` to the interaction term
    /// of stacked channel `row`; inputs are split evenly over the opposite
    /// layer so components sum to the full term. Same-layer entries are zero.
    pub fn h_component(&self, row: usize, col: usize, m: i64, window: &HistoryState) -> f64 {
        let n1 = self.x_channels();
        if row < n1 {
            if col < n1 {
                return 0.0;
            }
            let (i, j) = (row, col - n1);
            let f = &self.f_activations[j];
            let d = self.x_delays[i][j].delay_at(m);
            self.x_instant[i][j].value(m) * f.apply(window.value(col, 0))
                + self.x_delayed[i][j].value(m) * f.apply(window.value(col, -i64::from(d)))
                + self.x_inputs[i].value(m) / self.y_channels() as f64
        } else {
            if col >= n1 {
                return 0.0;
            }
            let (j, i) = (row - n1, col);
            let g = &self.g_activations[i];
            let d = self.y_delays[j][i].delay_at(m);
            self.y_instant[j][i].value(m) * g.apply(window.value(col, 0))
                + self.y_delayed[j][i].value(m) * g.apply(window.value(col, -i64::from(d)))
                + self.y_inputs[j].value(m) / self.x_channels() as f64
        }
    }

    /// Exact stacked leakage bounds and block off-diagonal interaction matrix.
    pub fn lipschitz_data(&self) -> Result<LipschitzData, ModelError> {
        let n1 = self.x_channels();
        let n2 = self.y_channels();
        let n = n1 + n2;
        let mut c_plus = Vec::with_capacity(n);
        for (idx, d) in self
            .x_leakage
            .iter()
            .chain(self.y_leakage.iter())
            .enumerate()
        {
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
        for i in 0..n1 {
            for j in 0..n2 {
                h[i][n1 + j] = (self.x_instant[i][j].analytic_sup()
                    + self.x_delayed[i][j].analytic_sup())
                    * self.f_activations[j].lipschitz();
                h[n1 + j][i] = (self.y_instant[j][i].analytic_sup()
                    + self.y_delayed[j][i].analytic_sup())
                    * self.g_activations[i].lipschitz();
            }
        }
        Ok(LipschitzData::new(c_plus, h)?)
    }

    /// The stacked matrix `I - diag(sup leakage) - H` tested for the
    /// nonsingular M-matrix property.
    pub fn m_matrix(&self) -> Result<Vec<Vec<Rat>>, ModelError> {
        Ok(comparison_matrix(&self.lipschitz_data()?))
    }

    /// Time-dependent row Lipschitz profile of the stacked (optionally
    /// `w`-rescaled) system: every weight stream is sampled at `m` instead of
    /// taking its sup, so the profile is pointwise sharper than the row sums
    /// of [`Self::lipschitz_data`].
    pub fn row_lipschitz(&self, weights: Option<&[f64]>) -> Result<CoefficientFn, ModelError> {
        let w = resolve_weights(weights, self.channels())?;
        let n1 = self.x_channels();
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
        let spec = Arc::new(self.clone());
        Ok(Arc::new(move |ch, m| {
            if ch < n1 {
                let i = ch;
                let mut acc = 0.0;
                for j in 0..spec.y_channels() {
                    acc += (spec.x_instant[i][j].value(m).abs()
                        + spec.x_delayed[i][j].value(m).abs())
                        * f_lip[j]
                        * w[n1 + j];
                }
                acc / w[i]
            } else {
                let j = ch - n1;
                let mut acc = 0.0;
                for i in 0..n1 {
                    acc += (spec.y_instant[j][i].value(m).abs()
                        + spec.y_delayed[j][i].value(m).abs())
                        * g_lip[i]
                        * w[i];
                }
                acc / w[n1 + j]
            }
        }))
    }
}

fn check_len(what: &str, got: usize, want: usize) -> Result<(), ModelError> {
    if got != want {
        return Err(ModelError::Dimension(format!(
            "{what} has {got} entries, expected {want}"
        )));
    }
    Ok(())
}

fn check_matrix_shape<T>(
    what: &str,
    grid: &[Vec<T>],
    rows: usize,
    cols: usize,
) -> Result<(), ModelError> {
    check_len(what, grid.len(), rows)?;
    for (i, row) in grid.iter().enumerate() {
        if row.len() != cols {
            return Err(ModelError::Dimension(format!(
                "{what} row {} has {} columns, expected {cols}",
                i + 1,
                row.len()
            )));
        }
    }
    Ok(())
}
