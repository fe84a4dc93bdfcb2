//! Concrete model families and their lowering onto the simulation engine.
//!
//! Three families are provided, all special cases of the step rule
//! `x_i(m+1) = c_i(m) x_i(m - tau) + h_i(m, window)`:
//!
//! * [`HopfieldSpec`]: multi-term recurrent networks,
//!   `h_i = sum_j sum_k b_ijk(m) f_ijk(x_j(m - d_ijk(m))) + I_i(m)`;
//! * [`BamSpec`]: two-layer bidirectional networks where each layer feeds the
//!   other through instantaneous and delayed activations;
//! * [`HighOrderSpec`]: networks with first-order terms plus second-order
//!   products `b_ijl(m) g_j(x_j(m - d)) g_l(x_l(m - e))`.
//!
//! Each family exposes the data the certificate layer needs (exact leakage
//! and interaction bounds) and a `lower()` method producing a
//! [`SystemDefinition`] for simulation. Models are usually built from TOML
//! text via [`parse_model`].

mod activation;
mod bam;
mod config;
mod descriptor;
mod fixtures;
mod high_order;
mod hopfield;

pub use activation::{arctan_sup_bound, Activation, PiecewiseLinear};
pub use bam::{BamLayers, BamSpec};
pub use config::parse_model;
pub use descriptor::{DelayDescriptor, Descriptor};
pub use fixtures::{two_neuron_periodic, TWO_NEURON_PERIODIC_TOML};
pub use high_order::{HighOrderParts, HighOrderSpec};
pub use hopfield::HopfieldSpec;

use crate::certificates::{CertificateError, LipschitzData};
use crate::state::{CoefficientFn, SystemDefinition};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    /// Malformed model description (TOML syntax, unknown family, bad index).
    #[error("model config: {0}")]
    Config(String),
    /// A descriptor failed structural validation.
    #[error("descriptor: {0}")]
    BadDescriptor(String),
    /// A delay stream produced something other than a small nonnegative integer.
    #[error("delay value {value} at m = {m} is not a nonnegative integer")]
    BadDelay { value: String, m: i64 },
    /// A leakage sample reached or exceeded 1 in magnitude, so trajectories
    /// need not contract along the leakage term.
    #[error("|leakage| of channel {channel} reaches {value} at m = {m}; need < 1")]
    LeakageTooLarge { channel: usize, m: i64, value: f64 },
    /// The exact leakage bound is >= 1 even though every integer sample is
    /// below 1 (possible for off-grid trigonometric peaks).
    #[error("leakage bound {bound} of channel {channel} is >= 1; certificates unavailable")]
    LeakageBoundTooLarge { channel: usize, bound: String },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error(transparent)]
    Certificate(#[from] CertificateError),
}

/// A parsed model of any family.
#[derive(Debug, Clone)]
pub enum ModelSpec {
    Hopfield(HopfieldSpec),
    Bam(BamSpec),
    HighOrder(HighOrderSpec),
}

impl ModelSpec {
    pub fn family(&self) -> &'static str {
        match self {
            ModelSpec::Hopfield(_) => "hopfield",
            ModelSpec::Bam(_) => "bam",
            ModelSpec::HighOrder(_) => "high-order",
        }
    }

    /// Total number of state channels after lowering.
    pub fn channels(&self) -> usize {
        match self {
            ModelSpec::Hopfield(s) => s.channels(),
            ModelSpec::Bam(s) => s.channels(),
            ModelSpec::HighOrder(s) => s.channels(),
        }
    }

    pub fn leakage_delay(&self) -> u32 {
        match self {
            ModelSpec::Hopfield(s) => s.leakage_delay(),
            ModelSpec::Bam(s) => s.leakage_delay(),
            ModelSpec::HighOrder(s) => s.leakage_delay(),
        }
    }

    pub fn window_start(&self) -> i64 {
        match self {
            ModelSpec::Hopfield(s) => s.window_start(),
            ModelSpec::Bam(s) => s.window_start(),
            ModelSpec::HighOrder(s) => s.window_start(),
        }
    }

    pub fn period(&self) -> u32 {
        match self {
            ModelSpec::Hopfield(s) => s.period(),
            ModelSpec::Bam(s) => s.period(),
            ModelSpec::HighOrder(s) => s.period(),
        }
    }

    /// Builds the runnable system.
    pub fn lower(&self) -> SystemDefinition {
        match self {
            ModelSpec::Hopfield(s) => s.lower(),
            ModelSpec::Bam(s) => s.lower(),
            ModelSpec::HighOrder(s) => s.lower(),
        }
    }

    /// Exact per-channel leakage bounds and interaction Lipschitz matrix,
    /// before any rescaling.
    pub fn lipschitz_data(&self) -> Result<LipschitzData, ModelError> {
        match self {
            ModelSpec::Hopfield(s) => s.lipschitz_data(),
            ModelSpec::Bam(s) => s.lipschitz_data(),
            ModelSpec::HighOrder(s) => s.lipschitz_data(),
        }
    }

    /// Time-dependent per-row Lipschitz profile; see the per-family methods.
    pub fn row_lipschitz(&self, weights: Option<&[f64]>) -> Result<CoefficientFn, ModelError> {
        match self {
            ModelSpec::Hopfield(s) => s.row_lipschitz(weights),
            ModelSpec::Bam(s) => s.row_lipschitz(weights),
            ModelSpec::HighOrder(s) => s.row_lipschitz(weights),
        }
    }
}

/// Validates optional rescaling weights; `None` means unit weights.
fn resolve_weights(weights: Option<&[f64]>, n: usize) -> Result<Vec<f64>, ModelError> {
    let Some(w) = weights else {
        return Ok(vec![1.0; n]);
    };
    if w.len() != n {
        return Err(ModelError::Dimension(format!(
            "{} weights for {n} channels",
            w.len()
        )));
    }
    for (i, &v) in w.iter().enumerate() {
        if !(v.is_finite() && v > 0.0) {
            return Err(ModelError::Dimension(format!(
                "weight {v} at channel {} must be positive and finite",
                i + 1
            )));
        }
    }
    Ok(w.to_vec())
}

/// Least common multiple of descriptor periods, for the system period.
fn lcm_periods<I: IntoIterator<Item = u32>>(periods: I) -> Result<u32, ModelError> {
    let mut acc: u64 = 1;
    for p in periods {
        acc = num_integer::lcm(acc, u64::from(p.max(1)));
        if acc > u64::from(u32::MAX) {
            return Err(ModelError::Config(
                "combined descriptor period overflows u32".into(),
            ));
        }
    }
    Ok(acc as u32)
}

/// Rejects leakage streams whose integer samples reach magnitude 1, and
/// returns nothing else; exact bounds come from `analytic_sup` separately.
fn check_leakage_samples(leakage: &[Descriptor]) -> Result<(), ModelError> {
    for (channel, d) in leakage.iter().enumerate() {
        for m in 0..i64::from(d.period()) {
            let v = d.value(m);
            if !(v.abs() < 1.0) {
                return Err(ModelError::LeakageTooLarge {
                    channel: channel + 1,
                    m,
                    value: v,
                });
            }
        }
    }
    Ok(())
}
