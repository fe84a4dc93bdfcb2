//! Simulation and stability certification for delay difference equations
//! with a leakage delay term,
//!
//! ```text
//! x_i(m+1) = c_i(m) x_i(m - tau) + h_i(m, window(x, m)),    i = 1..N,
//! ```
//!
//! where `window(x, m)` collects the samples x(m+j) for j = r..0 and the
//! functional h_i is Lipschitz in the window under the sup norm.
//!
//! The crate provides:
//!
//! * forward simulation of arbitrary systems of this shape and periodic
//!   orbit location by fixed-point iteration of the period map ([`engine`]),
//! * contraction certificates with explicit decay envelopes `C * zeta^m`
//!   built from per-channel Lipschitz data, comparison-matrix tests
//!   (nonsingular M-matrices with witness vectors) and change-of-variable
//!   rescalings ([`certificates`]),
//! * concrete model families (Hopfield-type networks, bidirectional
//!   associative memories, high-order networks) that lower onto the
//!   engine ([`models`]).
//!
//! Exact rational arithmetic decides every strict inequality in the
//! certificate pipeline; floating point enters only for the
//! transcendental decay constants.

// Matrix code indexes on purpose (the loops mirror the written-out algebra)
// and negated float comparisons are the NaN-rejecting form of the guards.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod certificates;
pub mod engine;
pub mod models;
pub mod rational;
pub mod state;

pub use certificates::{
    certify_m_matrix, certify_m_matrix_f64, certify_row_dominance, certify_system,
    comparison_matrix, lambda_numeric, lambda_terms, mu_search, rescale_by_witness,
    weighted_margins, CertificateError, CertificationOutcome, CertificationRoute, DecayData,
    H2Inputs, LambdaEstimate, LambdaTerm, LipschitzData, MMatrixReport, StabilityCertificate,
    Verdict,
};
pub use engine::{
    check_exponential_bound, check_lemma_inequality, contraction_power, find_periodic_orbit,
    partition_index, poincare_map, simulate, BoundCheckReport, EngineError, PeriodicOrbitResult,
    SlackSample,
};
pub use models::{
    parse_model, two_neuron_periodic, Activation, BamLayers, BamSpec, DelayDescriptor, Descriptor,
    HighOrderParts, HighOrderSpec, HopfieldSpec, ModelError, ModelSpec, PiecewiseLinear,
    TWO_NEURON_PERIODIC_TOML,
};
pub use rational::{format_rat, parse_rat, rat, rat_int, rat_to_f64, Rat};
pub use state::{
    CoefficientFn, HistoryState, NonlinearityFn, StateError, SystemDefinition, Trajectory,
};

/// Comparison slack for floating-point bound checks: `1e-9 * (1 + |bound|)`.
///
/// Every "observed <= bound" check in the crate tolerates a violation up to
/// this amount, so that accumulated rounding in long trajectories cannot flip
/// a mathematically valid inequality.
pub fn numeric_tolerance(bound: f64) -> f64 {
    1e-9 * (1.0 + bound.abs())
}
