//! JSON report documents written by the subcommands.
//!
//! Exact rationals are serialized as `"p/q"` strings (plain `"p"` for
//! integers) so certificates stay lossless; floats go through `serde_json`
//! and keep their shortest round-trip form.

use serde::Serialize;

use ddes_core::{
    format_rat, rat_to_f64, CertificationOutcome, DecayData, LambdaEstimate, MMatrixReport,
    ModelSpec, Rat,
};

pub const FORMAT_VERSION: u32 = 1;

pub fn fractions(values: &[Rat]) -> Vec<String> {
    values.iter().map(format_rat).collect()
}

pub fn fraction_matrix(rows: &[Vec<Rat>]) -> Vec<Vec<String>> {
    rows.iter().map(|r| fractions(r)).collect()
}

#[derive(Serialize)]
pub struct ModelBlock {
    pub family: &'static str,
    pub channels: usize,
    pub leakage_delay: u32,
    pub window_start: i64,
    pub period: u32,
}

impl ModelBlock {
    pub fn from_spec(spec: &ModelSpec) -> Self {
        ModelBlock {
            family: spec.family(),
            channels: spec.channels(),
            leakage_delay: spec.leakage_delay(),
            window_start: spec.window_start(),
            period: spec.period(),
        }
    }
}

#[derive(Serialize)]
pub struct MMatrixBlock {
    pub is_z_matrix: bool,
    pub leading_minors: Vec<String>,
    pub is_nonsingular_m: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl MMatrixBlock {
    pub fn from_report(report: &MMatrixReport<Rat>) -> Self {
        MMatrixBlock {
            is_z_matrix: report.is_z_matrix,
            leading_minors: fractions(&report.leading_minors),
            is_nonsingular_m: report.is_nonsingular_m,
            witness: report.witness.as_deref().map(fractions),
            note: report.note.clone(),
        }
    }
}

#[derive(Serialize)]
pub struct DecayBlock {
    pub mu: f64,
    pub nu: Vec<f64>,
    pub c: f64,
    pub zeta: f64,
    pub lambda_bound: f64,
    pub big_c: f64,
}

impl DecayBlock {
    pub fn from_decay(d: &DecayData) -> Self {
        DecayBlock {
            mu: d.mu,
            nu: d.nu.clone(),
            c: d.c,
            zeta: d.zeta,
            lambda_bound: d.lambda_bound,
            big_c: d.big_c,
        }
    }
}

#[derive(Serialize)]
pub struct LambdaBlock {
    /// Largest decay-weighted partial sum found by direct evaluation.
    pub value: f64,
    /// 1-based channel attaining the maximum.
    pub channel: usize,
    pub residue: u32,
    pub depth: i64,
    pub truncation_depth: i64,
    pub tail_bound: f64,
    /// The certified `lambda_bound` the direct value is checked against.
    pub bound: f64,
    pub within_bound: bool,
}

impl LambdaBlock {
    pub fn new(est: &LambdaEstimate, bound: f64, tolerance: f64) -> Self {
        LambdaBlock {
            value: est.value,
            channel: est.channel + 1,
            residue: est.residue,
            depth: est.depth,
            truncation_depth: est.truncation_depth,
            tail_bound: est.tail_bound,
            bound,
            within_bound: est.value <= bound + tolerance,
        }
    }
}

#[derive(Serialize)]
pub struct ContractionBlock {
    /// Coefficient period the return map is built on.
    pub period: u32,
    /// Smallest number of periods after which the map is a strict
    /// contraction under the certified envelope.
    pub power: u64,
    /// Envelope contraction factor at that power.
    pub factor: f64,
}

#[derive(Serialize)]
pub struct CertificateReport {
    pub format_version: u32,
    pub model: ModelBlock,
    /// Per-channel leakage magnitude bounds, exact.
    pub leakage_bounds: Vec<String>,
    /// Interaction Lipschitz matrix, exact.
    pub lipschitz_matrix: Vec<Vec<String>>,
    /// Margins of the raw data: `1 - leakage_bounds[i] - row sum`.
    pub raw_margins: Vec<String>,
    pub comparison_matrix: Vec<Vec<String>>,
    pub m_matrix_test: MMatrixBlock,
    pub route: &'static str,
    pub verdict: &'static str,
    /// Margins the verdict was decided on (rescaled when applicable).
    pub margins: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decay: Option<DecayBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<LambdaBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contraction: Option<ContractionBlock>,
}

impl CertificateReport {
    pub fn new(
        spec: &ModelSpec,
        outcome: &CertificationOutcome,
        lambda: Option<LambdaBlock>,
        contraction: Option<ContractionBlock>,
    ) -> Self {
        let raw = spec
            .lipschitz_data()
            .expect("certification succeeded, so the data extracts");
        CertificateReport {
            format_version: FORMAT_VERSION,
            model: ModelBlock::from_spec(spec),
            leakage_bounds: fractions(raw.c_plus()),
            lipschitz_matrix: fraction_matrix(raw.h()),
            raw_margins: fractions(&outcome.raw_margins),
            comparison_matrix: fraction_matrix(&outcome.m_matrix),
            m_matrix_test: MMatrixBlock::from_report(&outcome.m_report),
            route: outcome.route.as_str(),
            verdict: outcome.certificate.verdict.as_str(),
            margins: fractions(&outcome.certificate.margins),
            witness: outcome.certificate.witness.as_deref().map(fractions),
            decay: outcome
                .certificate
                .decay
                .as_ref()
                .map(DecayBlock::from_decay),
            lambda,
            contraction,
        }
    }
}

#[derive(Serialize)]
pub struct PeriodicReport {
    pub format_version: u32,
    pub period: u32,
    pub iterations: u32,
    pub residual: f64,
    pub contraction_estimate: f64,
    pub tolerance: f64,
    /// Sup-norm of the located fixed-point window.
    pub amplitude: f64,
}

#[derive(Serialize)]
pub struct CheckBlock {
    pub pairs_tested: usize,
    /// Most negative slack observed (may be positive when every bound holds
    /// with room to spare).
    pub max_violation: f64,
    /// 1-based pair attaining `max_violation`; matches the `pair` column of
    /// the written series.
    pub worst_pair: usize,
    pub pass: bool,
}

#[derive(Serialize)]
pub struct VerifyReport {
    pub format_version: u32,
    pub horizon: i64,
    pub pairs: usize,
    pub lemma_depth: u32,
    /// Decay-envelope check on the (possibly witness-rescaled) system;
    /// absent when running an uncertified model under --force.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub envelope: Option<CheckBlock>,
    /// Stepwise-recursion check of the partial-sum inequality.
    pub lemma: CheckBlock,
    pub pass: bool,
}

/// Witness as positive floats, for rescaling trajectories and rows.
pub fn witness_f64(witness: &[Rat]) -> Vec<f64> {
    witness.iter().map(rat_to_f64).collect()
}
