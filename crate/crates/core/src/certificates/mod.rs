//! Contraction certificates built from per-channel Lipschitz data.
//!
//! The data for a system with `N` channels is a vector `c_plus` with
//! `c_plus[i] = sup_m |c_i(m)|` and a nonnegative matrix `H` such that the
//! functional part splits as `h_i = sum_j h_ij` with
//!
//! ```text
//! |h_ij(m, u) - h_ij(m, v)| <= H[i][j] * dist(u, v).
//! ```
//!
//! The certificate route is:
//!
//! 1. strict row dominance `1 - c_plus[i] > sum_j H[i][j]` for every row
//!    ([`certify_row_dominance`]), possibly after rescaling by a positive
//!    witness vector ([`rescale_by_witness`]) obtained from a nonsingular
//!    M-matrix test on `I - diag(c_plus) - H` ([`certify_m_matrix`]);
//! 2. a search for the largest per-step decay exponent `mu` such that every
//!    row satisfies
//!
//!    ```text
//!    (e^(nu_i - mu) - 1) / e^(nu_i) * e^(mu r / (tau+1)) > sum_j H[i][j],
//!    ```
//!
//!    with `nu_i = -ln c_plus[i]` ([`mu_search`]);
//! 3. explicit decay constants: `c = e^-mu`, `zeta = c^(1/(tau+1))`,
//!
//!    ```text
//!    lambda_bound = max_i e^(-mu r/(tau+1)) e^(nu_i) / (e^(nu_i - mu) - 1) * sum_j H[i][j] < 1,
//!    C = c^(r/(tau+1) - 1) / (1 - lambda_bound),
//!    ```
//!
//!    giving the envelope `dist(m) <= C * zeta^m * dist(0)` for any two
//!    solutions.
//!
//! Margins and matrix tests run in exact rational arithmetic; only the
//! decay constants drop to `f64`.

pub mod lambda;
mod mmatrix;

pub use lambda::{lambda_numeric, lambda_terms, H2Inputs, LambdaEstimate, LambdaTerm};
pub use mmatrix::{certify_m_matrix, certify_m_matrix_f64, MMatrixReport};

use crate::rational::{format_rat, rat_int, rat_to_f64, Rat};
use num_traits::{Signed, Zero};
use thiserror::Error;

/// Errors from certificate construction.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum CertificateError {
    #[error("leakage bound {value} at row {row} must lie in [0, 1)")]
    LeakageBoundOutOfRange { row: usize, value: String },
    #[error("Lipschitz entry at ({row}, {col}) must be nonnegative")]
    NegativeLipschitz { row: usize, col: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("row {row} fails strict dominance (margin {margin})")]
    RowDominanceFails { row: usize, margin: String },
    #[error("witness vector must be strictly positive (entry {row})")]
    NonPositiveWitness { row: usize },
    #[error("no feasible decay exponent found")]
    Infeasible,
    #[error("leakage hypothesis violated: |c_{channel}({m})| = {observed} exceeds c = {cap}")]
    HypothesisViolated {
        channel: usize,
        m: i64,
        observed: f64,
        cap: f64,
    },
    #[error("invalid argument: {0}")]
    Domain(String),
}

/// Per-channel Lipschitz data `(c_plus, H)`; see the module docs.
#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzData {
    c_plus: Vec<Rat>,
    h: Vec<Vec<Rat>>,
}

impl LipschitzData {
    /// Validates `c_plus[i]` in `[0, 1)`, `H` square of matching size with
    /// nonnegative entries.
    pub fn new(c_plus: Vec<Rat>, h: Vec<Vec<Rat>>) -> Result<Self, CertificateError> {
        let n = c_plus.len();
        if n == 0 {
            return Err(CertificateError::Dimension(
                "at least one channel required".into(),
            ));
        }
        if h.len() != n {
            return Err(CertificateError::Dimension(format!(
                "H has {} rows, expected {n}",
                h.len()
            )));
        }
        for (row, value) in c_plus.iter().enumerate() {
            if value.is_negative() || *value >= rat_int(1) {
                return Err(CertificateError::LeakageBoundOutOfRange {
                    row,
                    value: format_rat(value),
                });
            }
        }
        for (row, hr) in h.iter().enumerate() {
            if hr.len() != n {
                return Err(CertificateError::Dimension(format!(
                    "H row {row} has {} entries, expected {n}",
                    hr.len()
                )));
            }
            for (col, value) in hr.iter().enumerate() {
                if value.is_negative() {
                    return Err(CertificateError::NegativeLipschitz { row, col });
                }
            }
        }
        Ok(LipschitzData { c_plus, h })
    }

    pub fn channels(&self) -> usize {
        self.c_plus.len()
    }

    pub fn c_plus(&self) -> &[Rat] {
        &self.c_plus
    }

    pub fn h(&self) -> &[Vec<Rat>] {
        &self.h
    }

    /// `sum_j H[i][j]`.
    pub fn row_sum(&self, row: usize) -> Rat {
        self.h[row].iter().fold(Rat::zero(), |acc, v| acc + v)
    }

    /// Exact strict-dominance margins `1 - c_plus[i] - sum_j H[i][j]`.
    pub fn margins(&self) -> Vec<Rat> {
        (0..self.channels())
            .map(|i| rat_int(1) - &self.c_plus[i] - self.row_sum(i))
            .collect()
    }
}

/// The comparison matrix `I - diag(c_plus) - H` whose nonsingular
/// M-matrix property certifies stability after rescaling.
pub fn comparison_matrix(lip: &LipschitzData) -> Vec<Vec<Rat>> {
    let n = lip.channels();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        rat_int(1) - &lip.c_plus[i] - &lip.h[i][j]
                    } else {
                        -lip.h[i][j].clone()
                    }
                })
                .collect()
        })
        .collect()
}

/// Rescales the data under the change of variables `y_i = x_i / d[i]`:
/// the rescaled matrix is `H'[i][j] = H[i][j] * d[j] / d[i]` while the
/// leakage bounds are unchanged. Requires `d > 0` componentwise.
pub fn rescale_by_witness(
    lip: &LipschitzData,
    d: &[Rat],
) -> Result<LipschitzData, CertificateError> {
    let n = lip.channels();
    if d.len() != n {
        return Err(CertificateError::Dimension(format!(
            "witness has {} entries, expected {n}",
            d.len()
        )));
    }
    for (row, value) in d.iter().enumerate() {
        if !value.is_positive() {
            return Err(CertificateError::NonPositiveWitness { row });
        }
    }
    let h = (0..n)
        .map(|i| (0..n).map(|j| &lip.h[i][j] * &d[j] / &d[i]).collect())
        .collect();
    LipschitzData::new(lip.c_plus.clone(), h)
}

/// Exact margins of the `d`-weighted dominance condition,
/// `d[i] * (1 - c_plus[i]) - sum_j H[i][j] * d[j]`; equivalently the
/// comparison matrix applied to `d`. Requires `d > 0` componentwise, so a
/// fully positive result is equivalent to dominance of the rescaled data.
pub fn weighted_margins(lip: &LipschitzData, d: &[Rat]) -> Result<Vec<Rat>, CertificateError> {
    let n = lip.channels();
    if d.len() != n {
        return Err(CertificateError::Dimension(format!(
            "weight vector has {} entries, expected {n}",
            d.len()
        )));
    }
    for (row, value) in d.iter().enumerate() {
        if !value.is_positive() {
            return Err(CertificateError::NonPositiveWitness { row });
        }
    }
    Ok((0..n)
        .map(|i| {
            let mut acc = (rat_int(1) - &lip.c_plus[i]) * &d[i];
            for j in 0..n {
                acc -= &lip.h[i][j] * &d[j];
            }
            acc
        })
        .collect())
}

/// Stability classification of a certificate attempt.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Global exponential stability with explicit decay constants.
    Certified,
    /// Boundary case `c = 1`: solutions stay uniformly close but no decay
    /// rate is claimed.
    UniformOnly,
    /// The conditions fail; nothing is claimed.
    NotCertified,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Certified => "certified",
            Verdict::UniformOnly => "uniform-only",
            Verdict::NotCertified => "not-certified",
        }
    }
}

/// Classifies a `(c, lambda)` pair coming from a direct estimate of the
/// decay-weighted sums: `lambda < 1` with `c < 1` gives exponential decay,
/// `lambda < 1` at the boundary `c = 1` gives uniform closeness only.
pub fn classify_decay(c: f64, lambda: f64) -> Verdict {
    if !(lambda >= 0.0) || lambda >= 1.0 || !(c > 0.0) || c > 1.0 {
        Verdict::NotCertified
    } else if c < 1.0 {
        Verdict::Certified
    } else {
        Verdict::UniformOnly
    }
}

/// Explicit decay constants attached to a certified system.
#[derive(Debug, Clone)]
pub struct DecayData {
    /// Per-period decay exponent; `c = e^-mu`.
    pub mu: f64,
    /// Per-row exponents `nu_i = -ln c_plus[i]` (adjusted on rows with
    /// `c_plus[i] = 0`; see [`mu_search`]).
    pub nu: Vec<f64>,
    /// Leakage envelope base `e^-mu`, in `(0, 1)`.
    pub c: f64,
    /// Per-step decay rate `c^(1/(tau+1))`.
    pub zeta: f64,
    /// Upper bound on the decay-weighted sums, strictly below 1.
    pub lambda_bound: f64,
    /// Envelope amplitude: `dist(m) <= big_c * zeta^m * dist(0)`.
    pub big_c: f64,
}

/// A certificate: verdict, exact margins, optional witness rescaling and
/// decay constants.
#[derive(Debug, Clone)]
pub struct StabilityCertificate {
    pub verdict: Verdict,
    /// Exact margins `1 - c_plus[i] - sum_j H[i][j]` for the (possibly
    /// rescaled) data the verdict was decided on.
    pub margins: Vec<Rat>,
    /// Positive rescaling vector, when the M-matrix route produced one.
    pub witness: Option<Vec<Rat>>,
    /// Decay constants; present exactly when `verdict == Certified`.
    pub decay: Option<DecayData>,
    /// Direct numerical estimate of the decay-weighted sums, when one was
    /// computed (diagnostic; not part of the verdict).
    pub lambda_numeric: Option<f64>,
}

fn float_row_sums(lip: &LipschitzData) -> Vec<f64> {
    (0..lip.channels())
        .map(|i| rat_to_f64(&lip.row_sum(i)))
        .collect()
}

/// Left side of the per-row feasibility inequality at exponent `mu`:
/// `(e^(nu_i - mu) - 1) / e^(nu_i) * e^(mu r/(tau+1))`.
fn envelope_lhs(nu_i: f64, mu: f64, r_ratio: f64) -> f64 {
    ((nu_i - mu).exp() - 1.0) * (-nu_i).exp() * (mu * r_ratio).exp()
}

/// Per-row exponents `nu_i`. Rows with `c_plus[i] > 0` use `-ln c_plus[i]`,
/// floored at `c_plus = 1e-3` so the exponent stays finite even when the
/// rational bound underflows `f64`. Rows with `c_plus[i] = 0` have no finite
/// constraint, so a deterministic stand-in keeps the search bounded:
/// `-ln(max(1e-3, 1 - 2 * row_sum))`, falling back to `-ln(1e-3)` when the
/// row sum is zero (where the formula would degenerate to zero).
pub fn nu_exponents(lip: &LipschitzData) -> Vec<f64> {
    lip.c_plus()
        .iter()
        .enumerate()
        .map(|(i, cp)| {
            if cp.is_positive() {
                -rat_to_f64(cp).max(1e-3).ln()
            } else {
                let base = 1.0 - 2.0 * rat_to_f64(&lip.row_sum(i));
                let clamped = base.max(1e-3);
                if clamped >= 1.0 {
                    -(1e-3f64).ln()
                } else {
                    -clamped.ln()
                }
            }
        })
        .collect()
}

/// True when `mu` is a strictly feasible decay exponent for the given
/// per-row exponents and Lipschitz row sums.
pub fn mu_feasible(nu: &[f64], row_sums: &[f64], tau: u32, window_start: i64, mu: f64) -> bool {
    let r_ratio = window_start as f64 / f64::from(tau + 1);
    nu.iter()
        .zip(row_sums)
        .all(|(&v, &h)| mu < v && envelope_lhs(v, mu, r_ratio) > h)
}

/// Finds the largest feasible decay exponent by bisection (relative
/// tolerance `1e-12`) and assembles the decay constants.
///
/// Requires the strict dominance margins of `lip` to be positive and
/// `window_start <= -tau`. The feasibility region is an interval `(0, mu*)`,
/// so the returned exponent is the supremum up to the bisection tolerance;
/// `lambda_bound` is evaluated at the returned (strictly feasible) exponent
/// and is therefore strictly below 1 in the same arithmetic.
pub fn mu_search(
    lip: &LipschitzData,
    tau: u32,
    window_start: i64,
) -> Result<DecayData, CertificateError> {
    if window_start > -i64::from(tau) {
        return Err(CertificateError::Domain(format!(
            "window start {window_start} must be <= -tau = {}",
            -i64::from(tau)
        )));
    }
    for (row, margin) in lip.margins().iter().enumerate() {
        if !margin.is_positive() {
            return Err(CertificateError::RowDominanceFails {
                row,
                margin: format_rat(margin),
            });
        }
    }
    let nu = nu_exponents(lip);
    let row_sums = float_row_sums(lip);
    let r_ratio = window_start as f64 / f64::from(tau + 1);
    let nu_min = nu.iter().cloned().fold(f64::INFINITY, f64::min);

    let mu = if row_sums.iter().all(|&h| h == 0.0) {
        // no functional part: any exponent below every nu_i works
        nu_min
    } else {
        let mut lo = 0.0f64;
        let mut hi = nu_min;
        for _ in 0..200 {
            if hi - lo <= 1e-12 * hi {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if mu_feasible(&nu, &row_sums, tau, window_start, mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if lo == 0.0 {
            return Err(CertificateError::Infeasible);
        }
        lo
    };

    // lambda_bound reuses the same feasibility expression, so strict
    // feasibility of mu forces every ratio below 1 in f64 arithmetic.
    let lambda_bound = nu
        .iter()
        .zip(&row_sums)
        .map(|(&v, &h)| {
            if h == 0.0 {
                0.0
            } else {
                h / envelope_lhs(v, mu, r_ratio)
            }
        })
        .fold(0.0f64, f64::max);
    if !(lambda_bound < 1.0) {
        return Err(CertificateError::Infeasible);
    }
    let c = (-mu).exp();
    let zeta = (-mu / f64::from(tau + 1)).exp();
    let big_c = (mu * (1.0 - r_ratio)).exp() / (1.0 - lambda_bound);
    Ok(DecayData {
        mu,
        nu,
        c,
        zeta,
        lambda_bound,
        big_c,
    })
}

/// Decides strict row dominance on `lip` and, when it holds, attaches decay
/// constants from [`mu_search`]. Never rescales; combine with
/// [`certify_m_matrix`] and [`rescale_by_witness`] for the witness route.
pub fn certify_row_dominance(
    lip: &LipschitzData,
    tau: u32,
    window_start: i64,
) -> Result<StabilityCertificate, CertificateError> {
    let margins = lip.margins();
    if margins.iter().all(|m| m.is_positive()) {
        let decay = mu_search(lip, tau, window_start)?;
        Ok(StabilityCertificate {
            verdict: Verdict::Certified,
            margins,
            witness: None,
            decay: Some(decay),
            lambda_numeric: None,
        })
    } else {
        Ok(StabilityCertificate {
            verdict: Verdict::NotCertified,
            margins,
            witness: None,
            decay: None,
            lambda_numeric: None,
        })
    }
}

/// Which route produced the verdict in [`certify_system`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertificationRoute {
    /// Strict row dominance held on the raw data.
    Direct,
    /// Dominance held only after rescaling by the M-matrix witness.
    Rescaled,
    /// Neither route applied.
    None,
}

impl CertificationRoute {
    pub fn as_str(self) -> &'static str {
        match self {
            CertificationRoute::Direct => "direct",
            CertificationRoute::Rescaled => "rescaled",
            CertificationRoute::None => "none",
        }
    }
}

/// Everything produced while certifying one system.
#[derive(Debug, Clone)]
pub struct CertificationOutcome {
    /// Margins of the raw (unscaled) data.
    pub raw_margins: Vec<Rat>,
    /// Comparison matrix of the raw data.
    pub m_matrix: Vec<Vec<Rat>>,
    /// Exact M-matrix test of the comparison matrix.
    pub m_report: MMatrixReport<Rat>,
    pub route: CertificationRoute,
    /// Final certificate, decided on the raw or rescaled data per `route`.
    pub certificate: StabilityCertificate,
    /// The data the certificate was decided on (rescaled when applicable).
    pub effective: LipschitzData,
}

/// Runs the full pipeline: strict dominance on the raw data first; if that
/// fails, the exact M-matrix test on the comparison matrix, retrying
/// dominance on the witness-rescaled data (where the margins are exactly
/// `1 / d[i]` by construction).
pub fn certify_system(
    lip: &LipschitzData,
    tau: u32,
    window_start: i64,
) -> Result<CertificationOutcome, CertificateError> {
    let raw_margins = lip.margins();
    let m_matrix = comparison_matrix(lip);
    let m_report = certify_m_matrix(&m_matrix)?;
    if raw_margins.iter().all(Signed::is_positive) {
        let certificate = certify_row_dominance(lip, tau, window_start)?;
        return Ok(CertificationOutcome {
            raw_margins,
            m_matrix,
            m_report,
            route: CertificationRoute::Direct,
            certificate,
            effective: lip.clone(),
        });
    }
    if m_report.is_nonsingular_m {
        let witness = m_report
            .witness
            .clone()
            .expect("nonsingular M-matrix test always produces a witness");
        let effective = rescale_by_witness(lip, &witness)?;
        let mut certificate = certify_row_dominance(&effective, tau, window_start)?;
        certificate.witness = Some(witness);
        return Ok(CertificationOutcome {
            raw_margins,
            m_matrix,
            m_report,
            route: CertificationRoute::Rescaled,
            certificate,
            effective,
        });
    }
    Ok(CertificationOutcome {
        raw_margins: raw_margins.clone(),
        m_matrix,
        m_report,
        route: CertificationRoute::None,
        certificate: StabilityCertificate {
            verdict: Verdict::NotCertified,
            margins: raw_margins,
            witness: None,
            decay: None,
            lambda_numeric: None,
        },
        effective: lip.clone(),
    })
}
