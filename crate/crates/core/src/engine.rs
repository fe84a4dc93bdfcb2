//! Forward simulation, period maps, and numerical verification of decay
//! envelopes.
//!
//! The step rule is
//!
//! ```text
//! x_i(m+1) = c_i(m) x_i(m - tau) + h_i(m, window(x, m)),
//! ```
//!
//! evaluated in that order, one fused multiply-free expression per channel,
//! so repeated runs are bitwise reproducible.
//!
//! For certified systems the contraction estimates have the form
//! `distance(m) <= C * zeta^m * distance(0)`; [`check_exponential_bound`]
//! verifies that envelope along simulated pairs, and
//! [`check_lemma_inequality`] verifies the underlying block recursion
//!
//! ```text
//! |x_i(n(tau+1)-s) - y_i(n(tau+1)-s)|
//!     <= prod_{k=0}^{n-1} |c_i(k(tau+1)+tau-s)| * d0
//!      + sum_{l=0}^{n-1} prod_{k=l+1}^{n-1} |c_i(k(tau+1)+tau-s)|
//!          * H_i(l(tau+1)+tau-s) * dist(l(tau+1)+tau-s),
//! ```
//!
//! where `dist(t)` is the window distance of the two solutions at time `t`
//! and every natural number >= 1 is written uniquely as `n(tau+1) - s` with
//! `0 <= s <= tau`, `n >= 1` (see [`partition_index`]).

use crate::numeric_tolerance;
use crate::state::{HistoryState, StateError, SystemDefinition, Trajectory};
use thiserror::Error;

/// Errors from simulation and orbit search.
#[derive(Debug, Clone, Error)]
pub enum EngineError {
    #[error(transparent)]
    State(#[from] StateError),
    #[error("trajectory diverged at step {step}, channel {channel} (value {value})")]
    Divergence {
        step: i64,
        channel: usize,
        value: f64,
    },
    #[error("system declares no period; set one with SystemDefinition::with_period")]
    PeriodNotSet,
    #[error(
        "fixed-point iteration stalled: residual {last:.3e} after {iterations} iterations \
         (tolerance {tolerance:.3e})"
    )]
    NoConvergence {
        iterations: u32,
        tolerance: f64,
        last: f64,
        trace: Vec<f64>,
    },
    #[error(
        "orbit failed the periodicity recheck: deviation {deviation:.3e} over two periods \
         exceeds 10 x tolerance {tolerance:.3e}"
    )]
    PeriodicityCheckFailed { deviation: f64, tolerance: f64 },
    #[error("invalid argument: {0}")]
    Domain(String),
}

/// Runs the recurrence forward `steps` times from `initial`.
///
/// The initial history must match the system's channel count and window
/// start. Fails with [`EngineError::Divergence`] as soon as a sample stops
/// being finite.
pub fn simulate(
    system: &SystemDefinition,
    initial: &HistoryState,
    steps: i64,
) -> Result<Trajectory, EngineError> {
    if steps < 0 {
        return Err(EngineError::Domain(format!(
            "step count must be nonnegative, got {steps}"
        )));
    }
    if initial.channels() != system.channels() {
        return Err(StateError::ChannelMismatch {
            expected: system.channels(),
            got: initial.channels(),
        }
        .into());
    }
    if initial.window_start() != system.window_start() {
        return Err(StateError::WindowMismatch {
            expected: system.window_start(),
            got: initial.window_start(),
        }
        .into());
    }

    let n = system.channels();
    let r = system.window_start();
    let tau = i64::from(system.leakage_delay());
    let mut samples: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row = Vec::with_capacity(initial.window_len() + steps as usize);
            row.extend_from_slice(initial.samples(i));
            row
        })
        .collect();
    let mut window = initial.clone();
    let mut next = vec![0.0_f64; n];

    for m in 0..steps {
        window.fill_from_samples(&samples, m as usize);
        for (i, slot) in next.iter_mut().enumerate() {
            let delayed = samples[i][(m - tau - r) as usize];
            let value = system.leakage_at(i, m) * delayed + system.nonlinearity_at(i, m, &window);
            if !value.is_finite() {
                return Err(EngineError::Divergence {
                    step: m + 1,
                    channel: i,
                    value,
                });
            }
            *slot = value;
        }
        for (row, &value) in samples.iter_mut().zip(&next) {
            row.push(value);
        }
    }
    Ok(Trajectory::from_parts(system.clone(), r, steps, samples))
}

/// One application of the period map: simulate one declared period and
/// return the final window.
pub fn poincare_map(
    system: &SystemDefinition,
    state: &HistoryState,
) -> Result<HistoryState, EngineError> {
    let omega = i64::from(system.period().ok_or(EngineError::PeriodNotSet)?);
    let traj = simulate(system, state, omega)?;
    Ok(traj.window(omega)?)
}

/// Result of a successful periodic orbit search.
#[derive(Debug, Clone)]
pub struct PeriodicOrbitResult {
    /// Window fixed (up to `residual`) by the period map.
    pub fixed_point: HistoryState,
    /// One period simulated from the fixed point; its final window equals
    /// `fixed_point` within `residual`.
    pub orbit: Trajectory,
    /// Iterations of the period map consumed.
    pub iterations: u32,
    /// Final update distance `dist(P(state), state)`.
    pub residual: f64,
    /// Largest observed one-period contraction ratio over three small
    /// deterministic probe perturbations of the fixed point.
    pub contraction_estimate: f64,
}

/// Locates a periodic orbit by iterating the period map to a fixed point.
///
/// Starts from `seed` (default: the zero history), applies the map until the
/// update distance drops to `tol`, then re-simulates two periods and checks
/// the window returns to the fixed point within `10 * tol`.
pub fn find_periodic_orbit(
    system: &SystemDefinition,
    seed: Option<&HistoryState>,
    tol: f64,
    max_iters: u32,
) -> Result<PeriodicOrbitResult, EngineError> {
    let omega = i64::from(system.period().ok_or(EngineError::PeriodNotSet)?);
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(EngineError::Domain(format!(
            "tolerance must be positive and finite, got {tol}"
        )));
    }
    if max_iters == 0 {
        return Err(EngineError::Domain("need at least one iteration".into()));
    }
    let mut current = match seed {
        Some(s) => s.clone(),
        None => HistoryState::zero(system.channels(), system.window_start())?,
    };
    let mut trace = Vec::new();
    for iteration in 1..=max_iters {
        let next = poincare_map(system, &current)?;
        let residual = next.distance(&current)?;
        trace.push(residual);
        if residual <= tol {
            let orbit = simulate(system, &current, omega)?;
            let two_periods = simulate(system, &current, 2 * omega)?;
            let deviation = two_periods.window(2 * omega)?.distance(&current)?;
            if deviation > 10.0 * tol {
                return Err(EngineError::PeriodicityCheckFailed {
                    deviation,
                    tolerance: tol,
                });
            }
            let contraction_estimate = probe_contraction(system, &current, &next)?;
            return Ok(PeriodicOrbitResult {
                fixed_point: current,
                orbit,
                iterations: iteration,
                residual,
                contraction_estimate,
            });
        }
        current = next;
    }
    let last = trace.last().copied().unwrap_or(f64::INFINITY);
    Err(EngineError::NoConvergence {
        iterations: max_iters,
        tolerance: tol,
        last,
        trace,
    })
}

/// Measures one-period contraction ratios around `fixed`, whose image under
/// the period map is `image`.
fn probe_contraction(
    system: &SystemDefinition,
    fixed: &HistoryState,
    image: &HistoryState,
) -> Result<f64, EngineError> {
    const DELTA: f64 = 1e-3;
    let mut worst: f64 = 0.0;
    for pattern in 0..3u8 {
        let probe = HistoryState::from_fn(fixed.channels(), fixed.window_start(), |i, j| {
            let bump = match pattern {
                0 => DELTA,
                1 => {
                    if (i as i64 + j).rem_euclid(2) == 0 {
                        DELTA
                    } else {
                        -DELTA
                    }
                }
                _ => {
                    if i == 0 {
                        DELTA
                    } else {
                        0.0
                    }
                }
            };
            fixed.value(i, j) + bump
        })?;
        let mapped = poincare_map(system, &probe)?;
        let num = mapped.distance(image)?;
        let den = probe.distance(fixed)?;
        worst = worst.max(num / den);
    }
    Ok(worst)
}

/// One observed-vs-bound comparison.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct SlackSample {
    /// Time index of the comparison.
    pub step: i64,
    /// Observed distance (left side of the inequality).
    pub observed: f64,
    /// Certified bound (right side).
    pub bound: f64,
    /// `bound - observed`; negative means a violation.
    pub slack: f64,
}

/// Outcome of a bound verification over one or more trajectory pairs.
#[derive(Debug, Clone)]
pub struct BoundCheckReport {
    /// Number of initial-condition pairs examined.
    pub pairs_tested: usize,
    /// Most negative slack observed (the minimum slack; may be positive).
    pub max_violation: f64,
    /// Index of the pair attaining `max_violation`.
    pub worst_pair: usize,
    /// Full comparison series for the worst pair.
    pub samples: Vec<SlackSample>,
    /// True when every slack stays above `-numeric_tolerance(bound)`.
    pub pass: bool,
}

impl BoundCheckReport {
    /// Merges per-pair reports, keeping the series of the worst pair.
    /// Pair indices are renumbered by position in `reports`.
    pub fn combine(reports: Vec<BoundCheckReport>) -> Option<BoundCheckReport> {
        let mut total_pairs = 0;
        let mut all_pass = true;
        let mut worst: Option<BoundCheckReport> = None;
        for (index, mut report) in reports.into_iter().enumerate() {
            total_pairs += report.pairs_tested;
            all_pass &= report.pass;
            report.worst_pair = index;
            let replace = match &worst {
                Some(best) => report.max_violation < best.max_violation,
                None => true,
            };
            if replace {
                worst = Some(report);
            }
        }
        worst.map(|mut merged| {
            merged.pairs_tested = total_pairs;
            merged.pass = all_pass;
            merged
        })
    }
}

/// Verifies the exponential envelope
/// `dist(m) <= big_c * zeta^m * dist(0)` for `m = 0..=horizon` along the
/// simulated pair starting from `a` and `b`.
pub fn check_exponential_bound(
    system: &SystemDefinition,
    a: &HistoryState,
    b: &HistoryState,
    big_c: f64,
    zeta: f64,
    horizon: i64,
) -> Result<BoundCheckReport, EngineError> {
    if !(big_c > 0.0 && big_c.is_finite()) {
        return Err(EngineError::Domain(format!(
            "envelope constant must be positive and finite, got {big_c}"
        )));
    }
    if !(zeta > 0.0 && zeta <= 1.0) {
        return Err(EngineError::Domain(format!(
            "decay rate must lie in (0, 1], got {zeta}"
        )));
    }
    if horizon < 0 {
        return Err(EngineError::Domain(format!(
            "horizon must be nonnegative, got {horizon}"
        )));
    }
    let d0 = a.distance(b)?;
    let ta = simulate(system, a, horizon)?;
    let tb = simulate(system, b, horizon)?;
    let mut samples = Vec::with_capacity(horizon as usize + 1);
    let mut min_slack = f64::INFINITY;
    let mut pass = true;
    for m in 0..=horizon {
        let observed = ta.window(m)?.distance(&tb.window(m)?)?;
        let bound = big_c * zeta.powi(m as i32) * d0;
        let slack = bound - observed;
        if slack < min_slack {
            min_slack = slack;
        }
        if slack < -numeric_tolerance(bound) {
            pass = false;
        }
        samples.push(SlackSample {
            step: m,
            observed,
            bound,
            slack,
        });
    }
    Ok(BoundCheckReport {
        pairs_tested: 1,
        max_violation: min_slack,
        worst_pair: 0,
        samples,
        pass,
    })
}

/// Verifies the block recursion bound (module docs) for all channels,
/// residues `s = 0..=tau`, and depths `n = 1..=n_max`, along the simulated
/// pair starting from `a` and `b`. `lipschitz(i, m)` must bound the
/// functional part: `|h_i(m, u) - h_i(m, v)| <= lipschitz(i, m) * dist(u, v)`.
///
/// The returned series covers the worst `(channel, s)` slice, indexed by the
/// time `n(tau+1) - s`.
pub fn check_lemma_inequality(
    system: &SystemDefinition,
    a: &HistoryState,
    b: &HistoryState,
    lipschitz: &dyn Fn(usize, i64) -> f64,
    n_max: u32,
) -> Result<BoundCheckReport, EngineError> {
    if n_max == 0 {
        return Err(EngineError::Domain("need depth n_max >= 1".into()));
    }
    let tau = i64::from(system.leakage_delay());
    let horizon = i64::from(n_max) * (tau + 1);
    let ta = simulate(system, a, horizon)?;
    let tb = simulate(system, b, horizon)?;
    let mut wdist = Vec::with_capacity(horizon as usize + 1);
    for t in 0..=horizon {
        wdist.push(ta.window(t)?.distance(&tb.window(t)?)?);
    }
    let d0 = wdist[0];

    let mut min_slack = f64::INFINITY;
    let mut pass = true;
    let mut worst_series: Vec<SlackSample> = Vec::new();
    for i in 0..system.channels() {
        for s in 0..=tau {
            // |c_i| along the arithmetic progression k(tau+1) + tau - s
            let coeffs: Vec<f64> = (0..i64::from(n_max))
                .map(|k| system.leakage_at(i, k * (tau + 1) + tau - s).abs())
                .collect();
            let mut series = Vec::with_capacity(n_max as usize);
            let mut slice_min = f64::INFINITY;
            for n in 1..=i64::from(n_max) {
                let t_eval = n * (tau + 1) - s;
                let observed = (ta.value(i, t_eval) - tb.value(i, t_eval)).abs();
                // suffix products prod_{k=l+1}^{n-1} |c_i(...)|
                let mut bound = 0.0;
                let mut suffix = 1.0;
                for l in (0..n).rev() {
                    let t_l = l * (tau + 1) + tau - s;
                    bound += suffix * lipschitz(i, t_l) * wdist[t_l as usize];
                    suffix *= coeffs[l as usize];
                }
                bound += suffix * d0;
                let slack = bound - observed;
                slice_min = slice_min.min(slack);
                if slack < -numeric_tolerance(bound) {
                    pass = false;
                }
                series.push(SlackSample {
                    step: t_eval,
                    observed,
                    bound,
                    slack,
                });
            }
            if slice_min < min_slack {
                min_slack = slice_min;
                worst_series = series;
            }
        }
    }
    Ok(BoundCheckReport {
        pairs_tested: 1,
        max_violation: min_slack,
        worst_pair: 0,
        samples: worst_series,
        pass,
    })
}

/// Writes `m >= 1` uniquely as `m = n(tau+1) - s` with `0 <= s <= tau` and
/// `n >= 1`, returning `(s, n)`.
pub fn partition_index(m: i64, tau: u32) -> Result<(u32, i64), EngineError> {
    if m < 1 {
        return Err(EngineError::Domain(format!(
            "partition is defined for m >= 1, got {m}"
        )));
    }
    let period = i64::from(tau) + 1;
    let s = (-m).rem_euclid(period);
    let n = (m + s) / period;
    Ok((s as u32, n))
}

/// Smallest power `p >= 1` such that `big_c * zeta^(p * omega) < 1`: the
/// number of periods after which the certified envelope forces strict
/// contraction of the period map.
pub fn contraction_power(big_c: f64, zeta: f64, omega: u32) -> Result<u64, EngineError> {
    if !(big_c > 0.0 && big_c.is_finite()) || !(zeta > 0.0 && zeta < 1.0) || omega == 0 {
        return Err(EngineError::Domain(format!(
            "need big_c > 0, zeta in (0, 1), omega >= 1; got ({big_c}, {zeta}, {omega})"
        )));
    }
    let mut p = if big_c <= 1.0 {
        1
    } else {
        ((-big_c.ln()) / (f64::from(omega) * zeta.ln()))
            .ceil()
            .max(1.0) as u64
    };
    while big_c * ((p * u64::from(omega)) as f64 * zeta.ln()).exp() >= 1.0 {
        p += 1;
    }
    Ok(p)
}
