//! Direct numerical evaluation of the decay-weighted sums behind the
//! contraction argument.
//!
//! For a channel `i`, residue `s` in `0..=tau`, and depth `n >= 1`, define
//! along the arithmetic progression `m_k = k(tau+1) + tau - s`:
//!
//! ```text
//! S(i, s, n) = sum_{l=0}^{n-1}  prod_{k=l+1}^{n-1} |c_i(m_k)|
//!                              * H_i(m_l) * c^(l + E - n + 1),
//! E = (r - s - 1) / (tau + 1),
//! ```
//!
//! with the empty product equal to 1. The certificate requires
//! `sup over (i, s, n) of S < 1`; this module evaluates the partial sums up
//! to a truncation depth through the stable recurrence
//!
//! ```text
//! S(n+1) = (|c_i(m_n)| / c) * S(n) + H_i(m_n) * c^E,
//! ```
//!
//! which reproduces the nested products without re-multiplying them.
//! The supremum over all depths is finite only when `sup |c_i| < c`; the
//! truncated maximum reported here is a lower bound on the supremum, while
//! certified systems get the complementary analytic upper bound from
//! `mu_search`.

use super::CertificateError;

/// Inputs for the decay-weighted sums: channel count, leakage delay, window
/// start, plus the absolute leakage stream `|c_i(m)|` and the per-channel
/// Lipschitz stream `H_i(m)`.
pub struct H2Inputs<'a> {
    pub channels: usize,
    pub tau: u32,
    pub window_start: i64,
    pub leakage_abs: &'a dyn Fn(usize, i64) -> f64,
    pub lipschitz: &'a dyn Fn(usize, i64) -> f64,
}

/// One partial sum `S(channel, residue, depth)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaTerm {
    pub channel: usize,
    pub residue: u32,
    pub depth: i64,
    pub partial_sum: f64,
}

/// Truncated estimate of the decay-weighted supremum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaEstimate {
    /// Largest partial sum seen up to the truncation depth.
    pub value: f64,
    /// Channel attaining the maximum.
    pub channel: usize,
    /// Residue attaining the maximum.
    pub residue: u32,
    /// Depth attaining the maximum.
    pub depth: i64,
    /// Truncation depth used.
    pub truncation_depth: i64,
    /// Geometric envelope covering every depth, including `n > n_max`:
    /// per slice `(i, s)`, bounding each sampled `|c_i|` by its maximum `a`
    /// and each `H_i` by its maximum gives
    /// `S(n) <= H_max c^E sum_q (a/c)^q <= H_max c^E / (1 - a/c)`,
    /// and `tail_bound` is the largest such value over all slices. Infinite
    /// when some slice has `a = c` with a nonvanishing Lipschitz stream (the
    /// partial sums then grow linearly and the supremum does not exist).
    /// Computed from the sampled maxima, so exact for coefficient streams
    /// whose period divides the sampled range.
    pub tail_bound: f64,
}

fn validate(inputs: &H2Inputs, c: f64, n_max: i64) -> Result<(), CertificateError> {
    if inputs.channels == 0 {
        return Err(CertificateError::Dimension(
            "at least one channel required".into(),
        ));
    }
    if inputs.window_start > -i64::from(inputs.tau) {
        return Err(CertificateError::Domain(format!(
            "window start {} must be <= -tau = {}",
            inputs.window_start,
            -i64::from(inputs.tau)
        )));
    }
    if !(c > 0.0 && c <= 1.0) {
        return Err(CertificateError::Domain(format!(
            "envelope base c must lie in (0, 1], got {c}"
        )));
    }
    if n_max < 1 {
        return Err(CertificateError::Domain(format!(
            "truncation depth must be >= 1, got {n_max}"
        )));
    }
    Ok(())
}

/// Evaluates every partial sum `S(i, s, n)` for `n = 1..=n_max`.
///
/// Fails when a sampled `|c_i(m)|` exceeds `c` (beyond a relative slack of
/// `1e-12`) or a sampled Lipschitz value is negative, since the sums only
/// mean anything under those hypotheses.
pub fn lambda_terms(
    inputs: &H2Inputs,
    c: f64,
    n_max: i64,
) -> Result<Vec<LambdaTerm>, CertificateError> {
    validate(inputs, c, n_max)?;
    let tau = i64::from(inputs.tau);
    let mut terms = Vec::with_capacity(inputs.channels * (tau as usize + 1) * n_max as usize);
    for channel in 0..inputs.channels {
        for s in 0..=tau {
            let exponent = (inputs.window_start as f64 - s as f64 - 1.0) / (tau as f64 + 1.0);
            let feed = c.powf(exponent);
            let mut partial = 0.0f64;
            for n in 1..=n_max {
                // entering depth n: the new l = n-1 term plus the rescaled
                // previous sum, per the recurrence in the module docs
                let m_prev = (n - 1) * (tau + 1) + tau - s;
                let leak = (inputs.leakage_abs)(channel, m_prev).abs();
                if leak > c * (1.0 + 1e-12) {
                    return Err(CertificateError::HypothesisViolated {
                        channel,
                        m: m_prev,
                        observed: leak,
                        cap: c,
                    });
                }
                let lip = (inputs.lipschitz)(channel, m_prev);
                if !(lip >= 0.0) {
                    return Err(CertificateError::Domain(format!(
                        "Lipschitz stream must be nonnegative, got {lip} at channel \
                         {channel}, m = {m_prev}"
                    )));
                }
                partial = if n == 1 {
                    lip * feed
                } else {
                    (leak / c) * partial + lip * feed
                };
                terms.push(LambdaTerm {
                    channel,
                    residue: s as u32,
                    depth: n,
                    partial_sum: partial,
                });
            }
        }
    }
    Ok(terms)
}

/// Maximum of the partial sums up to `n_max`, plus the all-depth geometric
/// envelope described on [`LambdaEstimate::tail_bound`]; see [`lambda_terms`].
pub fn lambda_numeric(
    inputs: &H2Inputs,
    c: f64,
    n_max: i64,
) -> Result<LambdaEstimate, CertificateError> {
    let terms = lambda_terms(inputs, c, n_max)?;
    let best = terms
        .iter()
        .max_by(|a, b| a.partial_sum.total_cmp(&b.partial_sum))
        .expect("n_max >= 1 guarantees at least one term");

    let tau = i64::from(inputs.tau);
    let mut tail_bound = 0.0f64;
    for channel in 0..inputs.channels {
        for s in 0..=tau {
            let mut max_leak = 0.0f64;
            let mut max_lip = 0.0f64;
            for k in 0..n_max {
                let m = k * (tau + 1) + tau - s;
                max_leak = max_leak.max((inputs.leakage_abs)(channel, m).abs());
                max_lip = max_lip.max((inputs.lipschitz)(channel, m));
            }
            let slice = if max_lip == 0.0 {
                0.0
            } else if max_leak >= c * (1.0 - 1e-12) {
                f64::INFINITY
            } else {
                let exponent = (inputs.window_start as f64 - s as f64 - 1.0) / (tau as f64 + 1.0);
                max_lip * c.powf(exponent) / (1.0 - max_leak / c)
            };
            tail_bound = tail_bound.max(slice);
        }
    }

    Ok(LambdaEstimate {
        value: best.partial_sum,
        channel: best.channel,
        residue: best.residue,
        depth: best.depth,
        truncation_depth: n_max,
        tail_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Literal nested-loop evaluation of the defining sum, kept deliberately
    /// separate from the production recurrence.
    fn brute_force(inputs: &H2Inputs, c: f64, channel: usize, s: i64, n: i64) -> f64 {
        let tau = i64::from(inputs.tau);
        let exponent_base = (inputs.window_start as f64 - s as f64 - 1.0) / (tau as f64 + 1.0);
        let mut total = 0.0;
        for l in 0..n {
            let mut prod = 1.0;
            for k in l + 1..n {
                prod *= (inputs.leakage_abs)(channel, k * (tau + 1) + tau - s).abs();
            }
            let h = (inputs.lipschitz)(channel, l * (tau + 1) + tau - s);
            total += prod * h * c.powf(l as f64 + exponent_base - n as f64 + 1.0);
        }
        total
    }

    #[test]
    fn recurrence_matches_brute_force() {
        let leak = |i: usize, m: i64| {
            if i == 0 {
                0.3 + 0.1 * ((m % 4) as f64)
            } else {
                0.2
            }
        };
        let lip = |_: usize, m: i64| 0.05 + 0.01 * ((m % 3) as f64);
        let inputs = H2Inputs {
            channels: 2,
            tau: 2,
            window_start: -4,
            leakage_abs: &leak,
            lipschitz: &lip,
        };
        let c = 0.9;
        let terms = lambda_terms(&inputs, c, 12).unwrap();
        for t in &terms {
            let direct = brute_force(&inputs, c, t.channel, i64::from(t.residue), t.depth);
            assert!(
                (t.partial_sum - direct).abs() <= 1e-12 * (1.0 + direct.abs()),
                "mismatch at {t:?}: direct {direct}"
            );
        }
    }

    #[test]
    fn constant_data_matches_geometric_closed_form() {
        // constant |c_i| = a, H_i = h: S(n) = h c^E sum_{q=0}^{n-1} (a/c)^q
        let a = 0.4;
        let h = 0.2;
        let c = 0.8;
        let inputs = H2Inputs {
            channels: 1,
            tau: 0,
            window_start: 0,
            leakage_abs: &move |_, _| a,
            lipschitz: &move |_, _| h,
        };
        let est = lambda_numeric(&inputs, c, 40).unwrap();
        let feed = c.powf((0.0 - 0.0 - 1.0) / 1.0);
        let closed = h * feed / (1.0 - a / c);
        assert!(est.value < closed);
        assert!((est.value - closed).abs() < 1e-9);
        // for constant data the geometric envelope IS the closed form
        assert!((est.tail_bound - closed).abs() <= 1e-12 * closed);
        assert!(est.value <= est.tail_bound);
    }

    #[test]
    fn hypothesis_violation_is_detected() {
        let inputs = H2Inputs {
            channels: 1,
            tau: 0,
            window_start: 0,
            leakage_abs: &|_, _| 0.95,
            lipschitz: &|_, _| 0.0,
        };
        assert!(matches!(
            lambda_terms(&inputs, 0.9, 5),
            Err(CertificateError::HypothesisViolated { .. })
        ));
        // equality is allowed
        assert!(lambda_terms(&inputs, 0.95, 5).is_ok());
    }

    #[test]
    fn domain_checks() {
        let inputs = H2Inputs {
            channels: 1,
            tau: 1,
            window_start: -1,
            leakage_abs: &|_, _| 0.1,
            lipschitz: &|_, _| 0.1,
        };
        assert!(lambda_numeric(&inputs, 0.0, 5).is_err());
        assert!(lambda_numeric(&inputs, 1.5, 5).is_err());
        assert!(lambda_numeric(&inputs, 0.9, 0).is_err());
        let bad_window = H2Inputs {
            channels: 1,
            tau: 2,
            window_start: -1,
            leakage_abs: &|_, _| 0.1,
            lipschitz: &|_, _| 0.1,
        };
        assert!(lambda_numeric(&bad_window, 0.9, 5).is_err());
    }

    #[test]
    fn boundary_case_grows_linearly() {
        // |c_i| = c makes the partial sums n * h * c^E: no finite supremum
        let c = 0.7;
        let inputs = H2Inputs {
            channels: 1,
            tau: 0,
            window_start: 0,
            leakage_abs: &move |_, _| c,
            lipschitz: &|_, _| 0.1,
        };
        let terms = lambda_terms(&inputs, c, 30).unwrap();
        let feed = c.powf(-1.0);
        for t in terms {
            assert!((t.partial_sum - t.depth as f64 * 0.1 * feed).abs() < 1e-9);
        }
        // no finite supremum, and the envelope says so
        let est = lambda_numeric(&inputs, c, 30).unwrap();
        assert!(est.tail_bound.is_infinite());
    }

    #[test]
    fn envelope_dominates_every_partial_sum() {
        let leak = |i: usize, m: i64| 0.25 + 0.05 * ((m + i as i64) % 5) as f64;
        let lip = |i: usize, m: i64| 0.02 * (1 + (m + 2 * i as i64) % 3) as f64;
        let inputs = H2Inputs {
            channels: 3,
            tau: 1,
            window_start: -3,
            leakage_abs: &leak,
            lipschitz: &lip,
        };
        let est = lambda_numeric(&inputs, 0.85, 60).unwrap();
        for t in lambda_terms(&inputs, 0.85, 60).unwrap() {
            assert!(t.partial_sum <= est.tail_bound * (1.0 + 1e-12));
        }
    }
}
