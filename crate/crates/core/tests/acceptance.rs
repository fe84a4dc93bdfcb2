//! End-to-end acceptance checks, one printed line per criterion.
//!
//! The target uses its own `main` (no libtest harness) so every line prints
//! on both success and failure:
//!
//! ```text
//! acceptance 3 three-start convergence and certified envelope: PASS (...)
//! ```
//!
//! Run via `cargo test --test acceptance` (or any workspace test run). The
//! process exits nonzero when a criterion fails, which fails `cargo test`.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ddes_core::models::ModelSpec;
use ddes_core::rational::{rat, rat_int, Rat};
use ddes_core::{
    certify_m_matrix, check_exponential_bound, check_lemma_inequality, comparison_matrix,
    find_periodic_orbit, lambda_terms, numeric_tolerance, rescale_by_witness, simulate,
    two_neuron_periodic, CertificationRoute, H2Inputs, HistoryState,
};

type Criterion = (&'static str, fn() -> Result<String, String>);

fn main() {
    let criteria: [Criterion; 8] = [
        ("exact comparison matrix and witness", c1_exact_matrix),
        ("periodic orbit location", c2_periodic_orbit),
        (
            "three-start convergence and certified envelope",
            c3_convergence_and_envelope,
        ),
        ("partial-sum recursion bound", c4_recursion_bound),
        ("certificate soundness sweep", c5_soundness_sweep),
        ("witness rescaling restores dominance", c6_witness_dominance),
        ("high-order change of variables", c7_change_of_variables),
        ("decay-weighted sum machinery", c8_lambda_machinery),
    ];

    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| Err(panic_text(p.as_ref())));
        let dt = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("acceptance {} {name}: PASS ({detail}; {dt:.2}s)", k + 1),
            Err(detail) => {
                failures += 1;
                println!("acceptance {} {name}: FAIL ({detail}; {dt:.2}s)", k + 1);
            }
        }
    }
    if failures > 0 {
        eprintln!("{failures} acceptance criterion(s) failed");
        std::process::exit(1);
    }
}

fn panic_text(p: &(dyn std::any::Any + Send)) -> String {
    if let Some(s) = p.downcast_ref::<&str>() {
        format!("panicked: {s}")
    } else if let Some(s) = p.downcast_ref::<String>() {
        format!("panicked: {s}")
    } else {
        "panicked".into()
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

// ---------------------------------------------------------------------------

/// The bundled two-channel fixture must reproduce its comparison matrix,
/// leading minors and witness vector in exact arithmetic.
fn c1_exact_matrix() -> Result<String, String> {
    let spec = two_neuron_periodic();
    let m = spec.m_matrix().map_err(err)?;
    let expected = vec![vec![rat(1, 2), rat(-1, 6)], vec![rat(-1, 2), rat(1, 3)]];
    if m != expected {
        return Err(format!("comparison matrix mismatch: {m:?}"));
    }
    let report = certify_m_matrix(&m).map_err(err)?;
    if report.leading_minors != vec![rat(1, 2), rat(1, 12)] {
        return Err(format!("minors mismatch: {:?}", report.leading_minors));
    }
    if !report.is_nonsingular_m {
        return Err("fixture matrix not recognized as a nonsingular M-matrix".into());
    }
    match &report.witness {
        Some(d) if *d == vec![rat_int(6), rat_int(12)] => {}
        other => return Err(format!("witness mismatch: {other:?}")),
    }
    Ok("matrix [[1/2, -1/6], [-1/2, 1/3]], minors (1/2, 1/12), witness (6, 12), all exact".into())
}

/// The period-map iteration must converge on the fixture and the located
/// orbit must actually repeat with period 10.
fn c2_periodic_orbit() -> Result<String, String> {
    let system = two_neuron_periodic().lower();
    let res = find_periodic_orbit(&system, None, 1e-10, 500).map_err(err)?;
    if res.residual > 1e-8 {
        return Err(format!("residual {:.3e} above 1e-8", res.residual));
    }
    if res.iterations > 500 {
        return Err(format!("{} iterations above the 500 cap", res.iterations));
    }
    let traj = simulate(&system, &res.fixed_point, 100).map_err(err)?;
    let base = traj.window(0).map_err(err)?;
    let mut worst: f64 = 0.0;
    for p in 1..=10i64 {
        let dev = traj
            .window(10 * p)
            .map_err(err)?
            .distance(&base)
            .map_err(err)?;
        worst = worst.max(dev);
    }
    if worst > 1e-7 {
        return Err(format!(
            "10-period deviation {worst:.3e} above 1e-7 over 10 further periods"
        ));
    }
    Ok(format!(
        "residual {:.2e} after {} iterations, max 10-period deviation {worst:.2e}",
        res.residual, res.iterations
    ))
}

fn figure_starts() -> Result<Vec<HistoryState>, String> {
    let mk = |f: fn(usize, i64) -> f64| HistoryState::from_fn(2, -3, f).map_err(err);
    Ok(vec![
        mk(|i, j| {
            if i == 0 {
                (j as f64).cos()
            } else {
                (j as f64).sin()
            }
        })?,
        mk(|i, j| if i == 0 { (j as f64).exp() } else { -1.0 })?,
        mk(|i, j| {
            if i == 0 {
                -1.5 * (j as f64).exp()
            } else {
                1.5 * (j as f64).cos()
            }
        })?,
    ])
}

/// Three distinct starts must fall into the periodic orbit quickly, and the
/// rescaled certificate envelope must dominate pairwise distances.
fn c3_convergence_and_envelope() -> Result<String, String> {
    let spec = two_neuron_periodic();
    let system = spec.lower();
    let res = find_periodic_orbit(&system, None, 1e-10, 500).map_err(err)?;
    let horizon = 500i64;
    let reference = simulate(&system, &res.fixed_point, horizon).map_err(err)?;

    let starts = figure_starts()?;
    let mut latest_hit = 0i64;
    for (k, init) in starts.iter().enumerate() {
        let traj = simulate(&system, init, horizon).map_err(err)?;
        let mut hit = None;
        for m in 0..=horizon {
            let d = traj
                .window(m)
                .and_then(|w| w.distance(&reference.window(m)?))
                .map_err(err)?;
            if d <= 1e-6 {
                hit = Some(m);
                break;
            }
        }
        match hit {
            Some(m) if m <= 300 => latest_hit = latest_hit.max(m),
            other => {
                return Err(format!(
                    "start {} reached the orbit at {other:?}, not within 300 steps",
                    k + 1
                ))
            }
        }
    }

    let outcome = common::certify(&ModelSpec::Hopfield(spec.clone()));
    let decay = outcome
        .certificate
        .decay
        .as_ref()
        .ok_or("fixture failed to certify")?;
    let witness = outcome
        .certificate
        .witness
        .as_ref()
        .ok_or("fixture certificate carries no witness")?;
    let w: Vec<f64> = witness.iter().map(ddes_core::rat_to_f64).collect();
    let scaled_system = system.rescaled(&w).map_err(err)?;
    let scale = |s: &HistoryState| -> Result<HistoryState, String> {
        HistoryState::from_fn(2, -3, |i, j| s.value(i, j) / w[i]).map_err(err)
    };

    let mut pairs = Vec::new();
    for i in 0..starts.len() {
        for j in (i + 1)..starts.len() {
            pairs.push((starts[i].clone(), starts[j].clone()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..50 {
        pairs.push((
            common::random_window(&mut rng, 2, -3),
            common::random_window(&mut rng, 2, -3),
        ));
    }

    let mut min_slack = f64::INFINITY;
    for (k, (a, b)) in pairs.iter().enumerate() {
        let report = check_exponential_bound(
            &scaled_system,
            &scale(a)?,
            &scale(b)?,
            decay.big_c,
            decay.zeta,
            horizon,
        )
        .map_err(err)?;
        if !report.pass {
            return Err(format!(
                "pair {} violates the envelope by {:.3e}",
                k + 1,
                report.max_violation
            ));
        }
        min_slack = min_slack.min(report.max_violation);
    }
    Ok(format!(
        "3 starts within 1e-6 by step {latest_hit}; envelope holds on {} pairs (min slack \
         {min_slack:.2e})",
        pairs.len()
    ))
}

/// The stepwise partial-sum bound must hold along simulated pairs on the
/// fixture and on randomly drawn certified networks.
fn c4_recursion_bound() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut specs = vec![ModelSpec::Hopfield(two_neuron_periodic())];
    for _ in 0..20 {
        specs.push(ModelSpec::Hopfield(common::certified_hopfield(
            &mut rng, 4, 3,
        )));
    }
    let mut min_slack = f64::INFINITY;
    for (k, spec) in specs.iter().enumerate() {
        let system = spec.lower();
        let profile = spec.row_lipschitz(None).map_err(err)?;
        let a = common::random_window(&mut rng, spec.channels(), spec.window_start());
        let b = common::random_window(&mut rng, spec.channels(), spec.window_start());
        let report =
            check_lemma_inequality(&system, &a, &b, &|i, m| profile(i, m), 20).map_err(err)?;
        if !report.pass {
            return Err(format!(
                "spec {k} violates the recursion bound by {:.3e}",
                report.max_violation
            ));
        }
        min_slack = min_slack.min(report.max_violation);
    }
    Ok(format!(
        "fixture + 20 certified random networks, all channels, residues and depths <= 20 \
         (min slack {min_slack:.2e})"
    ))
}

/// Every certified spec in a 200-draw sweep across all three families must
/// contract under its certified envelope; uncertified draws claim nothing.
fn c5_soundness_sweep() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(57);
    let mut certified = 0;
    let mut uncertified = 0;
    for k in 0..200 {
        let spec = common::random_spec(&mut rng);
        let outcome = common::certify(&spec);
        let Some(decay) = outcome.certificate.decay.as_ref() else {
            uncertified += 1;
            continue;
        };
        let system = spec.lower();
        let a = common::random_window(&mut rng, spec.channels(), spec.window_start());
        let b = common::random_window(&mut rng, spec.channels(), spec.window_start());
        let report = match outcome.route {
            CertificationRoute::Rescaled => {
                let witness = outcome
                    .certificate
                    .witness
                    .as_ref()
                    .ok_or("rescaled route without witness")?;
                let w: Vec<f64> = witness.iter().map(ddes_core::rat_to_f64).collect();
                let scaled = system.rescaled(&w).map_err(err)?;
                let shrink = |s: &HistoryState| {
                    HistoryState::from_fn(spec.channels(), spec.window_start(), |i, j| {
                        s.value(i, j) / w[i]
                    })
                    .map_err(err)
                };
                check_exponential_bound(
                    &scaled,
                    &shrink(&a)?,
                    &shrink(&b)?,
                    decay.big_c,
                    decay.zeta,
                    200,
                )
            }
            _ => check_exponential_bound(&system, &a, &b, decay.big_c, decay.zeta, 200),
        }
        .map_err(err)?;
        if !report.pass {
            return Err(format!(
                "spec {k} ({}) certified but violates its envelope by {:.3e}",
                spec.family(),
                report.max_violation
            ));
        }
        certified += 1;
    }
    Ok(format!(
        "{certified}/200 certified and contracting, {uncertified} uncertified (no claim made)"
    ))
}

/// Whenever the comparison matrix passes the exact M-matrix test, rescaling
/// by its witness must restore strict row dominance, with margins exactly
/// the reciprocals of the witness entries.
fn c6_witness_dominance() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(73);
    let mut hits = 0;
    let mut draws = 0;
    while hits < 100 {
        draws += 1;
        if draws > 20_000 {
            return Err(format!("only {hits} M-matrix draws in 20000 attempts"));
        }
        let spec = common::random_hopfield(&mut rng, 4, 3, &rat(3, 4));
        let lip = spec.lipschitz_data().map_err(err)?;
        let m = comparison_matrix(&lip);
        let report = certify_m_matrix(&m).map_err(err)?;
        let Some(d) = report.witness.as_ref() else {
            continue;
        };
        let rescaled = rescale_by_witness(&lip, d).map_err(err)?;
        let margins = rescaled.margins();
        for (i, margin) in margins.iter().enumerate() {
            let expected: Rat = rat_int(1) / &d[i];
            if *margin != expected {
                return Err(format!(
                    "draw {draws}: margin {i} is {margin} instead of 1/d meaning {expected}"
                ));
            }
            if *margin <= rat_int(0) {
                return Err(format!("draw {draws}: nonpositive margin {margin}"));
            }
        }
        hits += 1;
    }
    Ok(format!(
        "100 witness rescalings over {draws} draws, margins exactly 1/d and positive, \
         zero tolerance"
    ))
}

/// Dividing a system by positive weights must reproduce trajectories of the
/// weighted change of variables to floating-point accuracy.
fn c7_change_of_variables() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(89);
    let mut worst: f64 = 0.0;
    for k in 0..50 {
        let spec = common::random_high_order(&mut rng, 3, 3, &rat(3, 2));
        let system = spec.lower();
        let d: Vec<f64> = (0..spec.channels())
            .map(|_| rng.gen_range(0.25..4.0))
            .collect();
        let scaled = system.rescaled(&d).map_err(err)?;
        let x0 = common::random_window(&mut rng, spec.channels(), spec.window_start());
        let y0 = HistoryState::from_fn(spec.channels(), spec.window_start(), |i, j| {
            x0.value(i, j) / d[i]
        })
        .map_err(err)?;
        let tx = simulate(&system, &x0, 200).map_err(err)?;
        let ty = simulate(&scaled, &y0, 200).map_err(err)?;
        for m in spec.window_start()..=200 {
            for i in 0..spec.channels() {
                let gap = (ty.value(i, m) - tx.value(i, m) / d[i]).abs();
                worst = worst.max(gap);
                if gap > 1e-10 {
                    return Err(format!(
                        "spec {k}: channel {} step {m} differs by {gap:.3e}",
                        i + 1
                    ));
                }
            }
        }
    }
    Ok(format!(
        "50 high-order systems, 200 steps each, max |y - x/d| = {worst:.2e} <= 1e-10"
    ))
}

/// Straight-from-the-definition evaluator for one channel: the partial sum
/// of depth `n` for residue `s`, exactly as the decay-weighted machinery
/// defines it (products of sampled leakage over the arithmetic progression,
/// one Lipschitz factor per layer, feed `c^((r - s - 1)/(tau + 1))`).
fn direct_partial_sum(
    leak: &dyn Fn(i64) -> f64,
    lip: &dyn Fn(i64) -> f64,
    c: f64,
    tau: i64,
    r: i64,
    s: i64,
    n: i64,
) -> f64 {
    let step = tau + 1;
    let feed = c.powf((r as f64 - s as f64 - 1.0) / step as f64);
    let mut total = 0.0;
    for l in 0..n {
        let mut prod = 1.0;
        for k in (l + 1)..n {
            prod *= leak(k * step + tau - s).abs() / c;
        }
        total += lip(l * step + tau - s) * feed * prod;
    }
    total
}

/// The production decay-weighted sums must agree term-for-term with the
/// direct evaluator, and on certified systems the truncated estimate must
/// stay below the certified bound (which is below 1).
fn c8_lambda_machinery() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut compared = 0usize;
    let mut max_gap: f64 = 0.0;
    for instance in 0..30 {
        let tau = i64::from(instance % 3);
        let r = -tau - i64::from(rng.gen_range(0..3u32));
        let c: f64 = rng.gen_range(0.4..0.95);
        let leak_table: Vec<f64> = (0..rng.gen_range(1..=8))
            .map(|_| rng.gen_range(0.0..0.95 * c))
            .collect();
        let lip_table: Vec<f64> = (0..rng.gen_range(1..=8))
            .map(|_| rng.gen_range(0.0..1.5))
            .collect();
        let leak = move |m: i64| leak_table[m.rem_euclid(leak_table.len() as i64) as usize];
        let lip = move |m: i64| lip_table[m.rem_euclid(lip_table.len() as i64) as usize];

        let leakage_abs = |_: usize, m: i64| leak(m);
        let lipschitz = |_: usize, m: i64| lip(m);
        let inputs = H2Inputs {
            channels: 1,
            tau: tau as u32,
            window_start: r,
            leakage_abs: &leakage_abs,
            lipschitz: &lipschitz,
        };
        let terms = lambda_terms(&inputs, c, 50).map_err(err)?;
        for term in &terms {
            let direct =
                direct_partial_sum(&leak, &lip, c, tau, r, i64::from(term.residue), term.depth);
            let gap = (term.partial_sum - direct).abs();
            max_gap = max_gap.max(gap);
            if gap > 1e-12 * (1.0 + direct.abs()) {
                return Err(format!(
                    "instance {instance} (s = {}, n = {}): production {:.17e} vs direct \
                     {direct:.17e}",
                    term.residue, term.depth, term.partial_sum
                ));
            }
            compared += 1;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(113);
    let mut checked = 0;
    let mut worst_ratio: f64 = 0.0;
    let fixture = ModelSpec::Hopfield(two_neuron_periodic());
    let mut specs = vec![fixture];
    while specs.len() < 31 {
        let spec = common::random_spec(&mut rng);
        if common::certify(&spec).certificate.decay.is_some() {
            specs.push(spec);
        }
    }
    for spec in &specs {
        let outcome = common::certify(spec);
        let Some(decay) = outcome.certificate.decay.as_ref() else {
            continue;
        };
        if !(decay.lambda_bound < 1.0) {
            return Err(format!(
                "{}: certified bound {} is not below 1",
                spec.family(),
                decay.lambda_bound
            ));
        }
        let weights: Option<Vec<f64>> = match outcome.route {
            CertificationRoute::Rescaled => outcome
                .certificate
                .witness
                .as_ref()
                .map(|w| w.iter().map(ddes_core::rat_to_f64).collect()),
            _ => None,
        };
        let system = spec.lower();
        let profile = spec.row_lipschitz(weights.as_deref()).map_err(err)?;
        let leakage_abs = |i: usize, m: i64| system.leakage_at(i, m).abs();
        let lipschitz = |i: usize, m: i64| profile(i, m);
        let inputs = H2Inputs {
            channels: spec.channels(),
            tau: spec.leakage_delay(),
            window_start: spec.window_start(),
            leakage_abs: &leakage_abs,
            lipschitz: &lipschitz,
        };
        let est = ddes_core::lambda_numeric(&inputs, decay.c, 200).map_err(err)?;
        let allowance = numeric_tolerance(decay.lambda_bound);
        if est.value > decay.lambda_bound + allowance {
            return Err(format!(
                "{}: direct estimate {:.12} exceeds certified bound {:.12}",
                spec.family(),
                est.value,
                decay.lambda_bound
            ));
        }
        worst_ratio = worst_ratio.max(est.value / decay.lambda_bound);
        checked += 1;
    }
    Ok(format!(
        "{compared} terms match the direct evaluator to 1e-12 (max gap {max_gap:.1e}); \
         {checked} certified systems keep the estimate below the bound (worst ratio \
         {worst_ratio:.3})"
    ))
}
