//! Implementations of the subcommands.
//!
//! Exit codes, shared by every subcommand:
//!
//! * 0: success (for `certify`: the model is certified)
//! * 1: a computation on valid input failed or a check did not pass
//!   (`certify` on an uncertified model, a diverging trajectory, a bound
//!   violation)
//! * 2: unusable input (unreadable or malformed model files, bad seeds)
//! * 3: the periodic-orbit iteration did not converge
//! * 4: refusal: the model carries no certificate and `--force` was absent
//!
//! All user-facing channel and pair numbers are 1-based; library indices
//! stay 0-based.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ddes_core::{
    certify_system, check_exponential_bound, check_lemma_inequality, contraction_power,
    find_periodic_orbit, lambda_numeric, numeric_tolerance, parse_model, simulate,
    BoundCheckReport, CertificationOutcome, CertificationRoute, DecayData, EngineError, H2Inputs,
    HistoryState, ModelSpec, PeriodicOrbitResult, Verdict, TWO_NEURON_PERIODIC_TOML,
};

use crate::csvio::{self, SeriesFormat, Table};
use crate::report::{
    self, CertificateReport, CheckBlock, ContractionBlock, LambdaBlock, PeriodicReport,
    VerifyReport,
};
use crate::seeds;

pub enum CliError {
    /// Unusable input; maps to exit code 2.
    Config(String),
    /// A computation failed on structurally valid input; exit code 1.
    Run(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Run(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Run(m) => m,
        }
    }
}

/// Successful command runs still pick their exit code (checks may fail).
pub type CmdResult = Result<u8, CliError>;

fn config<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Config(e.to_string())
}

fn run_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Run(e.to_string())
}

fn engine_err(e: EngineError) -> CliError {
    match e {
        EngineError::Domain(_) | EngineError::State(_) => CliError::Config(e.to_string()),
        other => CliError::Run(other.to_string()),
    }
}

fn write_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Config(format!("cannot write {}: {e}", path.display()))
}

fn load_model(path: &Path) -> Result<ModelSpec, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_model(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn ensure_dir(path: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(path)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", path.display())))
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

// ---------------------------------------------------------------------------
// certification (shared by certify, periodic, verify-bounds, example)

pub struct Certification {
    pub outcome: CertificationOutcome,
    pub report: CertificateReport,
    /// Witness as positive floats when the rescaled route decided the
    /// verdict; trajectories of the rescaled system are `x_i / scale[i]`.
    pub scale: Option<Vec<f64>>,
}

impl Certification {
    pub fn certified(&self) -> bool {
        self.outcome.certificate.verdict == Verdict::Certified
    }
}

/// Runs the certificate pipeline on a model. `lambda_depth > 0` additionally
/// evaluates the decay-weighted sums directly (diagnostic only).
pub fn certify_model(spec: &ModelSpec, lambda_depth: i64) -> Result<Certification, CliError> {
    let lip = spec.lipschitz_data().map_err(config)?;
    let outcome =
        certify_system(&lip, spec.leakage_delay(), spec.window_start()).map_err(run_err)?;

    let scale = match outcome.route {
        CertificationRoute::Rescaled => outcome
            .certificate
            .witness
            .as_deref()
            .map(report::witness_f64),
        _ => None,
    };

    let mut lambda_block = None;
    let mut contraction = None;
    if let Some(decay) = &outcome.certificate.decay {
        if lambda_depth > 0 {
            let system = spec.lower();
            let profile = spec.row_lipschitz(scale.as_deref()).map_err(config)?;
            let leakage_abs = |i: usize, m: i64| system.leakage_at(i, m).abs();
            let lipschitz = |i: usize, m: i64| profile(i, m);
            let inputs = H2Inputs {
                channels: spec.channels(),
                tau: spec.leakage_delay(),
                window_start: spec.window_start(),
                leakage_abs: &leakage_abs,
                lipschitz: &lipschitz,
            };
            let est = lambda_numeric(&inputs, decay.c, lambda_depth).map_err(run_err)?;
            lambda_block = Some(LambdaBlock::new(
                &est,
                decay.lambda_bound,
                numeric_tolerance(decay.lambda_bound),
            ));
        }
        let omega = spec.period();
        if let Ok(power) = contraction_power(decay.big_c, decay.zeta, omega) {
            let factor = decay.big_c * decay.zeta.powf(power as f64 * f64::from(omega));
            contraction = Some(ContractionBlock {
                period: omega,
                power,
                factor,
            });
        }
    }

    let report = CertificateReport::new(spec, &outcome, lambda_block, contraction);
    Ok(Certification {
        outcome,
        report,
        scale,
    })
}

fn print_certificate(rep: &CertificateReport) {
    let m = &rep.model;
    println!(
        "model: {} ({} channels, leakage delay {}, window [{}, 0], period {})",
        m.family, m.channels, m.leakage_delay, m.window_start, m.period
    );
    println!("leakage bounds: [{}]", rep.leakage_bounds.join(", "));
    println!("lipschitz matrix:");
    for row in &rep.lipschitz_matrix {
        println!("  [{}]", row.join(", "));
    }
    println!("raw margins: [{}]", rep.raw_margins.join(", "));
    println!("comparison matrix:");
    for row in &rep.comparison_matrix {
        println!("  [{}]", row.join(", "));
    }
    println!(
        "leading minors: [{}]",
        rep.m_matrix_test.leading_minors.join(", ")
    );
    println!(
        "nonsingular M-matrix: {}",
        yes_no(rep.m_matrix_test.is_nonsingular_m)
    );
    if let Some(w) = &rep.m_matrix_test.witness {
        println!("witness (M d = 1): [{}]", w.join(", "));
    }
    println!("route: {}", rep.route);
    println!("verdict: {}", rep.verdict);
    println!("margins: [{}]", rep.margins.join(", "));
    if let Some(d) = &rep.decay {
        println!(
            "decay: mu = {:.6e}, c = {:.6e}, zeta = {:.6e}, C = {:.6e}, lambda bound = {:.6e}",
            d.mu, d.c, d.zeta, d.big_c, d.lambda_bound
        );
    }
    if let Some(l) = &rep.lambda {
        println!(
            "lambda numeric: {:.6e} at (channel {}, residue {}, depth {}), tail bound {:.6e}, \
             within certified bound: {}",
            l.value,
            l.channel,
            l.residue,
            l.depth,
            l.tail_bound,
            yes_no(l.within_bound)
        );
    }
    if let Some(c) = &rep.contraction {
        println!(
            "contraction: the {}-step period map contracts strictly after {} applications \
             (factor {:.6e})",
            c.period, c.power, c.factor
        );
    }
}

fn write_certificate(
    cert: &Certification,
    out: &Path,
    format: SeriesFormat,
) -> Result<PathBuf, CliError> {
    let path = out.join("certificate.json");
    let json = serde_json::to_value(&cert.report).map_err(run_err)?;
    csvio::write_json_value(&path, &json).map_err(|e| write_err(&path, e))?;
    match format {
        SeriesFormat::Json => {
            println!("{}", serde_json::to_string_pretty(&json).map_err(run_err)?)
        }
        SeriesFormat::Csv => print_certificate(&cert.report),
    }
    println!("certificate: {}", path.display());
    Ok(path)
}

pub fn cmd_certify(model: &Path, out: &Path, format: SeriesFormat, lambda_depth: i64) -> CmdResult {
    let spec = load_model(model)?;
    ensure_dir(out)?;
    let cert = certify_model(&spec, lambda_depth)?;
    write_certificate(&cert, out, format)?;
    Ok(if cert.certified() { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// simulate

fn initial_window(
    spec: &ModelSpec,
    seed: Option<&str>,
    seed_csv: Option<&Path>,
) -> Result<HistoryState, CliError> {
    match (seed, seed_csv) {
        (Some(s), None) => {
            seeds::parse_seed(s, spec.channels(), spec.window_start()).map_err(CliError::Config)
        }
        (None, Some(p)) => csvio::read_initial_window(p, spec.channels(), spec.window_start())
            .map_err(CliError::Config),
        (None, None) => HistoryState::zero(spec.channels(), spec.window_start()).map_err(config),
        (Some(_), Some(_)) => Err(CliError::Config(
            "use either --seed or --seed-csv, not both".into(),
        )),
    }
}

pub fn cmd_simulate(
    model: &Path,
    horizon: i64,
    seed: Option<&str>,
    seed_csv: Option<&Path>,
    out: &Path,
    format: SeriesFormat,
) -> CmdResult {
    let spec = load_model(model)?;
    let system = spec.lower();
    let init = initial_window(&spec, seed, seed_csv)?;
    let traj = simulate(&system, &init, horizon).map_err(engine_err)?;
    ensure_dir(out)?;
    let table = csvio::trajectory_table(&traj, spec.channels(), spec.window_start(), horizon);
    let path = out.join(format!("trajectory.{}", format.extension()));
    table
        .write(&path, format)
        .map_err(|e| write_err(&path, e))?;
    let final_sup = (0..spec.channels())
        .map(|i| traj.value(i, horizon).abs())
        .fold(0.0, f64::max);
    println!(
        "simulated {} step(s) of {} channel(s); final sup norm {:.6e}",
        horizon,
        spec.channels(),
        final_sup
    );
    println!("trajectory: {}", path.display());
    Ok(0)
}

// ---------------------------------------------------------------------------
// periodic

fn refuse_uncertified(cert: &Certification, action: &str) -> u8 {
    eprintln!(
        "the model is not certified (verdict: {}); {action} is only meaningful under a \
         certificate. Pass --force to proceed anyway.",
        cert.outcome.certificate.verdict.as_str()
    );
    4
}

/// Writes `orbit.*` and `periodic.json`, prints the summary.
fn emit_periodic(
    res: &PeriodicOrbitResult,
    spec: &ModelSpec,
    tol: f64,
    out: &Path,
    format: SeriesFormat,
) -> Result<(), CliError> {
    let omega = spec.period();
    let table = csvio::trajectory_table(
        &res.orbit,
        spec.channels(),
        spec.window_start(),
        i64::from(omega),
    );
    let orbit_path = out.join(format!("orbit.{}", format.extension()));
    table
        .write(&orbit_path, format)
        .map_err(|e| write_err(&orbit_path, e))?;

    let rep = PeriodicReport {
        format_version: report::FORMAT_VERSION,
        period: omega,
        iterations: res.iterations,
        residual: res.residual,
        contraction_estimate: res.contraction_estimate,
        tolerance: tol,
        amplitude: res.fixed_point.sup_norm(),
    };
    let json_path = out.join("periodic.json");
    let json = serde_json::to_value(&rep).map_err(run_err)?;
    csvio::write_json_value(&json_path, &json).map_err(|e| write_err(&json_path, e))?;

    println!(
        "located a {omega}-periodic orbit after {} period-map iteration(s)",
        res.iterations
    );
    println!(
        "residual {:.3e} (tolerance {:.1e}), contraction estimate {:.3e}, amplitude {:.6e}",
        res.residual, tol, res.contraction_estimate, rep.amplitude
    );
    println!("orbit: {}", orbit_path.display());
    println!("summary: {}", json_path.display());
    Ok(())
}

fn emit_residuals(trace: &[f64], out: &Path, format: SeriesFormat) -> Result<PathBuf, CliError> {
    let mut table = Table::new(&["iteration"], vec!["residual".into()]);
    for (k, r) in trace.iter().enumerate() {
        table.push(vec![k as i64 + 1], vec![*r]);
    }
    let path = out.join(format!("residuals.{}", format.extension()));
    table
        .write(&path, format)
        .map_err(|e| write_err(&path, e))?;
    Ok(path)
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_periodic(
    model: &Path,
    tol: f64,
    max_iters: u32,
    seed: Option<&str>,
    seed_csv: Option<&Path>,
    force: bool,
    out: &Path,
    format: SeriesFormat,
) -> CmdResult {
    let spec = load_model(model)?;
    ensure_dir(out)?;
    let cert = certify_model(&spec, 0)?;
    if !cert.certified() && !force {
        return Ok(refuse_uncertified(&cert, "a unique periodic orbit"));
    }
    let system = spec.lower();
    let seed_state = match (seed, seed_csv) {
        (None, None) => None,
        _ => Some(initial_window(&spec, seed, seed_csv)?),
    };
    match find_periodic_orbit(&system, seed_state.as_ref(), tol, max_iters) {
        Ok(res) => {
            emit_periodic(&res, &spec, tol, out, format)?;
            Ok(0)
        }
        Err(EngineError::NoConvergence {
            iterations,
            tolerance,
            last,
            trace,
        }) => {
            let path = emit_residuals(&trace, out, format)?;
            eprintln!(
                "no convergence after {iterations} iteration(s): residual {last:.3e} still \
                 above tolerance {tolerance:.1e}"
            );
            eprintln!("residual trace: {}", path.display());
            Ok(3)
        }
        Err(e) => Err(engine_err(e)),
    }
}

// ---------------------------------------------------------------------------
// verify-bounds

fn random_window(rng: &mut ChaCha8Rng, channels: usize, window_start: i64) -> HistoryState {
    let len = (1 - window_start) as usize;
    let samples = (0..channels)
        .map(|_| (0..len).map(|_| rng.gen_range(-2.0..2.0)).collect())
        .collect();
    HistoryState::new(window_start, samples).expect("well-formed random window")
}

fn scale_window(state: &HistoryState, weights: &[f64]) -> Result<HistoryState, String> {
    let samples: Vec<Vec<f64>> = (0..weights.len())
        .map(|i| state.samples(i).iter().map(|v| v / weights[i]).collect())
        .collect();
    HistoryState::new(state.window_start(), samples).map_err(|e| e.to_string())
}

struct PairOutcome {
    envelope: Option<BoundCheckReport>,
    lemma: BoundCheckReport,
}

fn slack_columns() -> Vec<String> {
    ["observed", "bound", "slack"]
        .into_iter()
        .map(String::from)
        .collect()
}

fn check_block(r: &BoundCheckReport) -> CheckBlock {
    CheckBlock {
        pairs_tested: r.pairs_tested,
        max_violation: r.max_violation,
        worst_pair: r.worst_pair + 1,
        pass: r.pass,
    }
}

fn print_check(label: &str, block: &CheckBlock) {
    println!(
        "{label}: min slack {:.3e} (pair {}) -> {}",
        block.max_violation,
        block.worst_pair,
        if block.pass { "pass" } else { "FAIL" }
    );
}

/// Runs the envelope and partial-sum checks over `pairs`, writes the series
/// and `verify.json`, prints a summary. `decay`/`scale` come from the
/// certificate; `decay = None` (uncertified, forced) skips the envelope.
fn run_verification(
    spec: &ModelSpec,
    decay: Option<&DecayData>,
    scale: Option<&[f64]>,
    pairs: &[(HistoryState, HistoryState)],
    horizon: i64,
    out: &Path,
    format: SeriesFormat,
) -> Result<bool, CliError> {
    if horizon < 0 {
        return Err(CliError::Config(format!(
            "horizon must be nonnegative, got {horizon}"
        )));
    }
    let system = spec.lower();
    let scaled_system = match scale {
        Some(w) => Some(system.rescaled(w).map_err(config)?),
        None => None,
    };
    let profile = spec.row_lipschitz(None).map_err(config)?;
    let tau = i64::from(spec.leakage_delay());
    let lemma_depth = (horizon / (tau + 1)).clamp(1, 50) as u32;

    let results: Vec<Result<PairOutcome, String>> = std::thread::scope(|scope| {
        let system = &system;
        let scaled_system = &scaled_system;
        let profile = &profile;
        let handles: Vec<_> = pairs
            .iter()
            .map(|(a, b)| {
                scope.spawn(move || -> Result<PairOutcome, String> {
                    let envelope = match decay {
                        Some(d) => {
                            let report = match (scaled_system, scale) {
                                (Some(sys), Some(w)) => {
                                    let aa = scale_window(a, w)?;
                                    let bb = scale_window(b, w)?;
                                    check_exponential_bound(sys, &aa, &bb, d.big_c, d.zeta, horizon)
                                }
                                _ => {
                                    check_exponential_bound(system, a, b, d.big_c, d.zeta, horizon)
                                }
                            }
                            .map_err(|e| e.to_string())?;
                            Some(report)
                        }
                        None => None,
                    };
                    let lemma =
                        check_lemma_inequality(system, a, b, &|i, m| profile(i, m), lemma_depth)
                            .map_err(|e| e.to_string())?;
                    Ok(PairOutcome { envelope, lemma })
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("bound-check worker panicked"))
            .collect()
    });

    let mut envelope_reports = Vec::new();
    let mut lemma_reports = Vec::new();
    let mut bounds_table = Table::new(&["pair", "m"], slack_columns());
    let mut lemma_table = Table::new(&["pair", "m"], slack_columns());
    for (k, result) in results.into_iter().enumerate() {
        let outcome = result.map_err(|e| CliError::Run(format!("pair {}: {e}", k + 1)))?;
        if let Some(env) = outcome.envelope {
            for s in &env.samples {
                bounds_table.push(
                    vec![k as i64 + 1, s.step],
                    vec![s.observed, s.bound, s.slack],
                );
            }
            envelope_reports.push(env);
        }
        for s in &outcome.lemma.samples {
            lemma_table.push(
                vec![k as i64 + 1, s.step],
                vec![s.observed, s.bound, s.slack],
            );
        }
        lemma_reports.push(outcome.lemma);
    }

    let envelope_block = BoundCheckReport::combine(envelope_reports)
        .as_ref()
        .map(check_block);
    let lemma_block = check_block(
        &BoundCheckReport::combine(lemma_reports).expect("at least one pair is checked"),
    );
    let pass = envelope_block.as_ref().is_none_or(|b| b.pass) && lemma_block.pass;

    println!(
        "checked {} pair(s) over horizon {} (partial-sum depth {})",
        pairs.len(),
        horizon,
        lemma_depth
    );
    match &envelope_block {
        Some(block) => print_check("envelope", block),
        None => println!("envelope: skipped (no certificate)"),
    }
    print_check("partial sums", &lemma_block);

    if envelope_block.is_some() {
        let path = out.join(format!("bounds.{}", format.extension()));
        bounds_table
            .write(&path, format)
            .map_err(|e| write_err(&path, e))?;
        println!("envelope series: {}", path.display());
    }
    let lemma_path = out.join(format!("lemma.{}", format.extension()));
    lemma_table
        .write(&lemma_path, format)
        .map_err(|e| write_err(&lemma_path, e))?;
    println!("partial-sum series: {}", lemma_path.display());

    let verify = VerifyReport {
        format_version: report::FORMAT_VERSION,
        horizon,
        pairs: pairs.len(),
        lemma_depth,
        envelope: envelope_block,
        lemma: lemma_block,
        pass,
    };
    let verify_path = out.join("verify.json");
    let json = serde_json::to_value(&verify).map_err(run_err)?;
    csvio::write_json_value(&verify_path, &json).map_err(|e| write_err(&verify_path, e))?;
    println!("summary: {}", verify_path.display());
    println!("verification: {}", if pass { "pass" } else { "FAIL" });
    Ok(pass)
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_verify_bounds(
    model: &Path,
    horizon: i64,
    seed_pairs: &[String],
    random_pairs: Option<u32>,
    rand_seed: u64,
    force: bool,
    out: &Path,
    format: SeriesFormat,
) -> CmdResult {
    let spec = load_model(model)?;
    ensure_dir(out)?;
    let cert = certify_model(&spec, 0)?;
    if !cert.certified() && !force {
        return Ok(refuse_uncertified(&cert, "checking certified bounds"));
    }

    let mut pairs = Vec::new();
    for s in seed_pairs {
        pairs.push(
            seeds::parse_seed_pair(s, spec.channels(), spec.window_start())
                .map_err(CliError::Config)?,
        );
    }
    let wanted = random_pairs.unwrap_or(if pairs.is_empty() { 8 } else { 0 });
    let mut rng = ChaCha8Rng::seed_from_u64(rand_seed);
    for _ in 0..wanted {
        pairs.push((
            random_window(&mut rng, spec.channels(), spec.window_start()),
            random_window(&mut rng, spec.channels(), spec.window_start()),
        ));
    }
    if pairs.is_empty() {
        return Err(CliError::Config(
            "nothing to check: no --seed-pair given and --pairs 0".into(),
        ));
    }

    let decay = cert.outcome.certificate.decay.clone();
    let pass = run_verification(
        &spec,
        decay.as_ref(),
        cert.scale.as_deref(),
        &pairs,
        horizon,
        out,
        format,
    )?;
    Ok(if pass { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// example

const EXAMPLE_SEEDS: [&str; 3] = ["cos,sin", "exp,const:-1", "-1.5*exp,1.5*cos"];
const EXAMPLE_HORIZON: i64 = 500;
const EXAMPLE_TOL: f64 = 1e-10;
const CONVERGENCE_TARGET: f64 = 1e-6;
const CONVERGENCE_DEADLINE: i64 = 300;

/// Exercises the bundled two-channel model end to end: certify, locate the
/// periodic orbit, drive three different starts into it, then check the
/// certified envelope and partial-sum bounds on their pairwise combinations.
pub fn cmd_example(out: &Path, format: SeriesFormat) -> CmdResult {
    ensure_dir(out)?;
    let model_path = out.join("model.toml");
    std::fs::write(&model_path, TWO_NEURON_PERIODIC_TOML).map_err(|e| write_err(&model_path, e))?;
    let spec = parse_model(TWO_NEURON_PERIODIC_TOML).map_err(run_err)?;
    println!("model: {}", model_path.display());

    println!("\n== certify ==");
    let cert = certify_model(&spec, 200)?;
    write_certificate(&cert, out, format)?;
    if !cert.certified() {
        eprintln!("the bundled model failed to certify");
        return Ok(1);
    }

    println!("\n== periodic orbit ==");
    let system = spec.lower();
    let res = match find_periodic_orbit(&system, None, EXAMPLE_TOL, 500) {
        Ok(res) => res,
        Err(EngineError::NoConvergence {
            iterations,
            tolerance,
            last,
            trace,
        }) => {
            let path = emit_residuals(&trace, out, format)?;
            eprintln!(
                "no convergence after {iterations} iteration(s): residual {last:.3e} still \
                 above tolerance {tolerance:.1e}"
            );
            eprintln!("residual trace: {}", path.display());
            return Ok(3);
        }
        Err(e) => return Err(engine_err(e)),
    };
    emit_periodic(&res, &spec, EXAMPLE_TOL, out, format)?;

    println!("\n== convergence from three starts ==");
    let reference = simulate(&system, &res.fixed_point, EXAMPLE_HORIZON).map_err(engine_err)?;
    let mut starts = Vec::new();
    let mut converged = true;
    for (k, text) in EXAMPLE_SEEDS.iter().enumerate() {
        let init = seeds::parse_seed(text, spec.channels(), spec.window_start())
            .map_err(CliError::Config)?;
        let traj = simulate(&system, &init, EXAMPLE_HORIZON).map_err(engine_err)?;
        let mut table = Table::new(&["m"], vec!["distance".into()]);
        let mut hit = None;
        for m in 0..=EXAMPLE_HORIZON {
            let d = traj
                .window(m)
                .and_then(|w| w.distance(&reference.window(m)?))
                .map_err(run_err)?;
            table.push(vec![m], vec![d]);
            if hit.is_none() && d <= CONVERGENCE_TARGET {
                hit = Some(m);
            }
        }
        let path = out.join(format!("convergence_{}.{}", k + 1, format.extension()));
        table
            .write(&path, format)
            .map_err(|e| write_err(&path, e))?;
        match hit {
            Some(m) if m <= CONVERGENCE_DEADLINE => println!(
                "start {} `{text}`: within {CONVERGENCE_TARGET:.0e} of the orbit by step {m} \
                 ({})",
                k + 1,
                path.display()
            ),
            _ => {
                converged = false;
                println!(
                    "start {} `{text}`: NOT within {CONVERGENCE_TARGET:.0e} by step \
                     {CONVERGENCE_DEADLINE} ({})",
                    k + 1,
                    path.display()
                );
            }
        }
        starts.push(init);
    }

    println!("\n== certified bound checks ==");
    let mut pairs = Vec::new();
    for i in 0..starts.len() {
        for j in (i + 1)..starts.len() {
            pairs.push((starts[i].clone(), starts[j].clone()));
        }
    }
    let decay = cert.outcome.certificate.decay.clone();
    let verified = run_verification(
        &spec,
        decay.as_ref(),
        cert.scale.as_deref(),
        &pairs,
        EXAMPLE_HORIZON,
        out,
        format,
    )?;

    let pass = converged && verified;
    println!("\nexample outcome: {}", if pass { "pass" } else { "FAIL" });
    Ok(if pass { 0 } else { 1 })
}
