//! Seeded random model generators shared by the acceptance criteria.
//!
//! Interaction strength is controlled through an exact rational `budget`:
//! every interaction-weight amplitude is bounded by `budget / (N * terms)`,
//! so row sums stay below `budget`. Small budgets make most draws
//! certifiable, large ones mostly not; both regimes are exercised.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use ddes_core::models::{
    Activation, BamLayers, BamSpec, DelayDescriptor, Descriptor, HighOrderParts, HighOrderSpec,
    HopfieldSpec, ModelSpec,
};
use ddes_core::rational::{rat, rat_int, Rat};
use ddes_core::{certify_system, CertificationOutcome, HistoryState};

pub fn signed(rng: &mut ChaCha8Rng, v: Rat) -> Rat {
    if rng.gen_bool(0.5) {
        -v
    } else {
        v
    }
}

/// A random rational in `[0, cap]` with denominator at most `16 * den(cap)`.
pub fn rat_below(rng: &mut ChaCha8Rng, cap: &Rat) -> Rat {
    cap * rat(rng.gen_range(0..=16), 16)
}

/// A random coefficient stream with `analytic_sup() <= cap`.
pub fn descriptor_bounded(rng: &mut ChaCha8Rng, cap: &Rat) -> Descriptor {
    match rng.gen_range(0..4) {
        0 => {
            let v = rat_below(rng, cap);
            Descriptor::Constant(signed(rng, v))
        }
        1 => {
            let len = rng.gen_range(1..=6);
            Descriptor::Table(
                (0..len)
                    .map(|_| {
                        let v = rat_below(rng, cap);
                        signed(rng, v)
                    })
                    .collect(),
            )
        }
        2 => {
            let v = rat_below(rng, cap);
            Descriptor::Cosine {
                amplitude: signed(rng, v),
                period: rng.gen_range(1..=12),
            }
        }
        _ => {
            let v = rat_below(rng, cap);
            Descriptor::Sine {
                amplitude: signed(rng, v),
                period: rng.gen_range(1..=12),
            }
        }
    }
}

pub fn random_delay(rng: &mut ChaCha8Rng, max: u32) -> DelayDescriptor {
    if rng.gen_bool(0.5) {
        DelayDescriptor::constant(rng.gen_range(0..=max))
    } else {
        let len = rng.gen_range(1..=4);
        let table = (0..len)
            .map(|_| rat_int(i64::from(rng.gen_range(0..=max))))
            .collect();
        DelayDescriptor::new(Descriptor::Table(table)).expect("integer table")
    }
}

pub fn random_activation(rng: &mut ChaCha8Rng) -> Activation {
    match rng.gen_range(0..3) {
        0 => Activation::Tanh,
        1 => Activation::Arctan,
        _ => Activation::SatLinear,
    }
}

/// Random network with per-row interaction sums below `budget`.
pub fn random_hopfield(
    rng: &mut ChaCha8Rng,
    max_channels: usize,
    max_tau: u32,
    budget: &Rat,
) -> HopfieldSpec {
    let n = rng.gen_range(1..=max_channels);
    let tau = rng.gen_range(0..=max_tau);
    let terms = rng.gen_range(1..=2);
    let cell_cap = budget / rat_int((n * terms) as i64);

    let leak_cap = rat(2, 5);
    let leakage = (0..n).map(|_| descriptor_bounded(rng, &leak_cap)).collect();
    let weights = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    (0..terms)
                        .map(|_| descriptor_bounded(rng, &cell_cap))
                        .collect()
                })
                .collect()
        })
        .collect();
    let delays = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| (0..terms).map(|_| random_delay(rng, 3)).collect())
                .collect()
        })
        .collect();
    let activations = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| (0..terms).map(|_| random_activation(rng)).collect())
                .collect()
        })
        .collect();
    let inputs = (0..n)
        .map(|_| descriptor_bounded(rng, &rat_int(1)))
        .collect();
    HopfieldSpec::new(tau, leakage, weights, delays, activations, inputs)
        .expect("generator respects the shape rules")
}

pub fn random_bam(rng: &mut ChaCha8Rng, max_layer: usize, max_tau: u32, budget: &Rat) -> BamSpec {
    let n1 = rng.gen_range(1..=max_layer);
    let n2 = rng.gen_range(1..=max_layer);
    let tau = rng.gen_range(0..=max_tau);
    let x_cap = budget / rat_int(2 * n2 as i64);
    let y_cap = budget / rat_int(2 * n1 as i64);
    let leak_cap = rat(2, 5);

    let matrix = |rng: &mut ChaCha8Rng, rows: usize, cols: usize, cap: &Rat| {
        (0..rows)
            .map(|_| (0..cols).map(|_| descriptor_bounded(rng, cap)).collect())
            .collect::<Vec<Vec<_>>>()
    };
    let delays = |rng: &mut ChaCha8Rng, rows: usize, cols: usize| {
        (0..rows)
            .map(|_| (0..cols).map(|_| random_delay(rng, 3)).collect())
            .collect::<Vec<Vec<_>>>()
    };

    BamSpec::new(BamLayers {
        leakage_delay: tau,
        x_leakage: (0..n1)
            .map(|_| descriptor_bounded(rng, &leak_cap))
            .collect(),
        y_leakage: (0..n2)
            .map(|_| descriptor_bounded(rng, &leak_cap))
            .collect(),
        x_instant: matrix(rng, n1, n2, &x_cap),
        x_delayed: matrix(rng, n1, n2, &x_cap),
        x_delays: delays(rng, n1, n2),
        x_inputs: (0..n1)
            .map(|_| descriptor_bounded(rng, &rat_int(1)))
            .collect(),
        y_instant: matrix(rng, n2, n1, &y_cap),
        y_delayed: matrix(rng, n2, n1, &y_cap),
        y_delays: delays(rng, n2, n1),
        y_inputs: (0..n2)
            .map(|_| descriptor_bounded(rng, &rat_int(1)))
            .collect(),
        f_activations: (0..n2).map(|_| random_activation(rng)).collect(),
        g_activations: (0..n1).map(|_| random_activation(rng)).collect(),
    })
    .expect("generator respects the shape rules")
}

pub fn random_high_order(
    rng: &mut ChaCha8Rng,
    max_channels: usize,
    max_tau: u32,
    budget: &Rat,
) -> HighOrderSpec {
    let n = rng.gen_range(1..=max_channels);
    let tau = rng.gen_range(0..=max_tau);
    // First-order terms get half the budget over n cells; the second-order
    // row sum involves n^2 cells and two bounded activation factors.
    let first_cap = budget / rat_int(2 * n as i64);
    let second_cap = budget / rat_int(4 * (n * n) as i64);
    let leak_cap = rat(2, 5);

    let cube = |rng: &mut ChaCha8Rng, cap: &Rat| {
        (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| (0..n).map(|_| descriptor_bounded(rng, cap)).collect())
                    .collect()
            })
            .collect::<Vec<Vec<Vec<_>>>>()
    };
    let delay_cube = |rng: &mut ChaCha8Rng| {
        (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| (0..n).map(|_| random_delay(rng, 3)).collect())
                    .collect()
            })
            .collect::<Vec<Vec<Vec<_>>>>()
    };

    HighOrderSpec::new(HighOrderParts {
        leakage_delay: tau,
        leakage: (0..n).map(|_| descriptor_bounded(rng, &leak_cap)).collect(),
        first_weights: (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| descriptor_bounded(rng, &first_cap))
                    .collect()
            })
            .collect(),
        first_delays: (0..n)
            .map(|_| (0..n).map(|_| random_delay(rng, 3)).collect())
            .collect(),
        second_weights: cube(rng, &second_cap),
        second_delays_left: delay_cube(rng),
        second_delays_right: delay_cube(rng),
        f_activations: (0..n).map(|_| random_activation(rng)).collect(),
        g_activations: (0..n).map(|_| random_activation(rng)).collect(),
        inputs: (0..n)
            .map(|_| descriptor_bounded(rng, &rat_int(1)))
            .collect(),
    })
    .expect("generator respects the shape rules")
}

/// Any family, tight or loose budget.
pub fn random_spec(rng: &mut ChaCha8Rng) -> ModelSpec {
    let budget = if rng.gen_bool(0.6) {
        rat(1, 2)
    } else {
        rat(3, 2)
    };
    match rng.gen_range(0..3) {
        0 => ModelSpec::Hopfield(random_hopfield(rng, 3, 3, &budget)),
        1 => ModelSpec::Bam(random_bam(rng, 2, 3, &budget)),
        _ => ModelSpec::HighOrder(random_high_order(rng, 2, 3, &budget)),
    }
}

/// Certification outcome of a spec, unwrapped.
pub fn certify(spec: &ModelSpec) -> CertificationOutcome {
    let lip = spec
        .lipschitz_data()
        .expect("generator keeps leakage below 1");
    certify_system(&lip, spec.leakage_delay(), spec.window_start())
        .expect("well-formed data certifies or not without erroring")
}

/// Draws Hopfield specs until one is certified (any route).
pub fn certified_hopfield(rng: &mut ChaCha8Rng, max_channels: usize, max_tau: u32) -> HopfieldSpec {
    loop {
        let spec = random_hopfield(rng, max_channels, max_tau, &rat(1, 2));
        let outcome = certify(&ModelSpec::Hopfield(spec.clone()));
        if outcome.certificate.decay.is_some() {
            return spec;
        }
    }
}

/// A random history window with samples in `[-2, 2]`.
pub fn random_window(rng: &mut ChaCha8Rng, channels: usize, window_start: i64) -> HistoryState {
    let len = (1 - window_start) as usize;
    let samples = (0..channels)
        .map(|_| (0..len).map(|_| rng.gen_range(-2.0..2.0)).collect())
        .collect();
    HistoryState::new(window_start, samples).expect("well-formed window")
}
