//! Bundled example model.

use super::{parse_model, HopfieldSpec, ModelSpec};

/// TOML text of the bundled two-channel periodic network. The same text is
/// what `ddes example` writes, so file-based workflows can start from it.
pub const TWO_NEURON_PERIODIC_TOML: &str = include_str!("../../fixtures/two_neuron_periodic.toml");

/// The bundled two-channel periodic network, parsed.
///
/// Its raw dominance margins are `(1/3, -1/6)`, so only the rescaling route
/// certifies it; the comparison matrix has the positive witness `(6, 12)`.
/// All coefficient streams share period 10 and the largest delay is 3.
pub fn two_neuron_periodic() -> HopfieldSpec {
    match parse_model(TWO_NEURON_PERIODIC_TOML).expect("bundled model parses") {
        ModelSpec::Hopfield(spec) => spec,
        other => unreachable!("bundled model has family {}", other.family()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificates::{certify_m_matrix, certify_system, CertificationRoute, Verdict};
    use crate::rational::{rat, rat_int};

    #[test]
    fn bundled_model_shape() {
        let spec = two_neuron_periodic();
        assert_eq!(spec.channels(), 2);
        assert_eq!(spec.terms(), 2);
        assert_eq!(spec.leakage_delay(), 2);
        assert_eq!(spec.window_start(), -3);
        assert_eq!(spec.period(), 10);
    }

    #[test]
    fn bundled_model_certificate_data() {
        let spec = two_neuron_periodic();
        let lip = spec.lipschitz_data().unwrap();
        assert_eq!(lip.c_plus(), &[rat(1, 4), rat(1, 12)]);
        assert_eq!(lip.h()[0], vec![rat(1, 4), rat(1, 6)]);
        assert_eq!(lip.h()[1], vec![rat(1, 2), rat(7, 12)]);

        let m = spec.m_matrix().unwrap();
        assert_eq!(m[0], vec![rat(1, 2), rat(-1, 6)]);
        assert_eq!(m[1], vec![rat(-1, 2), rat(1, 3)]);
        let report = certify_m_matrix(&m).unwrap();
        assert!(report.is_z_matrix && report.is_nonsingular_m);
        assert_eq!(report.leading_minors, vec![rat(1, 2), rat(1, 12)]);
        assert_eq!(report.witness, Some(vec![rat_int(6), rat_int(12)]));

        let outcome = certify_system(&lip, spec.leakage_delay(), spec.window_start()).unwrap();
        assert_eq!(outcome.route, CertificationRoute::Rescaled);
        assert_eq!(outcome.certificate.verdict, Verdict::Certified);
        assert_eq!(outcome.certificate.margins, vec![rat(1, 6), rat(1, 12)]);
        let decay = outcome.certificate.decay.as_ref().unwrap();
        assert!(decay.zeta < 1.0 && decay.lambda_bound < 1.0);
    }

    #[test]
    fn sampled_streams_match_closed_forms() {
        let spec = two_neuron_periodic();
        let system = spec.lower();
        let tau = std::f64::consts::TAU;
        for m in 0..20i64 {
            let phase = tau * (m % 10) as f64 / 10.0;
            assert_eq!(system.leakage_at(0, m), 0.25 * phase.cos());
            assert_eq!(system.leakage_at(1, m), (1.0 / 12.0) * phase.sin());
        }
    }
}
