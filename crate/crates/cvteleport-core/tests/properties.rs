//! Property suites over randomized network parameters: canonical commutators
//! on every output, input-superposition independence of the counts,
//! closed-form/engine agreement, the classical visibility bound, spectral
//! equivalence, and the amplifier identity.

use cvteleport_core::expr::linear_combine;
use cvteleport_core::interferometer::{
    build_mz, counts_closed_form, engine_counts, engine_report, vmax_classical, MzConfig,
};
use cvteleport_core::spectral::spectral_mz_report;
use cvteleport_core::teleporter::{composite_amplifier, quantum_teleport, TeleporterParams};
use cvteleport_core::{FieldExpression, ModeRegistry, C64};
use proptest::prelude::*;

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

proptest! {
    /// Every output of a randomly parameterized network is a canonical
    /// bosonic operator.
    #[test]
    fn outputs_stay_canonical(
        h in 1.0..4.0f64,
        lambda in 0.0..2.0f64,
        eta_a in 0.2..1.0f64,
        eta_b1 in 0.2..1.0f64,
        eta_b2 in 0.2..1.0f64,
        balance in 0.0..1.0f64,
        entangled: bool,
    ) {
        let mut p = TeleporterParams::quantum(h, lambda)
            .with_epr_loss(eta_b1, eta_b2)
            .with_measurement_loss(eta_a);
        p.entangled = entangled;
        let cfg = MzConfig::single_photon(p).with_balance(balance);
        let net = build_mz(&cfg).unwrap();
        for arm in [&net.h, &net.v] {
            prop_assert!((arm.out_a.commutator_norm() - 1.0).abs() < 1e-12);
            prop_assert!((arm.out_b.commutator_norm() - 1.0).abs() < 1e-12);
        }
    }

    /// Counts do not depend on which polarization superposition carries the
    /// photon.
    #[test]
    fn counts_independent_of_input_superposition(
        h in 1.0..3.0f64,
        lambda in 0.0..1.5f64,
        balance in 0.0..1.0f64,
        xr in -1.0..1.0f64,
        xi in -1.0..1.0f64,
        yr in -1.0..1.0f64,
        yi in -1.0..1.0f64,
    ) {
        let norm = (xr * xr + xi * xi + yr * yr + yi * yi).sqrt();
        prop_assume!(norm > 1e-3);
        let x = C64::new(xr, xi) / norm;
        let y = C64::new(yr, yi) / norm;
        let p = TeleporterParams::quantum(h, lambda);
        let reference = MzConfig::single_photon(p).with_balance(balance);
        let rotated = MzConfig::superposition(p, x, y).with_balance(balance);
        let (a0, b0) = engine_counts(&reference).unwrap();
        let (a1, b1) = engine_counts(&rotated).unwrap();
        prop_assert!((a0 - a1).abs() < 1e-12 && (b0 - b1).abs() < 1e-12);
    }

    /// The closed-form counts agree with the symbolic engine on the
    /// lossless-EPR class it covers.
    #[test]
    fn closed_form_matches_engine(
        h in 1.0..4.0f64,
        lambda in 0.0..2.0f64,
        balance in 0.0..1.0f64,
        nbar in 0.0..4.0f64,
        abstract_input: bool,
    ) {
        let p = TeleporterParams::quantum(h, lambda);
        let cfg = if abstract_input {
            MzConfig::nbar(p, nbar).with_balance(balance)
        } else {
            MzConfig::single_photon(p).with_balance(balance)
        };
        let (ca, cb) = counts_closed_form(&cfg).unwrap();
        let (ea, eb) = engine_counts(&cfg).unwrap();
        prop_assert!((ca - ea).abs() < 1e-10 && (cb - eb).abs() < 1e-10);
    }

    /// No unentangled channel beats the classical visibility bound.
    #[test]
    fn classical_visibility_bounded(
        lambda in 0.0..2.0f64,
        eta_a in 0.2..1.0f64,
        balance in 0.0..1.0f64,
        nbar in 0.05..4.0f64,
    ) {
        let p = TeleporterParams::classical(lambda).with_measurement_loss(eta_a);
        let cfg = MzConfig::nbar(p, nbar).with_balance(balance);
        let rep = engine_report(&cfg).unwrap();
        prop_assert!(rep.visibility <= vmax_classical(nbar).unwrap() + 1e-9);
    }

    /// The homodyne spectral visibility equals the counting visibility on
    /// arbitrary configurations.
    #[test]
    fn spectral_equals_counting(
        h in 1.0..4.0f64,
        lambda in 0.05..2.0f64,
        eta_a in 0.2..1.0f64,
        balance in 0.0..1.0f64,
        nbar in 0.0..4.0f64,
    ) {
        let p = TeleporterParams::quantum(h, lambda).with_measurement_loss(eta_a);
        let cfg = MzConfig::nbar(p, nbar).with_balance(balance);
        let spectral = spectral_mz_report(&cfg).unwrap();
        let counting = engine_report(&cfg).unwrap();
        prop_assert!((spectral.visibility - counting.visibility).abs() < 1e-10);
    }

    /// The four-element amplifier equals its direct Bogoliubov form, and the
    /// teleporter built from it stays canonical.
    #[test]
    fn amplifier_equals_direct_form(g in 1.0..50.0f64) {
        let mut reg = ModeRegistry::new();
        let a = reg.register("a_in");
        let v = reg.register("b1");
        let a_in = FieldExpression::identity(&reg, a).unwrap();
        let b1 = FieldExpression::identity(&reg, v).unwrap();
        let composite = composite_amplifier(&a_in, &b1, g).unwrap();
        let direct = linear_combine(&[
            (re(g.sqrt()), &a_in),
            (re((g - 1.0).sqrt()), &b1.dagger()),
        ])
        .unwrap();
        prop_assert!((composite.ann_coeff(a) - direct.ann_coeff(a)).norm() < 1e-12);
        prop_assert!((composite.cre_coeff(v) - direct.cre_coeff(v)).norm() < 1e-12);
        prop_assert!(composite.ann_coeff(v).norm() < 1e-12);
        prop_assert!(composite.cre_coeff(a).norm() < 1e-12);
    }

    /// Teleporting twice in a row still yields a canonical operator (channel
    /// composability).
    #[test]
    fn composed_channels_stay_canonical(
        h1 in 1.0..3.0f64,
        h2 in 1.0..3.0f64,
        l1 in 0.1..1.5f64,
        l2 in 0.1..1.5f64,
    ) {
        let mut reg = ModeRegistry::new();
        let a = reg.register("a_in");
        let e = FieldExpression::identity(&reg, a).unwrap();
        let first = quantum_teleport(&e, &TeleporterParams::quantum(h1, l1), &mut reg).unwrap();
        let second =
            quantum_teleport(&first, &TeleporterParams::quantum(h2, l2), &mut reg).unwrap();
        prop_assert!((second.commutator_norm() - 1.0).abs() < 1e-12);
        prop_assert!((second.ann_coeff(a).re - l1 * l2).abs() < 1e-12);
    }
}
