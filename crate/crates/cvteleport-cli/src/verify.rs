//! Self-contained verification suites. Each suite reruns a set of
//! independent checks at fixed tolerances and reports one PASS/FAIL line per
//! check; tolerances are part of the contract and are never relaxed here.

use clap::ValueEnum;
use cvteleport_core::experiments::{
    cheat_demo, cloning_visibility, conditional_visibility, CloneChoice, PairSourceSpec,
};
use cvteleport_core::interferometer::{
    engine_report, lambda_max, lambda_max_lossy, optimize_gain_numeric, vmax_classical,
    FreeParams, MzConfig,
};
use cvteleport_core::oracle::{oracle_visibility, LEAKAGE_LIMIT};
use cvteleport_core::spectral::{
    coherent_signal_input, sideband_nbar, spectral_mz_report, squeezed_input,
};
use cvteleport_core::teleporter::{lambda_opt, lambda_opt_bob_loss, TeleporterParams};
use cvteleport_core::ModeRegistry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    #[value(name = "closed_forms")]
    ClosedForms,
    Oracle,
    Cloning,
    Cheat,
    #[value(name = "spectral_equiv")]
    SpectralEquiv,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::ClosedForms => "closed_forms",
            Suite::Oracle => "oracle",
            Suite::Cloning => "cloning",
            Suite::Cheat => "cheat",
            Suite::SpectralEquiv => "spectral_equiv",
        }
    }
}

pub struct Check {
    pub name: String,
    pub pass: bool,
    pub measured: f64,
    pub tolerance: f64,
}

impl Check {
    fn within(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            pass: measured.abs() <= tolerance,
            measured,
            tolerance,
        }
    }
}

pub struct SuiteReport {
    pub suite: &'static str,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "{} {} measured={:.3e} tol={:.0e}\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.measured,
                c.tolerance
            ));
        }
        out.push_str(&format!(
            "suite {}: {}\n",
            self.suite,
            if self.passed() { "PASS" } else { "FAIL" }
        ));
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "suite": self.suite,
            "passed": self.passed(),
            "checks": self.checks.iter().map(|c| serde_json::json!({
                "name": c.name,
                "pass": c.pass,
                "measured": c.measured,
                "tolerance": c.tolerance,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Runs one suite. `chi` sets the pair-source strength used by the cheat
/// and conditional checks; the ideal results hold for any 0 < χ ≪ 1.
pub fn run_suite(suite: Suite, chi: f64) -> Result<SuiteReport, String> {
    let checks = match suite {
        Suite::ClosedForms => suite_closed_forms()?,
        Suite::Oracle => suite_oracle()?,
        Suite::Cloning => suite_cloning()?,
        Suite::Cheat => suite_cheat(chi)?,
        Suite::SpectralEquiv => suite_spectral(chi)?,
    };
    Ok(SuiteReport { suite: suite.name(), checks })
}

fn suite_closed_forms() -> Result<Vec<Check>, String> {
    let mut checks = Vec::new();

    // Classical channel: maximum visibility √(1/5) at λ = 1/√5.
    let base = MzConfig::single_photon(TeleporterParams::classical(0.5));
    let opt = optimize_gain_numeric(&base, FreeParams::Lambda).map_err(|e| e.to_string())?;
    checks.push(Check::within(
        "classical_max_visibility",
        opt.visibility - 0.2f64.sqrt(),
        1e-9,
    ));
    checks.push(Check::within(
        "classical_argmax_lambda",
        opt.lambda - 1.0 / 5f64.sqrt(),
        1e-6,
    ));

    // Balanced teleporter reaches unit visibility at λ_opt, η = λ_opt².
    for &h in &[1.05, 1.125, 2.0, 10.0] {
        let lam = lambda_opt(h);
        let cfg =
            MzConfig::single_photon(TeleporterParams::quantum(h, lam)).with_balance(lam * lam);
        let rep = engine_report(&cfg).map_err(|e| e.to_string())?;
        checks.push(Check::within(
            format!("balanced_unit_visibility_h={h}"),
            rep.visibility - 1.0,
            1e-12,
        ));
    }

    // Classical optimum versus input flux.
    for &nbar in &[0.25, 1.0, 4.0] {
        let base = MzConfig::nbar(TeleporterParams::classical(0.5), nbar);
        let opt = optimize_gain_numeric(&base, FreeParams::Lambda).map_err(|e| e.to_string())?;
        checks.push(Check::within(
            format!("classical_flux_optimum_nbar={nbar}"),
            opt.visibility - vmax_classical(nbar).map_err(|e| e.to_string())?,
            1e-9,
        ));
        checks.push(Check::within(
            format!("classical_flux_argmax_nbar={nbar}"),
            opt.lambda - lambda_max(1.0, nbar).map_err(|e| e.to_string())?,
            1e-6,
        ));
    }

    // Lossy-EPR gain optimum matches the numeric argmax.
    for &h in &[1.125, 2.0] {
        for &eta_b in &[0.25, 0.5, 0.9] {
            let p = TeleporterParams::quantum(h, 0.5).with_epr_loss(eta_b, eta_b);
            let opt = optimize_gain_numeric(&MzConfig::single_photon(p), FreeParams::Lambda)
                .map_err(|e| e.to_string())?;
            checks.push(Check::within(
                format!("lossy_argmax_h={h}_eta_b={eta_b}"),
                opt.lambda - lambda_max_lossy(h, eta_b).map_err(|e| e.to_string())?,
                1e-6,
            ));
        }
    }

    // Loss on Bob's beam alone: rebalancing restores unit visibility.
    for &(h, eta_b2) in &[(1.125, 0.5), (2.0, 0.3), (2.0, 0.9)] {
        let lam = lambda_opt_bob_loss(h, eta_b2).map_err(|e| e.to_string())?;
        let p = TeleporterParams::quantum(h, lam).with_epr_loss(1.0, eta_b2);
        let rep = engine_report(&MzConfig::single_photon(p).with_balance(lam * lam))
            .map_err(|e| e.to_string())?;
        checks.push(Check::within(
            format!("bob_loss_rebalance_h={h}_eta_b2={eta_b2}"),
            rep.visibility - 1.0,
            1e-10,
        ));
    }

    Ok(checks)
}

fn suite_oracle() -> Result<Vec<Check>, String> {
    let mut checks = Vec::new();

    // Classical optimum from the truncated dense simulation.
    let cfg = MzConfig::single_photon(TeleporterParams::classical(1.0 / 5f64.sqrt()));
    let rep = oracle_visibility(&cfg, 10).map_err(|e| e.to_string())?;
    checks.push(Check::within(
        "oracle_classical_optimum",
        rep.visibility - 0.2f64.sqrt(),
        1e-5,
    ));

    // Balanced teleporter point.
    let lam = lambda_opt(1.125);
    let cfg = MzConfig::single_photon(TeleporterParams::quantum(1.125, lam))
        .with_balance(lam * lam);
    let rep = oracle_visibility(&cfg, 10).map_err(|e| e.to_string())?;
    checks.push(Check::within(
        "oracle_balanced_unit_visibility",
        rep.visibility - 1.0,
        1e-5,
    ));

    // Engine agreement across the curve grid, with the cutoff deepened
    // where the added-photon flux β² = (λ√H − √(H−1))² is large.
    for &h in &[1.0, 1.125, 3.025] {
        for &lam in &[0.1, 0.45, 0.75, 1.05] {
            let cfg = MzConfig::single_photon(TeleporterParams::quantum(h, lam));
            let engine = engine_report(&cfg).map_err(|e| e.to_string())?;
            let beta = lam * h.sqrt() - (h - 1.0).sqrt();
            let n_max = if beta * beta > 0.3 { 26 } else { 12 };
            let oracle = oracle_visibility(&cfg, n_max).map_err(|e| e.to_string())?;
            checks.push(Check::within(
                format!("oracle_leakage_h={h}_lambda={lam}"),
                oracle.leakage.unwrap_or(0.0),
                LEAKAGE_LIMIT,
            ));
            checks.push(Check::within(
                format!("oracle_engine_gap_h={h}_lambda={lam}"),
                oracle.visibility - engine.visibility,
                1e-5,
            ));
        }
    }

    Ok(checks)
}

fn suite_cloning() -> Result<Vec<Check>, String> {
    let mut checks = Vec::new();
    let tele = TeleporterParams::quantum(1.125, 0.5);
    let reference = engine_report(&MzConfig::single_photon(tele))
        .map_err(|e| e.to_string())?
        .visibility;
    for (choice, tag) in [(CloneChoice::First, "first"), (CloneChoice::Second, "second")] {
        let v = cloning_visibility(&tele, 1.0, 1e-3, choice)
            .map_err(|e| e.to_string())?
            .visibility;
        checks.push(Check::within(
            format!("clone_{tag}_gap_eps=1e-3"),
            v - reference,
            5e-3,
        ));
        // Convergence: the ε = 1e-4 gap must sit an order below ε = 1e-3.
        let v4 = cloning_visibility(&tele, 1.0, 1e-4, choice)
            .map_err(|e| e.to_string())?
            .visibility;
        checks.push(Check::within(
            format!("clone_{tag}_gap_eps=1e-4"),
            v4 - reference,
            5e-4,
        ));
    }
    Ok(checks)
}

fn suite_cheat(chi: f64) -> Result<Vec<Check>, String> {
    let outcome = cheat_demo(&PairSourceSpec::new(chi).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    Ok(vec![
        Check::within("cheat_fidelity_deficit", outcome.fidelity - 1.0, 1e-10),
        Check::within("cheat_visibility", outcome.visibility.visibility, 1e-10),
        Check {
            name: "cheat_counts_nondegenerate".into(),
            pass: !outcome.visibility.degenerate,
            measured: if outcome.visibility.degenerate { 1.0 } else { 0.0 },
            tolerance: 0.0,
        },
    ])
}

fn suite_spectral(chi: f64) -> Result<Vec<Check>, String> {
    let mut checks = Vec::new();
    let mut worst = 0.0f64;
    for &h in &[1.0, 1.125, 3.025] {
        for i in 0..=40 {
            let lam = i as f64 * 0.05;
            let cfg = MzConfig::single_photon(TeleporterParams::quantum(h, lam));
            let spectral = spectral_mz_report(&cfg).map_err(|e| e.to_string())?;
            let counting = engine_report(&cfg).map_err(|e| e.to_string())?;
            worst = worst.max((spectral.visibility - counting.visibility).abs());
        }
    }
    checks.push(Check::within("spectral_vs_counting_worst_gap", worst, 1e-10));

    let mut reg = ModeRegistry::new();
    let (_, coherent) = coherent_signal_input(2.0, &mut reg).map_err(|e| e.to_string())?;
    checks.push(Check::within(
        "coherent_sideband_nbar",
        sideband_nbar(&coherent).map_err(|e| e.to_string())? - 1.0,
        1e-12,
    ));
    let mut reg = ModeRegistry::new();
    let (_, squeezed) = squeezed_input(2.0 + 3f64.sqrt(), &mut reg).map_err(|e| e.to_string())?;
    checks.push(Check::within(
        "squeezed_sideband_nbar",
        sideband_nbar(&squeezed).map_err(|e| e.to_string())? - 1.0,
        1e-12,
    ));

    // Also check the conditional pair-source curve, the spectral path's
    // natural single-photon proxy; the residual is bounded by χ².
    let spec = PairSourceSpec::new(chi).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for i in 0..=20 {
        let lam = i as f64 * 0.1;
        let tele = TeleporterParams::quantum(1.125, lam);
        let cond = conditional_visibility(&spec, &tele, 1.0).map_err(|e| e.to_string())?;
        let exact = engine_report(&MzConfig::single_photon(tele)).map_err(|e| e.to_string())?;
        worst = worst.max((cond.visibility - exact.visibility).abs());
    }
    checks.push(Check::within("conditional_vs_single_photon_worst_gap", worst, chi * chi));

    Ok(checks)
}
