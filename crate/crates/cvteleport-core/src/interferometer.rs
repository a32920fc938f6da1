//! Mach-Zehnder interferometer with a teleporter in one arm.
//!
//! The teleported arm is `c_T`, the other arm may carry a balancing
//! attenuation `η`; the outputs are `(c_T ± d_A)/√2`. Photon counts at the
//! outputs sum the two polarization (or sideband) components. With lossless
//! EPR beams the counts have the closed form
//! `n̄·0.25(√η ± λ)² + (λ√H − √(H−1))²`, which the symbolic engine reproduces
//! for any input carrying the same average photon number.
//!
//! With symmetric EPR-arm loss η_b the maximum-visibility gain used here is
//! `λ_max = √(1 + 4η_b(H−1)) / √(4(1−η_b) + 4η_bH + 1)`, which the numeric
//! optimizer confirms as the argmax of the count model and which is
//! consistent with the balancing condition `η = (5 − 4η_b)λ²`.

#[cfg(not(feature = "std"))]
use num_traits::Float;

use alloc::vec::Vec;

use crate::expr::{beamsplitter, loss_channel, FieldExpression};
use crate::fock::{expect_number, FockState};
use crate::modes::{ModeId, ModeRegistry};
use crate::teleporter::{classical_teleport, quantum_teleport, TeleporterParams};
use crate::{CoreError, C64};

/// How the interferometer input is prepared.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InputKind {
    /// Single photon in an arbitrary polarization superposition x|1,0⟩ + y|0,1⟩.
    SinglePhotonSuperposition { x: C64, y: C64 },
    /// Coherent amplitudes on the two polarization components.
    Coherent { alpha_h: C64, alpha_v: C64 },
    /// Only the average photon number matters; realized internally as a
    /// coherent amplitude √n̄ on one component (exact for all moments used).
    NbarAbstract,
}

/// Full interferometer configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MzConfig {
    pub teleporter: TeleporterParams,
    /// Intensity transmission of the balancing attenuator on arm d (1 = none).
    pub balance_eta: f64,
    /// Average input photon number n̄.
    pub input_nbar: f64,
    pub input_kind: InputKind,
}

impl MzConfig {
    pub fn single_photon(teleporter: TeleporterParams) -> Self {
        MzConfig {
            teleporter,
            balance_eta: 1.0,
            input_nbar: 1.0,
            input_kind: InputKind::SinglePhotonSuperposition {
                x: C64::new(1.0, 0.0),
                y: C64::new(0.0, 0.0),
            },
        }
    }

    pub fn superposition(teleporter: TeleporterParams, x: C64, y: C64) -> Self {
        MzConfig {
            teleporter,
            balance_eta: 1.0,
            input_nbar: 1.0,
            input_kind: InputKind::SinglePhotonSuperposition { x, y },
        }
    }

    pub fn coherent(teleporter: TeleporterParams, alpha_h: C64, alpha_v: C64) -> Self {
        MzConfig {
            teleporter,
            balance_eta: 1.0,
            input_nbar: alpha_h.norm_sqr() + alpha_v.norm_sqr(),
            input_kind: InputKind::Coherent { alpha_h, alpha_v },
        }
    }

    pub fn nbar(teleporter: TeleporterParams, nbar: f64) -> Self {
        MzConfig {
            teleporter,
            balance_eta: 1.0,
            input_nbar: nbar,
            input_kind: InputKind::NbarAbstract,
        }
    }

    pub fn with_balance(mut self, eta: f64) -> Self {
        self.balance_eta = eta;
        self
    }

    pub fn validate(&self) -> Result<(), CoreError> {
        self.teleporter.validate()?;
        if !(0.0..=1.0).contains(&self.balance_eta) || !self.balance_eta.is_finite() {
            return Err(CoreError::ParamRange { name: "balance_eta", value: self.balance_eta });
        }
        if self.input_nbar < 0.0 || !self.input_nbar.is_finite() {
            return Err(CoreError::ParamRange { name: "nbar", value: self.input_nbar });
        }
        if let InputKind::SinglePhotonSuperposition { x, y } = self.input_kind {
            let norm = x.norm_sqr() + y.norm_sqr();
            if (norm - 1.0).abs() > 1e-12 {
                return Err(CoreError::ParamRange { name: "|x|²+|y|²", value: norm });
            }
        }
        Ok(())
    }
}

/// How a reported number was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountsMethod {
    ClosedForm,
    Engine,
    Oracle,
}

impl CountsMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            CountsMethod::ClosedForm => "closed_form",
            CountsMethod::Engine => "engine",
            CountsMethod::Oracle => "oracle",
        }
    }
}

/// Output counts and visibility for one configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisibilityReport {
    pub count_a: f64,
    pub count_b: f64,
    pub visibility: f64,
    pub method: CountsMethod,
    /// Both counts were (numerically) zero; visibility is defined as 0.
    pub degenerate: bool,
    /// Truncation leakage, set only by the dense oracle.
    pub leakage: Option<f64>,
}

impl VisibilityReport {
    pub fn from_counts(count_a: f64, count_b: f64, method: CountsMethod) -> Self {
        let total = count_a + count_b;
        let degenerate = !(total > 1e-300);
        let visibility = if degenerate { 0.0 } else { (count_a - count_b) / total };
        VisibilityReport { count_a, count_b, visibility, method, degenerate, leakage: None }
    }
}

/// One polarization (or sideband) slice of the assembled interferometer.
#[derive(Debug, Clone)]
pub struct MzArm {
    pub input_mode: ModeId,
    pub out_a: FieldExpression,
    pub out_b: FieldExpression,
}

/// The assembled network: output expressions per polarization plus the
/// registry they live in.
#[derive(Debug, Clone)]
pub struct MzNetwork {
    pub reg: ModeRegistry,
    pub h: MzArm,
    pub v: MzArm,
}

fn teleport_arm(
    arm: &FieldExpression,
    p: &TeleporterParams,
    reg: &mut ModeRegistry,
) -> Result<FieldExpression, CoreError> {
    if p.entangled {
        quantum_teleport(arm, p, reg)
    } else {
        classical_teleport(arm, p.lambda, p.eta_a, reg)
    }
}

pub(crate) fn build_arm(
    input: &FieldExpression,
    input_mode: ModeId,
    cfg: &MzConfig,
    reg: &mut ModeRegistry,
) -> Result<MzArm, CoreError> {
    let vac_mode = reg.fresh("b_port");
    let vac = FieldExpression::identity(reg, vac_mode)?;
    let (c, d) = beamsplitter(input, &vac, 0.5)?;
    let c_t = teleport_arm(&c, &cfg.teleporter, reg)?;
    let d_a = loss_channel(&d, cfg.balance_eta, reg)?;
    let (out_a, out_b) = beamsplitter(&c_t, &d_a, 0.5)?;
    Ok(MzArm { input_mode, out_a, out_b })
}

/// Assembles the interferometer for both polarization components. Coherent
/// amplitudes are folded into the input expressions as displacements, so the
/// engine always evaluates on Fock kets.
pub fn build_mz(cfg: &MzConfig) -> Result<MzNetwork, CoreError> {
    cfg.validate()?;
    let mut reg = ModeRegistry::new();
    let a_h = reg.register("a_h");
    let a_v = reg.register("a_v");
    let mut in_h = FieldExpression::identity(&reg, a_h)?;
    let mut in_v = FieldExpression::identity(&reg, a_v)?;
    match cfg.input_kind {
        InputKind::SinglePhotonSuperposition { .. } => {}
        InputKind::Coherent { alpha_h, alpha_v } => {
            in_h.set_displacement(alpha_h);
            in_v.set_displacement(alpha_v);
        }
        InputKind::NbarAbstract => {
            in_h.set_displacement(C64::new(cfg.input_nbar.sqrt(), 0.0));
        }
    }
    let h = build_arm(&in_h, a_h, cfg, &mut reg)?;
    let v = build_arm(&in_v, a_v, cfg, &mut reg)?;
    Ok(MzNetwork { reg, h, v })
}

impl MzNetwork {
    /// The Fock part of the input state (displacements live in the
    /// expressions).
    pub fn input_state(&self, cfg: &MzConfig) -> FockState {
        match cfg.input_kind {
            InputKind::SinglePhotonSuperposition { x, y } => FockState::from_kets(
                &self.reg,
                &[(&[(self.h.input_mode, 1)], x), (&[(self.v.input_mode, 1)], y)],
            ),
            InputKind::Coherent { .. } | InputKind::NbarAbstract => FockState::vacuum(&self.reg),
        }
    }
}

/// Output counts evaluated exactly with the Fock engine.
pub fn engine_counts(cfg: &MzConfig) -> Result<(f64, f64), CoreError> {
    let net = build_mz(cfg)?;
    let state = net.input_state(cfg);
    let count_a =
        expect_number(&net.h.out_a, &state)? + expect_number(&net.v.out_a, &state)?;
    let count_b =
        expect_number(&net.h.out_b, &state)? + expect_number(&net.v.out_b, &state)?;
    Ok((count_a, count_b))
}

/// Spurious-photon term of the lossless-EPR teleporter:
/// `(λ√H − √(H−1))²` with H = 1 for a classical channel.
fn spurious(p: &TeleporterParams) -> f64 {
    let h = p.effective_h();
    (p.lambda * h.sqrt() - (h - 1.0).sqrt()).powi(2)
}

/// Closed-form counts `n̄·0.25(√η ± λ)² + (λ√H − √(H−1))²`, valid for
/// lossless EPR beams and a lossless measurement stage.
pub fn counts_closed_form(cfg: &MzConfig) -> Result<(f64, f64), CoreError> {
    cfg.validate()?;
    let p = &cfg.teleporter;
    if p.eta_a != 1.0 || (p.entangled && (p.eta_b1 != 1.0 || p.eta_b2 != 1.0)) {
        return Err(CoreError::UnsupportedNetwork);
    }
    let nbar = cfg.input_nbar;
    let s = spurious(p);
    let root_eta = cfg.balance_eta.sqrt();
    let count_a = nbar * 0.25 * (root_eta + p.lambda).powi(2) + s;
    let count_b = nbar * 0.25 * (root_eta - p.lambda).powi(2) + s;
    Ok((count_a, count_b))
}

/// Closed form where supported, engine otherwise.
pub fn visibility_report(cfg: &MzConfig) -> Result<VisibilityReport, CoreError> {
    match counts_closed_form(cfg) {
        Ok((a, b)) => Ok(VisibilityReport::from_counts(a, b, CountsMethod::ClosedForm)),
        Err(CoreError::UnsupportedNetwork) => {
            let (a, b) = engine_counts(cfg)?;
            Ok(VisibilityReport::from_counts(a, b, CountsMethod::Engine))
        }
        Err(e) => Err(e),
    }
}

/// Engine-evaluated visibility report.
pub fn engine_report(cfg: &MzConfig) -> Result<VisibilityReport, CoreError> {
    let (a, b) = engine_counts(cfg)?;
    Ok(VisibilityReport::from_counts(a, b, CountsMethod::Engine))
}

/// Gain maximizing visibility for lossless EPR beams at average photon
/// number n̄: `√(4H + n̄ − 4)/√(4H + n̄)`.
pub fn lambda_max(h: f64, nbar: f64) -> Result<f64, CoreError> {
    if h < 1.0 || !h.is_finite() {
        return Err(CoreError::ParamRange { name: "H", value: h });
    }
    if nbar <= 0.0 || !nbar.is_finite() {
        return Err(CoreError::ParamRange { name: "nbar", value: nbar });
    }
    Ok(((4.0 * h + nbar - 4.0) / (4.0 * h + nbar)).sqrt())
}

/// Maximum classical (H = 1) visibility: `√(n̄/(n̄+4))`.
pub fn vmax_classical(nbar: f64) -> Result<f64, CoreError> {
    if nbar < 0.0 || !nbar.is_finite() {
        return Err(CoreError::ParamRange { name: "nbar", value: nbar });
    }
    Ok((nbar / (nbar + 4.0)).sqrt())
}

/// Gain maximizing the unbalanced single-photon visibility under symmetric
/// EPR-arm loss η_b (see module docs for the form used).
pub fn lambda_max_lossy(h: f64, eta_b: f64) -> Result<f64, CoreError> {
    if h < 1.0 || !h.is_finite() {
        return Err(CoreError::ParamRange { name: "H", value: h });
    }
    if !(0.0..=1.0).contains(&eta_b) || !eta_b.is_finite() {
        return Err(CoreError::ParamRange { name: "eta_b", value: eta_b });
    }
    Ok(((1.0 + 4.0 * eta_b * (h - 1.0)) / (4.0 * (1.0 - eta_b) + 4.0 * eta_b * h + 1.0)).sqrt())
}

/// Balancing attenuation under symmetric EPR-arm loss: `η = (5 − 4η_b)λ²`.
pub fn balance_eta_lossy(lambda: f64, eta_b: f64) -> Result<f64, CoreError> {
    if lambda < 0.0 || !lambda.is_finite() {
        return Err(CoreError::ParamRange { name: "lambda", value: lambda });
    }
    if !(0.0..=1.0).contains(&eta_b) || !eta_b.is_finite() {
        return Err(CoreError::ParamRange { name: "eta_b", value: eta_b });
    }
    let eta = (5.0 - 4.0 * eta_b) * lambda * lambda;
    if eta > 1.0 {
        return Err(CoreError::InfeasibleBalance { eta });
    }
    Ok(eta)
}

/// Which parameters the numeric optimizer may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreeParams {
    Lambda,
    LambdaAndBalance,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeResult {
    pub lambda: f64,
    pub balance_eta: f64,
    pub visibility: f64,
    /// The objective was identically zero over the search range.
    pub flat: bool,
}

const GOLDEN_INV: f64 = 0.618_033_988_749_894_9;

fn golden_max(mut lo: f64, mut hi: f64, tol: f64, f: &mut dyn FnMut(f64) -> f64) -> (f64, f64) {
    let mut x1 = hi - GOLDEN_INV * (hi - lo);
    let mut x2 = lo + GOLDEN_INV * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN_INV * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN_INV * (hi - lo);
            f1 = f(x1);
        }
    }
    let mid = 0.5 * (lo + hi);
    (mid, f(mid))
}

/// Maximizes the engine visibility over λ (and optionally the balancing
/// attenuation η). Grid scan plus golden-section refinement; λ ∈ [0, 2],
/// η ∈ [0, 1].
pub fn optimize_gain_numeric(
    base: &MzConfig,
    free: FreeParams,
) -> Result<OptimizeResult, CoreError> {
    base.validate()?;
    let eval = |lambda: f64, eta: f64| -> f64 {
        let mut cfg = *base;
        cfg.teleporter.lambda = lambda;
        cfg.balance_eta = eta;
        match engine_counts(&cfg) {
            Ok((a, b)) => VisibilityReport::from_counts(a, b, CountsMethod::Engine).visibility,
            Err(_) => f64::NEG_INFINITY,
        }
    };
    let objective = |lambda: f64| -> (f64, f64) {
        match free {
            FreeParams::Lambda => (eval(lambda, base.balance_eta), base.balance_eta),
            FreeParams::LambdaAndBalance => {
                let mut inner = |eta: f64| eval(lambda, eta);
                // η = 0 is a boundary candidate the golden section can miss.
                let (eta_star, v_star) = golden_max(0.0, 1.0, 1e-10, &mut inner);
                let v0 = eval(lambda, 0.0);
                if v0 > v_star {
                    (v0, 0.0)
                } else {
                    (v_star, eta_star)
                }
            }
        }
    };

    // Coarse scan to bracket the maximum.
    let (lo, hi) = (0.0, 2.0);
    let steps = 40;
    let mut best_i = 0;
    let mut best_v = f64::NEG_INFINITY;
    let grid: Vec<f64> = (0..=steps)
        .map(|i| lo + (hi - lo) * i as f64 / steps as f64)
        .collect();
    for (i, &lambda) in grid.iter().enumerate() {
        let (v, _) = objective(lambda);
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }
    let bracket_lo = if best_i == 0 { lo } else { grid[best_i - 1] };
    let bracket_hi = if best_i == steps { hi } else { grid[best_i + 1] };
    let mut f = |lambda: f64| objective(lambda).0;
    let (lambda_star, v_star) = golden_max(bracket_lo, bracket_hi, 1e-9, &mut f);
    let (_, eta_star) = objective(lambda_star);
    let flat = v_star.abs() < 1e-12 && best_v.abs() < 1e-12;
    Ok(OptimizeResult {
        lambda: lambda_star,
        balance_eta: eta_star,
        visibility: v_star,
        flat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::teleporter::lambda_opt;

    fn quantum_cfg(h: f64, lambda: f64) -> MzConfig {
        MzConfig::single_photon(TeleporterParams::quantum(h, lambda))
    }

    #[test]
    fn empty_interferometer_unit_visibility() {
        // Pass-through teleporter: λ=1, H→huge approximates identity.
        let cfg = quantum_cfg(1e12, 1.0);
        let (a, b) = engine_counts(&cfg).unwrap();
        let rep = VisibilityReport::from_counts(a, b, CountsMethod::Engine);
        assert!((rep.visibility - 1.0).abs() < 1e-6);
    }

    #[test]
    fn classical_unity_gain_counts() {
        let cfg = quantum_cfg(1.0, 1.0);
        let (a, b) = engine_counts(&cfg).unwrap();
        assert!((a - 2.0).abs() < 1e-12);
        assert!((b - 1.0).abs() < 1e-12);
        let rep = visibility_report(&cfg).unwrap();
        assert_eq!(rep.method, CountsMethod::ClosedForm);
        assert!((rep.visibility - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_matches_engine_on_grid() {
        for &h in &[1.0, 1.125, 2.0] {
            for &lam in &[0.0, 0.3, 1.0 / 3.0, 1.0, 1.7] {
                for &eta in &[1.0, 0.5, 1.0 / 9.0] {
                    for &nbar in &[0.25, 1.0, 4.0] {
                        let cfg = MzConfig::nbar(TeleporterParams::quantum(h, lam), nbar)
                            .with_balance(eta);
                        let (ca, cb) = counts_closed_form(&cfg).unwrap();
                        let (ea, eb) = engine_counts(&cfg).unwrap();
                        assert!((ca - ea).abs() < 1e-10, "H={h} λ={lam} η={eta} n̄={nbar}");
                        assert!((cb - eb).abs() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn balanced_optimum_reaches_unit_visibility() {
        for &h in &[1.05, 1.125, 2.0, 10.0] {
            let lam = lambda_opt(h);
            let cfg = quantum_cfg(h, lam).with_balance(lam * lam);
            let (a, b) = engine_counts(&cfg).unwrap();
            let rep = VisibilityReport::from_counts(a, b, CountsMethod::Engine);
            assert!(b.abs() < 1e-12, "H={h}: count_b = {b}");
            assert!((rep.visibility - 1.0).abs() < 1e-12, "H={h}");
        }
    }

    #[test]
    fn state_independence() {
        let p = TeleporterParams::quantum(1.125, 0.8);
        let base = engine_counts(&MzConfig::single_photon(p)).unwrap();
        let cases = [
            (C64::new(0.6, 0.0), C64::new(0.0, 0.8)),
            (C64::new(0.0, 1.0), C64::new(0.0, 0.0)),
            (
                C64::from_polar(core::f64::consts::FRAC_1_SQRT_2, 0.3),
                C64::from_polar(core::f64::consts::FRAC_1_SQRT_2, -1.1),
            ),
        ];
        for (x, y) in cases {
            let cfg = MzConfig::superposition(p, x, y);
            let (a, b) = engine_counts(&cfg).unwrap();
            assert!((a - base.0).abs() < 1e-12);
            assert!((b - base.1).abs() < 1e-12);
        }
    }

    #[test]
    fn coherent_input_reproduces_nbar_form() {
        let p = TeleporterParams::quantum(1.125, 0.6);
        for &(ah, av) in &[(0.5f64, 0.5f64), (1.0, 0.0), (1.3, 0.7)] {
            let alpha_h = C64::new(ah, 0.0);
            let alpha_v = C64::from_polar(av, 0.7);
            let cfg = MzConfig::coherent(p, alpha_h, alpha_v);
            let nbar = alpha_h.norm_sqr() + alpha_v.norm_sqr();
            let (ea, eb) = engine_counts(&cfg).unwrap();
            let closed = counts_closed_form(&MzConfig::nbar(p, nbar)).unwrap();
            assert!((ea - closed.0).abs() < 1e-10);
            assert!((eb - closed.1).abs() < 1e-10);
        }
    }

    #[test]
    fn classical_bound_values() {
        assert!((vmax_classical(1.0).unwrap() - 0.2f64.sqrt()).abs() < 1e-15);
        assert!((vmax_classical(4.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(vmax_classical(0.0).unwrap(), 0.0);
        assert!((lambda_max(1.0, 1.0).unwrap() - 0.2f64.sqrt()).abs() < 1e-15);
        assert!((lambda_max(1.0, 4.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((lambda_max(1e9, 1.0).unwrap() - 1.0).abs() < 1e-8);
        assert!(lambda_max(1.0, 0.0).is_err());
    }

    #[test]
    fn lossy_gain_reductions() {
        // η_b = 1 reduces to the lossless form √(4H−3)/√(4H+1).
        for &h in &[1.0f64, 1.125, 2.0] {
            let lossless = ((4.0 * h - 3.0) / (4.0 * h + 1.0)).sqrt();
            assert!((lambda_max_lossy(h, 1.0).unwrap() - lossless).abs() < 1e-15);
        }
        // H = 1: nothing to lose, 1/√5 for any η_b.
        for &eta in &[0.0, 0.3, 1.0] {
            assert!((lambda_max_lossy(1.0, eta).unwrap() - 0.2f64.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn balancing_condition_lossy() {
        assert!((balance_eta_lossy(0.4, 1.0).unwrap() - 0.16).abs() < 1e-15);
        assert_eq!(balance_eta_lossy(0.0, 0.3).unwrap(), 0.0);
        assert!((balance_eta_lossy(0.5, 0.5).unwrap() - 0.75).abs() < 1e-15);
        assert!(matches!(
            balance_eta_lossy(1.0, 0.5),
            Err(CoreError::InfeasibleBalance { .. })
        ));
    }

    #[test]
    fn optimizer_recovers_classical_bound() {
        let cfg = quantum_cfg(1.0, 0.5);
        let res = optimize_gain_numeric(&cfg, FreeParams::Lambda).unwrap();
        assert!((res.lambda - 0.2f64.sqrt()).abs() < 1e-6);
        assert!((res.visibility - 0.2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn optimizer_recovers_balanced_unity() {
        let cfg = quantum_cfg(1.125, 0.5);
        let res = optimize_gain_numeric(&cfg, FreeParams::LambdaAndBalance).unwrap();
        assert!((res.visibility - 1.0).abs() < 1e-9);
        assert!((res.lambda - 1.0 / 3.0).abs() < 1e-5);
        assert!((res.balance_eta - 1.0 / 9.0).abs() < 1e-4);
    }

    #[test]
    fn optimizer_matches_lossy_closed_form() {
        for &(h, eta_b) in &[(1.125, 0.5), (2.0, 0.9), (2.0, 0.25)] {
            let p = TeleporterParams::quantum(h, 0.5).with_epr_loss(eta_b, eta_b);
            let cfg = MzConfig::single_photon(p);
            let res = optimize_gain_numeric(&cfg, FreeParams::Lambda).unwrap();
            let formula = lambda_max_lossy(h, eta_b).unwrap();
            assert!(
                (res.lambda - formula).abs() < 1e-6,
                "H={h} η_b={eta_b}: argmax {} vs formula {formula}",
                res.lambda
            );
        }
    }

    #[test]
    fn bob_loss_balanced_unit_visibility() {
        use crate::teleporter::lambda_opt_bob_loss;
        for &(h, eta_b2) in &[(1.125, 0.5), (2.0, 0.3)] {
            let lam = lambda_opt_bob_loss(h, eta_b2).unwrap();
            let p = TeleporterParams::quantum(h, lam).with_epr_loss(1.0, eta_b2);
            let cfg = MzConfig::single_photon(p).with_balance(lam * lam);
            let (a, b) = engine_counts(&cfg).unwrap();
            let rep = VisibilityReport::from_counts(a, b, CountsMethod::Engine);
            assert!((rep.visibility - 1.0).abs() < 1e-10, "H={h} η_b2={eta_b2}");
            // Teleported flux scales as η_b2 · λ_opt².
            let lossless = lambda_opt(h);
            assert!((lam * lam - eta_b2 * lossless * lossless).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_input_flagged() {
        let p = TeleporterParams::quantum(1.0, 0.0);
        let cfg = MzConfig::nbar(p, 0.0).with_balance(0.0);
        let rep = visibility_report(&cfg).unwrap();
        assert!(rep.degenerate);
        assert_eq!(rep.visibility, 0.0);
    }

    #[test]
    fn visibility_bounded_by_classical_limit() {
        for i in 0..=20 {
            let lam = 2.0 * i as f64 / 20.0;
            for &eta in &[1.0, 0.6, 0.2] {
                for &nbar in &[0.25, 1.0, 4.0] {
                    let cfg =
                        MzConfig::nbar(TeleporterParams::quantum(1.0, lam), nbar).with_balance(eta);
                    let rep = visibility_report(&cfg).unwrap();
                    assert!(rep.visibility <= 1.0 + 1e-12);
                    assert!(
                        rep.visibility <= vmax_classical(nbar).unwrap() + 1e-12,
                        "λ={lam} η={eta} n̄={nbar}"
                    );
                }
            }
        }
    }
}
