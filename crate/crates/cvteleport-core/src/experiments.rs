//! Scenario layer: heralded single-photon sources, raw and conditional
//! visibilities, mixed-state fidelity (and why it can be cheated), and the
//! cloning invariance of the classical channel.
//!
//! The pair source emits `|0,0⟩|0,0⟩ + χ(|1,0⟩|1,0⟩ + |0,1⟩|0,1⟩)`
//! (normalized), so beam a alone is an unpolarized mixture. Conditioning the
//! output counts on a photon in the twin beam a′ reproduces the single-photon
//! visibilities exactly. The raw (unconditioned) visibility equals the
//! closed-form curve evaluated at the actual mean photon number of beam a,
//! `n̄ = 2χ²/(1+2χ²)`.

#[cfg(not(feature = "std"))]
use num_traits::Float;

use alloc::vec::Vec;

use crate::expr::{beamsplitter, linear_combine, loss_channel, FieldExpression};
use crate::fock::{expect_coincidence, expect_number, FockState, Occupation};
use crate::interferometer::{
    build_arm, counts_closed_form, CountsMethod, MzArm, MzConfig, VisibilityReport,
};
use crate::linalg::{hermitian_apply, hermitian_eigen, Mat};
use crate::modes::{ModeId, ModeRegistry};
use crate::teleporter::{build_epr_modes, TeleporterParams};
use crate::{CoreError, C64};

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Down-conversion pair source strength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairSourceSpec {
    pub chi: f64,
}

impl PairSourceSpec {
    /// The first-order expansion is kept to χ ≤ 0.2.
    pub fn new(chi: f64) -> Result<Self, CoreError> {
        if !(0.0..=0.2).contains(&chi) || !chi.is_finite() {
            return Err(CoreError::ParamRange { name: "chi", value: chi });
        }
        Ok(PairSourceSpec { chi })
    }

    /// Above χ = 0.1 the neglected higher-order terms start to matter.
    pub fn truncation_warning(&self) -> bool {
        self.chi > 0.1
    }
}

/// The four modes of one pair source: beam a (two polarizations) and its
/// spatially separated twin a′.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairModes {
    pub a_h: ModeId,
    pub a_v: ModeId,
    pub ap_h: ModeId,
    pub ap_v: ModeId,
}

/// Normalized polarization-number entangled pair state; mints four fresh
/// modes so several sources can coexist in one registry.
pub fn pair_state(
    spec: &PairSourceSpec,
    reg: &mut ModeRegistry,
) -> Result<(FockState, PairModes), CoreError> {
    spec.chi_checked()?;
    let pm = PairModes {
        a_h: reg.fresh("pair_a_h"),
        a_v: reg.fresh("pair_a_v"),
        ap_h: reg.fresh("pair_ap_h"),
        ap_v: reg.fresh("pair_ap_v"),
    };
    let norm = 1.0 / (1.0 + 2.0 * spec.chi * spec.chi).sqrt();
    let x = re(norm);
    let c = re(norm * spec.chi);
    let s = FockState::from_kets(
        reg,
        &[
            (&[], x),
            (&[(pm.a_h, 1), (pm.ap_h, 1)], c),
            (&[(pm.a_v, 1), (pm.ap_v, 1)], c),
        ],
    );
    Ok((s, pm))
}

impl PairSourceSpec {
    fn chi_checked(&self) -> Result<f64, CoreError> {
        Self::new(self.chi).map(|s| s.chi)
    }
}

/// Mean photon number of beam a emitted by the source:
/// `2χ²/(1 + 2χ²)`.
pub fn pair_beam_nbar(spec: &PairSourceSpec) -> f64 {
    let c2 = spec.chi * spec.chi;
    2.0 * c2 / (1.0 + 2.0 * c2)
}

/// Product of two states over disjoint mode sets in the same registry.
fn tensor(s1: &FockState, s2: &FockState, reg: &ModeRegistry) -> FockState {
    let mut kets: Vec<(Vec<(ModeId, u32)>, C64)> = Vec::new();
    for (o1, a1) in s1.kets() {
        for (o2, a2) in s2.kets() {
            let mut pairs = o1.pairs().to_vec();
            pairs.extend_from_slice(o2.pairs());
            kets.push((pairs, a1 * a2));
        }
    }
    let refs: Vec<(&[(ModeId, u32)], C64)> =
        kets.iter().map(|(p, a)| (p.as_slice(), *a)).collect();
    FockState::from_kets(reg, &refs)
}

struct PairInterferometer {
    reg: ModeRegistry,
    state: FockState,
    pm: PairModes,
    h: MzArm,
    v: MzArm,
}

fn build_pair_interferometer(
    spec: &PairSourceSpec,
    cfg: &MzConfig,
) -> Result<PairInterferometer, CoreError> {
    cfg.validate()?;
    let mut reg = ModeRegistry::new();
    let (state, pm) = pair_state(spec, &mut reg)?;
    let in_h = FieldExpression::identity(&reg, pm.a_h)?;
    let in_v = FieldExpression::identity(&reg, pm.a_v)?;
    let h = build_arm(&in_h, pm.a_h, cfg, &mut reg)?;
    let v = build_arm(&in_v, pm.a_v, cfg, &mut reg)?;
    Ok(PairInterferometer { reg, state, pm, h, v })
}

/// Unconditioned singles visibility with the twin beam a′ ignored.
pub fn raw_visibility(
    spec: &PairSourceSpec,
    tele: &TeleporterParams,
    balance_eta: f64,
) -> Result<VisibilityReport, CoreError> {
    let cfg = MzConfig::single_photon(*tele).with_balance(balance_eta);
    let net = build_pair_interferometer(spec, &cfg)?;
    let count_a = expect_number(&net.h.out_a, &net.state)?
        + expect_number(&net.v.out_a, &net.state)?;
    let count_b = expect_number(&net.h.out_b, &net.state)?
        + expect_number(&net.v.out_b, &net.state)?;
    Ok(VisibilityReport::from_counts(count_a, count_b, CountsMethod::Engine))
}

/// Coincidence visibility heralded on a photon in beam a′:
/// counts are `⟨a′†a′ · out†out⟩` summed over polarizations.
pub fn conditional_visibility(
    spec: &PairSourceSpec,
    tele: &TeleporterParams,
    balance_eta: f64,
) -> Result<VisibilityReport, CoreError> {
    let cfg = MzConfig::single_photon(*tele).with_balance(balance_eta);
    let net = build_pair_interferometer(spec, &cfg)?;
    let herald_h = FieldExpression::identity(&net.reg, net.pm.ap_h)?;
    let herald_v = FieldExpression::identity(&net.reg, net.pm.ap_v)?;
    let mut count_a = 0.0;
    let mut count_b = 0.0;
    for herald in [&herald_h, &herald_v] {
        for out in [&net.h.out_a, &net.v.out_a] {
            count_a += expect_coincidence(out, herald, &net.state)?;
        }
        for out in [&net.h.out_b, &net.v.out_b] {
            count_b += expect_coincidence(out, herald, &net.state)?;
        }
    }
    Ok(VisibilityReport::from_counts(count_a, count_b, CountsMethod::Engine))
}

/// Density matrix on an explicit occupation basis over a kept mode subset.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    /// Occupation vectors, one entry per kept mode, in kept-mode order.
    basis: Vec<Vec<u32>>,
    data: Vec<C64>,
    dim: usize,
    /// Probability weight discarded by the kept-mode occupation cutoff.
    pub trace_deficit: f64,
}

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.basis
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    pub fn truncation_warning(&self) -> bool {
        self.trace_deficit > 1e-10
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.entry(i, i).re).sum()
    }

    pub fn purity(&self) -> f64 {
        let m = self.as_mat();
        m.matmul(&m).trace().re
    }

    fn as_mat(&self) -> Mat {
        Mat { dim: self.dim, data: self.data.clone() }
    }

    /// Hermiticity within 1e-12, unit trace within 1e-12, eigenvalues
    /// ≥ −1e-10.
    pub fn validate(&self) -> Result<(), CoreError> {
        let m = self.as_mat();
        if m.hermiticity_defect() > 1e-12 {
            return Err(CoreError::NonCanonicalNetwork);
        }
        if (self.trace() - 1.0).abs() > 1e-12 {
            return Err(CoreError::UnnormalizedState { norm_sq: self.trace() });
        }
        let (eigs, _) = hermitian_eigen(&m);
        for &e in &eigs {
            if e < -1e-10 {
                return Err(CoreError::NonPhysicalSpectrum { nbar: e });
            }
        }
        Ok(())
    }
}

/// Partial trace of a pure state onto `keep`, expressed on the full product
/// basis with per-mode occupation ≤ `n_cut`. Kets whose kept-mode occupation
/// exceeds the cutoff contribute to `trace_deficit`.
pub fn reduced_density(
    s: &FockState,
    keep: &[ModeId],
    n_cut: u32,
) -> Result<DensityMatrix, CoreError> {
    s.check_normalized()?;
    let radix = (n_cut + 1) as usize;
    let dim = radix.pow(keep.len() as u32);
    let mut basis = Vec::with_capacity(dim);
    for idx in 0..dim {
        let mut occ = Vec::with_capacity(keep.len());
        let mut rest = idx;
        for _ in 0..keep.len() {
            occ.push((rest % radix) as u32);
            rest /= radix;
        }
        occ.reverse();
        basis.push(occ);
    }
    let index_of = |occ: &Occupation| -> Option<usize> {
        let mut idx = 0usize;
        for &m in keep {
            let n = occ.get(m);
            if n > n_cut {
                return None;
            }
            idx = idx * radix + n as usize;
        }
        Some(idx)
    };
    // Group amplitudes by the occupation of the discarded modes.
    let mut groups: alloc::collections::BTreeMap<Occupation, Vec<(usize, C64)>> =
        alloc::collections::BTreeMap::new();
    let mut deficit = 0.0;
    for (occ, amp) in s.kets() {
        let env: Vec<(ModeId, u32)> = occ
            .pairs()
            .iter()
            .filter(|(m, _)| !keep.contains(m))
            .copied()
            .collect();
        match index_of(occ) {
            Some(idx) => groups
                .entry(Occupation::from_pairs(env))
                .or_default()
                .push((idx, amp)),
            None => deficit += amp.norm_sqr(),
        }
    }
    let mut data = alloc::vec![C64::new(0.0, 0.0); dim * dim];
    for members in groups.values() {
        for &(i, ai) in members {
            for &(j, aj) in members {
                data[i * dim + j] += ai * aj.conj();
            }
        }
    }
    Ok(DensityMatrix { basis, data, dim, trace_deficit: deficit })
}

/// Uhlmann fidelity `F = Tr√(√ρ1 ρ2 √ρ1)` on a shared basis.
pub fn mixed_fidelity(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64, CoreError> {
    if rho1.dim != rho2.dim || rho1.basis != rho2.basis {
        return Err(CoreError::DimensionMismatch { left: rho1.dim, right: rho2.dim });
    }
    let m1 = rho1.as_mat();
    let m2 = rho2.as_mat();
    let (eigs, v) = hermitian_eigen(&m1);
    let sqrt1 = hermitian_apply(&eigs, &v, |x| x.max(0.0).sqrt());
    let inner = sqrt1.matmul(&m2).matmul(&sqrt1);
    let (eigs2, _) = hermitian_eigen(&inner);
    let f: f64 = eigs2.iter().map(|&x| x.max(0.0).sqrt()).sum();
    Ok(f.min(1.0))
}

/// Outcome of the fidelity cheat: Bob ignores the channel and emits an
/// independent unpolarized source with matched n̄.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheatOutcome {
    pub fidelity: f64,
    pub visibility: VisibilityReport,
}

/// Demonstrates that mixed-state fidelity certifies nothing here: the cheat
/// reaches F = 1 against ρ_a while its interferometric visibility is 0.
pub fn cheat_demo(spec: &PairSourceSpec) -> Result<CheatOutcome, CoreError> {
    let mut reg = ModeRegistry::new();
    let (s_in, pm_in) = pair_state(spec, &mut reg)?;
    let (s_bob, pm_bob) = pair_state(spec, &mut reg)?;
    let joint = tensor(&s_in, &s_bob, &reg);

    let rho_a = reduced_density(&joint, &[pm_in.a_h, pm_in.a_v], 1)?;
    let rho_out = reduced_density(&joint, &[pm_bob.a_h, pm_bob.a_v], 1)?;
    rho_a.validate()?;
    rho_out.validate()?;
    let fidelity = mixed_fidelity(&rho_a, &rho_out)?;

    // Interferometer with the teleported arm replaced by Bob's emission.
    let mut count_a = 0.0;
    let mut count_b = 0.0;
    for (a_mode, emit_mode) in [(pm_in.a_h, pm_bob.a_h), (pm_in.a_v, pm_bob.a_v)] {
        let input = FieldExpression::identity(&reg, a_mode)?;
        let port = reg.fresh("b_port");
        let vac = FieldExpression::identity(&reg, port)?;
        let (_discarded, d) = beamsplitter(&input, &vac, 0.5)?;
        let emit = FieldExpression::identity(&reg, emit_mode)?;
        let (out_a, out_b) = beamsplitter(&emit, &d, 0.5)?;
        count_a += expect_number(&out_a, &joint)?;
        count_b += expect_number(&out_b, &joint)?;
    }
    let visibility = VisibilityReport::from_counts(count_a, count_b, CountsMethod::Engine);
    Ok(CheatOutcome { fidelity, visibility })
}

/// Which output of the optimal cloner Bob reconstructs from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CloneChoice {
    /// Classical channel used directly (finite-(G, ε) reference).
    Uncloned,
    First,
    Second,
}

/// Optimal 1→2 cloner on the classical channel: a gain-2 amplifier followed
/// by a 50:50 split, `a′ = a_c + (v1† + v2)/√2`, `a″ = a_c + (v3† − v2)/√2`.
pub fn clone_classical_channel(
    a_c: &FieldExpression,
    epsilon: f64,
    reg: &mut ModeRegistry,
) -> Result<(FieldExpression, FieldExpression), CoreError> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(CoreError::ParamRange { name: "epsilon", value: epsilon });
    }
    let m1 = reg.fresh("v_c1");
    let m2 = reg.fresh("v_c2");
    let m3 = reg.fresh("v_c3");
    let v1 = FieldExpression::identity(reg, m1)?;
    let v2 = FieldExpression::identity(reg, m2)?;
    let v3 = FieldExpression::identity(reg, m3)?;
    let one = re(1.0);
    let half = re(core::f64::consts::FRAC_1_SQRT_2);
    let first = linear_combine(&[(one, a_c), (half, &v1.dagger()), (half, &v2)])?;
    let second = linear_combine(&[(one, a_c), (half, &v3.dagger()), (re(-1.0) * half, &v2)])?;
    Ok((first, second))
}

/// Finite-(G, ε) channel output before reconstruction:
/// `√G(√η_a a + √(1−η_a)v_a) + √(G−1) n1†` where n1 is Alice's noise mode
/// (vacuum for a classical channel, her EPR half otherwise).
fn finite_channel(
    input: &FieldExpression,
    gain: f64,
    eta_a: f64,
    noise1: &FieldExpression,
    reg: &mut ModeRegistry,
) -> Result<FieldExpression, CoreError> {
    if gain < 1.0 || !gain.is_finite() {
        return Err(CoreError::ParamRange { name: "G", value: gain });
    }
    let lossy = loss_channel(input, eta_a, reg)?;
    linear_combine(&[(re(gain.sqrt()), &lossy), (re((gain - 1.0).sqrt()), &noise1.dagger())])
}

/// Bob's reconstruction: attenuate the (possibly cloned) channel by √ε and
/// subtract his noise mode, `√ε a_c − √(1−ε) n2`.
fn reconstruct(
    channel: &FieldExpression,
    epsilon: f64,
    noise2: &FieldExpression,
) -> Result<FieldExpression, CoreError> {
    linear_combine(&[
        (re(epsilon.sqrt()), channel),
        (re(-(1.0 - epsilon).sqrt()), noise2),
    ])
}

/// Single-photon MZ visibility with the teleporter arm realized through the
/// explicit finite-(G, ε) channel, optionally duplicated by the cloner. The
/// amplifier gain is set by `G = λ²/(ε η_a)` so the end-to-end gain stays λ.
pub fn cloning_visibility(
    tele: &TeleporterParams,
    balance_eta: f64,
    epsilon: f64,
    choice: CloneChoice,
) -> Result<VisibilityReport, CoreError> {
    tele.validate()?;
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(CoreError::ParamRange { name: "epsilon", value: epsilon });
    }
    let gain = tele.lambda * tele.lambda / (epsilon * tele.eta_a);
    if gain < 1.0 {
        return Err(CoreError::ParamRange { name: "G", value: gain });
    }
    let mut reg = ModeRegistry::new();
    let a_h = reg.register("a_h");
    let a_v = reg.register("a_v");
    let mut count_a = 0.0;
    let mut count_b = 0.0;
    let mut outputs = Vec::new();
    for mode in [a_h, a_v] {
        let input = FieldExpression::identity(&reg, mode)?;
        let port = reg.fresh("b_port");
        let vac = FieldExpression::identity(&reg, port)?;
        let (c, d) = beamsplitter(&input, &vac, 0.5)?;
        let (noise1, noise2) = if tele.entangled {
            let epr = build_epr_modes(tele.effective_h(), tele.eta_b1, tele.eta_b2, &mut reg)?;
            (epr.b1, epr.b2)
        } else {
            let m1 = reg.fresh("v1");
            let m2 = reg.fresh("v2");
            (
                FieldExpression::identity(&reg, m1)?,
                FieldExpression::identity(&reg, m2)?,
            )
        };
        let a_c = finite_channel(&c, gain, tele.eta_a, &noise1, &mut reg)?;
        let channel = match choice {
            CloneChoice::Uncloned => a_c,
            CloneChoice::First => clone_classical_channel(&a_c, epsilon, &mut reg)?.0,
            CloneChoice::Second => clone_classical_channel(&a_c, epsilon, &mut reg)?.1,
        };
        let c_t = reconstruct(&channel, epsilon, &noise2)?;
        let d_a = loss_channel(&d, balance_eta, &mut reg)?;
        let (out_a, out_b) = beamsplitter(&c_t, &d_a, 0.5)?;
        outputs.push((out_a, out_b));
    }
    let state = FockState::from_kets(&reg, &[(&[(a_h, 1)], re(1.0))]);
    for (out_a, out_b) in &outputs {
        count_a += expect_number(out_a, &state)?;
        count_b += expect_number(out_b, &state)?;
    }
    Ok(VisibilityReport::from_counts(count_a, count_b, CountsMethod::Engine))
}

/// Raw-visibility reference: the closed-form curve at the source's actual
/// beam-a photon number.
pub fn raw_reference(
    spec: &PairSourceSpec,
    tele: &TeleporterParams,
    balance_eta: f64,
) -> Result<VisibilityReport, CoreError> {
    let cfg = MzConfig::nbar(*tele, pair_beam_nbar(spec)).with_balance(balance_eta);
    let (a, b) = counts_closed_form(&cfg)?;
    Ok(VisibilityReport::from_counts(a, b, CountsMethod::ClosedForm))
}
