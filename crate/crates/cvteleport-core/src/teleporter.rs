//! Classical and quantum teleportation channels as field expressions.
//!
//! The measure–amplify–attenuate channel is emitted directly in its
//! classical-channel limit form (G → ∞, ε → 0 at fixed total gain λ), which
//! avoids catastrophic cancellation; a finite-(G, ε) compositional path is
//! kept for the cloning study in [`crate::experiments`].
//!
//! Sign convention: the lossless quantum output is written
//! `λ a_in + (λ√H − √(H−1)) v3† + (√H − λ√(H−1)) v4`. Composing the EPR pair
//! with `λ b1† − b2` literally yields the v4 coefficient with the opposite
//! sign, so the constructor applies a π phase redefinition to the idler
//! vacuum v4. The two forms are unitarily equivalent.

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::expr::{
    beamsplitter, degenerate_pa, linear_combine, loss_channel, two_mode_squeeze, FieldExpression,
};
use crate::modes::{ModeId, ModeRegistry};
use crate::{CoreError, C64};

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn check_range(name: &'static str, value: f64, lo: f64, hi: f64) -> Result<(), CoreError> {
    if !value.is_finite() || value < lo || value > hi {
        return Err(CoreError::ParamRange { name, value });
    }
    Ok(())
}

/// Parameters of one teleportation channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TeleporterParams {
    /// Parametric gain of the entanglement source, H ≥ 1.
    pub h: f64,
    /// Total classical channel gain λ ≥ 0.
    pub lambda: f64,
    /// Amplifier / measurement efficiency η_a ∈ (0, 1].
    pub eta_a: f64,
    /// Propagation efficiency of the EPR arm kept by Alice.
    pub eta_b1: f64,
    /// Propagation efficiency of the EPR arm sent to Bob.
    pub eta_b2: f64,
    /// When false the channel uses independent vacua (H forced to 1).
    pub entangled: bool,
}

impl TeleporterParams {
    pub fn classical(lambda: f64) -> Self {
        TeleporterParams {
            h: 1.0,
            lambda,
            eta_a: 1.0,
            eta_b1: 1.0,
            eta_b2: 1.0,
            entangled: false,
        }
    }

    pub fn quantum(h: f64, lambda: f64) -> Self {
        TeleporterParams {
            h,
            lambda,
            eta_a: 1.0,
            eta_b1: 1.0,
            eta_b2: 1.0,
            entangled: true,
        }
    }

    pub fn with_epr_loss(mut self, eta_b1: f64, eta_b2: f64) -> Self {
        self.eta_b1 = eta_b1;
        self.eta_b2 = eta_b2;
        self
    }

    pub fn with_measurement_loss(mut self, eta_a: f64) -> Self {
        self.eta_a = eta_a;
        self
    }

    /// Effective parametric gain; a classical channel behaves as H = 1.
    pub fn effective_h(&self) -> f64 {
        if self.entangled {
            self.h
        } else {
            1.0
        }
    }

    pub fn validate(&self) -> Result<(), CoreError> {
        check_range("H", self.h, 1.0, f64::INFINITY)?;
        check_range("lambda", self.lambda, 0.0, f64::INFINITY)?;
        check_range("eta_a", self.eta_a, 0.0, 1.0)?;
        if self.eta_a == 0.0 {
            return Err(CoreError::ParamRange { name: "eta_a", value: 0.0 });
        }
        check_range("eta_b1", self.eta_b1, 0.0, 1.0)?;
        check_range("eta_b2", self.eta_b2, 0.0, 1.0)?;
        Ok(())
    }
}

/// Entanglement given either as parametric gain or as squeezing fraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EntanglementSpec {
    ParametricGain(f64),
    /// Fraction f = 1 − V_ent ∈ [0, 1); 0.5 means 50% entanglement squeezing.
    SqueezingFraction(f64),
}

impl EntanglementSpec {
    pub fn parametric_gain(&self) -> Result<f64, CoreError> {
        match *self {
            EntanglementSpec::ParametricGain(h) => {
                check_range("H", h, 1.0, f64::INFINITY)?;
                Ok(h)
            }
            EntanglementSpec::SqueezingFraction(f) => {
                if !f.is_finite() || !(0.0..1.0).contains(&f) {
                    return Err(CoreError::ParamRange { name: "squeezing_fraction", value: f });
                }
                let v_ent = 1.0 - f;
                Ok((1.0 + v_ent).powi(2) / (4.0 * v_ent))
            }
        }
    }
}

/// Entanglement squeezing variance V_ent = (√H − √(H−1))².
pub fn v_ent(h: f64) -> f64 {
    (h.sqrt() - (h - 1.0).sqrt()).powi(2)
}

pub(crate) struct EprPair {
    pub b1: FieldExpression,
    pub b2: FieldExpression,
    pub v4: ModeId,
}

pub(crate) fn build_epr_modes(
    h: f64,
    eta_b1: f64,
    eta_b2: f64,
    reg: &mut ModeRegistry,
) -> Result<EprPair, CoreError> {
    check_range("H", h, 1.0, f64::INFINITY)?;
    check_range("eta_b1", eta_b1, 0.0, 1.0)?;
    check_range("eta_b2", eta_b2, 0.0, 1.0)?;
    let v3 = reg.fresh("v3");
    let v4 = reg.fresh("v4");
    let (b1_ideal, b2_ideal) = two_mode_squeeze(v3, v4, h, reg)?;
    let b1 = loss_channel(&b1_ideal, eta_b1, reg)?;
    let b2 = loss_channel(&b2_ideal, eta_b2, reg)?;
    Ok(EprPair { b1, b2, v4 })
}

/// Lossy EPR pair: two-mode squeezing of fresh vacua followed by independent
/// propagation losses on each arm.
pub fn build_epr(
    h: f64,
    eta_b1: f64,
    eta_b2: f64,
    reg: &mut ModeRegistry,
) -> Result<(FieldExpression, FieldExpression), CoreError> {
    let pair = build_epr_modes(h, eta_b1, eta_b2, reg)?;
    Ok((pair.b1, pair.b2))
}

fn channel_limit_form(
    input: &FieldExpression,
    noise1_dagger: &FieldExpression,
    noise2: &FieldExpression,
    lambda: f64,
    eta_a: f64,
    reg: &mut ModeRegistry,
) -> Result<FieldExpression, CoreError> {
    let mut terms = alloc::vec![
        (re(lambda), input),
        (re(lambda / eta_a.sqrt()), noise1_dagger),
        (re(-1.0), noise2),
    ];
    let va;
    if eta_a < 1.0 {
        let m = reg.fresh("v_a");
        va = FieldExpression::identity(reg, m)?;
        terms.push((re(lambda * ((1.0 - eta_a) / eta_a).sqrt()), &va));
    }
    linear_combine(&terms)
}

/// Classical channel in the limit form:
/// `λ a_in + (λ/√η_a) v1† − v2 + λ√((1−η_a)/η_a) v_a`.
pub fn classical_teleport(
    input: &FieldExpression,
    lambda: f64,
    eta_a: f64,
    reg: &mut ModeRegistry,
) -> Result<FieldExpression, CoreError> {
    check_range("lambda", lambda, 0.0, f64::INFINITY)?;
    check_range("eta_a", eta_a, 0.0, 1.0)?;
    if eta_a == 0.0 {
        return Err(CoreError::ParamRange { name: "eta_a", value: 0.0 });
    }
    let m1 = reg.fresh("v1");
    let m2 = reg.fresh("v2");
    let v1 = FieldExpression::identity(reg, m1)?.dagger();
    let v2 = FieldExpression::identity(reg, m2)?;
    channel_limit_form(input, &v1, &v2, lambda, eta_a, reg)
}

/// Quantum channel: the classical-channel vacua replaced by an EPR pair.
/// Lossless parameters reduce coefficient-wise to
/// `λ a_in + (λ√H − √(H−1)) v3† + (√H − λ√(H−1)) v4`.
pub fn quantum_teleport(
    input: &FieldExpression,
    p: &TeleporterParams,
    reg: &mut ModeRegistry,
) -> Result<FieldExpression, CoreError> {
    p.validate()?;
    let epr = build_epr_modes(p.effective_h(), p.eta_b1, p.eta_b2, reg)?;
    let b1_dagger = epr.b1.dagger();
    let mut out = channel_limit_form(input, &b1_dagger, &epr.b2, p.lambda, p.eta_a, reg)?;
    // π phase redefinition of the idler vacuum, fixing the Eq.-6 sign
    // convention on v4 (see module docs).
    out.rotate_mode(epr.v4, core::f64::consts::PI);
    Ok(out)
}

/// Gain at which the lossless teleporter is pure attenuation: √(H−1)/√H.
pub fn lambda_opt(h: f64) -> f64 {
    ((h - 1.0) / h).sqrt()
}

/// Gain restoring pure attenuation when only Bob's EPR arm is lossy:
/// √(η_b2 (H−1))/√H.
pub fn lambda_opt_bob_loss(h: f64, eta_b2: f64) -> Result<f64, CoreError> {
    check_range("H", h, 1.0, f64::INFINITY)?;
    check_range("eta_b2", eta_b2, 0.0, 1.0)?;
    Ok((eta_b2 * (h - 1.0) / h).sqrt())
}

/// The four-element linear amplifier: split against `b1`, amplify the halves
/// with opposite pump phases, recombine. Equals `√G input + √(G−1) b1†`
/// coefficient-by-coefficient.
pub fn composite_amplifier(
    input: &FieldExpression,
    b1: &FieldExpression,
    gain: f64,
) -> Result<FieldExpression, CoreError> {
    if gain < 1.0 || !gain.is_finite() {
        return Err(CoreError::ParamRange { name: "G", value: gain });
    }
    let (c, d) = beamsplitter(input, b1, 0.5)?;
    let c_amp = degenerate_pa(&c, gain, 1)?;
    let d_amp = degenerate_pa(&d, gain, -1)?;
    let (out, _) = beamsplitter(&c_amp, &d_amp, 0.5)?;
    Ok(out)
}

/// Teleports the two orthogonal polarization components independently, each
/// with its own EPR resource.
pub fn polarization_teleport(
    inputs: (&FieldExpression, &FieldExpression),
    p: &TeleporterParams,
    reg: &mut ModeRegistry,
) -> Result<(FieldExpression, FieldExpression), CoreError> {
    let out_h = quantum_teleport(inputs.0, p, reg)?;
    let out_v = quantum_teleport(inputs.1, p, reg)?;
    Ok((out_h, out_v))
}
