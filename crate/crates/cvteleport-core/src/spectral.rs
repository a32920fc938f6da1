//! Homodyne detection path for sideband fields.
//!
//! Splitting an output onto two homodyne detectors to read orthogonal
//! quadratures costs one unit of vacuum noise; the π/2-combined photocurrent
//! `A = √2(a_out + v_d†)` has photon-number spectrum `V_A = 2⟨a_out†a_out⟩ + 2`
//! in units where the vacuum quadrature variance is 1. The visibility formed
//! from these spectra, `(V_A − V_B)/(V_A + V_B − 4)`, equals the
//! photon-counting visibility at the matching sideband photon number
//! `n̄ = (V⁺ + V⁻)/2 − 1`.

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::expr::{degenerate_pa, linear_combine, FieldExpression};
use crate::fock::{apply, expect_number, FockState};
use crate::interferometer::{engine_counts, MzConfig};
use crate::modes::ModeRegistry;
use crate::{CoreError, C64};

/// Orthogonal quadrature variance spectra (V⁺, V⁻) at the quadrature angle
/// convention θ = 0. Vacuum is (1, 1); minimum-uncertainty inputs satisfy
/// V⁺·V⁻ = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpectrumPair {
    pub v_plus: f64,
    pub v_minus: f64,
}

impl QuadratureSpectrumPair {
    pub fn new(v_plus: f64, v_minus: f64) -> Result<Self, CoreError> {
        if v_plus < 0.0 || !v_plus.is_finite() {
            return Err(CoreError::ParamRange { name: "v_plus", value: v_plus });
        }
        if v_minus < 0.0 || !v_minus.is_finite() {
            return Err(CoreError::ParamRange { name: "v_minus", value: v_minus });
        }
        Ok(QuadratureSpectrumPair { v_plus, v_minus })
    }

    pub fn vacuum() -> Self {
        QuadratureSpectrumPair { v_plus: 1.0, v_minus: 1.0 }
    }

    pub fn is_minimum_uncertainty(&self, tol: f64) -> bool {
        (self.v_plus * self.v_minus - 1.0).abs() <= tol
    }
}

/// Total mean photon number in the upper and lower sidebands,
/// `n̄(±ω) = (V⁺ + V⁻)/2 − 1`.
pub fn sideband_nbar(q: &QuadratureSpectrumPair) -> Result<f64, CoreError> {
    let nbar = 0.5 * (q.v_plus + q.v_minus) - 1.0;
    if nbar < -1e-12 {
        return Err(CoreError::NonPhysicalSpectrum { nbar });
    }
    Ok(nbar.max(0.0))
}

/// The π/2-combined photocurrent of a dual-homodyne split of `e_out`:
/// `√2·(e_out + v_d†)` with a fresh vacuum mode `v_d`.
pub fn homodyne_photocurrent(
    e_out: &FieldExpression,
    reg: &mut ModeRegistry,
) -> Result<FieldExpression, CoreError> {
    let v_d = reg.fresh("v_d");
    let vac = FieldExpression::identity(reg, v_d)?;
    let s = C64::new(core::f64::consts::SQRT_2, 0.0);
    linear_combine(&[(s, e_out), (s, &vac.dagger())])
}

/// Photon-number spectrum of a combined photocurrent `A`. For
/// `A = √2(e_out + v_d†)` this evaluates to `2⟨e_out†e_out⟩ + 2`.
pub fn photon_number_spectrum(a: &FieldExpression, s: &FockState) -> Result<f64, CoreError> {
    expect_number(a, s)
}

/// Quadrature spectrum `⟨|X_θ|²⟩` with `X_θ = e·e^{-iθ} + e†·e^{iθ}`,
/// including the coherent (signal) power.
pub fn quadrature_spectrum(
    e: &FieldExpression,
    s: &FockState,
    theta: f64,
) -> Result<f64, CoreError> {
    s.check_normalized()?;
    let phase = C64::from_polar(1.0, -theta);
    let x = linear_combine(&[(phase, e), (phase.conj(), &e.dagger())])?;
    // ⟨X†X⟩ = ⟨X²⟩ since X is Hermitian.
    Ok(apply(&x, s).norm_sqr())
}

/// Spectral visibility `(V_A − V_B)/(V_A + V_B − 4)`; the −4 removes the two
/// detection-splitting vacuum penalties. Returns `(visibility, degenerate)`.
pub fn spectral_visibility(v_a: f64, v_b: f64) -> Result<(f64, bool), CoreError> {
    if v_a < 2.0 - 1e-9 || !v_a.is_finite() {
        return Err(CoreError::ParamRange { name: "V_A", value: v_a });
    }
    if v_b < 2.0 - 1e-9 || !v_b.is_finite() {
        return Err(CoreError::ParamRange { name: "V_B", value: v_b });
    }
    let denom = v_a + v_b - 4.0;
    if denom <= 1e-300 {
        return Ok((0.0, true));
    }
    Ok(((v_a - v_b) / denom, false))
}

/// Spectral readout of one interferometer configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralReport {
    pub v_a: f64,
    pub v_b: f64,
    pub visibility: f64,
    pub degenerate: bool,
}

/// Runs the interferometer and reads both outputs through the homodyne
/// pipeline: `V = 2·count + 2` per output, then the spectral visibility.
pub fn spectral_mz_report(cfg: &MzConfig) -> Result<SpectralReport, CoreError> {
    let (count_a, count_b) = engine_counts(cfg)?;
    let v_a = 2.0 * count_a + 2.0;
    let v_b = 2.0 * count_b + 2.0;
    let (visibility, degenerate) = spectral_visibility(v_a, v_b)?;
    Ok(SpectralReport { v_a, v_b, visibility, degenerate })
}

/// A coherent signal of power `V_s` imposed at the θ = 0 quadrature:
/// identity expression displaced by `√V_s / 2`. Returns the expression and
/// its measured (V⁺, V⁻) spectra.
pub fn coherent_signal_input(
    v_s: f64,
    reg: &mut ModeRegistry,
) -> Result<(FieldExpression, QuadratureSpectrumPair), CoreError> {
    if v_s < 0.0 || !v_s.is_finite() {
        return Err(CoreError::ParamRange { name: "V_s", value: v_s });
    }
    let m = reg.fresh("sig");
    let mut e = FieldExpression::identity(reg, m)?;
    e.set_displacement(C64::new(0.5 * v_s.sqrt(), 0.0));
    let vac = FockState::vacuum(reg);
    let pair = QuadratureSpectrumPair::new(
        quadrature_spectrum(&e, &vac, 0.0)?,
        quadrature_spectrum(&e, &vac, core::f64::consts::FRAC_PI_2)?,
    )?;
    Ok((e, pair))
}

/// A single-mode squeezed input with maximum quadrature spectrum `V⁺` at
/// θ = 0 (minimum-uncertainty: V⁻ = 1/V⁺). Returns the expression and its
/// measured spectra.
pub fn squeezed_input(
    v_plus: f64,
    reg: &mut ModeRegistry,
) -> Result<(FieldExpression, QuadratureSpectrumPair), CoreError> {
    if v_plus < 1.0 || !v_plus.is_finite() {
        return Err(CoreError::ParamRange { name: "v_plus", value: v_plus });
    }
    let m = reg.fresh("sqz");
    let base = FieldExpression::identity(reg, m)?;
    // V⁺ = e^{2r} = (cosh r + sinh r)², so G = cosh²r = (V⁺ + 2 + 1/V⁺)/4.
    let gain = 0.25 * (v_plus + 2.0 + 1.0 / v_plus);
    let e = degenerate_pa(&base, gain, 1)?;
    let vac = FockState::vacuum(reg);
    let pair = QuadratureSpectrumPair::new(
        quadrature_spectrum(&e, &vac, 0.0)?,
        quadrature_spectrum(&e, &vac, core::f64::consts::FRAC_PI_2)?,
    )?;
    Ok((e, pair))
}
