//! Flag/config-file resolution into simulation parameters. A JSON config
//! supplies defaults; explicit flags override it field by field.

use clap::{Args, ValueEnum};
use cvteleport_core::interferometer::MzConfig;
use cvteleport_core::teleporter::{EntanglementSpec, TeleporterParams};
use cvteleport_core::C64;
use serde::Deserialize;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputSel {
    /// One photon in the superposition (x, y) of the two polarizations.
    Photon,
    /// Coherent amplitudes x and y on the two polarizations.
    Coherent,
    /// Mean-photon-number input without committing to a state.
    Nbar,
}

#[derive(Debug, Clone, Args)]
pub struct ParamFlags {
    /// Parametric gain of the entanglement source (H ≥ 1).
    #[arg(long = "H", conflicts_with = "entanglement_pct")]
    pub h: Option<f64>,
    /// Entanglement as squeezing percent; converted via H = (1+V)²/(4V), V = 1 − pct/100.
    #[arg(long)]
    pub entanglement_pct: Option<f64>,
    /// Classical channel gain λ.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Measurement/amplifier efficiency η_a.
    #[arg(long)]
    pub eta_a: Option<f64>,
    /// Propagation efficiency of Alice's EPR arm.
    #[arg(long)]
    pub eta_b1: Option<f64>,
    /// Propagation efficiency of Bob's EPR arm.
    #[arg(long)]
    pub eta_b2: Option<f64>,
    /// Balancing attenuation η of the unteleported arm.
    #[arg(long)]
    pub balance_eta: Option<f64>,
    /// Mean input photon number n̄.
    #[arg(long)]
    pub nbar: Option<f64>,
    /// Pair-source interaction strength χ.
    #[arg(long)]
    pub chi: Option<f64>,
    /// Input preparation.
    #[arg(long, value_enum)]
    pub input: Option<InputSel>,
    /// Horizontal amplitude (photon superposition or coherent).
    #[arg(long)]
    pub x: Option<f64>,
    /// Vertical amplitude (photon superposition or coherent).
    #[arg(long)]
    pub y: Option<f64>,
    /// Number of grid points.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Sweep range as lo:hi.
    #[arg(long)]
    pub range: Option<String>,
    /// Per-mode Fock cutoff for the dense oracle.
    #[arg(long)]
    pub nmax: Option<usize>,
    /// Worker threads for sweeps (output is ordering-independent).
    #[arg(long)]
    pub threads: Option<usize>,
    /// JSON config file; explicit flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(rename = "H")]
    h: Option<f64>,
    entanglement_pct: Option<f64>,
    lambda: Option<f64>,
    eta_a: Option<f64>,
    eta_b1: Option<f64>,
    eta_b2: Option<f64>,
    balance_eta: Option<f64>,
    nbar: Option<f64>,
    chi: Option<f64>,
    input: Option<InputSel>,
    x: Option<f64>,
    y: Option<f64>,
    steps: Option<usize>,
    range: Option<String>,
    nmax: Option<usize>,
    threads: Option<usize>,
}

/// Fully resolved parameters with defaults applied.
#[derive(Debug, Clone)]
pub struct Params {
    pub h: f64,
    pub squeezing_pct: f64,
    pub lambda: f64,
    pub eta_a: f64,
    pub eta_b1: f64,
    pub eta_b2: f64,
    pub balance_eta: f64,
    pub nbar: f64,
    pub chi: f64,
    pub input: InputSel,
    pub x: f64,
    pub y: f64,
    pub steps: usize,
    pub range: Option<(f64, f64)>,
    pub nmax: Option<usize>,
    pub threads: Option<usize>,
}

pub fn h_from_pct(pct: f64) -> Result<f64, String> {
    EntanglementSpec::SqueezingFraction(pct / 100.0)
        .parametric_gain()
        .map_err(|e| e.to_string())
}

pub fn pct_from_h(h: f64) -> f64 {
    (1.0 - cvteleport_core::teleporter::v_ent(h)) * 100.0
}

fn parse_range(text: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| format!("range must be lo:hi, got {text:?}"))?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("range lo: {e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("range hi: {e}"))?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(format!("range requires finite lo < hi, got {lo}:{hi}"));
    }
    Ok((lo, hi))
}

impl ParamFlags {
    pub fn resolve(&self) -> Result<Params, String> {
        let file: ConfigFile = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| format!("config {}: {e}", path.display()))?;
                serde_json::from_str(&text)
                    .map_err(|e| format!("config {}: {e}", path.display()))?
            }
            None => ConfigFile::default(),
        };
        let pct_in = self.entanglement_pct.or(file.entanglement_pct);
        let h_in = self.h.or(file.h);
        let h = match (h_in, pct_in) {
            // An explicit --H wins over a config-file percent and vice versa;
            // clap already rejects both flags at once.
            (Some(h), _) if self.h.is_some() => h,
            (_, Some(pct)) => h_from_pct(pct)?,
            (Some(h), None) => h,
            (None, None) => 1.0,
        };
        if !(h.is_finite() && h >= 1.0) {
            return Err(format!("H must be ≥ 1, got {h}"));
        }
        let range = match self.range.as_deref().or(file.range.as_deref()) {
            Some(text) => Some(parse_range(text)?),
            None => None,
        };
        let steps = self.steps.or(file.steps).unwrap_or(101);
        if steps < 2 {
            return Err(format!("steps must be ≥ 2, got {steps}"));
        }
        Ok(Params {
            h,
            squeezing_pct: pct_from_h(h),
            lambda: self.lambda.or(file.lambda).unwrap_or(1.0),
            eta_a: self.eta_a.or(file.eta_a).unwrap_or(1.0),
            eta_b1: self.eta_b1.or(file.eta_b1).unwrap_or(1.0),
            eta_b2: self.eta_b2.or(file.eta_b2).unwrap_or(1.0),
            balance_eta: self.balance_eta.or(file.balance_eta).unwrap_or(1.0),
            nbar: self.nbar.or(file.nbar).unwrap_or(1.0),
            chi: self.chi.or(file.chi).unwrap_or(0.05),
            input: self.input.or(file.input).unwrap_or(InputSel::Photon),
            x: self.x.or(file.x).unwrap_or(1.0),
            y: self.y.or(file.y).unwrap_or(0.0),
            steps,
            range,
            nmax: self.nmax.or(file.nmax),
            threads: self.threads.or(file.threads),
        })
    }
}

impl Params {
    pub fn teleporter(&self) -> TeleporterParams {
        TeleporterParams::quantum(self.h, self.lambda)
            .with_epr_loss(self.eta_b1, self.eta_b2)
            .with_measurement_loss(self.eta_a)
    }

    pub fn mz_config(&self) -> Result<MzConfig, String> {
        let tele = self.teleporter();
        let cfg = match self.input {
            InputSel::Photon => {
                let norm = (self.x * self.x + self.y * self.y).sqrt();
                if norm <= 0.0 {
                    return Err("photon input requires nonzero (x, y)".into());
                }
                MzConfig::superposition(
                    tele,
                    C64::new(self.x / norm, 0.0),
                    C64::new(self.y / norm, 0.0),
                )
            }
            InputSel::Coherent => {
                MzConfig::coherent(tele, C64::new(self.x, 0.0), C64::new(self.y, 0.0))
            }
            InputSel::Nbar => MzConfig::nbar(tele, self.nbar),
        }
        .with_balance(self.balance_eta);
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }
}
