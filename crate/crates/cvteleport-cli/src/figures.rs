//! Figure reproductions, generic sweeps, optimizer queries and single-point
//! oracle checks.

use crate::output::{num, Table};
use crate::params::{h_from_pct, InputSel, Params};
use clap::ValueEnum;
use cvteleport_core::interferometer::{
    balance_eta_lossy, engine_counts, lambda_max, lambda_max_lossy, optimize_gain_numeric,
    visibility_report, CountsMethod, FreeParams, MzConfig, VisibilityReport,
};
use cvteleport_core::oracle::{oracle_visibility, LEAKAGE_LIMIT};
use cvteleport_core::teleporter::{lambda_opt, TeleporterParams};
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    Fig5,
    Fig6,
    Fig7a,
    Fig7b,
    Fig8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepVariable {
    Lambda,
    EtaB,
    EntanglementFraction,
    Nbar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FreeSel {
    Lambda,
    LambdaBalance,
}

/// Entanglement squeezing levels used by the published curves.
const CURVE_PCT: [f64; 3] = [0.0, 50.0, 90.0];

const PCT_NOTE: &str =
    "entanglement given as squeezing percent p: H = (1+V)^2/(4V) with V = 1 - p/100";

fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    (0..steps)
        .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
        .collect()
}

fn curve_h() -> Vec<(f64, f64)> {
    CURVE_PCT
        .iter()
        .map(|&pct| (pct, h_from_pct(pct).expect("curve percent valid")))
        .collect()
}

fn report_for(cfg: &MzConfig) -> Result<VisibilityReport, String> {
    visibility_report(cfg).map_err(|e| e.to_string())
}

/// Per-λ balancing attenuation maximizing the visibility: the count
/// difference is √η·λ while the total is (η + λ²)/2 + 2β², so the optimum
/// sits at η = λ² + 4β², clipped to physical attenuation.
fn balance_opt(h: f64, lambda: f64) -> f64 {
    let beta = lambda * h.sqrt() - (h - 1.0).sqrt();
    (lambda * lambda + 4.0 * beta * beta).min(1.0)
}

pub fn cmd_fig(figure: Figure, params: &Params) -> Result<Table, String> {
    match figure {
        Figure::Fig5 => fig_gain_curves(params, false),
        Figure::Fig6 => fig_gain_curves(params, true),
        Figure::Fig7a => fig_loss_unbalanced(params),
        Figure::Fig7b => fig_loss_balanced(params),
        Figure::Fig8 => fig_gain_for_max(params),
    }
}

/// Visibility versus gain for one input photon (optionally with the
/// balancing attenuation applied per point).
fn fig_gain_curves(params: &Params, balanced: bool) -> Result<Table, String> {
    let grid = linspace(0.0, 2.0, params.steps);
    let mut rows = Vec::new();
    for &(pct, h) in &curve_h() {
        for &lam in &grid {
            let eta = if balanced { balance_opt(h, lam) } else { 1.0 };
            let cfg = MzConfig::single_photon(TeleporterParams::quantum(h, lam))
                .with_balance(eta);
            let rep = report_for(&cfg)?;
            rows.push(vec![
                num(pct),
                num(h),
                num(lam),
                num(eta),
                num(rep.count_a),
                num(rep.count_b),
                num(rep.visibility),
                rep.method.as_str().to_owned(),
            ]);
        }
    }
    Ok(Table {
        comments: vec![
            format!(
                "visibility versus gain, one input photon{}",
                if balanced { ", per-point attenuation balancing" } else { "" }
            ),
            PCT_NOTE.to_owned(),
        ],
        header: vec![
            "squeezing_pct",
            "H",
            "lambda",
            "balance_eta",
            "count_a",
            "count_b",
            "visibility",
            "method",
        ],
        rows,
    })
}

/// Maximum (gain-optimized, unbalanced) visibility versus EPR transmission.
fn fig_loss_unbalanced(params: &Params) -> Result<Table, String> {
    let grid = linspace(0.0, 1.0, params.steps);
    let mut rows = Vec::new();
    for &(pct, h) in &curve_h() {
        for &eta_b in &grid {
            let lam = lambda_max_lossy(h, eta_b).map_err(|e| e.to_string())?;
            let p = TeleporterParams::quantum(h, lam).with_epr_loss(eta_b, eta_b);
            let rep = report_for(&MzConfig::single_photon(p))?;
            rows.push(vec![
                num(pct),
                num(h),
                num(eta_b),
                num(lam),
                "closed_form".to_owned(),
                num(rep.visibility),
                rep.method.as_str().to_owned(),
            ]);
        }
    }
    Ok(Table {
        comments: vec![
            "maximum visibility versus EPR-arm transmission, unbalanced".to_owned(),
            PCT_NOTE.to_owned(),
        ],
        header: vec![
            "squeezing_pct",
            "H",
            "eta_b",
            "lambda_max",
            "lambda_max_method",
            "visibility",
            "method",
        ],
        rows,
    })
}

/// Balanced-interferometer visibility versus EPR transmission at 50%
/// entanglement: λ stays at λ_opt, balancing follows η = (5 − 4η_b)λ².
fn fig_loss_balanced(params: &Params) -> Result<Table, String> {
    let pct = 50.0;
    let h = h_from_pct(pct)?;
    let lam = lambda_opt(h);
    let grid = linspace(0.0, 1.0, params.steps);
    let mut rows = Vec::new();
    for &eta_b in &grid {
        let eta = balance_eta_lossy(lam, eta_b).map_err(|e| e.to_string())?;
        let p = TeleporterParams::quantum(h, lam).with_epr_loss(eta_b, eta_b);
        let rep = report_for(&MzConfig::single_photon(p).with_balance(eta))?;
        rows.push(vec![
            num(pct),
            num(h),
            num(eta_b),
            num(lam),
            num(eta),
            num(rep.visibility),
            rep.method.as_str().to_owned(),
        ]);
    }
    Ok(Table {
        comments: vec![
            "balanced visibility versus EPR-arm transmission at 50% squeezing".to_owned(),
            PCT_NOTE.to_owned(),
        ],
        header: vec![
            "squeezing_pct",
            "H",
            "eta_b",
            "lambda",
            "balance_eta",
            "visibility",
            "method",
        ],
        rows,
    })
}

/// Gain for maximum visibility (λ_max²) and the visibility reached, versus
/// entanglement, for several input photon numbers.
fn fig_gain_for_max(params: &Params) -> Result<Table, String> {
    let pct_grid = linspace(0.0, 99.0, params.steps);
    let mut rows = Vec::new();
    for &nbar in &[0.25, 1.0, 4.0] {
        for &pct in &pct_grid {
            let h = h_from_pct(pct)?;
            let lam = lambda_max(h, nbar).map_err(|e| e.to_string())?;
            let cfg = MzConfig::nbar(TeleporterParams::quantum(h, lam), nbar);
            let rep = report_for(&cfg)?;
            rows.push(vec![
                num(nbar),
                num(pct),
                num(h),
                num(lam),
                num(lam * lam),
                "closed_form".to_owned(),
                num(rep.visibility),
                rep.method.as_str().to_owned(),
            ]);
        }
    }
    Ok(Table {
        comments: vec![
            "optimal gain and maximum visibility versus entanglement".to_owned(),
            PCT_NOTE.to_owned(),
        ],
        header: vec![
            "nbar",
            "squeezing_pct",
            "H",
            "lambda_max",
            "lambda_max_sq",
            "lambda_max_method",
            "v_max",
            "v_max_method",
        ],
        rows,
    })
}

fn effective_nbar(p: &Params) -> f64 {
    match p.input {
        InputSel::Photon => 1.0,
        InputSel::Coherent => p.x * p.x + p.y * p.y,
        InputSel::Nbar => p.nbar,
    }
}

/// Closed-form optimal gain for the current point when one applies, plus a
/// method tag; falls back to the numeric argmax otherwise.
fn point_lambda_max(p: &Params) -> Result<(f64, &'static str), String> {
    let nbar = effective_nbar(p);
    let lossless_epr = p.eta_b1 == 1.0 && p.eta_b2 == 1.0;
    if p.eta_a == 1.0 && lossless_epr {
        return Ok((lambda_max(p.h, nbar).map_err(|e| e.to_string())?, "closed_form"));
    }
    if p.eta_a == 1.0 && p.eta_b1 == p.eta_b2 && nbar == 1.0 {
        return Ok((
            lambda_max_lossy(p.h, p.eta_b1).map_err(|e| e.to_string())?,
            "closed_form",
        ));
    }
    let opt = optimize_gain_numeric(&p.mz_config()?, FreeParams::Lambda)
        .map_err(|e| e.to_string())?;
    Ok((opt.lambda, "engine"))
}

pub fn cmd_sweep(variable: SweepVariable, params: &Params) -> Result<Table, String> {
    let (lo, hi) = params.range.unwrap_or(match variable {
        SweepVariable::Lambda => (0.0, 2.0),
        SweepVariable::EtaB => (0.0, 1.0),
        SweepVariable::EntanglementFraction => (0.0, 0.99),
        SweepVariable::Nbar => (0.0, 4.0),
    });
    let grid = linspace(lo, hi, params.steps);
    let evaluate = |value: f64| -> Result<Vec<String>, String> {
        let mut p = params.clone();
        match variable {
            SweepVariable::Lambda => p.lambda = value,
            SweepVariable::EtaB => {
                p.eta_b1 = value;
                p.eta_b2 = value;
            }
            SweepVariable::EntanglementFraction => {
                p.h = h_from_pct(value * 100.0)?;
                p.squeezing_pct = value * 100.0;
            }
            SweepVariable::Nbar => p.nbar = value,
        }
        let cfg = p.mz_config()?;
        let (count_a, count_b) = engine_counts(&cfg).map_err(|e| e.to_string())?;
        let rep = VisibilityReport::from_counts(count_a, count_b, CountsMethod::Engine);
        let (lmax, lmax_method) = point_lambda_max(&p)?;
        let mut p_at_max = p.clone();
        p_at_max.lambda = lmax;
        let vmax = engine_counts(&p_at_max.mz_config()?)
            .map(|(a, b)| VisibilityReport::from_counts(a, b, CountsMethod::Engine).visibility)
            .map_err(|e| e.to_string())?;
        Ok(vec![
            num(value),
            num(p.squeezing_pct),
            num(p.h),
            num(p.lambda),
            num(p.eta_a),
            num(p.eta_b1),
            num(p.eta_b2),
            num(p.balance_eta),
            num(p.nbar),
            num(count_a),
            num(count_b),
            num(rep.visibility),
            "engine".to_owned(),
            num(lmax),
            lmax_method.to_owned(),
            num(vmax),
            "engine".to_owned(),
        ])
    };
    // Points are independent; collect preserves grid order so the output is
    // identical for any thread count.
    let rows: Result<Vec<_>, String> = grid.par_iter().map(|&v| evaluate(v)).collect();
    let variable_name = match variable {
        SweepVariable::Lambda => "lambda",
        SweepVariable::EtaB => "eta_b",
        SweepVariable::EntanglementFraction => "entanglement_fraction",
        SweepVariable::Nbar => "nbar",
    };
    Ok(Table {
        comments: vec![
            format!("sweep of {variable_name} over [{lo}, {hi}] in {} points", params.steps),
            PCT_NOTE.to_owned(),
        ],
        header: vec![
            "value",
            "squeezing_pct",
            "H",
            "lambda",
            "eta_a",
            "eta_b1",
            "eta_b2",
            "balance_eta",
            "nbar",
            "count_a",
            "count_b",
            "visibility",
            "visibility_method",
            "lambda_max",
            "lambda_max_method",
            "v_max",
            "v_max_method",
        ],
        rows: rows?,
    })
}

pub fn cmd_optimize(free: FreeSel, params: &Params) -> Result<serde_json::Value, String> {
    let free = match free {
        FreeSel::Lambda => FreeParams::Lambda,
        FreeSel::LambdaBalance => FreeParams::LambdaAndBalance,
    };
    let opt = optimize_gain_numeric(&params.mz_config()?, free).map_err(|e| e.to_string())?;
    Ok(serde_json::json!({
        "lambda": opt.lambda,
        "balance_eta": opt.balance_eta,
        "visibility": opt.visibility,
        "flat": opt.flat,
        "method": "engine",
    }))
}

pub struct OracleCheck {
    pub json: serde_json::Value,
    pub leaked: bool,
}

pub fn cmd_oracle_check(params: &Params) -> Result<OracleCheck, String> {
    let n_max = params.nmax.unwrap_or(12);
    let rep = oracle_visibility(&params.mz_config()?, n_max).map_err(|e| e.to_string())?;
    let leakage = rep.leakage.unwrap_or(0.0);
    let leaked = leakage > LEAKAGE_LIMIT;
    Ok(OracleCheck {
        json: serde_json::json!({
            "n_max": n_max,
            "count_a": rep.count_a,
            "count_b": rep.count_b,
            "visibility": rep.visibility,
            "method": "oracle",
            "leakage": leakage,
            "reliable": !leaked,
        }),
        leaked,
    })
}
