use std::path::Path;

use serde::Serialize;

use super::solver::SimConfig;
use crate::error::argument;
use crate::moduli::EmpiricalModulus;
use crate::tolerances::{L2_GROWTH_REL, LINF_WIGGLE_REL};
use crate::{Result, Scalar};

#[derive(Clone, Debug, Serialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
    /// `‖θ‖_{Ḣ^{β/2}}`.
    pub hdot_half_beta: f64,
    /// `∫₀ᵗ 2ν‖θ‖²_{Ḣ^{β/2}} + 2ε‖∇θ‖²`.
    pub dissipated: f64,
    /// `‖θ(t)‖² + dissipated − ‖θ₀‖²`.
    pub residual: f64,
    pub max_u: f64,
    /// Advisory `0.5·Δx/max|u|`.
    pub cfl_dt: f64,
    pub cfl_ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub empirical: Option<EmpiricalModulus<f64>>,
}

pub fn write_diagnostics_csv(trace: &[DiagnosticsRecord], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "t",
        "l1",
        "l2",
        "linf",
        "hdot_half_beta",
        "dissipated",
        "residual",
        "max_u",
        "cfl_dt",
        "cfl_ok",
    ])?;
    let g = |x: f64| format!("{x:.17e}");
    for d in trace {
        w.write_record([
            g(d.t),
            g(d.l1),
            g(d.l2),
            g(d.linf),
            g(d.hdot_half_beta),
            g(d.dissipated),
            g(d.residual),
            g(d.max_u),
            g(d.cfl_dt),
            d.cfl_ok.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct NormCheck {
    pub initial: f64,
    pub max: f64,
    /// `max(0, max/initial − 1)`.
    pub excess: f64,
    pub tolerance: f64,
    pub ok: bool,
}

impl NormCheck {
    fn new(values: impl Iterator<Item = f64>, initial: f64, tolerance: f64) -> Self {
        let max = values.fold(initial, f64::max);
        let excess = if initial > 0.0 {
            (max / initial - 1.0).max(0.0)
        } else {
            max
        };
        Self {
            initial,
            max,
            excess,
            tolerance,
            ok: excess <= tolerance,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EnergyReport {
    pub l1: NormCheck,
    pub l2: NormCheck,
    pub linf: NormCheck,
    /// L² nonincreasing between consecutive records (checked when `ν + ε > 0`).
    pub l2_monotone: bool,
    pub residual: f64,
    pub relative_residual: f64,
    /// `max_{t>0} ‖θ(t)‖_{L∞} t^{1/β} / ‖θ₀‖_{L²}`, the smallest `C` with
    /// `‖θ(t)‖_{L∞} ≤ C t^{−1/β}‖θ₀‖_{L²}` on the trace.
    pub c_beta_fit: Option<f64>,
    pub cfl_ok: bool,
}

/// Checks the trace against the initial norms and reports the energy balance.
///
/// The maximum principle holds for the equation but not exactly for its
/// Fourier–Galerkin truncation, so `L¹` and `L∞` carry a `10⁻³` relative slack.
pub fn energy_report<T: Scalar>(
    trace: &[DiagnosticsRecord],
    cfg: &SimConfig<T>,
) -> Result<EnergyReport> {
    let Some(first) = trace.first() else {
        return argument("empty diagnostics trace");
    };
    let last = &trace[trace.len() - 1];
    let dissipative = cfg.nu + cfg.epsilon > T::zero();
    let l2_monotone = !dissipative
        || trace
            .windows(2)
            .all(|w| w[1].l2 <= w[0].l2 * (1.0 + L2_GROWTH_REL));
    let beta = cfg.beta.f64();
    let c_fit = trace
        .iter()
        .filter(|d| d.t > 0.0)
        .map(|d| d.linf * d.t.powf(1.0 / beta) / first.l2)
        .fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.max(x))))
        .filter(|_| first.l2 > 0.0);
    let e0 = first.l2 * first.l2;
    Ok(EnergyReport {
        l1: NormCheck::new(trace.iter().map(|d| d.l1), first.l1, LINF_WIGGLE_REL),
        l2: NormCheck::new(trace.iter().map(|d| d.l2), first.l2, L2_GROWTH_REL),
        linf: NormCheck::new(trace.iter().map(|d| d.linf), first.linf, LINF_WIGGLE_REL),
        l2_monotone,
        residual: last.residual,
        relative_residual: if e0 > 0.0 {
            last.residual / e0
        } else {
            last.residual
        },
        c_beta_fit: c_fit,
        cfl_ok: trace.iter().all(|d| d.cfl_ok),
    })
}
