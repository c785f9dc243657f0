use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::bounds::{check_beta, dissipation_bound, drift_bound, BoundOptions, DriftVariant};
use crate::error::argument;
use crate::moduli::{
    AdmissibleConstants, AppendixModulus, FamilyVariant, Modulus, Regime, StationaryModulus,
    StationaryVariant, TimeDependentModulus,
};
use crate::multiplier::MultiplierSpec;
use crate::scalar::logspace;
use crate::tolerances::{BREAKPOINT_EXCLUSION, MARGIN_FLOOR};
use crate::{Result, Scalar};

#[derive(Clone, Copy, Debug)]
pub struct CertOptions<T> {
    pub bounds: BoundOptions<T>,
    /// A point passes when `margin < −margin_floor · scale`.
    pub margin_floor: T,
    pub parallel: bool,
}

impl<T: Scalar> Default for CertOptions<T> {
    fn default() -> Self {
        Self {
            bounds: BoundOptions::default(),
            margin_floor: T::c(MARGIN_FLOOR),
            parallel: true,
        }
    }
}

impl<T: Scalar> CertOptions<T> {
    /// Quadrature and tail tolerances divided by `factor`.
    pub fn tightened(&self, factor: T) -> Self {
        Self {
            bounds: self.bounds.tightened(factor),
            ..*self
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PointRecord {
    pub xi: f64,
    pub xi0: Option<f64>,
    pub case: Option<u8>,
    pub d_value: f64,
    pub omega_bound: f64,
    pub slope: f64,
    /// `∂ξ₀ω · ρ ξ₀^{1−β}` (time-dependent certificates).
    pub front_term: f64,
    /// `ε ∂ξξω`.
    pub viscous_term: f64,
    pub margin: f64,
    /// Largest magnitude among the summed terms.
    pub scale: f64,
    pub tail_bound: f64,
    pub quad_error: f64,
    pub converged: bool,
    pub pass: bool,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct AppendixCondition {
    /// `C m(1)/|1−α−β|`, or `C m(1)` when `α+β = 1`.
    pub c_ab: f64,
    pub exponent: f64,
    /// `C_{α,β} δ^{5/2−α−β}`.
    pub lhs: f64,
    /// `(3/4)ε`.
    pub rhs: f64,
    pub holds: bool,
    /// Root of `C_{α,β} δ^{5/2−α−β} = (3/4)ε`.
    pub delta_max_raw: f64,
    /// The root clamped below 4/9.
    pub delta_max: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateReport {
    pub kind: String,
    pub parameters: serde_json::Value,
    pub constants: Option<serde_json::Value>,
    /// False when the supplied constants violate the admissibility constraints.
    pub guaranteed: bool,
    pub notes: Vec<String>,
    pub n_points: usize,
    pub n_failed: usize,
    pub pass: bool,
    /// Largest `margin / scale`, the point closest to failure.
    pub worst_relative_margin: f64,
    pub worst_margin: f64,
    pub worst_xi: f64,
    pub worst_xi0: Option<f64>,
    pub max_tail_bound: f64,
    pub all_converged: bool,
    pub analytic: Option<AppendixCondition>,
    pub points: Vec<PointRecord>,
}

impl CertificateReport {
    fn assemble(
        kind: &str,
        parameters: serde_json::Value,
        constants: Option<serde_json::Value>,
        guaranteed: bool,
        notes: Vec<String>,
        points: Vec<PointRecord>,
    ) -> Self {
        let mut worst = (f64::NEG_INFINITY, f64::NAN, f64::NAN, None);
        let mut tail = 0.0f64;
        let mut failed = 0;
        for p in &points {
            let rel = if p.scale > 0.0 {
                p.margin / p.scale
            } else {
                p.margin
            };
            if rel > worst.0 || rel.is_nan() {
                worst = (rel, p.margin, p.xi, p.xi0);
            }
            tail = tail.max(p.tail_bound);
            failed += usize::from(!p.pass);
        }
        Self {
            kind: kind.into(),
            parameters,
            constants,
            guaranteed,
            notes,
            n_points: points.len(),
            n_failed: failed,
            pass: failed == 0 && !points.is_empty(),
            worst_relative_margin: worst.0,
            worst_margin: worst.1,
            worst_xi: worst.2,
            worst_xi0: worst.3,
            max_tail_bound: tail,
            all_converged: points.iter().all(|p| p.converged),
            analytic: None,
            points,
        }
    }

    /// Exit status convention: 0 pass, 2 fail, 3 not guaranteed.
    pub fn exit_code(&self) -> i32 {
        if !self.guaranteed {
            3
        } else if self.pass {
            0
        } else {
            2
        }
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(f), self)?;
        Ok(())
    }

    pub fn write_margins_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record([
            "xi",
            "xi0",
            "case",
            "d_value",
            "omega_bound",
            "slope",
            "front_term",
            "viscous_term",
            "margin",
            "scale",
            "tail_bound",
            "pass",
        ])?;
        let g = |x: f64| format!("{x:.17e}");
        for p in &self.points {
            w.write_record([
                g(p.xi),
                p.xi0.map(g).unwrap_or_default(),
                p.case.map(|c| c.to_string()).unwrap_or_default(),
                g(p.d_value),
                g(p.omega_bound),
                g(p.slope),
                g(p.front_term),
                g(p.viscous_term),
                g(p.margin),
                g(p.scale),
                g(p.tail_bound),
                p.pass.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn summary_line(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(
            out,
            "{}: {} ({} / {} points failed, worst margin/scale {:.3e} at xi = {:.4e})",
            self.kind,
            if self.pass { "pass" } else { "fail" },
            self.n_failed,
            self.n_points,
            self.worst_relative_margin,
            self.worst_xi
        )
    }
}

/// Moves points inside the excluded neighbourhood of a breakpoint just outside it.
pub fn nudge_off_breakpoints<T: Scalar>(xi: T, bps: &[T]) -> T {
    let eps = T::c(2.0 * BREAKPOINT_EXCLUSION);
    for &b in bps {
        if (xi - b).abs() <= eps * b {
            return if xi < b {
                b * (T::one() - eps)
            } else {
                b * (T::one() + eps)
            };
        }
    }
    xi
}

fn map_points<I, F>(items: Vec<I>, parallel: bool, f: F) -> Result<Vec<PointRecord>>
where
    I: Send + Sync,
    F: Fn(&I) -> Result<PointRecord> + Send + Sync,
{
    // collect preserves index order, so the fold in `assemble` is deterministic
    if parallel {
        items.par_iter().map(&f).collect()
    } else {
        items.iter().map(&f).collect()
    }
}

struct Terms<T> {
    d: T,
    omega: T,
    slope: T,
    front: T,
    viscous: T,
    tail: T,
    qerr: T,
    converged: bool,
}

fn record<T: Scalar>(
    xi: T,
    xi0: Option<T>,
    case: Option<u8>,
    t: Terms<T>,
    floor: T,
) -> PointRecord {
    let drift = t.omega * t.slope;
    let margin = t.front + drift + t.d + t.viscous;
    let scale = t
        .front
        .abs()
        .max(drift.abs())
        .max(t.d.abs())
        .max(t.viscous.abs());
    PointRecord {
        xi: xi.f64(),
        xi0: xi0.map(T::f64),
        case,
        d_value: t.d.f64(),
        omega_bound: t.omega.f64(),
        slope: t.slope.f64(),
        front_term: t.front.f64(),
        viscous_term: t.viscous.f64(),
        margin: margin.f64(),
        scale: scale.f64(),
        tail_bound: t.tail.f64(),
        quad_error: t.qerr.f64(),
        converged: t.converged,
        pass: margin < -floor * scale,
    }
}

fn multiplier_echo<T: Scalar>(m: &MultiplierSpec<T>) -> serde_json::Value {
    serde_json::json!({
        "kind": m.kind_name(),
        "alpha": m.alpha.f64(),
        "b1": m.b1.f64(),
        "b3": m.b3.f64(),
        "mu": m.mu.f64(),
        "strict": m.strict,
    })
}

fn constants_echo<T: Scalar>(c: &AdmissibleConstants<T>) -> Option<serde_json::Value> {
    let f = |x: T| x.f64();
    serde_json::to_value(serde_json::json!({
        "alpha": f(c.alpha), "beta": f(c.beta), "sigma": f(c.sigma),
        "c0": f(c.c0), "c1": f(c.c1), "c2": f(c.c2), "c": f(c.c),
        "c_alpha": f(c.c_alpha), "c_alpha_prime": f(c.c_alpha_prime),
        "b_case": f(c.b_case), "b_bar_case": f(c.b_bar_case), "k_case": f(c.k_case),
        "n": c.n, "c_bar": f(c.c_bar),
        "stationary": {
            "kappa_max": f(c.stationary.kappa_max), "gamma_max": f(c.stationary.gamma_max),
            "kappa": f(c.stationary.kappa), "gamma": f(c.stationary.gamma),
        },
        "eventual": {
            "regime": c.eventual.regime,
            "rho_max": f(c.eventual.rho_max), "kappa_max": f(c.eventual.kappa_max),
            "gamma_max": f(c.eventual.gamma_max), "rho": f(c.eventual.rho),
            "kappa": f(c.eventual.kappa), "gamma": f(c.eventual.gamma),
        },
    }))
    .ok()
}

/// Checks `Ω(ξ)·ω′(ξ) + D(ξ) < 0` on `xi_grid` for a stationary modulus.
///
/// The Hölder–log variant uses the global singular drift bound; the capped
/// variant uses the local one and drops grid points above the cap.
pub fn certify_stationary<T: Scalar>(
    w: &StationaryModulus<T>,
    beta: T,
    spec: &MultiplierSpec<T>,
    consts: &AdmissibleConstants<T>,
    xi_grid: &[T],
    opts: &CertOptions<T>,
) -> Result<CertificateReport> {
    check_beta(beta)?;
    let mut notes = Vec::new();
    let (variant, guaranteed) = match w.variant() {
        StationaryVariant::HolderLog => {
            let h = w.as_holder().expect("holder variant");
            let ok = consts.stationary_admissible(h.kappa, h.gamma);
            if !spec.strict {
                notes.push(
                    "multiplier lacks the global growth condition; singular bound applied anyway"
                        .into(),
                );
            }
            (DriftVariant::SingularFull, ok && spec.strict)
        }
        StationaryVariant::Capped => {
            let h = w.as_holder().expect("holder variant");
            (
                DriftVariant::SingularLocal,
                consts.stationary_admissible(h.kappa, h.gamma),
            )
        }
        StationaryVariant::Appendix => (DriftVariant::Classical, true),
    };
    if !guaranteed {
        notes.push(
            "constants violate the admissibility constraints; certificate not guaranteed".into(),
        );
    }
    let bps = w.breakpoints();
    let top = w.plateau().unwrap_or(T::infinity());
    let grid: Vec<T> = xi_grid
        .iter()
        .filter(|&&x| x > T::zero() && (variant != DriftVariant::SingularLocal || x <= top))
        .map(|&x| nudge_off_breakpoints(x, &bps))
        .collect();
    if grid.is_empty() {
        return argument("no grid points inside the admissible range");
    }
    let (c1, c2) = (consts.c1, consts.c2);
    // the singular bound holds only up to the cap; keep points strictly below it
    let points = map_points(grid, opts.parallel, |&xi| {
        let xi = if variant == DriftVariant::SingularLocal && xi >= top {
            top * (T::one() - T::c(2.0 * BREAKPOINT_EXCLUSION))
        } else {
            xi
        };
        let d = dissipation_bound(w, xi, beta, c1, &opts.bounds)?;
        let dv = if variant == DriftVariant::Classical {
            T::zero()
        } else {
            d.value
        };
        let om = drift_bound(w, xi, beta, spec, c2, variant, d.value, &opts.bounds)?;
        let terms = Terms {
            d: dv,
            omega: om.value,
            slope: w.slope_max(xi)?,
            front: T::zero(),
            viscous: T::zero(),
            tail: d.tail_bound + om.tail_bound,
            qerr: d.quad_error + om.quad_error,
            converged: d.converged && om.converged,
        };
        Ok(record(xi, None, None, terms, opts.margin_floor))
    })?;
    let params = serde_json::json!({
        "variant": w.variant(),
        "beta": beta.f64(),
        "multiplier": multiplier_echo(spec),
        "modulus": w.as_holder().map(|h| serde_json::json!({
            "kappa": h.kappa.f64(), "gamma": h.gamma.f64(), "delta": h.delta.f64(),
            "sigma": h.sigma.f64(), "cap": h.cap.map(T::f64),
        })),
        "drift": variant,
    });
    Ok(CertificateReport::assemble(
        "stationary",
        params,
        constants_echo(consts),
        guaranteed,
        notes,
        points,
    ))
}

/// Checks `∂ξ₀ω·ρξ₀^{1−β} + Ω·∂ξω + D + ε∂ξξω < 0` on the `(ξ, ξ₀)` grid.
#[allow(clippy::too_many_arguments)]
pub fn certify_time_dependent<T: Scalar>(
    fam: &TimeDependentModulus<T>,
    spec: &MultiplierSpec<T>,
    consts: &AdmissibleConstants<T>,
    epsilon: T,
    xi_grid: &[T],
    xi0_grid: &[T],
    opts: &CertOptions<T>,
) -> Result<CertificateReport> {
    let beta = fam.beta;
    check_beta(beta)?;
    if epsilon < T::zero() {
        return argument("epsilon must be nonnegative");
    }
    let b = &fam.base;
    let variant = match fam.variant {
        FamilyVariant::Eventual => DriftVariant::SingularFull,
        FamilyVariant::LogSupercritical => DriftVariant::SingularLocal,
    };
    let mut notes = Vec::new();
    let guaranteed = match fam.variant {
        FamilyVariant::Eventual => {
            consts.eventual_admissible(fam.rho, b.kappa, b.gamma) && spec.strict
        }
        FamilyVariant::LogSupercritical => consts.log_admissible(fam.rho, b.kappa, b.gamma),
    };
    if !guaranteed {
        notes.push(
            "constants violate the admissibility constraints; certificate not guaranteed".into(),
        );
    }
    let top = match b.cap {
        Some(c) => fam.a0.min(c),
        None => fam.a0,
    };
    let mut tasks = Vec::new();
    for &x0 in xi0_grid.iter().filter(|&&x| x > T::zero() && x <= fam.a0) {
        let mut bps = vec![b.delta, x0];
        bps.extend(b.cap);
        for &x in xi_grid.iter().filter(|&&x| x > T::zero() && x <= top) {
            let mut x = nudge_off_breakpoints(x, &bps);
            if b.cap.is_some_and(|c| x >= c) {
                x = b.cap.unwrap() * (T::one() - T::c(2.0 * BREAKPOINT_EXCLUSION));
            }
            tasks.push((x0, x));
        }
    }
    if tasks.is_empty() {
        return argument("no (xi, xi0) grid points inside (0, A0]");
    }
    let (c1, c2) = (consts.c1, consts.c2);
    let points = map_points(tasks, opts.parallel, |&(x0, xi)| {
        let s = fam.slice(x0)?;
        let d = dissipation_bound(&s, xi, beta, c1, &opts.bounds)?;
        let om = drift_bound(&s, xi, beta, spec, c2, variant, d.value, &opts.bounds)?;
        let terms = Terms {
            d: d.value,
            omega: om.value,
            slope: s.slope_max(xi)?,
            front: s.d_xi0_upper(xi)? * fam.front_speed(x0),
            viscous: epsilon * s.curvature(xi)?,
            tail: d.tail_bound + om.tail_bound,
            qerr: d.quad_error + om.quad_error,
            converged: d.converged && om.converged,
        };
        Ok(record(
            xi,
            Some(x0),
            Some(s.case(xi).label()),
            terms,
            opts.margin_floor,
        ))
    })?;
    let params = serde_json::json!({
        "variant": fam.variant,
        "beta": beta.f64(),
        "epsilon": epsilon.f64(),
        "a0": fam.a0.f64(),
        "rho": fam.rho.f64(),
        "multiplier": multiplier_echo(spec),
        "base": {
            "kappa": b.kappa.f64(), "gamma": b.gamma.f64(), "delta": b.delta.f64(),
            "sigma": b.sigma.f64(), "cap": b.cap.map(T::f64),
        },
        "drift": variant,
    });
    Ok(CertificateReport::assemble(
        "time_dependent",
        params,
        constants_echo(consts),
        guaranteed,
        notes,
        points,
    ))
}

/// The closed sufficient condition `C_{α,β} δ^{5/2−α−β} < (3/4)ε` and its root in δ.
pub fn analytic_appendix_condition<T: Scalar>(
    delta: T,
    alpha: T,
    beta: T,
    epsilon: T,
    m1: T,
    c: T,
) -> AppendixCondition {
    let (a, b, e) = (alpha.f64(), beta.f64(), epsilon.f64());
    let s = a + b;
    let c_ab = c.f64()
        * m1.f64()
        * match Regime::of(alpha, beta) {
            Regime::Critical => 1.0,
            _ => 1.0 / (1.0 - s).abs(),
        };
    let exponent = 2.5 - s;
    let lhs = c_ab * delta.f64().powf(exponent);
    let rhs = 0.75 * e;
    let raw = (rhs / c_ab).powf(1.0 / exponent);
    AppendixCondition {
        c_ab,
        exponent,
        lhs,
        rhs,
        holds: lhs < rhs,
        delta_max_raw: raw,
        delta_max: raw.min(4.0 / 9.0),
    }
}

/// Checks `Ω(ξ)ω′(ξ) + εω″(ξ) < 0` for `ω(ξ) = ξ − ξ^{3/2}` (capped at δ) on
/// `xi_grid ∩ (0, δ/2)` with the classical drift bound and constant `C`.
#[allow(clippy::too_many_arguments)]
pub fn certify_appendix<T: Scalar>(
    delta: T,
    alpha: T,
    beta: T,
    epsilon: T,
    spec: &MultiplierSpec<T>,
    c: T,
    xi_grid: &[T],
    opts: &CertOptions<T>,
) -> Result<CertificateReport> {
    check_beta(beta)?;
    if epsilon < T::zero() {
        return argument("epsilon must be nonnegative");
    }
    let w = AppendixModulus::new(delta, T::one(), alpha, beta)?;
    let half = T::c(0.5) * delta;
    let grid: Vec<T> = xi_grid
        .iter()
        .copied()
        .filter(|&x| x > T::zero() && x < half)
        .collect();
    if grid.is_empty() {
        return argument("no grid points in (0, delta/2)");
    }
    let mut notes = Vec::new();
    if epsilon == T::zero() {
        notes.push(
            "epsilon = 0: the curvature term vanishes and the positive drift term cannot be offset"
                .into(),
        );
    }
    let points = map_points(grid, opts.parallel, |&xi| {
        let om = drift_bound(
            &w,
            xi,
            beta,
            spec,
            c,
            DriftVariant::Classical,
            T::zero(),
            &opts.bounds,
        )?;
        let terms = Terms {
            d: T::zero(),
            omega: om.value,
            slope: w.slope_max(xi)?,
            front: T::zero(),
            viscous: epsilon * w.curvature(xi)?,
            tail: om.tail_bound,
            qerr: om.quad_error,
            converged: om.converged,
        };
        Ok(record(xi, None, None, terms, opts.margin_floor))
    })?;
    let params = serde_json::json!({
        "delta": delta.f64(),
        "alpha": alpha.f64(),
        "beta": beta.f64(),
        "epsilon": epsilon.f64(),
        "c": c.f64(),
        "multiplier": multiplier_echo(spec),
    });
    let mut rep = CertificateReport::assemble("appendix", params, None, true, notes, points);
    rep.analytic = Some(analytic_appendix_condition(
        delta,
        alpha,
        beta,
        epsilon,
        spec.eval(T::one())?,
        c,
    ));
    Ok(rep)
}

/// Largest δ in `(0, 4/9]` whose appendix certificate passes on an `n`-point
/// log grid over `[10⁻⁶δ, δ/2)`, by bisection to relative width `rel`.
#[allow(clippy::too_many_arguments)]
pub fn largest_passing_delta<T: Scalar>(
    alpha: T,
    beta: T,
    epsilon: T,
    spec: &MultiplierSpec<T>,
    c: T,
    n: usize,
    rel: T,
    opts: &CertOptions<T>,
) -> Result<Option<T>> {
    let check = |d: T| -> Result<bool> {
        let g = logspace(d * T::c(1e-6), T::c(0.5) * d * (T::one() - T::c(1e-9)), n);
        Ok(certify_appendix(d, alpha, beta, epsilon, spec, c, &g, opts)?.pass)
    };
    let hi0 = T::c(4.0 / 9.0);
    if check(hi0)? {
        return Ok(Some(hi0));
    }
    let mut lo = hi0;
    let mut found = false;
    for _ in 0..60 {
        lo *= T::c(0.5);
        if check(lo)? {
            found = true;
            break;
        }
    }
    if !found {
        return Ok(None);
    }
    let mut hi = (T::c(2.0) * lo).min(hi0);
    while (hi - lo) > rel * lo {
        let mid = T::c(0.5) * (lo + hi);
        if check(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(lo))
}
