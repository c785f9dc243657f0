//! Structural checks on the moduli shared by the property suites and the acceptance run.
#![allow(dead_code)]

use std::sync::Arc;

use gsqg_core::certifier::estimate_c1;
use gsqg_core::moduli::{
    c_alpha, c_bar, solve_constants_eventual, solve_constants_stationary, FamilyVariant, HolderLog,
    Modulus, StationaryModulus, TimeDependentModulus,
};
use gsqg_core::multiplier::MultiplierSpec;
use gsqg_core::scalar::logspace;
use rand::Rng;

#[derive(Clone, Copy, Debug)]
pub struct Draw {
    pub alpha: f64,
    pub beta: f64,
    pub sigma: f64,
    pub delta: f64,
}

/// `α ∈ [0.05, 0.45]`, `β ∈ [0.2, 0.95]`, `σ` strictly inside `(α, min{α+β, 1})`,
/// `δ` log-uniform on `[10⁻⁴, 0.2]`.
pub fn draw(rng: &mut impl Rng) -> Draw {
    let alpha: f64 = rng.random_range(0.05..0.45);
    let beta: f64 = rng.random_range(0.2..0.95);
    let hi = (alpha + beta).min(1.0);
    let sigma = alpha + rng.random_range(0.1..0.9) * (hi - alpha);
    let delta = 10f64.powf(rng.random_range(-4.0..(0.2f64).log10()));
    Draw {
        alpha,
        beta,
        sigma,
        delta,
    }
}

pub fn stationary(d: &Draw) -> (HolderLog<f64>, f64, f64) {
    let c1 = estimate_c1(d.beta).unwrap().value;
    let k = solve_constants_stationary(c1, 1.0 / d.beta, d.alpha, d.beta, d.sigma).unwrap();
    let m = Arc::new(MultiplierSpec::power(d.alpha));
    (
        HolderLog::new(k.kappa, k.gamma, d.delta, d.sigma, None, m).unwrap(),
        k.kappa,
        k.gamma,
    )
}

fn probe_grid(scale: f64) -> Vec<f64> {
    let mut g = logspace(scale * 1e-4, scale * 1e3, 140);
    g.push(scale);
    g.sort_by(f64::total_cmp);
    g
}

/// Second differences `ω(ξ+h) + ω(ξ−h) − 2ω(ξ) ≤ 10⁻¹²ω(ξ)` for `h ∈ {ξ/3, ξ/10, ξ/100}`.
pub fn concave(w: &dyn Modulus<f64>, xs: &[f64]) -> Result<(), String> {
    for &x in xs {
        let wx = w.value(x).unwrap();
        for h in [x / 3.0, x / 10.0, x / 100.0] {
            let s = w.value(x + h).unwrap() + w.value(x - h).unwrap() - 2.0 * wx;
            if s > 1e-12 * wx {
                return Err(format!(
                    "second difference {s:.3e} at xi = {x:.4e}, h = {h:.3e}"
                ));
            }
        }
    }
    Ok(())
}

pub fn nondecreasing(w: &dyn Modulus<f64>, xs: &[f64]) -> Result<(), String> {
    for p in xs.windows(2) {
        let (a, b) = (w.value(p[0]).unwrap(), w.value(p[1]).unwrap());
        if b < a * (1.0 - 1e-14) {
            return Err(format!(
                "omega decreases between {:.4e} and {:.4e}",
                p[0], p[1]
            ));
        }
    }
    Ok(())
}

/// Concavity, monotonicity, doubling, the claim and ratio monotonicity for one draw.
pub fn check_structure(d: &Draw) -> Result<(), String> {
    let (w, kappa, gamma) = stationary(d);
    let xs = probe_grid(d.delta);
    concave(&w, &xs).map_err(|e| format!("holder-log concavity: {e}"))?;
    nondecreasing(&w, &xs).map_err(|e| format!("holder-log: {e}"))?;

    let m = w.multiplier.clone();
    let cap = 2.0 * d.delta.max(0.25);
    let capped = HolderLog::new(kappa, gamma, d.delta, d.sigma, Some(cap), m.clone()).unwrap();
    concave(&capped, &xs).map_err(|e| format!("capped concavity: {e}"))?;
    nondecreasing(&capped, &xs).map_err(|e| format!("capped: {e}"))?;

    let app = StationaryModulus::appendix(d.delta.min(4.0 / 9.0), 3.0, d.alpha, d.beta).unwrap();
    let axs = probe_grid(d.delta / 3.0);
    concave(&app, &axs).map_err(|e| format!("appendix concavity: {e}"))?;
    nondecreasing(&app, &axs).map_err(|e| format!("appendix: {e}"))?;

    let ca = c_alpha(d.alpha);
    let cb = c_bar(d.alpha);
    let above: Vec<f64> = logspace(d.delta * (1.0 + 1e-9), d.delta * 1e6, 120);
    for &x in &above {
        let (w1, w2) = (w.value(x).unwrap(), w.value(2.0 * x).unwrap());
        if w2 > (1.5 + 0.5 * ca) * w1 * (1.0 + 1e-10) {
            return Err(format!(
                "doubling fails at xi = {x:.4e}: {w2:.6e} > {:.6e}",
                (1.5 + 0.5 * ca) * w1
            ));
        }
    }
    if gamma < ((cb - 1.0) / cb).powf(d.alpha) * kappa {
        for &x in &above {
            let lhs = gamma / m.eval(1.0 / x).unwrap();
            if lhs > cb * w.value(x).unwrap() {
                return Err(format!("claim fails at xi = {x:.4e}"));
            }
        }
    } else {
        return Err("drawn constants miss the claim hypothesis".into());
    }
    let mut prev = f64::INFINITY;
    for &x in &xs {
        let r = w.value(x).unwrap() / x.powf(d.sigma);
        if r > prev * (1.0 + 1e-12) {
            return Err(format!("omega/xi^sigma increases at xi = {x:.4e}"));
        }
        prev = r;
    }
    Ok(())
}

/// `max_ξ |ω(ξ, ξ₀) − ω(ξ)|` along a decreasing ξ₀ sequence; checks monotone
/// decay of every pointwise gap and returns the gap at the smallest ξ₀.
pub fn family_limit(d: &Draw) -> Result<f64, String> {
    let c1 = estimate_c1(d.beta).unwrap().value;
    let k = solve_constants_eventual(c1, 1.0, d.alpha, d.beta, d.sigma).unwrap();
    let m = Arc::new(MultiplierSpec::power(d.alpha));
    let base = HolderLog::new(k.kappa, k.gamma, d.delta, d.sigma, None, m).unwrap();
    let a0 = 4f64.powf(1.0 / d.alpha) * d.delta;
    let fam = TimeDependentModulus::new(base.clone(), a0, k.rho, d.beta, FamilyVariant::Eventual)
        .unwrap();
    let xs = logspace(d.delta * 1e-6, a0 * 2.0, 60);
    let x0s: Vec<f64> = logspace(d.delta * 1e-9, a0, 40).into_iter().rev().collect();
    let mut prev = vec![f64::INFINITY; xs.len()];
    let mut last = 0.0f64;
    for &x0 in &x0s {
        let s = fam.slice(x0).unwrap();
        last = 0.0;
        for (i, &x) in xs.iter().enumerate() {
            let gap = (s.value(x).unwrap() - base.value(x).unwrap()).abs();
            let tol = 1e-13 * base.value(x).unwrap();
            if gap > prev[i] + tol {
                return Err(format!(
                    "gap grows at xi = {x:.4e} as xi0 falls to {x0:.4e}"
                ));
            }
            prev[i] = gap;
            last = last.max(gap);
        }
    }
    Ok(last)
}
