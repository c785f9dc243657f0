//! The symmetric stable kernel `P(x) = (1/π)∫₀^∞ e^{−s^β} cos(sx) ds` and the
//! constant `inf_x P(x)(1 + |x|^{1+β})`.

use serde::Serialize;
use statrs::function::gamma::{gamma, ln_gamma};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::domain;
use crate::quad::{integrate_pieces, QuadOptions};
use crate::scalar::logspace;
use crate::Result;

/// Where the asymptotic series takes over from the integral representation.
const SERIES_FROM: f64 = 20.0;
/// Right end of the scanned interval; beyond it an analytic envelope is used.
const X_MAX: f64 = 1e3;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct KernelConstant {
    pub beta: f64,
    /// `inf_x P(x)(1 + x^{1+β})`.
    pub value: f64,
    pub argmin: f64,
    /// Lower bound of the product on `[X_MAX, ∞)`.
    pub tail_lower: f64,
}

/// `ln V(θ)` of the Zolotarev–Nolan representation with `θ₀ = 0`.
fn ln_v(theta: f64, a: f64) -> f64 {
    let e = a / (a - 1.0);
    e * (theta.cos().ln() - (a * theta).sin().ln()) + ((a - 1.0) * theta).cos().ln()
        - theta.cos().ln()
}

fn series(x: f64, b: f64) -> f64 {
    let lx = x.ln();
    let mut sum = 0.0;
    for k in 1..400 {
        let kf = k as f64;
        let s = (kf * PI * b / 2.0).sin();
        let mag = (ln_gamma(b * kf + 1.0) - ln_gamma(kf + 1.0) - (b * kf + 1.0) * lx).exp();
        let term = if k % 2 == 1 { mag * s } else { -mag * s };
        sum += term;
        if mag < 1e-18 * sum.abs() && k > 3 {
            break;
        }
    }
    sum / PI
}

/// Density of the symmetric `β`-stable law with characteristic function `e^{−|t|^β}`.
pub fn stable_density(x: f64, beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta <= 1.0) {
        return domain(format!("beta = {beta} must lie in (0, 1]"));
    }
    let x = x.abs();
    if beta == 1.0 {
        return Ok(1.0 / (PI * (1.0 + x * x)));
    }
    if x == 0.0 {
        return Ok(gamma(1.0 + 1.0 / beta) / PI);
    }
    if x >= SERIES_FROM {
        return Ok(series(x, beta));
    }
    let a = beta;
    let lc = (a / (a - 1.0)) * x.ln();
    // V increases from 0 to ∞ on (0, π/2); split where c·V = 1
    let (mut lo, mut hi) = (1e-300f64.max(1e-12), FRAC_PI_2 - 1e-12);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ln_v(mid, a) + lc < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let peak = 0.5 * (lo + hi);
    let g = |t: f64| -> Result<f64> {
        let lv = ln_v(t, a);
        let z = lv + lc;
        if z > 700.0 || !lv.is_finite() {
            return Ok(0.0);
        }
        Ok((lv - z.exp()).exp())
    };
    let opts = QuadOptions::new(1e-300, 1e-13).tightened(1.0);
    let r = integrate_pieces(g, 0.0, FRAC_PI_2, &[peak], &opts)?;
    Ok(a * x.powf(1.0 / (a - 1.0)) / (PI * (1.0 - a)) * r.value)
}

fn product(x: f64, beta: f64) -> Result<f64> {
    Ok(stable_density(x, beta)? * (1.0 + x.powf(1.0 + beta)))
}

/// `c_β = inf_x P(x)(1+|x|^{1+β})`, used as the dissipation constant `C₁`.
pub fn estimate_c1(beta: f64) -> Result<KernelConstant> {
    if !(beta > 0.0 && beta <= 1.0) {
        return domain(format!("beta = {beta} must lie in (0, 1]"));
    }
    if beta == 1.0 {
        return Ok(KernelConstant {
            beta,
            value: 1.0 / PI,
            argmin: 0.0,
            tail_lower: 1.0 / PI,
        });
    }
    let mut xs = vec![0.0];
    xs.extend(logspace(1e-3, X_MAX, 1200));
    let vals: Vec<f64> = xs
        .iter()
        .map(|&x| product(x, beta))
        .collect::<Result<_>>()?;
    let i = vals
        .iter()
        .enumerate()
        .fold(0, |bi, (j, v)| if *v < vals[bi] { j } else { bi });
    let (mut a, mut b) = (xs[i.saturating_sub(1)], xs[(i + 1).min(xs.len() - 1)]);
    // golden-section refinement
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut c, mut d) = (b - r * (b - a), a + r * (b - a));
    let (mut fc, mut fd) = (product(c, beta)?, product(d, beta)?);
    for _ in 0..80 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = product(c, beta)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = product(d, beta)?;
        }
    }
    let (argmin, inner) = if fc < fd { (c, fc) } else { (d, fd) };
    let inner = inner.min(vals[i]);

    // x^{1+β}P(x) ≥ (1/π)(c₁ − Σ_{k≥2} |c_k| X^{−β(k−1)}) on [X, ∞)
    let coef =
        |k: f64| (ln_gamma(beta * k + 1.0) - ln_gamma(k + 1.0)).exp() * (k * PI * beta / 2.0).sin();
    let c1 = coef(1.0);
    let mut rest = 0.0;
    for k in 2..400 {
        let t = coef(k as f64).abs() * X_MAX.powf(-beta * (k as f64 - 1.0));
        rest += t;
        if t < 1e-20 {
            break;
        }
    }
    let tail_lower = (c1 - rest) / PI;
    Ok(KernelConstant {
        beta,
        value: inner.min(tail_lower),
        argmin,
        tail_lower,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // oracle: the defining Fourier integral, period by period
    fn fourier(x: f64, b: f64) -> f64 {
        let top = 45f64.powf(1.0 / b);
        let per = PI / x;
        let n = (top / per).ceil() as usize;
        let cuts: Vec<f64> = (1..n).map(|i| i as f64 * per).collect();
        let o = QuadOptions::new(1e-17, 1e-13);
        integrate_pieces(
            |s: f64| Ok((-s.powf(b)).exp() * (s * x).cos()),
            0.0,
            n as f64 * per,
            &cuts,
            &o,
        )
        .unwrap()
        .value
            / PI
    }

    #[test]
    fn density_matches_fourier_integral() {
        for &b in &[0.5, 0.7] {
            for &x in &[0.3, 1.0, 2.95, 8.0] {
                assert_relative_eq!(
                    stable_density(x, b).unwrap(),
                    fourier(x, b),
                    max_relative = 1e-9
                );
            }
        }
    }

    #[test]
    fn series_and_integral_agree_at_switch() {
        let b = 0.6;
        let lo = stable_density(SERIES_FROM * (1.0 - 1e-12), b).unwrap();
        assert_relative_eq!(lo, series(SERIES_FROM, b), max_relative = 1e-10);
    }

    #[test]
    fn cauchy_case() {
        let k = estimate_c1(1.0).unwrap();
        assert_relative_eq!(k.value, 1.0 / PI, max_relative = 1e-15);
    }

    #[test]
    fn half_stable_constant() {
        let k = estimate_c1(0.5).unwrap();
        // independent value: minimize the Fourier-oracle product on a bracket
        let oracle = (0..=60)
            .map(|i| 2.7 + 0.01 * i as f64)
            .map(|x| fourier(x, 0.5) * (1.0 + x.powf(1.5)))
            .fold(f64::INFINITY, f64::min);
        assert_relative_eq!(k.value, oracle, max_relative = 1e-6);
        assert_relative_eq!(k.value, 0.147459, max_relative = 1e-5);
        assert!((k.argmin - 2.95).abs() < 0.05);
        assert!(estimate_c1(0.0).is_err() && estimate_c1(1.5).is_err());
    }

    #[test]
    fn positive_on_a_sweep() {
        for &b in &[0.2, 0.4, 0.7, 0.9, 0.99] {
            let k = estimate_c1(b).unwrap();
            assert!(k.value > 0.0 && k.tail_lower > k.value * 0.5, "{b}: {k:?}");
        }
    }
}
