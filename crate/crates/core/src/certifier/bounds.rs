use serde::Serialize;

use crate::error::{argument, domain};
use crate::moduli::Modulus;
use crate::multiplier::MultiplierSpec;
use crate::quad::{integrate_pieces, QuadOptions, QuadResult};
use crate::tolerances::{BREAKPOINT_EXCLUSION, CERT_QUAD_REL, CERT_TAIL_REL, TAYLOR_HEAD};
use crate::{Error, Result, Scalar};

/// Quadrature settings for the bound integrals.
///
/// `quad.abs_tol` is interpreted relative to the natural size of each
/// integral (for instance `ω(ξ)(ξ/2)^{−β}/β` for the dissipation).
#[derive(Clone, Copy, Debug)]
pub struct BoundOptions<T> {
    pub quad: QuadOptions<T>,
    /// Target relative size of the truncated tail.
    pub tail_rel: T,
}

impl<T: Scalar> Default for BoundOptions<T> {
    fn default() -> Self {
        Self {
            quad: QuadOptions {
                abs_tol: T::c(1e-13),
                rel_tol: T::c(CERT_QUAD_REL),
                max_intervals: 400,
            },
            tail_rel: T::c(CERT_TAIL_REL),
        }
    }
}

impl<T: Scalar> BoundOptions<T> {
    /// Tolerances divided by `factor`.
    pub fn tightened(&self, factor: T) -> Self {
        Self {
            quad: self.quad.tightened(factor),
            tail_rel: self.tail_rel / factor,
        }
    }

    fn scaled(&self, scale: T) -> QuadOptions<T> {
        QuadOptions {
            abs_tol: self.quad.abs_tol * scale.abs(),
            ..self.quad
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Dissipation<T> {
    /// Upper bound on `D(ξ)`, including `C₁`.
    pub value: T,
    /// Contribution of `η < ξ/2` (without `C₁`).
    pub near: T,
    /// Contribution of `η > ξ/2` including the conservative tail (without `C₁`).
    pub far: T,
    /// Width of the uncertainty in the truncated tail (with `C₁`).
    pub tail_bound: T,
    pub quad_error: T,
    pub converged: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DriftVariant {
    /// Needs the global growth condition on `m`.
    SingularFull,
    /// Valid for `ξ ≤ 1/(2b₁)`.
    SingularLocal,
    /// `C ∫₀^ξ ω m(1/η) η^{−β} + C ξ ∫_ξ^∞ ω m(1/η) η^{−1−β}`.
    Classical,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Drift<T> {
    /// Upper bound on `Ω(ξ)`.
    pub value: T,
    /// `∫_ξ^∞ ω(η) m(1/η) η^{−1−β} dη` including the tail envelope.
    pub far: T,
    /// `∫₀^ξ ω(η) m(1/η) η^{−β} dη` (classical variant only).
    pub near: T,
    /// Tail envelope (and small-η remainder) added to the integrals, before the prefactors.
    pub tail_bound: T,
    pub quad_error: T,
    pub converged: bool,
}

pub(crate) fn check_beta<T: Scalar>(beta: T) -> Result<()> {
    if beta > T::zero() && beta <= T::one() {
        Ok(())
    } else {
        domain(format!("beta = {} must lie in (0, 1]", beta.f64()))
    }
}

/// Distance from `xi` to the nearest breakpoint, or an error inside the exclusion zone.
fn breakpoint_gap<T: Scalar, M: Modulus<T> + ?Sized>(w: &M, xi: T) -> Result<T> {
    let mut gap = T::infinity();
    for b in w.breakpoints() {
        let d = (xi - b).abs();
        if d <= T::c(BREAKPOINT_EXCLUSION) * xi {
            return Err(Error::Breakpoint {
                xi: xi.f64(),
                breakpoint: b.f64(),
            });
        }
        gap = gap.min(d);
    }
    Ok(gap)
}

fn at<T: Scalar, M: Modulus<T> + ?Sized>(w: &M, x: T) -> Result<T> {
    if x <= T::zero() {
        Ok(w.at_zero())
    } else {
        w.value(x)
    }
}

fn truncation<T: Scalar, M: Modulus<T> + ?Sized>(w: &M, xi: T, beta: T, tail_rel: T) -> T {
    let big = T::c(1e6);
    let top = w.breakpoints().into_iter().fold(T::zero(), T::max);
    (big * xi)
        .max(big * w.scale())
        .max(T::c(1e3) * top)
        .max(xi * tail_rel.powf(-beta.recip()))
}

/// Upper bound for the dissipation at the touching scenario:
/// `C₁[∫₀^{ξ/2} (ω(ξ+2η)+ω(ξ−2η)−2ω(ξ)) η^{−1−β} + ∫_{ξ/2}^∞ (ω(2η+ξ)−ω(2η−ξ)−2ω(ξ)) η^{−1−β}]`.
pub fn dissipation_bound<T, M>(
    w: &M,
    xi: T,
    beta: T,
    c1: T,
    opts: &BoundOptions<T>,
) -> Result<Dissipation<T>>
where
    T: Scalar,
    M: Modulus<T> + ?Sized,
{
    crate::moduli::check_xi(xi)?;
    check_beta(beta)?;
    if !(c1 > T::zero()) {
        return argument("C1 must be positive");
    }
    let gap = breakpoint_gap(w, xi)?;
    let (one, two, half) = (T::one(), T::c(2.0), T::c(0.5));
    let wx = w.value(xi)?;
    let hx = half * xi;
    let unit = hx.powf(-beta) / beta;
    let scale = wx.max(T::min_positive_value()) * unit;
    let q = opts.scaled(scale);
    let bps = w.breakpoints();

    // η ≤ η_T: second difference replaced by 4ω''(ξ)η²
    let eta_t = (T::c(TAYLOR_HEAD) * xi).min(T::c(0.25) * gap);
    let head = T::c(4.0) * w.curvature(xi)? * eta_t.powf(two - beta) / (two - beta);

    // η = (ξ/2)s² on [η_T, ξ/2]
    let s_lo = (eta_t / hx).sqrt();
    let s_cuts: Vec<T> = bps
        .iter()
        .filter(|&&b| b < two * xi)
        .map(|&b| ((b - xi).abs() / xi).sqrt())
        .collect();
    let pref = hx.powf(-one - beta) * xi;
    let near: QuadResult<T> = integrate_pieces(
        |s: T| {
            let eta = hx * s * s;
            let g = w.value(xi + two * eta)? + at(w, xi - two * eta)? - two * wx;
            Ok(g * pref * s.powf(-one - two * beta))
        },
        s_lo,
        one,
        &s_cuts,
        &q,
    )?;

    // η = (ξ/2) v^{−1/β} on [ξ/2, H]
    let h = truncation(w, xi, beta, opts.tail_rel);
    let v_h = (h / hx).powf(-beta);
    let v_cuts: Vec<T> = bps
        .iter()
        .flat_map(|&b| [(b - xi) * half, (b + xi) * half])
        .filter(|&e| e > hx)
        .map(|e| (e / hx).powf(-beta))
        .collect();
    let far: QuadResult<T> = integrate_pieces(
        |v: T| {
            let eta = hx * v.powf(-beta.recip());
            let g = w.value(two * eta + xi)? - at(w, two * eta - xi)? - two * wx;
            Ok(g)
        },
        v_h,
        one,
        &v_cuts,
        &opts.scaled(wx.max(T::min_positive_value())),
    )?;
    // beyond H the integrand lies in [−2ω(ξ), ω(2ξ) − 2ω(ξ)]; keep the upper end
    let w2 = w.value(two * xi)?;
    let h_fac = h.powf(-beta) / beta;
    let tail_upper = (w2 - two * wx) * h_fac;
    let tail_width = w2 * h_fac;

    let far_total = far.value * unit + tail_upper;
    Ok(Dissipation {
        value: c1 * (head + near.value + far_total),
        near: head + near.value,
        far: far_total,
        tail_bound: c1 * tail_width,
        quad_error: c1 * (near.error + far.error * unit),
        converged: near.converged && far.converged,
    })
}

/// `∫_ξ^∞ ω(η) m(1/η) η^{−1−β} dη` with the modulus' own tail envelope beyond `H`.
fn far_drift_integral<T, M>(
    w: &M,
    xi: T,
    beta: T,
    m: &MultiplierSpec<T>,
    opts: &BoundOptions<T>,
) -> Result<(QuadResult<T>, T)>
where
    T: Scalar,
    M: Modulus<T> + ?Sized,
{
    let one = T::one();
    let unit = xi.powf(-beta) / beta;
    let h = truncation(w, xi, beta, opts.tail_rel);
    let v_h = (h / xi).powf(-beta);
    let cuts: Vec<T> = w
        .breakpoints()
        .into_iter()
        .filter(|&b| b > xi)
        .map(|b| (b / xi).powf(-beta))
        .collect();
    let scale = (w.value(xi)? * m.eval(xi.recip())?).max(T::min_positive_value());
    let r = integrate_pieces(
        |v: T| {
            let eta = xi * v.powf(-beta.recip());
            Ok(w.value(eta)? * m.eval(eta.recip())?)
        },
        v_h,
        one,
        &cuts,
        &opts.scaled(scale),
    )?;
    // an infinite envelope makes the bound vacuous rather than an error
    let tail = w.growth_tail(h, beta, m.eval(h.recip())?)?;
    let out = QuadResult {
        value: r.value * unit,
        error: r.error * unit,
        ..r
    };
    Ok((out, tail))
}

/// `∫₀^ξ ω(η) m(1/η) η^{−β} dη`, integrated in `ln η` down to `ξ·10⁻¹²` with a
/// power-law extrapolation of the remainder.
fn near_drift_integral<T, M>(
    w: &M,
    xi: T,
    beta: T,
    m: &MultiplierSpec<T>,
    opts: &BoundOptions<T>,
) -> Result<(QuadResult<T>, T)>
where
    T: Scalar,
    M: Modulus<T> + ?Sized,
{
    let one = T::one();
    let f = |eta: T| -> Result<T> { Ok(w.value(eta)? * m.eval(eta.recip())? * eta.powf(-beta)) };
    let lo = xi * T::c(1e-12);
    let cuts: Vec<T> = w
        .breakpoints()
        .into_iter()
        .filter(|&b| b < xi && b > lo)
        .map(|b| b.ln())
        .collect();
    let scale =
        (w.value(xi)? * m.eval(xi.recip())? * xi.powf(one - beta)).max(T::min_positive_value());
    let r = integrate_pieces(
        |t: T| {
            let eta = t.exp();
            Ok(f(eta)? * eta)
        },
        lo.ln(),
        xi.ln(),
        &cuts,
        &opts.scaled(scale),
    )?;
    let (f0, f1) = (f(lo)?, f(T::c(2.0) * lo)?);
    let p = if f0 > T::zero() && f1 > T::zero() {
        (f1 / f0).ln() / T::LN_2()
    } else {
        T::zero()
    };
    if p <= -one {
        return domain("drift integrand is not integrable at the origin");
    }
    Ok((r, f0 * lo / (p + one)))
}

/// Upper bound on the drift term `Ω(ξ)` at the touching scenario.
#[allow(clippy::too_many_arguments)]
pub fn drift_bound<T, M>(
    w: &M,
    xi: T,
    beta: T,
    spec: &MultiplierSpec<T>,
    c2: T,
    variant: DriftVariant,
    d_value: T,
    opts: &BoundOptions<T>,
) -> Result<Drift<T>>
where
    T: Scalar,
    M: Modulus<T> + ?Sized,
{
    crate::moduli::check_xi(xi)?;
    check_beta(beta)?;
    match variant {
        DriftVariant::SingularFull if !spec.strict => {
            return Err(Error::Precondition(
                "the singular bound for all xi needs the global growth condition on m".into(),
            ))
        }
        DriftVariant::SingularLocal => {
            let top = (T::c(2.0) * spec.b1).recip();
            if xi > top * (T::one() + T::c(1e-12)) {
                return Err(Error::Precondition(format!(
                    "xi = {} exceeds 1/(2 b1) = {}",
                    xi.f64(),
                    top.f64()
                )));
            }
        }
        _ => {}
    }
    let (far, far_tail) = far_drift_integral(w, xi, beta, spec, opts)?;
    let q = far.value + far_tail;
    let mx = spec.eval(xi.recip())?;
    match variant {
        DriftVariant::Classical => {
            let (near, rem) = near_drift_integral(w, xi, beta, spec, opts)?;
            let n = near.value + rem;
            Ok(Drift {
                value: c2 * (n + xi * q),
                far: q,
                near: n,
                tail_bound: far_tail + rem,
                quad_error: c2 * (near.error + xi * far.error),
                converged: near.converged && far.converged,
            })
        }
        _ => {
            let wx = w.value(xi)?;
            Ok(Drift {
                value: c2 * (-xi * mx * d_value + xi * q + xi.powf(T::one() - beta) * mx * wx),
                far: q,
                near: T::zero(),
                tail_bound: far_tail,
                quad_error: c2 * xi * far.error,
                converged: far.converged,
            })
        }
    }
}
