use serde::Serialize;

use crate::error::argument;
use crate::multiplier::MultiplierSpec;
use crate::{Result, Scalar};

/// Tolerance used to decide that `α + β = 1`.
pub const CRITICAL_TOL: f64 = 1e-12;

/// Position of `α + β` relative to 1; selects the branch of every piecewise constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Below,
    Critical,
    Above,
}

impl Regime {
    pub fn of<T: Scalar>(alpha: T, beta: T) -> Self {
        let s = (alpha + beta - T::one()).f64();
        if s.abs() <= CRITICAL_TOL {
            Self::Critical
        } else if s < 0.0 {
            Self::Below
        } else {
            Self::Above
        }
    }
}

/// `C_α = (2^α − 1)/α`.
pub fn c_alpha<T: Scalar>(alpha: T) -> T {
    (alpha * T::LN_2()).exp_m1() / alpha
}

/// `C′_α = sup_{x ≥ 1} x^{α−1} ln x = 1/(e(1−α))`, attained at `x = e^{1/(1−α)}`.
pub fn c_alpha_prime<T: Scalar>(alpha: T) -> T {
    (T::E() * (T::one() - alpha)).recip()
}

pub fn b_case<T: Scalar>(alpha: T, beta: T, c0: T) -> T {
    match Regime::of(alpha, beta) {
        Regime::Below => T::c(5.0) / (T::one() - alpha - beta),
        Regime::Critical => T::c(4.0) * c0 / beta + c_alpha_prime(alpha),
        Regime::Above => T::c(4.0) / (alpha + beta - T::one()),
    }
}

pub fn b_bar_case<T: Scalar>(alpha: T, beta: T, c0: T) -> T {
    match Regime::of(alpha, beta) {
        Regime::Below => T::c(3.0) / (T::one() - alpha - beta) + T::c(3.0) / beta,
        Regime::Critical => c0 + T::c(5.0) / beta,
        Regime::Above => T::c(6.0) / (alpha + beta - T::one()),
    }
}

pub fn k_case<T: Scalar>(alpha: T, beta: T, sigma: T, c0: T) -> T {
    match Regime::of(alpha, beta) {
        Regime::Below => (T::one() - alpha - beta).recip() + T::c(2.0) / (alpha + beta - sigma),
        Regime::Critical => c0 + T::c(2.0) / (T::one() - sigma),
        Regime::Above => T::c(3.0) / (alpha + beta - T::one()),
    }
}

/// `N = ⌊((1+α)/(1−α))^{1/α}⌋ + 1`.
pub fn n_cond<T: Scalar>(alpha: T) -> u64 {
    let base = ((T::one() + alpha) / (T::one() - alpha)).powf(alpha.recip());
    base.floor().to_u64().unwrap_or(u64::MAX).saturating_add(1)
}

/// `C̄ = (1 + C_α)/(2C_α)`.
pub fn c_bar<T: Scalar>(alpha: T) -> T {
    let ca = c_alpha(alpha);
    (T::one() + ca) / (T::c(2.0) * ca)
}

/// Default Hölder exponent on the log-supercritical path.
pub fn default_log_sigma<T: Scalar>(alpha: T, beta: T) -> T {
    (alpha + T::c(0.5) * beta).min(T::c(0.5) * (alpha + T::one()))
}

fn check_exponents<T: Scalar>(alpha: T, beta: T, sigma: T) -> Result<()> {
    if !(alpha > T::zero() && alpha < T::one()) {
        return argument(format!("alpha = {} must lie in (0, 1)", alpha.f64()));
    }
    if !(beta > T::zero() && beta <= T::one()) {
        return argument(format!("beta = {} must lie in (0, 1]", beta.f64()));
    }
    let hi = (alpha + beta).min(T::one());
    if !(sigma > alpha && sigma < hi) {
        return argument(format!(
            "sigma = {} must lie in ({}, {})",
            sigma.f64(),
            alpha.f64(),
            hi.f64()
        ));
    }
    Ok(())
}

/// Bounds and chosen values for the stationary modulus.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct StationaryConstants<T> {
    pub kappa_max: T,
    pub gamma_max: T,
    pub kappa: T,
    pub gamma: T,
}

/// Bounds and chosen values for the shrinking-front family.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EventualConstants<T> {
    pub regime: Regime,
    pub rho_max: T,
    pub kappa_max: T,
    pub gamma_max: T,
    pub rho: T,
    pub kappa: T,
    pub gamma: T,
}

/// κ below `min{C₁(1−σ)(α+β−σ)/(16C₂), 1/(2C₂σ)}` and γ below
/// `min{1/(2C₂), σκ, (1−C_α)^α κ/2, C₁βC_α(1−C_α)/(12C₂)}`; half of each is returned.
pub fn solve_constants_stationary<T: Scalar>(
    c1: T,
    c2: T,
    alpha: T,
    beta: T,
    sigma: T,
) -> Result<StationaryConstants<T>> {
    check_exponents(alpha, beta, sigma)?;
    let (one, two, half) = (T::one(), T::c(2.0), T::c(0.5));
    let kappa_max = (c1 * (one - sigma) * (alpha + beta - sigma) / (T::c(16.0) * c2))
        .min((two * c2 * sigma).recip());
    let kappa = half * kappa_max;
    let ca = c_alpha(alpha);
    let gamma_max = (two * c2)
        .recip()
        .min(sigma * kappa)
        .min((one - ca).powf(alpha) * half * kappa)
        .min(c1 * beta * ca * (one - ca) / (T::c(12.0) * c2));
    Ok(StationaryConstants {
        kappa_max,
        gamma_max,
        kappa,
        gamma: half * gamma_max,
    })
}

fn kappa_bound<T: Scalar>(c1: T, alpha: T, beta: T, sigma: T) -> (Regime, T) {
    let one = T::one();
    let r = Regime::of(alpha, beta);
    let s1 = one - sigma;
    let k = match r {
        Regime::Below => c1 * beta * s1 * s1 * (one - alpha - beta).min(alpha + beta - sigma),
        Regime::Critical => c1 * beta * s1 * c_alpha_prime(alpha).recip().min(s1 * s1),
        Regime::Above => c1 * beta * s1 * s1 * (alpha + beta - one),
    };
    (r, k)
}

fn rho_bound<T: Scalar>(c1: T, alpha: T, beta: T, sigma: T) -> T {
    let one = T::one();
    (c1 * (one - alpha) / beta).min(c1 * (one - sigma) / (beta * sigma))
}

fn gamma_bound<T: Scalar>(alpha: T, sigma: T, kappa: T, tail: T) -> T {
    let one = T::one();
    let ca = c_alpha(alpha);
    (sigma * kappa)
        .min((one - ca).powf(alpha) * kappa)
        .min((one - sigma) * (one - alpha) * kappa)
        .min(tail)
}

/// The summarized ρ/κ/γ ledger with absolute constant `C`; each value is half its bound,
/// and the γ bound is evaluated at the chosen κ.
pub fn solve_constants_eventual<T: Scalar>(
    c1: T,
    c: T,
    alpha: T,
    beta: T,
    sigma: T,
) -> Result<EventualConstants<T>> {
    check_exponents(alpha, beta, sigma)?;
    if !(c > T::zero()) {
        return argument("the absolute constant C must be positive");
    }
    let half = T::c(0.5);
    let one = T::one();
    let rho_max = rho_bound(c1, alpha, beta, sigma) / c;
    let (regime, k) = kappa_bound(c1, alpha, beta, sigma);
    let kappa_max = k / c;
    let kappa = half * kappa_max;
    let gamma_max = gamma_bound(
        alpha,
        sigma,
        kappa,
        c1 * (one - c_alpha(alpha)) * beta * beta,
    ) / c;
    Ok(EventualConstants {
        regime,
        rho_max,
        kappa_max,
        gamma_max,
        rho: half * rho_max,
        kappa,
        gamma: half * gamma_max,
    })
}

/// The explicit log-supercritical choice: every value equals its `1/(2C)` expression.
/// The reported maxima are the same expressions with `1/C`.
pub fn solve_constants_log<T: Scalar>(
    c1: T,
    c: T,
    alpha: T,
    beta: T,
    sigma: T,
) -> Result<EventualConstants<T>> {
    check_exponents(alpha, beta, sigma)?;
    if !(c > T::zero()) {
        return argument("the absolute constant C must be positive");
    }
    let one = T::one();
    let two_c = T::c(2.0) * c;
    let (regime, k) = kappa_bound(c1, alpha, beta, sigma);
    let kappa = k / two_c;
    let g = gamma_bound(alpha, sigma, kappa, c1 * (one - c_alpha(alpha)) * beta);
    let rho = rho_bound(c1, alpha, beta, sigma) / two_c;
    Ok(EventualConstants {
        regime,
        rho_max: T::c(2.0) * rho,
        kappa_max: k / c,
        gamma_max: g / c,
        rho,
        kappa,
        gamma: g / two_c,
    })
}

/// Every derived constant for one `(α, β, σ)` with the absolute constants `C₀`, `C₁`, `C`.
#[derive(Clone, Debug, Serialize)]
pub struct AdmissibleConstants<T> {
    pub alpha: T,
    pub beta: T,
    pub sigma: T,
    pub c0: T,
    pub c1: T,
    pub c2: T,
    pub c: T,
    pub c_alpha: T,
    pub c_alpha_prime: T,
    pub b_case: T,
    pub b_bar_case: T,
    pub k_case: T,
    pub n: u64,
    pub c_bar: T,
    pub stationary: StationaryConstants<T>,
    pub eventual: EventualConstants<T>,
}

impl<T: Scalar> AdmissibleConstants<T> {
    /// `C₂ = C₀/β`.
    pub fn compute(c0: T, c1: T, c: T, alpha: T, beta: T, sigma: T) -> Result<Self> {
        if !(c0 > T::zero() && c1 > T::zero()) {
            return argument("C0 and C1 must be positive");
        }
        let c2 = c0 / beta;
        Ok(Self {
            alpha,
            beta,
            sigma,
            c0,
            c1,
            c2,
            c,
            c_alpha: c_alpha(alpha),
            c_alpha_prime: c_alpha_prime(alpha),
            b_case: b_case(alpha, beta, c0),
            b_bar_case: b_bar_case(alpha, beta, c0),
            k_case: k_case(alpha, beta, sigma, c0),
            n: n_cond(alpha),
            c_bar: c_bar(alpha),
            stationary: solve_constants_stationary(c1, c2, alpha, beta, sigma)?,
            eventual: solve_constants_eventual(c1, c, alpha, beta, sigma)?,
        })
    }

    /// Strict stationary constraints at the given `(κ, γ)`.
    pub fn stationary_admissible(&self, kappa: T, gamma: T) -> bool {
        let Ok(b) = solve_constants_stationary(self.c1, self.c2, self.alpha, self.beta, self.sigma)
        else {
            return false;
        };
        let one = T::one();
        let ca = self.c_alpha;
        let g_max = (T::c(2.0) * self.c2)
            .recip()
            .min(self.sigma * kappa)
            .min((one - ca).powf(self.alpha) * T::c(0.5) * kappa)
            .min(self.c1 * self.beta * ca * (one - ca) / (T::c(12.0) * self.c2));
        kappa > T::zero() && gamma > T::zero() && kappa < b.kappa_max && gamma < g_max
    }

    /// The summarized ledger at `(ρ, κ, γ)` (non-strict, as stated).
    pub fn eventual_admissible(&self, rho: T, kappa: T, gamma: T) -> bool {
        let (a, b, s, c) = (self.alpha, self.beta, self.sigma, self.c);
        let (_, k) = kappa_bound(self.c1, a, b, s);
        let g = gamma_bound(a, s, kappa, self.c1 * (T::one() - self.c_alpha) * b * b) / c;
        let pos = rho > T::zero() && kappa > T::zero() && gamma > T::zero();
        pos && rho <= rho_bound(self.c1, a, b, s) / c && kappa <= k / c && gamma <= g
    }

    /// The log-supercritical constraints `ρ, κ, γ ≤ (bound)/(2C)` with the single-β γ tail.
    pub fn log_admissible(&self, rho: T, kappa: T, gamma: T) -> bool {
        let Ok(l) = solve_constants_log(self.c1, self.c, self.alpha, self.beta, self.sigma) else {
            return false;
        };
        let tol = T::one() + T::c(1e-12);
        let g = gamma_bound(
            self.alpha,
            self.sigma,
            kappa,
            self.c1 * (T::one() - self.c_alpha) * self.beta,
        ) / (T::c(2.0) * self.c);
        let pos = rho > T::zero() && kappa > T::zero() && gamma > T::zero();
        pos && rho <= l.rho * tol && kappa <= l.kappa * tol && gamma <= g * tol
    }
}

/// How the entry scale is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "path", rename_all = "kebab-case")]
pub enum EntryPath<T> {
    /// `A₀` from the L²-smoothing bound; `t_offset` plays the role of `t′`.
    Eventual,
    /// `A₀ = min{(βρt*/4)^{1/β}, 1/(2b₁), 1/b₃}` with `t* = 2·t_offset`.
    LogSupercritical { rho: T },
}

#[derive(Clone, Debug, Serialize)]
pub struct A0Delta<T> {
    pub a0: T,
    pub delta: T,
    /// `ln δ`, kept because δ underflows on the log path.
    pub log_delta: T,
    pub warnings: Vec<String>,
}

/// Entry scale `A₀` and inner breakpoint `δ`.
pub fn select_a0_delta<T: Scalar>(
    gamma: T,
    alpha: T,
    beta: T,
    t_offset: T,
    theta0_l2: T,
    c_beta: T,
    spec: &MultiplierSpec<T>,
    path: EntryPath<T>,
) -> Result<A0Delta<T>> {
    if !(gamma > T::zero() && t_offset > T::zero() && beta > T::zero() && c_beta > T::zero()) {
        return argument("gamma, t_offset, beta and C_beta must be positive");
    }
    if !(theta0_l2 >= T::zero()) {
        return argument("the data norm must be nonnegative");
    }
    let one = T::one();
    let m1 = spec.eval(one)?;
    let decay = t_offset.powf(-beta.recip());
    let mut warnings = Vec::new();
    match path {
        EntryPath::Eventual => {
            if !(alpha > T::zero() && alpha < one) {
                return argument("alpha must lie in (0, 1)");
            }
            let inner =
                T::c(4.0) * c_beta * m1 * alpha * theta0_l2 * decay / ((one - alpha) * gamma);
            let a0 = inner.powf(alpha.recip());
            let delta = a0 / T::c(4.0).powf(alpha.recip());
            if !a0.is_finite() {
                warnings.push("A0 is not finite (gamma too small for the data)".into());
            } else if a0 >= one {
                warnings.push(format!("A0 = {} is not below 1", a0.f64()));
            }
            if theta0_l2 == T::zero() {
                warnings.push("zero data gives A0 = 0".into());
            }
            Ok(A0Delta {
                a0,
                delta,
                log_delta: delta.ln(),
                warnings,
            })
        }
        EntryPath::LogSupercritical { rho } => {
            if !(rho > T::zero()) {
                return argument("rho must be positive");
            }
            let t_star = T::c(2.0) * t_offset;
            let a0 = (beta * rho * t_star / T::c(4.0))
                .powf(beta.recip())
                .min((T::c(2.0) * spec.b1).recip())
                .min(spec.b3.recip());
            let (b3, mu) = (spec.b3, spec.mu);
            let lna = a0.ln();
            let log_delta = if (one - mu).abs().f64() <= CRITICAL_TOL {
                let e = T::c(3.0) * c_beta * b3 / gamma * decay * theta0_l2 + b3 / m1;
                lna * e.exp()
            } else if mu < one && mu >= T::zero() {
                let p = (one - mu).recip();
                let c_mu = T::c(2.0).powf(p - one);
                let x = T::c(3.0) * c_beta * b3 * (one - mu) / gamma * decay * theta0_l2
                    + b3 * (one - mu) / m1;
                c_mu * lna - c_mu * x.powf(p)
            } else {
                return argument("mu must lie in [0, 1]");
            };
            let delta = log_delta.exp();
            if delta == T::zero() {
                warnings.push(format!("delta underflows; ln delta = {}", log_delta.f64()));
            }
            Ok(A0Delta {
                a0,
                delta,
                log_delta,
                warnings,
            })
        }
    }
}

/// Scaling factor for the small-scale modulus: the largest of the amplitude,
/// gradient and unit terms.
pub fn appendix_lambda<T: Scalar>(
    theta0_linf: T,
    grad_theta0_linf: T,
    delta: T,
    alpha: T,
    beta: T,
) -> Result<T> {
    if !(delta > T::zero() && delta < T::c(4.0 / 9.0)) {
        return argument(format!("delta = {} must lie in (0, 4/9)", delta.f64()));
    }
    if !(theta0_linf >= T::zero() && grad_theta0_linf >= T::zero()) {
        return argument("norms must be nonnegative");
    }
    let e = T::c(2.0) - alpha - beta;
    if !(e > T::zero()) {
        return argument("alpha + beta must be below 2");
    }
    let h = T::c(0.5) * delta;
    let first = (T::c(4.0) * theta0_linf / (h - h.powf(T::c(1.5)))).powf(e.recip());
    let second = if theta0_linf > T::zero() {
        delta * grad_theta0_linf / (T::c(2.0) * theta0_linf)
    } else {
        T::zero()
    };
    Ok(first.max(second).max(T::one()))
}
