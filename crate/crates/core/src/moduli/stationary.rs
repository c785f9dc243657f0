use std::sync::Arc;

use serde::Serialize;

use super::{check_xi, left_of, Modulus, Side};
use crate::error::argument;
use crate::multiplier::MultiplierSpec;
use crate::quad::{integrate, QuadOptions};
use crate::tolerances::MODULUS_INTEGRAL_ABS;
use crate::{Result, Scalar};

/// `∫_a^b dη / (η m(1/η))`, in closed form for pure powers.
pub fn log_integral<T: Scalar>(m: &MultiplierSpec<T>, a: T, b: T) -> Result<T> {
    if a == b {
        return Ok(T::zero());
    }
    if let Some(p) = m.pure_power() {
        let l = (b / a).ln();
        return Ok(if p == T::zero() {
            l
        } else {
            a.powf(p) * (p * l).exp_m1() / p
        });
    }
    let opts = QuadOptions::new(T::c(MODULUS_INTEGRAL_ABS), T::c(1e-13));
    let r = integrate(
        |t: T| Ok(m.eval((-t).exp())?.recip()),
        a.ln(),
        b.ln(),
        &opts,
    )?;
    Ok(r.value)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StationaryVariant {
    HolderLog,
    Capped,
    Appendix,
}

/// `κ/m(1/δ)·(ξ/δ)^σ` up to δ, then `κ/m(1/δ) + γ∫_δ^ξ dη/(η m(1/η))`,
/// frozen beyond `cap` when one is set.
#[derive(Clone, Debug)]
pub struct HolderLog<T> {
    pub kappa: T,
    pub gamma: T,
    pub delta: T,
    pub sigma: T,
    pub cap: Option<T>,
    pub multiplier: Arc<MultiplierSpec<T>>,
    m_delta: T,
    omega_cap: T,
}

impl<T: Scalar> HolderLog<T> {
    pub fn new(
        kappa: T,
        gamma: T,
        delta: T,
        sigma: T,
        cap: Option<T>,
        multiplier: Arc<MultiplierSpec<T>>,
    ) -> Result<Self> {
        if !(kappa > T::zero() && gamma > T::zero() && delta > T::zero()) {
            return argument("kappa, gamma and delta must be positive");
        }
        if !(sigma > T::zero() && sigma < T::one()) {
            return argument("sigma must lie in (0, 1)");
        }
        if let Some(c) = cap {
            if c <= delta {
                return argument(format!(
                    "cap point {} must exceed delta {}",
                    c.f64(),
                    delta.f64()
                ));
            }
        }
        let m_delta = multiplier.eval(delta.recip())?;
        let mut s = Self {
            kappa,
            gamma,
            delta,
            sigma,
            cap,
            multiplier,
            m_delta,
            omega_cap: T::zero(),
        };
        if let Some(c) = cap {
            s.omega_cap = s.log_piece(c)?;
        }
        Ok(s)
    }

    /// `m(1/δ)`.
    pub fn m_delta(&self) -> T {
        self.m_delta
    }

    /// `ω(δ) = κ/m(1/δ)`.
    pub fn omega_delta(&self) -> T {
        self.kappa / self.m_delta
    }

    /// Amplitude `A` of the Hölder piece `A ξ^σ`.
    pub fn amplitude(&self) -> T {
        self.kappa / (self.m_delta * self.delta.powf(self.sigma))
    }

    /// Concavity at the inner kink: `γ ≤ σκ`.
    pub fn is_concave(&self) -> bool {
        self.gamma <= self.sigma * self.kappa
    }

    pub(crate) fn log_piece(&self, xi: T) -> Result<T> {
        Ok(self.omega_delta() + self.gamma * log_integral(&self.multiplier, self.delta, xi)?)
    }

    pub(crate) fn log_slope(&self, xi: T) -> Result<T> {
        Ok(self.gamma / (xi * self.multiplier.eval(xi.recip())?))
    }

    pub(crate) fn log_curvature(&self, xi: T) -> Result<T> {
        let inv = xi.recip();
        let m = self.multiplier.eval(inv)?;
        let g = xi * m;
        let gp = m - self.multiplier.eval_prime(inv)? * inv;
        Ok(-self.gamma * gp / (g * g))
    }

    fn capped(&self, xi: T, side: Side) -> bool {
        self.cap.is_some_and(|c| !left_of(xi, c, side))
    }
}

impl<T: Scalar> Modulus<T> for HolderLog<T> {
    fn value(&self, xi: T) -> Result<T> {
        check_xi(xi)?;
        if self.capped(xi, Side::Right) {
            return Ok(self.omega_cap);
        }
        if xi <= self.delta {
            Ok(self.amplitude() * xi.powf(self.sigma))
        } else {
            self.log_piece(xi)
        }
    }

    fn slope(&self, xi: T, side: Side) -> Result<T> {
        check_xi(xi)?;
        if self.capped(xi, side) {
            return Ok(T::zero());
        }
        if left_of(xi, self.delta, side) {
            Ok(self.sigma * self.amplitude() * xi.powf(self.sigma - T::one()))
        } else {
            self.log_slope(xi)
        }
    }

    fn curvature(&self, xi: T) -> Result<T> {
        check_xi(xi)?;
        if self.capped(xi, Side::Right) {
            return Ok(T::zero());
        }
        if xi < self.delta {
            let s = self.sigma;
            Ok(s * (s - T::one()) * self.amplitude() * xi.powf(s - T::c(2.0)))
        } else {
            self.log_curvature(xi)
        }
    }

    fn breakpoints(&self) -> Vec<T> {
        let mut b = vec![self.delta];
        b.extend(self.cap);
        b
    }

    fn at_zero(&self) -> T {
        T::zero()
    }

    fn scale(&self) -> T {
        self.delta
    }

    fn plateau(&self) -> Option<T> {
        self.cap
    }

    // beyond δ, ω(η)m(1/η) ≤ ω(H)m(1/H) + γ ln(η/H) since m is nondecreasing
    fn growth_tail(&self, h: T, beta: T, m_h: T) -> Result<T> {
        if self.cap.is_some_and(|c| h >= c) {
            return Ok(self.omega_cap * m_h * h.powf(-beta) / beta);
        }
        if h < self.delta {
            return Ok(T::infinity());
        }
        Ok((self.value(h)? * m_h + self.gamma / beta) * h.powf(-beta) / beta)
    }
}

/// `λ^{2−α−β} ω(λξ)` with `ω(ξ) = ξ − ξ^{3/2}` up to δ and constant after.
#[derive(Clone, Debug)]
pub struct AppendixModulus<T> {
    pub delta: T,
    pub lambda: T,
    pub alpha: T,
    pub beta: T,
}

impl<T: Scalar> AppendixModulus<T> {
    pub fn new(delta: T, lambda: T, alpha: T, beta: T) -> Result<Self> {
        if !(delta > T::zero() && delta <= T::c(4.0 / 9.0)) {
            return argument("appendix modulus needs 0 < delta <= 4/9 to stay nondecreasing");
        }
        if lambda <= T::zero() {
            return argument("lambda must be positive");
        }
        Ok(Self {
            delta,
            lambda,
            alpha,
            beta,
        })
    }

    fn exponent(&self) -> T {
        T::c(2.0) - self.alpha - self.beta
    }

    fn unit(&self, x: T) -> T {
        let x = x.min(self.delta);
        x - x.powf(T::c(1.5))
    }
}

impl<T: Scalar> Modulus<T> for AppendixModulus<T> {
    fn value(&self, xi: T) -> Result<T> {
        check_xi(xi)?;
        Ok(self.lambda.powf(self.exponent()) * self.unit(self.lambda * xi))
    }

    fn slope(&self, xi: T, side: Side) -> Result<T> {
        check_xi(xi)?;
        let x = self.lambda * xi;
        if !left_of(x, self.delta, side) {
            return Ok(T::zero());
        }
        Ok(self.lambda.powf(self.exponent() + T::one()) * (T::one() - T::c(1.5) * x.sqrt()))
    }

    fn curvature(&self, xi: T) -> Result<T> {
        check_xi(xi)?;
        let x = self.lambda * xi;
        if x >= self.delta {
            return Ok(T::zero());
        }
        Ok(-self.lambda.powf(self.exponent() + T::c(2.0)) * T::c(0.75) / x.sqrt())
    }

    fn breakpoints(&self) -> Vec<T> {
        vec![self.delta / self.lambda]
    }

    fn at_zero(&self) -> T {
        T::zero()
    }

    fn scale(&self) -> T {
        self.delta / self.lambda
    }

    fn plateau(&self) -> Option<T> {
        Some(self.delta / self.lambda)
    }
}

#[derive(Clone, Debug)]
pub enum StationaryModulus<T> {
    HolderLog(HolderLog<T>),
    Appendix(AppendixModulus<T>),
}

impl<T: Scalar> StationaryModulus<T> {
    pub fn holder_log(
        kappa: T,
        gamma: T,
        delta: T,
        sigma: T,
        m: Arc<MultiplierSpec<T>>,
    ) -> Result<Self> {
        Ok(Self::HolderLog(HolderLog::new(
            kappa, gamma, delta, sigma, None, m,
        )?))
    }

    /// Capped at `1/(2 b1)`.
    pub fn capped(
        kappa: T,
        gamma: T,
        delta: T,
        sigma: T,
        m: Arc<MultiplierSpec<T>>,
    ) -> Result<Self> {
        let cap = (T::c(2.0) * m.b1).recip();
        Ok(Self::HolderLog(HolderLog::new(
            kappa,
            gamma,
            delta,
            sigma,
            Some(cap),
            m,
        )?))
    }

    pub fn appendix(delta: T, lambda: T, alpha: T, beta: T) -> Result<Self> {
        Ok(Self::Appendix(AppendixModulus::new(
            delta, lambda, alpha, beta,
        )?))
    }

    pub fn variant(&self) -> StationaryVariant {
        match self {
            Self::HolderLog(h) if h.cap.is_some() => StationaryVariant::Capped,
            Self::HolderLog(_) => StationaryVariant::HolderLog,
            Self::Appendix(_) => StationaryVariant::Appendix,
        }
    }

    pub fn as_holder(&self) -> Option<&HolderLog<T>> {
        match self {
            Self::HolderLog(h) => Some(h),
            Self::Appendix(_) => None,
        }
    }

    fn inner(&self) -> &dyn Modulus<T> {
        match self {
            Self::HolderLog(h) => h,
            Self::Appendix(a) => a,
        }
    }
}

impl<T: Scalar> Modulus<T> for StationaryModulus<T> {
    fn value(&self, xi: T) -> Result<T> {
        self.inner().value(xi)
    }
    fn slope(&self, xi: T, side: Side) -> Result<T> {
        self.inner().slope(xi, side)
    }
    fn curvature(&self, xi: T) -> Result<T> {
        self.inner().curvature(xi)
    }
    fn breakpoints(&self) -> Vec<T> {
        self.inner().breakpoints()
    }
    fn at_zero(&self) -> T {
        self.inner().at_zero()
    }
    fn scale(&self) -> T {
        self.inner().scale()
    }
    fn plateau(&self) -> Option<T> {
        self.inner().plateau()
    }
    fn growth_tail(&self, h: T, beta: T, m_h: T) -> Result<T> {
        self.inner().growth_tail(h, beta, m_h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_m() -> Arc<MultiplierSpec<f64>> {
        Arc::new(MultiplierSpec::identity())
    }

    #[test]
    fn holder_log_examples() {
        let w = StationaryModulus::holder_log(0.1, 0.05, 0.01, 0.5, unit_m()).unwrap();
        assert_relative_eq!(w.value(0.01).unwrap(), 0.1, max_relative = 1e-15);
        assert_relative_eq!(w.value(0.0025).unwrap(), 0.05, max_relative = 1e-15);
        let e = std::f64::consts::E;
        assert_relative_eq!(w.value(0.01 * e).unwrap(), 0.15, max_relative = 1e-14);
        assert!(w.value(0.0).is_err());
        assert!(w.value(-1.0).is_err());
    }

    #[test]
    fn one_sided_slopes_at_delta() {
        let w = StationaryModulus::holder_log(0.1, 0.05, 0.01, 0.5, unit_m()).unwrap();
        assert_relative_eq!(
            w.slope(0.01, Side::Left).unwrap(),
            5.0,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            w.slope(0.01, Side::Right).unwrap(),
            5.0,
            max_relative = 1e-14
        );
        let w = StationaryModulus::holder_log(0.1, 0.025, 0.01, 0.5, unit_m()).unwrap();
        assert_relative_eq!(
            w.slope(0.01, Side::Right).unwrap(),
            2.5,
            max_relative = 1e-14
        );
    }

    #[test]
    fn appendix_examples() {
        let w = StationaryModulus::appendix(0.25, 1.0, 0.3, 0.7).unwrap();
        assert_relative_eq!(w.value(0.09).unwrap(), 0.063, max_relative = 1e-14);
        assert_relative_eq!(
            w.slope(0.09, Side::Left).unwrap(),
            0.55,
            max_relative = 1e-14
        );
        assert_relative_eq!(w.curvature(0.09).unwrap(), -2.5, max_relative = 1e-14);
        assert_relative_eq!(w.value(0.3).unwrap(), 0.25 - 0.125, max_relative = 1e-14);
        assert!(StationaryModulus::appendix(0.5, 1.0, 0.3, 0.7).is_err());
    }

    #[test]
    fn log_integral_closed_form_matches_quadrature() {
        let m = MultiplierSpec::power(0.3);
        let closed = log_integral(&m, 0.01, 3.0).unwrap();
        let t = crate::multiplier::Table::new(
            crate::scalar::logspace(1e-3, 1e3, 4001),
            crate::scalar::logspace(1e-3f64, 1e3, 4001)
                .iter()
                .map(|r| r.powf(0.3))
                .collect(),
        )
        .unwrap();
        let tab = MultiplierSpec::tabulated(t, 0.3, 0.3);
        let quad = log_integral(&tab, 0.01, 3.0).unwrap();
        assert_relative_eq!(
            closed,
            (3f64.powf(0.3) - 0.01f64.powf(0.3)) / 0.3,
            max_relative = 1e-14
        );
        assert_relative_eq!(closed, quad, max_relative = 1e-8);
    }

    #[test]
    fn capped_is_flat_after_cap() {
        let m = Arc::new(MultiplierSpec::power(0.3).with_constants(5.0, 2.0, 1.0, 1.0));
        let w = StationaryModulus::capped(0.1, 0.02, 0.01, 0.5, m).unwrap();
        assert_eq!(w.variant(), StationaryVariant::Capped);
        let c = 0.25;
        assert_eq!(w.value(1.0).unwrap(), w.value(c).unwrap());
        assert_eq!(w.slope(c, Side::Right).unwrap(), 0.0);
        assert!(w.slope(c, Side::Left).unwrap() > 0.0);
    }
}
