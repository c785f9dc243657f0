use serde::{Deserialize, Serialize};

use super::stationary::{log_integral, HolderLog};
use super::{check_xi, left_of, Modulus, Side};
use crate::error::argument;
use crate::{Result, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyVariant {
    /// Built on the uncapped Hölder–log modulus.
    Eventual,
    /// Built on the capped modulus; frozen beyond the cap point.
    LogSupercritical,
}

/// The five-way split of the `(ξ, ξ₀)` plane used in the preservation proof.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ProofCase {
    /// ξ₀ > δ, ξ ≤ δ
    One,
    /// ξ₀ > δ, δ < ξ ≤ ξ₀
    Two,
    /// ξ₀ > δ, ξ > ξ₀
    Three,
    /// ξ₀ ≤ δ, ξ ≤ ξ₀
    Four,
    /// ξ₀ ≤ δ, ξ > ξ₀
    Five,
}

impl ProofCase {
    pub fn label(self) -> u8 {
        match self {
            Self::One => 1,
            Self::Two => 2,
            Self::Three => 3,
            Self::Four => 4,
            Self::Five => 5,
        }
    }
}

/// Family `ω(ξ, ξ₀)` obtained by replacing the base modulus below `ξ₀` with
/// tangent lines; `ξ₀(t) = (A₀^β − ρβt)^{1/β}`.
#[derive(Clone, Debug)]
pub struct TimeDependentModulus<T> {
    pub base: HolderLog<T>,
    pub a0: T,
    pub rho: T,
    pub beta: T,
    pub variant: FamilyVariant,
}

impl<T: Scalar> TimeDependentModulus<T> {
    pub fn new(base: HolderLog<T>, a0: T, rho: T, beta: T, variant: FamilyVariant) -> Result<Self> {
        if !(a0 > T::zero() && rho > T::zero()) {
            return argument("A0 and rho must be positive");
        }
        if !(beta > T::zero() && beta <= T::one()) {
            return argument("beta must lie in (0, 1]");
        }
        match (variant, base.cap) {
            (FamilyVariant::Eventual, Some(_)) => {
                return argument("the eventual family needs an uncapped base")
            }
            (FamilyVariant::LogSupercritical, None) => {
                return argument("the log-supercritical family needs a capped base")
            }
            _ => {}
        }
        Ok(Self {
            base,
            a0,
            rho,
            beta,
            variant,
        })
    }

    /// Closed-form front position, clamped at zero after `t₁`.
    pub fn xi0_at(&self, t: T) -> T {
        let s = self.a0.powf(self.beta) - self.rho * self.beta * t.max(T::zero());
        if s <= T::zero() {
            T::zero()
        } else {
            s.powf(self.beta.recip())
        }
    }

    /// `t₁ = A₀^β/(βρ)`.
    pub fn t1(&self) -> T {
        self.a0.powf(self.beta) / (self.beta * self.rho)
    }

    /// Rate `−ξ₀'(t) = ρ ξ₀^{1−β}`.
    pub fn front_speed(&self, xi0: T) -> T {
        self.rho * xi0.powf(T::one() - self.beta)
    }

    pub fn slice(&self, xi0: T) -> Result<FamilySlice<'_, T>> {
        FamilySlice::new(self, xi0)
    }

    pub fn eval(&self, xi: T, xi0: T) -> Result<T> {
        self.slice(xi0)?.value(xi)
    }

    pub fn d_xi(&self, xi: T, xi0: T, side: Side) -> Result<T> {
        self.slice(xi0)?.slope(xi, side)
    }

    pub fn d_xi0_upper(&self, xi: T, xi0: T) -> Result<T> {
        self.slice(xi0)?.d_xi0_upper(xi)
    }
}

/// `ω(·, ξ₀)` at a frozen front, with the ξ₀-dependent constants cached.
#[derive(Clone, Debug)]
pub struct FamilySlice<'a, T> {
    fam: &'a TimeDependentModulus<T>,
    pub xi0: T,
    /// `γ ∫_δ^{ξ₀} dη/(η m(1/η))` (ξ₀ > δ only).
    i0: T,
    /// `m(1/ξ₀)`.
    m0: T,
}

impl<'a, T: Scalar> FamilySlice<'a, T> {
    pub fn new(fam: &'a TimeDependentModulus<T>, xi0: T) -> Result<Self> {
        if !(xi0 >= T::zero() && xi0.is_finite()) {
            return crate::error::domain("xi0 must be nonnegative");
        }
        let b = &fam.base;
        let (i0, m0) = if xi0 > b.delta {
            (
                b.gamma * log_integral(&b.multiplier, b.delta, xi0)?,
                b.multiplier.eval(xi0.recip())?,
            )
        } else if xi0 > T::zero() {
            (T::zero(), b.multiplier.eval(xi0.recip())?)
        } else {
            (T::zero(), T::zero())
        };
        Ok(Self { fam, xi0, i0, m0 })
    }

    fn base(&self) -> &HolderLog<T> {
        &self.fam.base
    }

    fn wide(&self) -> bool {
        self.xi0 > self.base().delta
    }

    fn frozen(&self, xi: T, side: Side) -> bool {
        self.base().cap.is_some_and(|c| !left_of(xi, c, side))
    }

    /// Tangent slope `γ/(ξ₀ m(1/ξ₀))` used for δ < ξ ≤ ξ₀.
    fn s0(&self) -> T {
        self.base().gamma / (self.xi0 * self.m0)
    }

    fn value_uncapped(&self, xi: T) -> Result<T> {
        let b = self.base();
        if self.xi0 == T::zero() {
            return if xi <= b.delta {
                Ok(b.amplitude() * xi.powf(b.sigma))
            } else {
                b.log_piece(xi)
            };
        }
        let (sig, w0) = (b.sigma, b.omega_delta());
        if self.wide() {
            if xi <= b.delta {
                Ok(
                    (T::one() - sig) * w0 + self.i0 - self.s0() * (self.xi0 - b.delta)
                        + sig * w0 / b.delta * xi,
                )
            } else if xi <= self.xi0 {
                Ok(w0 + self.i0 - b.gamma / self.m0 + self.s0() * xi)
            } else {
                b.log_piece(xi)
            }
        } else {
            let a = b.amplitude();
            if xi <= self.xi0 {
                Ok((T::one() - sig) * a * self.xi0.powf(sig)
                    + sig * a * self.xi0.powf(sig - T::one()) * xi)
            } else if xi <= b.delta {
                Ok(a * xi.powf(sig))
            } else {
                b.log_piece(xi)
            }
        }
    }

    /// Which proof case `(ξ, ξ₀)` falls in (ξ beyond the cap counts as the cap).
    pub fn case(&self, xi: T) -> ProofCase {
        let b = self.base();
        let xi = b.cap.map_or(xi, |c| xi.min(c));
        if self.wide() {
            if xi <= b.delta {
                ProofCase::One
            } else if xi <= self.xi0 {
                ProofCase::Two
            } else {
                ProofCase::Three
            }
        } else if xi <= self.xi0 {
            ProofCase::Four
        } else {
            ProofCase::Five
        }
    }

    /// Per-case upper bound on `∂ξ₀ω(ξ, ξ₀)`.
    pub fn d_xi0_upper(&self, xi: T) -> Result<T> {
        check_xi(xi)?;
        if self.xi0 <= T::zero() {
            return crate::error::domain("d_xi0_upper needs xi0 > 0");
        }
        let b = self.base();
        let xi_c = b.cap.map_or(xi, |c| xi.min(c));
        Ok(match self.case(xi) {
            ProofCase::One => self.s0(),
            ProofCase::Two => T::c(2.0) * self.s0(),
            ProofCase::Three | ProofCase::Five => T::zero(),
            ProofCase::Four => {
                let s = b.sigma;
                s * (T::one() - s)
                    * b.amplitude()
                    * self.xi0.powf(s - T::one())
                    * (T::one() - xi_c / self.xi0)
            }
        })
    }
}

impl<T: Scalar> Modulus<T> for FamilySlice<'_, T> {
    fn value(&self, xi: T) -> Result<T> {
        check_xi(xi)?;
        match self.base().cap {
            Some(c) if xi > c => self.value_uncapped(c),
            _ => self.value_uncapped(xi),
        }
    }

    fn slope(&self, xi: T, side: Side) -> Result<T> {
        check_xi(xi)?;
        if self.frozen(xi, side) {
            return Ok(T::zero());
        }
        let b = self.base();
        let sig = b.sigma;
        if self.xi0 == T::zero() {
            return b.slope(xi, side);
        }
        if self.wide() {
            if left_of(xi, b.delta, side) {
                Ok(sig * b.omega_delta() / b.delta)
            } else if left_of(xi, self.xi0, side) {
                Ok(self.s0())
            } else {
                b.log_slope(xi)
            }
        } else if left_of(xi, self.xi0, side) {
            Ok(sig * b.amplitude() * self.xi0.powf(sig - T::one()))
        } else if left_of(xi, b.delta, side) {
            Ok(sig * b.amplitude() * xi.powf(sig - T::one()))
        } else {
            b.log_slope(xi)
        }
    }

    fn curvature(&self, xi: T) -> Result<T> {
        check_xi(xi)?;
        if self.frozen(xi, Side::Right) {
            return Ok(T::zero());
        }
        let b = self.base();
        if self.xi0 == T::zero() {
            return b.curvature(xi);
        }
        let log_from = if self.wide() { self.xi0 } else { b.delta };
        if xi >= log_from {
            return b.log_curvature(xi);
        }
        if !self.wide() && xi >= self.xi0 {
            let s = b.sigma;
            return Ok(s * (s - T::one()) * b.amplitude() * xi.powf(s - T::c(2.0)));
        }
        Ok(T::zero())
    }

    fn breakpoints(&self) -> Vec<T> {
        let b = self.base();
        let mut v = vec![b.delta];
        if self.xi0 > T::zero() {
            v.push(self.xi0);
        }
        v.extend(b.cap);
        v.sort_by(|x, y| x.partial_cmp(y).unwrap());
        v.dedup();
        v
    }

    fn at_zero(&self) -> T {
        let b = self.base();
        if self.xi0 == T::zero() {
            T::zero()
        } else if self.wide() {
            (T::one() - b.sigma) * b.omega_delta() + self.i0 - self.s0() * (self.xi0 - b.delta)
        } else {
            (T::one() - b.sigma) * b.amplitude() * self.xi0.powf(b.sigma)
        }
    }

    fn scale(&self) -> T {
        self.base().delta
    }

    fn plateau(&self) -> Option<T> {
        self.base().cap
    }

    fn growth_tail(&self, h: T, beta: T, m_h: T) -> Result<T> {
        if h < self.xi0 {
            return Ok(T::infinity());
        }
        self.base().growth_tail(h, beta, m_h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiplier::MultiplierSpec;
    use approx::assert_relative_eq;
    use std::sync::Arc;

    fn fam(gamma: f64) -> TimeDependentModulus<f64> {
        let base = HolderLog::new(
            0.1,
            gamma,
            0.01,
            0.5,
            None,
            Arc::new(MultiplierSpec::identity()),
        )
        .unwrap();
        TimeDependentModulus::new(base, 1.0, 1.0, 1.0, FamilyVariant::Eventual).unwrap()
    }

    #[test]
    fn collapses_to_base_at_zero_front() {
        let f = fam(0.05);
        for &x in &[1e-4, 0.01, 0.3, 2.0] {
            assert_eq!(f.eval(x, 0.0).unwrap(), f.base.value(x).unwrap());
        }
    }

    #[test]
    fn junction_values() {
        let f = fam(0.05);
        assert_relative_eq!(f.eval(0.0025, 0.0025).unwrap(), 0.05, max_relative = 1e-14);
        let v = 0.1 + 0.05 * 10f64.ln();
        let left = f.eval(0.1, 0.1).unwrap();
        let right = f.eval(0.1 * (1.0 + 1e-14), 0.1).unwrap();
        assert_relative_eq!(left, v, max_relative = 1e-14);
        assert_relative_eq!(right, v, max_relative = 1e-12);
        assert_relative_eq!(v, 0.215_129_254_649_702_3, max_relative = 1e-12);
    }

    #[test]
    fn continuity_at_delta_wide_front() {
        let f = fam(0.03);
        let s = f.slice(0.2).unwrap();
        let a = s.value(0.01).unwrap();
        let b = s.value(0.01 * (1.0 + 1e-13)).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-11);
    }

    #[test]
    fn case_two_slope_is_tangent() {
        let f = fam(0.05);
        for &x in &[0.02, 0.05, 0.09] {
            assert_relative_eq!(
                f.d_xi(x, 0.1, Side::Right).unwrap(),
                0.05 / 0.1,
                max_relative = 1e-14
            );
        }
        assert_eq!(f.slice(0.1).unwrap().case(0.05), ProofCase::Two);
    }

    #[test]
    fn d_xi0_cases() {
        let f = fam(0.05);
        assert_relative_eq!(
            f.d_xi0_upper(0.005, 0.1).unwrap(),
            0.5,
            max_relative = 1e-14
        );
        assert_relative_eq!(f.d_xi0_upper(0.05, 0.1).unwrap(), 1.0, max_relative = 1e-14);
        assert_eq!(f.d_xi0_upper(0.2, 0.1).unwrap(), 0.0);
        assert_eq!(f.d_xi0_upper(0.2, 0.005).unwrap(), 0.0);
        // Case 4 bound equals the exact ∂ξ₀ of the linear piece
        let (x, x0) = (0.001, 0.004);
        let h = 1e-7;
        let fd = (f.eval(x, x0 + h).unwrap() - f.eval(x, x0 - h).unwrap()) / (2.0 * h);
        assert_relative_eq!(f.d_xi0_upper(x, x0).unwrap(), fd, max_relative = 1e-6);
    }

    #[test]
    fn xi0_law_examples() {
        let f = fam(0.05);
        assert_relative_eq!(f.xi0_at(0.25), 0.75, max_relative = 1e-15);
        assert_eq!(f.t1(), 1.0);
        assert_eq!(f.xi0_at(2.0), 0.0);
        let base = f.base.clone();
        let g = TimeDependentModulus::new(base, 1.0, 2.0, 0.5, FamilyVariant::Eventual).unwrap();
        assert_relative_eq!(g.xi0_at(0.5), 0.25, max_relative = 1e-15);
        assert_eq!(g.t1(), 1.0);
    }

    #[test]
    fn variant_matches_base() {
        let f = fam(0.05);
        assert!(TimeDependentModulus::new(
            f.base.clone(),
            1.0,
            1.0,
            1.0,
            FamilyVariant::LogSupercritical
        )
        .is_err());
    }
}
