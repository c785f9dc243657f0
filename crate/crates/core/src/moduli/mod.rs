//! Moduli of continuity: the stationary Hölder–log modulus and its capped
//! form, the small-scale appendix modulus, the shrinking-front families, and
//! the constant-selection formulas that make them admissible.

mod constants;
mod empirical;
mod family;
mod stationary;

pub use constants::*;
pub use empirical::{field_obeys, EmpiricalModulus, ObeyVerdict, Violation};
pub use family::{FamilySlice, FamilyVariant, ProofCase, TimeDependentModulus};
pub use stationary::{
    log_integral, AppendixModulus, HolderLog, StationaryModulus, StationaryVariant,
};

use crate::{Result, Scalar};

/// One-sided derivative selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A concave nondecreasing profile `ω(ξ)` on `(0, ∞)` with finitely many kinks.
pub trait Modulus<T: Scalar>: Sync {
    fn value(&self, xi: T) -> Result<T>;

    /// One-sided `∂ξω`; away from breakpoints both sides agree.
    fn slope(&self, xi: T, side: Side) -> Result<T>;

    /// `∂ξξω` on the smooth piece containing `xi` (right piece at a kink).
    fn curvature(&self, xi: T) -> Result<T>;

    /// Interior kinks, ascending.
    fn breakpoints(&self) -> Vec<T>;

    /// `ω(0+)`.
    fn at_zero(&self) -> T;

    /// Characteristic length (the inner breakpoint δ).
    fn scale(&self) -> T;

    /// Radius beyond which `ω` is constant, if any.
    fn plateau(&self) -> Option<T> {
        None
    }

    /// Upper bound on `∫_H^∞ ω(η) m(1/η) η^{−1−β} dη` for a nondecreasing `m`,
    /// given `m_h = m(1/H)`; infinite when no envelope is known.
    fn growth_tail(&self, h: T, beta: T, m_h: T) -> Result<T> {
        match self.plateau() {
            Some(c) if h >= c => Ok(self.value(h)? * m_h * h.powf(-beta) / beta),
            _ => Ok(T::infinity()),
        }
    }

    /// The larger one-sided slope.
    fn slope_max(&self, xi: T) -> Result<T> {
        Ok(self
            .slope(xi, Side::Left)?
            .max(self.slope(xi, Side::Right)?))
    }
}

pub(crate) fn check_xi<T: Scalar>(xi: T) -> Result<()> {
    if xi > T::zero() && xi.is_finite() {
        Ok(())
    } else {
        crate::error::domain(format!("modulus requires xi > 0, got {}", xi.f64()))
    }
}

/// `true` when `xi` lies on the left piece of a kink at `b`.
#[inline]
pub(crate) fn left_of<T: Scalar>(xi: T, b: T, side: Side) -> bool {
    xi < b || (xi == b && side == Side::Left)
}
