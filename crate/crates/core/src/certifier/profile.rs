use crate::error::argument;
use crate::moduli::{check_xi, Modulus, Side};
use crate::{Result, Scalar};

/// `ω(ξ) = c·min(ξ, cap)^p`, a closed-form profile for exercising the bounds.
/// Concave for `p ≤ 1`.
#[derive(Clone, Copy, Debug)]
pub struct Profile<T> {
    pub c: T,
    pub p: T,
    pub cap: Option<T>,
}

impl<T: Scalar> Profile<T> {
    pub fn new(c: T, p: T, cap: Option<T>) -> Result<Self> {
        if !(c > T::zero() && p > T::zero() && p <= T::one()) {
            return argument("profile needs c > 0 and p in (0, 1]");
        }
        if cap.is_some_and(|x| !(x > T::zero())) {
            return argument("cap must be positive");
        }
        Ok(Self { c, p, cap })
    }

    fn clip(&self, xi: T) -> T {
        self.cap.map_or(xi, |k| xi.min(k))
    }
}

impl<T: Scalar> Modulus<T> for Profile<T> {
    fn value(&self, xi: T) -> Result<T> {
        check_xi(xi)?;
        Ok(self.c * self.clip(xi).powf(self.p))
    }

    fn slope(&self, xi: T, side: Side) -> Result<T> {
        check_xi(xi)?;
        if self
            .cap
            .is_some_and(|k| xi > k || (xi == k && side == Side::Right))
        {
            return Ok(T::zero());
        }
        Ok(self.c * self.p * xi.powf(self.p - T::one()))
    }

    fn curvature(&self, xi: T) -> Result<T> {
        check_xi(xi)?;
        if self.cap.is_some_and(|k| xi >= k) {
            return Ok(T::zero());
        }
        Ok(self.c * self.p * (self.p - T::one()) * xi.powf(self.p - T::c(2.0)))
    }

    fn breakpoints(&self) -> Vec<T> {
        self.cap.into_iter().collect()
    }

    fn at_zero(&self) -> T {
        T::zero()
    }

    fn scale(&self) -> T {
        self.cap.unwrap_or(T::one())
    }

    fn plateau(&self) -> Option<T> {
        self.cap
    }

    // ω(η)m(1/η) ≤ c η^p m(1/H) for η ≥ H
    fn growth_tail(&self, h: T, beta: T, m_h: T) -> Result<T> {
        if let Some(k) = self.cap {
            if h >= k {
                return Ok(self.value(h)? * m_h * h.powf(-beta) / beta);
            }
        }
        if self.p >= beta {
            return Ok(T::infinity());
        }
        Ok(self.c * m_h * h.powf(self.p - beta) / (beta - self.p))
    }
}
