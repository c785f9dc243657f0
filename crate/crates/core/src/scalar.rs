use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use rustfft::FftNum;

/// Floating-point type accepted by the numerical core (`f32` or `f64`).
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + FftNum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn c(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn f64(self) -> f64 {
        self.to_f64().expect("finite conversion to f64")
    }

    fn usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }
}

impl<T> Scalar for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + NumAssign
        + FftNum
        + Debug
        + Display
        + Default
        + Send
        + Sync
        + 'static
{
}

/// `n` points log-spaced from `a` to `b` inclusive.
pub fn logspace<T: Scalar>(a: T, b: T, n: usize) -> Vec<T> {
    assert!(a > T::zero() && b > T::zero() && n >= 1);
    if n == 1 {
        return vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    let step = (lb - la) / T::usize(n - 1);
    (0..n)
        .map(|i| {
            if i == 0 {
                a
            } else if i == n - 1 {
                b
            } else {
                (la + step * T::usize(i)).exp()
            }
        })
        .collect()
}

/// `n` points evenly spaced from `a` to `b` inclusive.
pub fn linspace<T: Scalar>(a: T, b: T, n: usize) -> Vec<T> {
    if n == 1 {
        return vec![a];
    }
    let step = (b - a) / T::usize(n - 1);
    (0..n)
        .map(|i| {
            if i == n - 1 {
                b
            } else {
                a + step * T::usize(i)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logspace_endpoints_exact() {
        let g = logspace(1e-6_f64, 1e2, 200);
        assert_eq!(g.len(), 200);
        assert_eq!(g[0], 1e-6);
        assert_eq!(g[199], 1e2);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn generic_over_f32() {
        let g = linspace(0.0_f32, 1.0, 5);
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }
}
