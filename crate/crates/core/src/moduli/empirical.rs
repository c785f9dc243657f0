use serde::Serialize;

use super::Modulus;
use crate::error::argument;
use crate::{Result, Scalar};

/// Measured `r ↦ sup |f(x) − f(y)|` over sampled pairs with `|x − y| ≤ r`.
#[derive(Clone, Debug, Serialize)]
pub struct EmpiricalModulus<T> {
    pub r: Vec<T>,
    pub value: Vec<T>,
}

impl<T: Scalar> EmpiricalModulus<T> {
    pub fn new(r: Vec<T>, value: Vec<T>) -> Result<Self> {
        if r.len() != value.len() {
            return argument("radius and value columns differ in length");
        }
        if r.windows(2).any(|w| !(w[0] < w[1])) || r.first().is_some_and(|&x| !(x > T::zero())) {
            return argument("radii must be positive and strictly increasing");
        }
        Ok(Self { r, value })
    }

    /// Tabulates `f` on `r` and takes running maxima.
    pub fn from_fn(r: Vec<T>, f: impl Fn(T) -> T) -> Result<Self> {
        let mut acc = T::zero();
        let value = r
            .iter()
            .map(|&x| {
                acc = acc.max(f(x));
                acc
            })
            .collect();
        Self::new(r, value)
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Violation {
    pub r: f64,
    pub empirical: f64,
    pub omega: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ObeyVerdict {
    pub obeys: bool,
    pub first_violation: Option<Violation>,
    /// `min_r (ω(r) − empirical(r))`.
    pub worst_gap: f64,
}

/// Strict comparison `empirical(r) < ω(r)` at every sampled radius.
pub fn field_obeys<T: Scalar, M: Modulus<T> + ?Sized>(
    emp: &EmpiricalModulus<T>,
    omega: &M,
) -> Result<ObeyVerdict> {
    if emp.is_empty() {
        return argument("empirical modulus has no samples");
    }
    let mut first = None;
    let mut worst = f64::INFINITY;
    for (&r, &v) in emp.r.iter().zip(&emp.value) {
        let w = omega.value(r)?;
        worst = worst.min((w - v).f64());
        if first.is_none() && !(v < w) {
            first = Some(Violation {
                r: r.f64(),
                empirical: v.f64(),
                omega: w.f64(),
            });
        }
    }
    Ok(ObeyVerdict {
        obeys: first.is_none(),
        first_violation: first,
        worst_gap: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moduli::StationaryModulus;
    use crate::scalar::logspace;

    #[test]
    fn constant_field_obeys() {
        let r = logspace(1e-3, 1.0, 20);
        let e = EmpiricalModulus::from_fn(r, |_| 0.0).unwrap();
        let w = StationaryModulus::appendix(0.25, 1.0, 0.3, 0.5).unwrap();
        assert!(field_obeys(&e, &w).unwrap().obeys);
    }

    #[test]
    fn doubled_modulus_fails_first() {
        let w = StationaryModulus::appendix(0.25, 1.0, 0.3, 0.5).unwrap();
        let r = logspace(1e-3, 0.1, 20);
        let e = EmpiricalModulus::new(
            r.clone(),
            r.iter().map(|&x| 2.0 * w.value(x).unwrap()).collect(),
        )
        .unwrap();
        let v = field_obeys(&e, &w).unwrap();
        assert!(!v.obeys);
        assert_eq!(v.first_violation.unwrap().r, r[0]);
    }

    #[test]
    fn empty_is_error() {
        let w = StationaryModulus::appendix(0.25, 1.0, 0.3, 0.5).unwrap();
        let e = EmpiricalModulus::<f64>::new(vec![], vec![]).unwrap();
        assert!(field_obeys(&e, &w).is_err());
    }
}
