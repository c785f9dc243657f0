//! Littlewood–Paley projections and the multiplier Bernstein ratio.

use serde::{Deserialize, Serialize};

use super::field::SpectralField;
use super::ops::apply_multiplier;
use super::solver::random_band;
use crate::error::{argument, Error};
use crate::multiplier::MultiplierSpec;
use crate::{Result, Scalar};

/// Smooth radial bump: 1 on `|x| ≤ 1/2`, `exp(1 − 1/(1 − (2|x|−1)²))` between, 0 on `|x| ≥ 1`.
pub fn chi<T: Scalar>(x: T) -> T {
    let a = x.abs();
    let half = T::c(0.5);
    if a <= half {
        T::one()
    } else if a >= T::one() {
        T::zero()
    } else {
        let s = T::c(2.0) * a - T::one();
        (T::one() - (T::one() - s * s).recip()).exp()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpKind {
    /// Low-pass `S_j`: `χ̃(2^{−j}|ζ|)`.
    #[serde(rename = "S_j")]
    Low,
    /// Block `Δ_j`: `χ̃(2^{−j−1}|ζ|) − χ̃(2^{−j}|ζ|)`.
    #[serde(rename = "Delta_j")]
    Block,
    /// High-pass `H_j = Id − S_j`.
    #[serde(rename = "H_j")]
    High,
}

pub fn lp_symbol<T: Scalar>(kind: LpKind, j: i32, k: T) -> T {
    let s = T::c(2f64.powi(-j));
    match kind {
        LpKind::Low => chi(s * k),
        LpKind::Block => chi(T::c(0.5) * s * k) - chi(s * k),
        LpKind::High => T::one() - chi(s * k),
    }
}

pub fn lp_project<T: Scalar>(field: &SpectralField<T>, j: i32, kind: LpKind) -> SpectralField<T> {
    field.apply_symbol(|a, b| lp_symbol(kind, j, a.hypot(b)))
}

/// `‖m(Λ)Δ_j f‖_{L²} / (2^{jα}‖Δ_j f‖_{L²})` with `α` the declared growth exponent.
pub fn bernstein_ratio<T: Scalar>(
    field: &SpectralField<T>,
    j: i32,
    spec: &MultiplierSpec<T>,
) -> Result<T> {
    let d = lp_project(field, j, LpKind::Block);
    let den = d.l2();
    if den == T::zero() {
        return Err(Error::Undefined(format!("Δ_{j} f vanishes")));
    }
    let num = apply_multiplier(&d, spec)?.l2();
    Ok(num / (T::c(2f64.powi(j)).powf(spec.alpha) * den))
}

#[derive(Clone, Debug, Serialize)]
pub struct BernsteinLevel {
    pub j: u32,
    pub max_ratio: f64,
    pub min_ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BernsteinSweep {
    pub multiplier: String,
    pub alpha: f64,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub levels: Vec<BernsteinLevel>,
    pub sup: f64,
}

/// Bernstein ratios of `samples` random fields per level `j ∈ [j_lo, j_hi]`,
/// each supported on the annulus `2^{j−1} ≤ |k| < 2^{j+1}` of `Δ_j`.
pub fn bernstein_sweep<T: Scalar>(
    spec: &MultiplierSpec<T>,
    j_lo: u32,
    j_hi: u32,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<BernsteinSweep> {
    if j_lo == 0 || j_lo > j_hi || samples == 0 {
        return argument("need 1 ≤ j_lo ≤ j_hi and at least one sample");
    }
    if 3 * (1usize << (j_hi + 1)) >= n {
        return argument(format!(
            "n = {n} cannot resolve level {j_hi} inside the 2/3 band"
        ));
    }
    let l = T::c(2.0) * T::PI();
    let mut levels = Vec::new();
    for j in j_lo..=j_hi {
        let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
        for s in 0..samples {
            let f = random_band(
                n,
                l,
                j - 1,
                j,
                seed.wrapping_add(1000 * j as u64 + s as u64),
                T::one(),
            )?;
            let r = bernstein_ratio(&f, j as i32, spec)?.f64();
            hi = hi.max(r);
            lo = lo.min(r);
        }
        levels.push(BernsteinLevel {
            j,
            max_ratio: hi,
            min_ratio: lo,
        });
    }
    let sup = levels
        .iter()
        .fold(f64::NEG_INFINITY, |m, l| m.max(l.max_ratio));
    Ok(BernsteinSweep {
        multiplier: spec.kind_name().into(),
        alpha: spec.alpha.f64(),
        n,
        samples,
        seed,
        levels,
        sup,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_complex::Complex;
    use std::f64::consts::PI;

    #[test]
    fn bump_shape() {
        assert_eq!(chi(0.5), 1.0);
        assert_eq!(chi(1.0), 0.0);
        assert!(chi(0.75) > 0.0 && chi(0.75) < 1.0);
        assert!(chi(0.9) < chi(0.6));
    }

    fn mode5() -> SpectralField<f64> {
        let mut f = SpectralField::zeros(32, 2.0 * PI).unwrap();
        f.set_mode(3, 4, Complex::new(1.0, 0.5));
        f
    }

    #[test]
    fn single_mode_block_and_ratio() {
        let f = mode5();
        let d = lp_project(&f, 2, LpKind::Block);
        let s = d.get(3, 4).re;
        assert!(s > 0.0 && s <= 1.0);
        assert_relative_eq!(s, chi(5.0 / 8.0), max_relative = 1e-15);
        let r = bernstein_ratio(&f, 2, &MultiplierSpec::power(0.3)).unwrap();
        assert_relative_eq!(r, 5f64.powf(0.3) / 2f64.powf(0.6), max_relative = 1e-12);
        let mut id = MultiplierSpec::identity();
        id.alpha = 0.0;
        assert_relative_eq!(
            bernstein_ratio(&f, 2, &id).unwrap(),
            1.0,
            max_relative = 1e-14
        );
        assert!(matches!(
            bernstein_ratio(&f, 6, &id),
            Err(Error::Undefined(_))
        ));
    }

    #[test]
    fn telescoping_and_disjoint_blocks() {
        let f = random_band::<f64>(64, 2.0 * PI, 0, 3, 11, 1.0).unwrap();
        let mut sum = lp_project(&f, 1, LpKind::Low);
        for j in 1..=6 {
            let d = lp_project(&f, j, LpKind::Block);
            for (a, b) in sum.c.iter_mut().zip(&d.c) {
                *a += b;
            }
        }
        for (a, b) in sum.c.iter().zip(&f.c) {
            assert!((a - b).norm() < 1e-15);
        }
        let (d2, d4) = (
            lp_project(&f, 2, LpKind::Block),
            lp_project(&lp_project(&f, 4, LpKind::Block), 2, LpKind::Block),
        );
        assert!(d4.c.iter().all(|z| z.norm() == 0.0));
        let h = lp_project(&f, 2, LpKind::High);
        let s = lp_project(&f, 2, LpKind::Low);
        for i in 0..f.c.len() {
            assert!((h.c[i] + s.c[i] - f.c[i]).norm() < 1e-15);
        }
        assert!(d2.l2() > 0.0);
    }
}
