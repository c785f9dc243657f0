//! Diagonal Fourier operators and the transport nonlinearity.

use num_complex::Complex;
use rayon::prelude::*;

use super::fft::Fft2;
use super::field::{in_band, wavenumber, SpectralField};
use crate::error::{argument, domain};
use crate::multiplier::MultiplierSpec;
use crate::{Result, Scalar};

/// Per-mode symbol tables for one grid and one set of equation parameters.
#[derive(Clone, Debug)]
pub struct Symbols<T> {
    pub n: usize,
    pub l: T,
    /// Derivative symbols `κ₁, κ₂`, zero on the Nyquist row and column.
    pub kx: Vec<T>,
    pub ky: Vec<T>,
    pub knorm: Vec<T>,
    /// `|κ|^{β−2} m(|κ|)`, zero at `κ = 0`.
    pub stream: Vec<T>,
    /// `ν|κ|^β + ε|κ|²`.
    pub linear: Vec<T>,
    pub mask: Vec<bool>,
}

impl<T: Scalar> Symbols<T> {
    pub fn new(
        n: usize,
        l: T,
        beta: T,
        nu: T,
        epsilon: T,
        spec: &MultiplierSpec<T>,
    ) -> Result<Self> {
        if !(beta > T::zero() && beta <= T::one()) {
            return domain(format!("beta = {} must lie in (0, 1]", beta.f64()));
        }
        if nu < T::zero() || epsilon < T::zero() {
            return argument("nu and epsilon must be nonnegative");
        }
        let f = SpectralField::zeros(n, l)?;
        let nyq = -(n as i64 / 2);
        let len = n * n;
        let (mut kx, mut ky, mut knorm, mut stream, mut linear, mut mask) = (
            vec![T::zero(); len],
            vec![T::zero(); len],
            vec![T::zero(); len],
            vec![T::zero(); len],
            vec![T::zero(); len],
            vec![false; len],
        );
        let two = T::c(2.0);
        for i in 0..len {
            let (k1, k2) = (wavenumber(i / n, n), wavenumber(i % n, n));
            let (a, b) = f.kappa_at(i);
            let k = a.hypot(b);
            knorm[i] = k;
            mask[i] = in_band(k1, k2, n);
            if k1 != nyq && k2 != nyq {
                kx[i] = a;
                ky[i] = b;
            }
            if k > T::zero() {
                stream[i] = k.powf(beta - two) * spec.eval(k)?;
                linear[i] = nu * k.powf(beta) + epsilon * k * k;
            }
        }
        Ok(Self {
            n,
            l,
            kx,
            ky,
            knorm,
            stream,
            linear,
            mask,
        })
    }
}

fn times_i<T: Scalar>(z: Complex<T>, s: T) -> Complex<T> {
    Complex::new(-z.im * s, z.re * s)
}

/// `Λ^β f`, multiplying `c_k` by `|κ|^β`; the mean is annihilated.
pub fn apply_fractional_laplacian<T: Scalar>(
    f: &SpectralField<T>,
    beta: T,
) -> Result<SpectralField<T>> {
    if !(beta > T::zero() && beta <= T::c(2.0)) {
        return domain(format!("beta = {} must lie in (0, 2]", beta.f64()));
    }
    Ok(f.apply_symbol(|a, b| {
        let k = a.hypot(b);
        if k == T::zero() {
            T::zero()
        } else {
            k.powf(beta)
        }
    }))
}

/// `m(Λ) f`; the mean is annihilated.
pub fn apply_multiplier<T: Scalar>(
    f: &SpectralField<T>,
    spec: &MultiplierSpec<T>,
) -> Result<SpectralField<T>> {
    let c = (0..f.c.len())
        .into_par_iter()
        .map(|i| {
            let k = f.kappa_norm_at(i);
            if k == T::zero() {
                Ok(Complex::default())
            } else {
                Ok(f.c[i].scale(spec.eval(k)?))
            }
        })
        .collect::<Result<_>>()?;
    Ok(f.with_coefficients(c))
}

/// `u = ∇⊥Λ^{β−2}m(Λ)θ`, i.e. `û = iκ⊥|κ|^{β−2}m(|κ|)θ̂` with `κ⊥ = (−κ₂, κ₁)`.
pub fn velocity<T: Scalar>(
    theta: &SpectralField<T>,
    beta: T,
    spec: &MultiplierSpec<T>,
) -> Result<[SpectralField<T>; 2]> {
    let s = Symbols::new(theta.n, theta.l, beta, T::zero(), T::zero(), spec)?;
    Ok(velocity_with(theta, &s))
}

pub(crate) fn velocity_with<T: Scalar>(
    theta: &SpectralField<T>,
    s: &Symbols<T>,
) -> [SpectralField<T>; 2] {
    let ux = theta
        .c
        .iter()
        .enumerate()
        .map(|(i, &z)| times_i(z, -s.ky[i] * s.stream[i]))
        .collect();
    let uy = theta
        .c
        .iter()
        .enumerate()
        .map(|(i, &z)| times_i(z, s.kx[i] * s.stream[i]))
        .collect();
    [theta.with_coefficients(ux), theta.with_coefficients(uy)]
}

pub fn gradient<T: Scalar>(f: &SpectralField<T>) -> [SpectralField<T>; 2] {
    let n = f.n;
    let nyq = -(n as i64 / 2);
    let mut gx = f.c.clone();
    let mut gy = f.c.clone();
    for i in 0..f.c.len() {
        let (k1, k2) = (wavenumber(i / n, n), wavenumber(i % n, n));
        let (a, b) = if k1 == nyq || k2 == nyq {
            (T::zero(), T::zero())
        } else {
            f.kappa_at(i)
        };
        gx[i] = times_i(f.c[i], a);
        gy[i] = times_i(f.c[i], b);
    }
    [f.with_coefficients(gx), f.with_coefficients(gy)]
}

/// `max_k |κ·û(k)| / max_k |κ||û(k)|`. For a spectral velocity this is pure
/// rounding, bounded by a few ulps.
pub fn divergence_defect<T: Scalar>(u: &[SpectralField<T>; 2]) -> T {
    let mut d = T::zero();
    let mut big = T::zero();
    for i in 0..u[0].c.len() {
        let (a, b) = u[0].kappa_at(i);
        d = d.max((u[0].c[i].scale(a) + u[1].c[i].scale(b)).norm());
        big = big.max(a.hypot(b) * u[0].c[i].norm().hypot(u[1].c[i].norm()));
    }
    if big == T::zero() {
        T::zero()
    } else {
        d / big
    }
}

/// Pseudo-spectral `u·∇θ` with the 2/3 mask applied to the result.
pub fn nonlinear_term<T: Scalar>(
    theta: &SpectralField<T>,
    u: &[SpectralField<T>; 2],
    fft: &Fft2<T>,
) -> Result<SpectralField<T>> {
    if u[0].n != theta.n || u[1].n != theta.n || fft.n() != theta.n {
        return argument("fields live on different grids");
    }
    let [gx, gy] = gradient(theta);
    Ok(product(theta, &u[0].c, &u[1].c, &gx.c, &gy.c, fft, None))
}

/// Transforms `(ux, uy)` and `(gx, gy)` to the grid, forms `ux·gx + uy·gy`,
/// and returns its dealiased coefficients, optionally scaled by `-1`.
pub(crate) fn product<T: Scalar>(
    like: &SpectralField<T>,
    ux: &[Complex<T>],
    uy: &[Complex<T>],
    gx: &[Complex<T>],
    gy: &[Complex<T>],
    fft: &Fft2<T>,
    mask: Option<&[bool]>,
) -> SpectralField<T> {
    let (pux, puy) = fft.inverse_real_pair(ux, uy);
    let (pgx, pgy) = fft.inverse_real_pair(gx, gy);
    let prod: Vec<T> = (0..pux.len())
        .into_par_iter()
        .with_min_len(4096)
        .map(|i| pux[i] * pgx[i] + puy[i] * pgy[i])
        .collect();
    let mut c = fft.forward_real(&prod);
    let n = like.n;
    for (i, z) in c.iter_mut().enumerate() {
        let keep = match mask {
            Some(m) => m[i],
            None => in_band(wavenumber(i / n, n), wavenumber(i % n, n), n),
        };
        if !keep {
            *z = Complex::default();
        }
    }
    like.with_coefficients(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn plane(n: usize) -> SpectralField<f64> {
        SpectralField::from_fn(n, 2.0 * PI, |x, y| (3.0 * x + 4.0 * y).cos()).unwrap()
    }

    #[test]
    fn fractional_laplacian_of_plane_wave() {
        let f = plane(16);
        let g = apply_fractional_laplacian(&f, 1.0).unwrap();
        assert_relative_eq!(g.get(3, 4).re, 2.5, max_relative = 1e-13);
        let g = apply_fractional_laplacian(&f, 0.6).unwrap();
        assert_relative_eq!(g.get(3, 4).re / 0.5, 5f64.powf(0.6), max_relative = 1e-13);
        let mut one = SpectralField::zeros(16, 2.0 * PI).unwrap();
        one.c[0] = Complex::new(3.0, 0.0);
        assert!(apply_fractional_laplacian(&one, 0.5)
            .unwrap()
            .c
            .iter()
            .all(|z| z.norm() == 0.0));
        assert!(apply_fractional_laplacian(&one, 2.5).is_err());
    }

    #[test]
    fn riesz_velocity_of_plane_wave() {
        let n = 16;
        let f = plane(n);
        let u = velocity(&f, 1.0, &MultiplierSpec::identity()).unwrap();
        let fft = Fft2::new(n);
        let (ux, uy) = (u[0].to_physical(&fft), u[1].to_physical(&fft));
        let h = 2.0 * PI / n as f64;
        for a in 0..n {
            for b in 0..n {
                let s = (3.0 * a as f64 * h + 4.0 * b as f64 * h).sin();
                assert!((ux[a * n + b] - 0.8 * s).abs() < 1e-13);
                assert!((uy[a * n + b] + 0.6 * s).abs() < 1e-13);
            }
        }
        let u = velocity(&f, 0.8, &MultiplierSpec::power(0.4)).unwrap();
        // û = iκ⊥·5^{−0.8}·θ̂
        let want = 0.5 * 5f64.powf(-0.8);
        assert_relative_eq!(u[0].get(3, 4).im, -4.0 * want, max_relative = 1e-13);
        assert_relative_eq!(u[1].get(3, 4).im, 3.0 * want, max_relative = 1e-13);
        assert!(divergence_defect(&u) < 1e-16);
    }

    #[test]
    fn single_mode_self_interaction_vanishes() {
        let n = 32;
        let f = plane(n);
        let u = velocity(&f, 0.7, &MultiplierSpec::power(0.3)).unwrap();
        let nl = nonlinear_term(&f, &u, &Fft2::new(n)).unwrap();
        assert!(nl.c.iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn product_of_two_modes_lands_on_sum_and_difference() {
        let n = 32;
        let l = 2.0 * PI;
        let theta = SpectralField::from_fn(n, l, |x, _| x.cos()).unwrap();
        let uy = SpectralField::from_fn(n, l, |_, y| (2.0 * y).cos()).unwrap();
        let ux = SpectralField::zeros(n, l).unwrap();
        let g = gradient(&SpectralField::from_fn(n, l, |_, y| y.sin()).unwrap());
        assert_relative_eq!(g[1].get(1, 0).re, 0.0, epsilon = 1e-15);
        let nl = nonlinear_term(&theta, &[ux, uy], &Fft2::new(n)).unwrap();
        // ∂yθ = 0
        assert!(nl.c.iter().all(|z| z.norm() < 1e-15));
        let theta = SpectralField::from_fn(n, l, |_, y| (3.0 * y).sin()).unwrap();
        let uy = SpectralField::from_fn(n, l, |_, y| (2.0 * y).cos()).unwrap();
        let nl = nonlinear_term(
            &theta,
            &[SpectralField::zeros(n, l).unwrap(), uy],
            &Fft2::new(n),
        )
        .unwrap();
        for i in 0..n * n {
            let k = (wavenumber(i / n, n), wavenumber(i % n, n).abs());
            if nl.c[i].norm() > 1e-14 {
                assert!(k == (0, 1) || k == (0, 5), "{k:?}");
            }
        }
    }
}
