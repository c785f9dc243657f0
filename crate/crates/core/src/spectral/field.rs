use num_complex::Complex;
use rayon::prelude::*;

use super::fft::Fft2;
use crate::error::argument;
use crate::tolerances::HERMITIAN_REL;
use crate::{Result, Scalar};

/// Signed wavenumber of FFT index `i` on an `n`-point axis, in `[−n/2, n/2)`.
pub fn wavenumber(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// FFT index of the signed wavenumber `k`.
pub fn index_of(k: i64, n: usize) -> usize {
    k.rem_euclid(n as i64) as usize
}

/// Kept by the 2/3 rule: `3|k_i| < n` on both axes.
pub fn in_band(k1: i64, k2: i64, n: usize) -> bool {
    let n = n as i64;
    3 * k1.abs() < n && 3 * k2.abs() < n
}

/// A real periodic field on `[0, L)²` held by its Fourier coefficients.
///
/// `c[p·n + q]` multiplies `e^{i(κ₁x + κ₂y)}` with `κ = 2π(k₁, k₂)/L`, where
/// `k₁ = wavenumber(p)`, `k₂ = wavenumber(q)`, and `x` runs along the first
/// physical index. The mean is `c[0]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField<T> {
    pub n: usize,
    pub l: T,
    pub c: Vec<Complex<T>>,
}

impl<T: Scalar> SpectralField<T> {
    pub fn zeros(n: usize, l: T) -> Result<Self> {
        if n < 4 || !n.is_multiple_of(2) || n > u16::MAX as usize {
            return argument(format!(
                "grid size n = {n} must be even, at least 4 and below 2^16"
            ));
        }
        if !(l > T::zero() && l.is_finite()) {
            return argument("domain period must be positive");
        }
        Ok(Self {
            n,
            l,
            c: vec![Complex::default(); n * n],
        })
    }

    pub fn with_coefficients(&self, c: Vec<Complex<T>>) -> Self {
        debug_assert_eq!(c.len(), self.c.len());
        Self {
            n: self.n,
            l: self.l,
            c,
        }
    }

    pub fn dx(&self) -> T {
        self.l / T::usize(self.n)
    }

    /// Physical wavevector `2πk/L` at flat index `i`.
    pub fn kappa_at(&self, i: usize) -> (T, T) {
        let s = T::c(2.0) * T::PI() / self.l;
        let (p, q) = (i / self.n, i % self.n);
        (
            s * T::c(wavenumber(p, self.n) as f64),
            s * T::c(wavenumber(q, self.n) as f64),
        )
    }

    pub fn kappa_norm_at(&self, i: usize) -> T {
        let (a, b) = self.kappa_at(i);
        a.hypot(b)
    }

    pub fn from_physical(n: usize, l: T, f: &[T], fft: &Fft2<T>) -> Result<Self> {
        if f.len() != n * n || fft.n() != n {
            return argument("physical data is not n×n");
        }
        let mut s = Self::zeros(n, l)?;
        s.c = fft.forward_real(f);
        Ok(s)
    }

    /// Samples `f(x, y)` on the grid `x = aL/n`, `y = bL/n`.
    pub fn from_fn(n: usize, l: T, f: impl Fn(T, T) -> T + Sync) -> Result<Self> {
        let h = l / T::usize(n);
        let data: Vec<T> = (0..n * n)
            .into_par_iter()
            .map(|i| f(h * T::usize(i / n), h * T::usize(i % n)))
            .collect();
        Self::from_physical(n, l, &data, &Fft2::new(n))
    }

    pub fn to_physical(&self, fft: &Fft2<T>) -> Vec<T> {
        fft.inverse_real(&self.c)
    }

    pub fn physical(&self) -> Vec<T> {
        self.to_physical(&Fft2::new(self.n))
    }

    pub fn get(&self, k1: i64, k2: i64) -> Complex<T> {
        self.c[index_of(k1, self.n) * self.n + index_of(k2, self.n)]
    }

    /// Sets `c(k) = v` and `c(−k) = v̄`.
    pub fn set_mode(&mut self, k1: i64, k2: i64, v: Complex<T>) {
        let n = self.n;
        self.c[index_of(k1, n) * n + index_of(k2, n)] = v;
        self.c[index_of(-k1, n) * n + index_of(-k2, n)] = v.conj();
    }

    fn mirror(&self, i: usize) -> usize {
        let n = self.n;
        let (p, q) = (i / n, i % n);
        ((n - p) % n) * n + (n - q) % n
    }

    /// `max_k |c(−k) − c̄(k)| / max_k |c(k)|` (0 for the zero field).
    pub fn hermitian_defect(&self) -> T {
        let big = self.c.iter().fold(T::zero(), |m, z| m.max(z.norm()));
        if big == T::zero() {
            return T::zero();
        }
        let d = (0..self.c.len()).fold(T::zero(), |m, i| {
            m.max((self.c[self.mirror(i)] - self.c[i].conj()).norm())
        });
        d / big
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_defect() <= T::c(HERMITIAN_REL)
    }

    /// Projects onto Hermitian coefficients, `c(k) ← (c(k) + c̄(−k))/2`.
    pub fn symmetrize(&mut self) {
        let half = T::c(0.5);
        for i in 0..self.c.len() {
            let j = self.mirror(i);
            if j < i {
                continue;
            }
            let v = (self.c[i] + self.c[j].conj()).scale(half);
            self.c[i] = v;
            self.c[j] = v.conj();
        }
    }

    /// Zeroes every coefficient outside the 2/3 band.
    pub fn dealias(&mut self) {
        let n = self.n;
        for (i, z) in self.c.iter_mut().enumerate() {
            if !in_band(wavenumber(i / n, n), wavenumber(i % n, n), n) {
                *z = Complex::default();
            }
        }
    }

    pub fn is_dealiased(&self) -> bool {
        let n = self.n;
        self.c.iter().enumerate().all(|(i, z)| {
            in_band(wavenumber(i / n, n), wavenumber(i % n, n), n) || *z == Complex::default()
        })
    }

    /// Multiplies each coefficient by the real symbol `s(κ₁, κ₂)`.
    pub fn apply_symbol(&self, s: impl Fn(T, T) -> T + Sync) -> Self {
        let c = (0..self.c.len())
            .into_par_iter()
            .map(|i| {
                let (a, b) = self.kappa_at(i);
                self.c[i].scale(s(a, b))
            })
            .collect();
        self.with_coefficients(c)
    }

    /// `(1/L²)·∫ f ḡ` summed spectrally: `Σ c_k d̄_k` (real part).
    fn mean_product(&self, other: &Self, w: impl Fn(usize) -> T) -> T {
        self.c
            .iter()
            .zip(&other.c)
            .enumerate()
            .fold(T::zero(), |s, (i, (a, b))| s + w(i) * (a * b.conj()).re)
    }

    /// `∫ f g` over the torus.
    pub fn inner(&self, other: &Self) -> T {
        self.l * self.l * self.mean_product(other, |_| T::one())
    }

    /// `‖f‖²_{L²}`.
    pub fn l2_sq(&self) -> T {
        self.inner(self)
    }

    pub fn l2(&self) -> T {
        self.l2_sq().sqrt()
    }

    /// `‖f‖²_{Ḣ^s} = ∫ |Λ^s f|²`.
    pub fn hdot_sq(&self, s: T) -> T {
        let two_s = T::c(2.0) * s;
        self.l
            * self.l
            * self.mean_product(self, |i| {
                let k = self.kappa_norm_at(i);
                if k == T::zero() {
                    T::zero()
                } else {
                    k.powf(two_s)
                }
            })
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// `∫|f|`, `‖f‖_{L²}` and `max|f|` of physical samples on a periodic grid of spacing `h`.
pub fn physical_norms<T: Scalar>(f: &[T], h: T) -> (T, T, T) {
    let (s1, s2, m) = f
        .iter()
        .fold((T::zero(), T::zero(), T::zero()), |(a, b, m), &x| {
            (a + x.abs(), b + x * x, m.max(x.abs()))
        });
    (s1 * h * h, (s2 * h * h).sqrt(), m)
}
