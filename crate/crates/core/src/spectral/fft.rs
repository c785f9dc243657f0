use std::sync::Arc;

use num_complex::Complex;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::Scalar;

/// Below this size the row loops run serially.
const PAR_MIN: usize = 64;

/// Square 2-D FFT of side `n` over row-major data.
///
/// Spectral coefficients follow the convention `c = FFT2(f)/n²`, so that
/// `f(x) = Σ_k c_k e^{i k·x}` and `inverse` needs no rescaling.
#[derive(Clone)]
pub struct Fft2<T: Scalar> {
    n: usize,
    fwd: Arc<dyn Fft<T>>,
    inv: Arc<dyn Fft<T>>,
}

impl<T: Scalar> std::fmt::Debug for Fft2<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft2").field("n", &self.n).finish()
    }
}

fn transpose<T: Copy>(a: &mut [T], n: usize) {
    for i in 0..n {
        for j in i + 1..n {
            a.swap(i * n + j, j * n + i);
        }
    }
}

impl<T: Scalar> Fft2<T> {
    pub fn new(n: usize) -> Self {
        let mut p = FftPlanner::new();
        Self {
            n,
            fwd: p.plan_fft_forward(n),
            inv: p.plan_fft_inverse(n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn rows(&self, data: &mut [Complex<T>], fft: &Arc<dyn Fft<T>>) {
        let n = self.n;
        let len = fft.get_inplace_scratch_len();
        if n >= PAR_MIN {
            data.par_chunks_mut(n).for_each_init(
                || vec![Complex::default(); len],
                |s, row| fft.process_with_scratch(row, s),
            );
        } else {
            let mut s = vec![Complex::default(); len];
            for row in data.chunks_mut(n) {
                fft.process_with_scratch(row, &mut s);
            }
        }
    }

    fn both(&self, data: &mut [Complex<T>], fft: &Arc<dyn Fft<T>>) {
        assert_eq!(data.len(), self.n * self.n, "buffer is not n×n");
        self.rows(data, fft);
        transpose(data, self.n);
        self.rows(data, fft);
        transpose(data, self.n);
    }

    /// Physical values to coefficients, including the `1/n²` factor.
    pub fn forward(&self, data: &mut [Complex<T>]) {
        self.both(data, &self.fwd);
        let s = T::usize(self.n * self.n).recip();
        data.iter_mut().for_each(|z| *z = z.scale(s));
    }

    /// Coefficients to physical values.
    pub fn inverse(&self, data: &mut [Complex<T>]) {
        self.both(data, &self.inv);
    }

    pub fn forward_real(&self, f: &[T]) -> Vec<Complex<T>> {
        let mut z: Vec<_> = f.iter().map(|&x| Complex::new(x, T::zero())).collect();
        self.forward(&mut z);
        z
    }

    /// Real part of the inverse transform; `c` should be Hermitian.
    pub fn inverse_real(&self, c: &[Complex<T>]) -> Vec<T> {
        let mut z = c.to_vec();
        self.inverse(&mut z);
        z.into_iter().map(|z| z.re).collect()
    }

    /// Two real fields through one complex transform.
    pub fn forward_real_pair(&self, a: &[T], b: &[T]) -> (Vec<Complex<T>>, Vec<Complex<T>>) {
        let n = self.n;
        let mut z: Vec<_> = a.iter().zip(b).map(|(&x, &y)| Complex::new(x, y)).collect();
        self.forward(&mut z);
        let half = T::c(0.5);
        let mut ca = vec![Complex::default(); n * n];
        let mut cb = vec![Complex::default(); n * n];
        for p in 0..n {
            let pm = (n - p) % n;
            for q in 0..n {
                let qm = (n - q) % n;
                let zk = z[p * n + q];
                let zm = z[pm * n + qm].conj();
                ca[p * n + q] = (zk + zm).scale(half);
                // (zk − zm)/(2i)
                let d = (zk - zm).scale(half);
                cb[p * n + q] = Complex::new(d.im, -d.re);
            }
        }
        (ca, cb)
    }

    /// Inverse of two Hermitian coefficient arrays through one complex transform.
    pub fn inverse_real_pair(&self, ca: &[Complex<T>], cb: &[Complex<T>]) -> (Vec<T>, Vec<T>) {
        let mut z: Vec<_> = ca
            .iter()
            .zip(cb)
            .map(|(&a, &b)| a + Complex::new(-b.im, b.re))
            .collect();
        self.inverse(&mut z);
        z.into_iter().map(|z| (z.re, z.im)).unzip()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn naive(f: &[f64], n: usize) -> Vec<Complex<f64>> {
        let mut out = vec![Complex::default(); n * n];
        for p in 0..n {
            for q in 0..n {
                let mut s = Complex::default();
                for a in 0..n {
                    for b in 0..n {
                        let ph = -2.0 * PI * ((p * a + q * b) as f64) / n as f64;
                        s += Complex::from_polar(f[a * n + b], ph);
                    }
                }
                out[p * n + q] = s / (n * n) as f64;
            }
        }
        out
    }

    #[test]
    fn matches_naive_dft_and_round_trips() {
        let n = 8;
        let f: Vec<f64> = (0..n * n)
            .map(|i| ((i * 37 % 11) as f64 - 5.0) / 3.0)
            .collect();
        let g: Vec<f64> = (0..n * n).map(|i| ((i * 13 % 7) as f64).sin()).collect();
        let t = Fft2::new(n);
        let c = t.forward_real(&f);
        for (x, y) in c.iter().zip(naive(&f, n)) {
            assert!((x - y).norm() < 1e-14);
        }
        let (ca, cb) = t.forward_real_pair(&f, &g);
        let cg = t.forward_real(&g);
        for i in 0..n * n {
            assert!((ca[i] - c[i]).norm() < 1e-14 && (cb[i] - cg[i]).norm() < 1e-14);
        }
        let (fa, gb) = t.inverse_real_pair(&ca, &cb);
        for i in 0..n * n {
            assert!((fa[i] - f[i]).abs() < 1e-13 && (gb[i] - g[i]).abs() < 1e-13);
        }
    }
}
