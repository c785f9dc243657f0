//! Sampled modulus of continuity of a periodic field.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::field::SpectralField;
use crate::error::argument;
use crate::moduli::EmpiricalModulus;
use crate::{Result, Scalar};

/// Random pairs drawn per radius bin.
pub const PAIRS_PER_BIN: usize = 10_000;

const DIRECTIONS: [(i64, i64); 4] = [(1, 0), (0, 1), (1, 1), (1, -1)];

/// Bilinear interpolation of periodic samples at `(x, y)`.
fn bilinear<T: Scalar>(f: &[T], n: usize, h: T, x: T, y: T) -> T {
    let (sx, sy) = (x / h, y / h);
    let (fx, fy) = (sx.floor(), sy.floor());
    let (tx, ty) = (sx - fx, sy - fy);
    let wrap = |v: T| (v.to_i64().unwrap_or(0)).rem_euclid(n as i64) as usize;
    let (a0, b0) = (wrap(fx), wrap(fy));
    let (a1, b1) = ((a0 + 1) % n, (b0 + 1) % n);
    let one = T::one();
    (one - tx) * ((one - ty) * f[a0 * n + b0] + ty * f[a0 * n + b1])
        + tx * ((one - ty) * f[a1 * n + b0] + ty * f[a1 * n + b1])
}

/// `r ↦ sup |θ(x) − θ(y)|` over sampled pairs with torus distance at most `r`.
///
/// Pairs are every grid offset along the axes and diagonals, plus
/// [`PAIRS_PER_BIN`] random pairs per bin evaluated by bilinear interpolation,
/// half at the bin's outer radius and half spread over the bin. The table is a
/// running maximum, hence nondecreasing.
pub fn empirical_modulus<T: Scalar>(
    field: &SpectralField<T>,
    r_grid: &[T],
) -> Result<EmpiricalModulus<T>> {
    empirical_modulus_with(field, &field.physical(), r_grid, 0)
}

pub fn empirical_modulus_with<T: Scalar>(
    field: &SpectralField<T>,
    phys: &[T],
    r_grid: &[T],
    seed: u64,
) -> Result<EmpiricalModulus<T>> {
    let (n, l) = (field.n, field.l);
    let half = T::c(0.5) * l;
    if r_grid.is_empty() || r_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return argument("r_grid must be nonempty and strictly increasing");
    }
    if !(r_grid[0] > T::zero()) || r_grid[r_grid.len() - 1] > half {
        return argument("r_grid must lie in (0, L/2]");
    }
    let h = field.dx();
    let rmax = r_grid[r_grid.len() - 1];
    let bin_of = |d: T| r_grid.partition_point(|&r| r < d);

    let mut offsets = Vec::new();
    for &(dx, dy) in &DIRECTIONS {
        let len = T::c(((dx * dx + dy * dy) as f64).sqrt());
        for s in 1..=(n as i64 / 2) {
            let d = h * len * T::c(s as f64);
            if d > rmax {
                break;
            }
            offsets.push((s * dx, s * dy, bin_of(d)));
        }
    }
    let grid_hits: Vec<(usize, T)> = offsets
        .par_iter()
        .map(|&(ox, oy, bin)| {
            let mut m = T::zero();
            for a in 0..n {
                let a2 = (a as i64 + ox).rem_euclid(n as i64) as usize;
                for b in 0..n {
                    let b2 = (b as i64 + oy).rem_euclid(n as i64) as usize;
                    m = m.max((phys[a2 * n + b2] - phys[a * n + b]).abs());
                }
            }
            (bin, m)
        })
        .collect();

    let random: Vec<T> = (0..r_grid.len())
        .into_par_iter()
        .map(|i| {
            let mut rng =
                ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ i as u64);
            let lo = if i == 0 { 0.0 } else { r_grid[i - 1].f64() };
            let hi = r_grid[i].f64();
            let lf = l.f64();
            let mut m = T::zero();
            for p in 0..PAIRS_PER_BIN {
                let d = if p % 2 == 0 {
                    hi
                } else {
                    lo + (hi - lo) * (1.0 - rng.random::<f64>())
                };
                let (x, y) = (rng.random::<f64>() * lf, rng.random::<f64>() * lf);
                let phi = rng.random::<f64>() * std::f64::consts::TAU;
                let (x2, y2) = (x + d * phi.cos(), y + d * phi.sin());
                let v0 = bilinear(phys, n, h, T::c(x), T::c(y));
                let v1 = bilinear(phys, n, h, T::c(x2), T::c(y2));
                m = m.max((v1 - v0).abs());
            }
            m
        })
        .collect();

    let mut bins = random;
    for (bin, m) in grid_hits {
        bins[bin] = bins[bin].max(m);
    }
    let mut acc = T::zero();
    let value = bins
        .into_iter()
        .map(|m| {
            acc = acc.max(m);
            acc
        })
        .collect();
    EmpiricalModulus::new(r_grid.to_vec(), value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::logspace;
    use std::f64::consts::PI;

    #[test]
    fn constant_field_has_zero_modulus() {
        let f = SpectralField::from_fn(16, 2.0 * PI, |_, _| 3.0).unwrap();
        let e = empirical_modulus(&f, &[0.1, 0.5, 1.0]).unwrap();
        assert!(e.value.iter().all(|&v| v.abs() < 1e-13));
    }

    #[test]
    fn sine_matches_dense_oracle() {
        let f = SpectralField::from_fn(128, 2.0 * PI, |x, _| x.sin()).unwrap();
        let r = [0.05, 0.1, 0.2];
        let e = empirical_modulus(&f, &r).unwrap();
        // oracle: dense 1-D sampling of sup_{|s| ≤ r} |sin(x+s) − sin x|
        let oracle = |r: f64| {
            (0..20_000)
                .map(|i| i as f64 * 2.0 * PI / 20_000.0)
                .map(|x| ((x + r).sin() - x.sin()).abs())
                .fold(0.0, f64::max)
        };
        assert!((oracle(0.1) - 0.099958).abs() < 1e-6);
        for (i, &ri) in r.iter().enumerate() {
            assert!(
                (e.value[i] - oracle(ri)).abs() < 2e-3 * oracle(ri),
                "{ri}: {}",
                e.value[i]
            );
        }
    }

    #[test]
    fn nondecreasing_and_lipschitz() {
        let f = SpectralField::from_fn(64, 2.0 * PI, |x, y| {
            (2.0 * x).sin() * y.cos() + 0.3 * (x + 3.0 * y).cos()
        })
        .unwrap();
        let r = logspace(0.01, 3.0, 15);
        let e = empirical_modulus(&f, &r).unwrap();
        assert!(e.value.windows(2).all(|w| w[0] <= w[1]));
        let [gx, gy] = crate::spectral::gradient(&f);
        let (px, py) = (gx.physical(), gy.physical());
        let sup = |v: &[f64]| v.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        let lip = sup(&px).hypot(sup(&py));
        for i in 0..3 {
            assert!(e.value[i] <= lip * r[i] * (1.0 + 1e-9));
        }
        assert!(empirical_modulus(&f, &[0.5, 0.1]).is_err());
        assert!(empirical_modulus(&f, &[4.0]).is_err());
    }
}
