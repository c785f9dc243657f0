//! Globally adaptive Gauss–Kronrod (7/15) quadrature with fallible integrands.

use crate::{Error, Result, Scalar};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy, Debug)]
pub struct QuadOptions<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_intervals: usize,
}

impl<T: Scalar> Default for QuadOptions<T> {
    fn default() -> Self {
        Self {
            abs_tol: T::c(1e-14),
            rel_tol: T::c(1e-10),
            max_intervals: 2000,
        }
    }
}

impl<T: Scalar> QuadOptions<T> {
    pub fn new(abs_tol: T, rel_tol: T) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    /// Tolerances divided by `factor`, with a proportionally larger budget.
    pub fn tightened(&self, factor: T) -> Self {
        Self {
            abs_tol: self.abs_tol / factor,
            rel_tol: self.rel_tol / factor,
            max_intervals: self.max_intervals * 4,
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct QuadResult<T> {
    pub value: T,
    /// Estimated absolute error, `|K15 − G7|` summed over subintervals.
    pub error: T,
    pub evaluations: usize,
    pub converged: bool,
}

impl<T: Scalar> std::ops::Add for QuadResult<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            value: self.value + o.value,
            error: self.error + o.error,
            evaluations: self.evaluations + o.evaluations,
            converged: self.converged && o.converged,
        }
    }
}

struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

fn gk15<T: Scalar, F: FnMut(T) -> Result<T>>(f: &mut F, a: T, b: T) -> Result<Segment<T>> {
    let half = T::c(0.5);
    let center = half * (a + b);
    let hl = half * (b - a);
    let fc = f(center)?;
    let mut resk = fc * T::c(WGK[7]);
    let mut resg = fc * T::c(WG[3]);
    for (j, &x) in XGK.iter().enumerate().take(7) {
        let dx = hl * T::c(x);
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        resk += T::c(WGK[j]) * (f1 + f2);
        if j % 2 == 1 {
            resg += T::c(WG[j / 2]) * (f1 + f2);
        }
    }
    let value = resk * hl;
    let error = ((resk - resg) * hl).abs();
    if !value.is_finite() {
        return Err(Error::Domain(format!(
            "non-finite integrand on [{}, {}]",
            a.f64(),
            b.f64()
        )));
    }
    Ok(Segment { a, b, value, error })
}

/// Integrates `f` over `[a, b]`, bisecting the worst subinterval until the
/// summed error estimate drops below `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<T, F>(mut f: F, a: T, b: T, opts: &QuadOptions<T>) -> Result<QuadResult<T>>
where
    T: Scalar,
    F: FnMut(T) -> Result<T>,
{
    if a == b {
        return Ok(QuadResult {
            converged: true,
            ..Default::default()
        });
    }
    if b < a {
        let r = integrate(f, b, a, opts)?;
        return Ok(QuadResult {
            value: -r.value,
            ..r
        });
    }
    let mut segs = vec![gk15(&mut f, a, b)?];
    let mut evals = 15;
    loop {
        let total: T = segs.iter().fold(T::zero(), |s, g| s + g.value);
        let err: T = segs.iter().fold(T::zero(), |s, g| s + g.error);
        let target = opts.abs_tol.max(opts.rel_tol * total.abs());
        if err <= target || segs.len() >= opts.max_intervals {
            return Ok(QuadResult {
                value: total,
                error: err,
                evaluations: evals,
                converged: err <= target,
            });
        }
        let (worst, _) =
            segs.iter()
                .enumerate()
                .fold((0, T::neg_infinity()), |(bi, be), (i, g)| {
                    if g.error > be {
                        (i, g.error)
                    } else {
                        (bi, be)
                    }
                });
        let s = segs.swap_remove(worst);
        let mid = T::c(0.5) * (s.a + s.b);
        if mid <= s.a || mid >= s.b {
            // interval exhausted at machine resolution
            segs.push(Segment {
                error: T::zero(),
                ..s
            });
            continue;
        }
        segs.push(gk15(&mut f, s.a, mid)?);
        segs.push(gk15(&mut f, mid, s.b)?);
        evals += 30;
    }
}

/// Integrates over `[a, b]` split at the interior points of `cuts`.
pub fn integrate_pieces<T, F>(
    mut f: F,
    a: T,
    b: T,
    cuts: &[T],
    opts: &QuadOptions<T>,
) -> Result<QuadResult<T>>
where
    T: Scalar,
    F: FnMut(T) -> Result<T>,
{
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let mut pts: Vec<T> = cuts.iter().copied().filter(|&c| c > lo && c < hi).collect();
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.dedup();
    let mut knots = vec![lo];
    knots.extend(pts);
    knots.push(hi);
    let mut acc = QuadResult {
        converged: true,
        ..Default::default()
    };
    for w in knots.windows(2) {
        acc = acc + integrate(&mut f, w[0], w[1], opts)?;
    }
    if a > b {
        acc.value = -acc.value;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_exact() {
        let r = integrate(
            |x: f64| Ok(x.powi(5) - 2.0 * x),
            0.0,
            2.0,
            &QuadOptions::default(),
        )
        .unwrap();
        assert_relative_eq!(r.value, 64.0 / 6.0 - 4.0, max_relative = 1e-14);
    }

    #[test]
    fn endpoint_singularity() {
        // ∫_0^1 x^{-1/2} = 2
        let r = integrate(
            |x: f64| Ok(x.powf(-0.5)),
            0.0,
            1.0,
            &QuadOptions::new(1e-13, 1e-12),
        )
        .unwrap();
        assert!(r.converged);
        assert_relative_eq!(r.value, 2.0, max_relative = 1e-10);
    }

    #[test]
    fn reversed_limits_and_pieces() {
        let o = QuadOptions::default();
        let r = integrate_pieces(|x: f64| Ok(x.abs()), 1.0, -1.0, &[0.0], &o).unwrap();
        assert_relative_eq!(r.value, -1.0, max_relative = 1e-14);
    }

    #[test]
    fn f32_instance() {
        let r = integrate(
            |x: f32| Ok(x.sin()),
            0.0,
            std::f32::consts::PI,
            &QuadOptions::new(1e-6, 1e-6),
        )
        .unwrap();
        assert!((r.value - 2.0).abs() < 1e-5);
    }

    #[test]
    fn integrand_errors_propagate() {
        let r = integrate(
            |_x: f64| Err(Error::Domain("bad".into())),
            0.0,
            1.0,
            &QuadOptions::default(),
        );
        assert!(r.is_err());
    }
}
