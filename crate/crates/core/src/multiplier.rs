//! Radial Fourier symbols `m(r)` and checks of their structural assumptions:
//! monotonicity, Mikhlin ratios, high- and low-frequency growth, and the
//! log-growth envelope.

use std::path::Path;

use serde::Serialize;

use crate::error::{argument, domain};
use crate::tolerances::{ASSUMPTION_REL, FD_LOG_STEP, FD_REL_STEP, MONOTONE_REL};
use crate::{Error, Result, Scalar};

/// Highest derivative order used by the Mikhlin check.
pub const MAX_ORDER: usize = 5;

/// Monotone piecewise-cubic (Fritsch–Carlson) interpolant of radial samples.
#[derive(Clone, Debug)]
pub struct Table<T> {
    r: Vec<T>,
    m: Vec<T>,
    slope: Vec<T>,
}

impl<T: Scalar> Table<T> {
    pub fn new(r: Vec<T>, m: Vec<T>) -> Result<Self> {
        if r.len() < 2 || r.len() != m.len() {
            return argument("table needs at least two (r, m) rows of equal length");
        }
        if r[0] <= T::zero() || r.windows(2).any(|w| w[1] <= w[0]) {
            return argument("table radii must be positive and strictly increasing");
        }
        if m.iter().any(|&v| v <= T::zero() || !v.is_finite()) {
            return argument("table values must be positive and finite");
        }
        let slope = pchip_slopes(&r, &m);
        Ok(Self { r, m, slope })
    }

    /// Reads a headerless two-column CSV `r, m(r)`.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let mut rd = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_path(path)?;
        let (mut r, mut m) = (Vec::new(), Vec::new());
        for rec in rd.records() {
            let rec = rec?;
            if rec.len() != 2 {
                return argument(format!("{}: expected two columns", path.display()));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| Error::Argument(format!("{}: {e}", path.display())))
            };
            r.push(T::c(parse(&rec[0])?));
            m.push(T::c(parse(&rec[1])?));
        }
        Self::new(r, m)
    }

    pub fn range(&self) -> (T, T) {
        (self.r[0], *self.r.last().unwrap())
    }

    fn eval(&self, x: T) -> Result<T> {
        let (lo, hi) = self.range();
        if x < lo || x > hi {
            return Err(Error::Range(format!(
                "r = {} outside tabulated range [{}, {}]",
                x.f64(),
                lo.f64(),
                hi.f64()
            )));
        }
        let i = match self.r.binary_search_by(|p| p.partial_cmp(&x).unwrap()) {
            Ok(i) => return Ok(self.m[i]),
            Err(i) => i - 1,
        };
        let h = self.r[i + 1] - self.r[i];
        let t = (x - self.r[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let two = T::c(2.0);
        let three = T::c(3.0);
        let h00 = two * t3 - three * t2 + T::one();
        let h10 = t3 - two * t2 + t;
        let h01 = -two * t3 + three * t2;
        let h11 = t3 - t2;
        Ok(h00 * self.m[i]
            + h10 * h * self.slope[i]
            + h01 * self.m[i + 1]
            + h11 * h * self.slope[i + 1])
    }
}

fn pchip_slopes<T: Scalar>(x: &[T], y: &[T]) -> Vec<T> {
    let n = x.len();
    let h: Vec<T> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let d: Vec<T> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    if n == 2 {
        return vec![d[0], d[0]];
    }
    let mut s = vec![T::zero(); n];
    let two = T::c(2.0);
    for k in 1..n - 1 {
        if d[k - 1] * d[k] <= T::zero() {
            continue;
        }
        let w1 = two * h[k] + h[k - 1];
        let w2 = h[k] + two * h[k - 1];
        s[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
    }
    let end = |h0: T, h1: T, d0: T, d1: T| {
        let v = ((two * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if v * d0 <= T::zero() {
            T::zero()
        } else if d0 * d1 <= T::zero() && v.abs() > (T::c(3.0) * d0).abs() {
            T::c(3.0) * d0
        } else {
            v
        }
    };
    s[0] = end(h[0], h[1], d[0], d[1]);
    s[n - 1] = end(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
    s
}

#[derive(Clone, Debug)]
pub enum MultiplierKind<T> {
    Identity,
    /// `r^a`
    Power {
        a: T,
    },
    /// `r^a · ln(shift + r)`
    PowerLog {
        a: T,
        shift: T,
    },
    /// `max(1/b3, ln(base_shift + r)^μ)`
    LogPower {
        mu: T,
        base_shift: T,
    },
    Tabulated(Table<T>),
}

/// A radial symbol together with its declared structural constants.
#[derive(Clone, Debug)]
pub struct MultiplierSpec<T> {
    pub kind: MultiplierKind<T>,
    /// Growth exponent: `r m'(r)/m(r) ≤ α` for large `r` (or all `r` when strict).
    pub alpha: T,
    /// Low-frequency exponent: `m(r) ≍ r^λ` for `r ≤ 1`.
    pub lambda_low: T,
    pub b0: T,
    pub b1: T,
    pub b2: T,
    pub b3: T,
    /// Log-growth exponent, meaningful for `LogPower`.
    pub mu: T,
    /// Declares that the growth bound holds for every `r > 0`.
    pub strict: bool,
}

impl<T: Scalar> MultiplierSpec<T> {
    fn with_kind(kind: MultiplierKind<T>, alpha: T, lambda_low: T, strict: bool) -> Self {
        Self {
            kind,
            alpha,
            lambda_low,
            b0: T::c(5.0),
            b1: T::one(),
            b2: T::one(),
            b3: T::one(),
            mu: T::zero(),
            strict,
        }
    }

    /// `m ≡ 1`; declared with α = 1/2 so that the growth bound has room.
    pub fn identity() -> Self {
        Self::with_kind(MultiplierKind::Identity, T::c(0.5), T::zero(), true)
    }

    /// `m(r) = r^a` with `alpha = lambda_low = a`, `b0 = 5`, `b1 = b2 = 1`.
    pub fn power(a: T) -> Self {
        Self::with_kind(MultiplierKind::Power { a }, a, a, true)
    }

    /// `m(r) = r^a ln(shift + r)`; declared growth exponent `alpha`.
    pub fn power_log(a: T, shift: T, alpha: T) -> Self {
        let mut s = Self::with_kind(
            MultiplierKind::PowerLog { a, shift },
            alpha,
            a + T::one(),
            false,
        );
        s.b1 = T::c(1e3);
        s.b2 = T::c(10.0);
        s
    }

    /// `m(r) = max(1/b3, ln(base_shift + r)^μ)`.
    pub fn log_power(mu: T, base_shift: T, alpha: T, b3: T) -> Self {
        let mut s = Self::with_kind(
            MultiplierKind::LogPower { mu, base_shift },
            alpha,
            T::zero(),
            false,
        );
        s.mu = mu;
        s.b3 = b3;
        s
    }

    pub fn tabulated(table: Table<T>, alpha: T, lambda_low: T) -> Self {
        Self::with_kind(MultiplierKind::Tabulated(table), alpha, lambda_low, false)
    }

    pub fn with_constants(mut self, b0: T, b1: T, b2: T, b3: T) -> Self {
        self.b0 = b0;
        self.b1 = b1;
        self.b2 = b2;
        self.b3 = b3;
        self
    }

    pub fn with_strict(mut self, strict: bool) -> Self {
        self.strict = strict;
        self
    }

    /// Exponent `p` when `m(r) = r^p` exactly (`Identity` gives 0).
    pub fn pure_power(&self) -> Option<T> {
        match self.kind {
            MultiplierKind::Identity => Some(T::zero()),
            MultiplierKind::Power { a } => Some(a),
            _ => None,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            MultiplierKind::Identity => "identity",
            MultiplierKind::Power { .. } => "power",
            MultiplierKind::PowerLog { .. } => "power_log",
            MultiplierKind::LogPower { .. } => "log_power",
            MultiplierKind::Tabulated(_) => "tabulated",
        }
    }

    fn check_r(r: T) -> Result<()> {
        if r > T::zero() && r.is_finite() {
            Ok(())
        } else {
            domain(format!("m(r) requires r > 0, got {}", r.f64()))
        }
    }

    pub fn eval(&self, r: T) -> Result<T> {
        Self::check_r(r)?;
        Ok(match &self.kind {
            MultiplierKind::Identity => T::one(),
            MultiplierKind::Power { a } => r.powf(*a),
            MultiplierKind::PowerLog { a, shift } => r.powf(*a) * (*shift + r).ln(),
            MultiplierKind::LogPower { mu, base_shift } => {
                let floor = self.b3.recip();
                let l = (*base_shift + r).ln();
                if l <= T::zero() {
                    floor
                } else {
                    floor.max(l.powf(*mu))
                }
            }
            MultiplierKind::Tabulated(t) => t.eval(r)?,
        })
    }

    pub fn eval_prime(&self, r: T) -> Result<T> {
        match &self.kind {
            MultiplierKind::Tabulated(t) => {
                Self::check_r(r)?;
                let (lo, hi) = t.range();
                if r < lo || r > hi {
                    t.eval(r)?;
                }
                let h = r * T::c(FD_REL_STEP);
                let (a, b) = ((r - h).max(lo), (r + h).min(hi));
                Ok((t.eval(b)? - t.eval(a)?) / (b - a))
            }
            _ => Ok(self.derivatives(r, 1)?[1]),
        }
    }

    /// `[m, m', …, m^(k)]` for the closed-form kinds.
    pub fn derivatives(&self, r: T, k: usize) -> Result<Vec<T>> {
        Self::check_r(r)?;
        if k > MAX_ORDER {
            return argument(format!("derivative order {k} exceeds {MAX_ORDER}"));
        }
        let mut out = vec![T::zero(); k + 1];
        match &self.kind {
            MultiplierKind::Identity => out[0] = T::one(),
            MultiplierKind::Power { a } => {
                for (j, o) in out.iter_mut().enumerate() {
                    *o = falling(*a, j) * r.powf(*a - T::usize(j));
                }
            }
            MultiplierKind::PowerLog { a, shift } => {
                let u = *shift + r;
                let mut lnd = vec![u.ln()];
                for i in 1..=k {
                    let sign = if i % 2 == 1 { T::one() } else { -T::one() };
                    lnd.push(sign * T::usize(factorial(i - 1)) / u.powi(i as i32));
                }
                for (n, o) in out.iter_mut().enumerate() {
                    let mut s = T::zero();
                    for j in 0..=n {
                        let pw = falling(*a, j) * r.powf(*a - T::usize(j));
                        s += T::usize(binomial(n, j)) * pw * lnd[n - j];
                    }
                    *o = s;
                }
            }
            MultiplierKind::LogPower { mu, base_shift } => {
                let u = *base_shift + r;
                let l = u.ln();
                let floor = self.b3.recip();
                if l <= T::zero() || l.powf(*mu) <= floor {
                    out[0] = floor;
                } else {
                    // d^n/du^n L^μ = u^{-n} Σ_j c[n][j] L^{μ-j}
                    let mut c = vec![T::one()];
                    for (n, o) in out.iter_mut().enumerate() {
                        let s = c
                            .iter()
                            .enumerate()
                            .fold(T::zero(), |s, (j, &cj)| s + cj * l.powf(*mu - T::usize(j)));
                        *o = s / u.powi(n as i32);
                        let mut next = vec![T::zero(); c.len() + 1];
                        for (j, &cj) in c.iter().enumerate() {
                            next[j] -= T::usize(n) * cj;
                            next[j + 1] += (*mu - T::usize(j)) * cj;
                        }
                        c = next;
                    }
                }
            }
            MultiplierKind::Tabulated(_) => {
                out[0] = self.eval(r)?;
                if k >= 1 {
                    let dt = log_derivatives(self, r, k)?;
                    let st = stirling_first(k);
                    for n in 1..=k {
                        let s = (1..=n).fold(T::zero(), |s, j| s + T::c(st[n][j] as f64) * dt[j]);
                        out[n] = s / r.powi(n as i32);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Mikhlin ratios `r^n |m^(n)(r)| / m(r)` for `n = 1..=k`.
    pub fn mikhlin_ratios(&self, r: T, k: usize) -> Result<Vec<T>> {
        let d = self.derivatives(r, k)?;
        Ok((1..=k)
            .map(|n| r.powi(n as i32) * d[n].abs() / d[0])
            .collect())
    }

    /// `r m'(r) / m(r)`.
    pub fn growth_ratio(&self, r: T) -> Result<T> {
        match self.kind {
            MultiplierKind::Power { a } => {
                Self::check_r(r)?;
                Ok(a)
            }
            _ => Ok(r * self.eval_prime(r)? / self.eval(r)?),
        }
    }
}

fn falling<T: Scalar>(a: T, j: usize) -> T {
    (0..j).fold(T::one(), |p, i| p * (a - T::usize(i)))
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

fn binomial(n: usize, k: usize) -> usize {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Signed Stirling numbers of the first kind, `s[n][j]` for `n ≤ k`:
/// `r^n D_r^n = Σ_j s(n, j) D_t^j` with `t = ln r`.
fn stirling_first(k: usize) -> Vec<Vec<i64>> {
    let mut s = vec![vec![0i64; k + 1]; k + 1];
    s[0][0] = 1;
    for n in 0..k {
        for j in 1..=n + 1 {
            s[n + 1][j] = s[n][j - 1] - (n as i64) * s[n][j];
        }
    }
    s
}

/// Finite-difference weights for derivatives `0..=k` at 0 on `nodes`.
fn fornberg(nodes: &[f64], k: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; n]; k + 1];
    let mut c1 = 1.0;
    let mut c4 = nodes[0];
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(k);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i];
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for m in (1..=mn).rev() {
                    c[m][i] = c1 * (m as f64 * c[m - 1][i - 1] - c5 * c[m][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for m in (1..=mn).rev() {
                c[m][j] = (c4 * c[m][j] - m as f64 * c[m - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Derivatives in `t = ln r` from a 9-point stencil, shifted inward at the
/// ends of a tabulated range.
fn log_derivatives<T: Scalar>(spec: &MultiplierSpec<T>, r: T, k: usize) -> Result<Vec<T>> {
    let h = FD_LOG_STEP;
    let t0 = r.f64().ln();
    let mut shift = 0.0;
    if let MultiplierKind::Tabulated(tab) = &spec.kind {
        let (lo, hi) = tab.range();
        let (lo, hi) = (lo.f64().ln(), hi.f64().ln());
        if hi - lo < 8.0 * h {
            return argument("tabulated range too narrow for the derivative stencil");
        }
        if t0 - 4.0 * h < lo {
            shift = lo - (t0 - 4.0 * h);
        } else if t0 + 4.0 * h > hi {
            shift = hi - (t0 + 4.0 * h);
        }
    }
    let nodes: Vec<f64> = (-4..=4).map(|i| i as f64 * h + shift).collect();
    let w = fornberg(&nodes, k);
    let vals = nodes
        .iter()
        .map(|&d| spec.eval(T::c((t0 + d).exp().clamp(1e-300, f64::MAX))))
        .collect::<Result<Vec<T>>>()?;
    Ok((0..=k)
        .map(|n| {
            w[n].iter()
                .zip(&vals)
                .fold(T::zero(), |s, (&wi, &v)| s + T::c(wi) * v)
        })
        .collect())
}

/// Worst measured ratio of one assumption and its verdict.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub worst: f64,
    /// Radius where the worst ratio occurs.
    pub at: f64,
    pub bound: f64,
    pub pass: bool,
    pub points: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct AssumptionReport {
    pub kind: String,
    /// Monotonicity: largest relative decrease between neighbours; `pass` also needs `m > 0`.
    pub monotone: Check,
    /// Worst Mikhlin ratio for each order `1..=k_max`.
    pub mikhlin: Vec<Check>,
    pub mikhlin_pass: bool,
    /// Growth bound `r m'/m ≤ α` on `r ≥ b1`.
    pub growth: Check,
    /// Smallest grid radius beyond which `r m'/m ≤ α` holds everywhere on the grid.
    pub growth_crossover: Option<f64>,
    /// Low-frequency comparison on `r ≤ 1`: `max(m/r^λ, r^λ/m)`.
    pub low_frequency: Check,
    /// Growth bound on the whole grid.
    pub global_growth: Check,
    pub strict_declared: bool,
    /// Log-growth envelope on `r ≥ b3`, log_power kind only.
    pub log_envelope: Option<Check>,
}

fn validate_grid<T: Scalar>(grid: &[T]) -> Result<()> {
    if grid.is_empty() {
        return argument("empty radial grid");
    }
    if grid[0] <= T::zero() || grid.windows(2).any(|w| w[1] <= w[0]) {
        return argument("radial grid must be positive and strictly increasing");
    }
    Ok(())
}

fn worst_of<T: Scalar>(pts: impl Iterator<Item = (T, T)>, bound: T, slack: T) -> Check {
    let mut worst = f64::NEG_INFINITY;
    let mut at = f64::NAN;
    let mut n = 0;
    for (r, v) in pts {
        n += 1;
        if v.f64() > worst {
            worst = v.f64();
            at = r.f64();
        }
    }
    let pass = n == 0 || worst <= bound.f64() * (1.0 + slack.f64());
    Check {
        worst,
        at,
        bound: bound.f64(),
        pass,
        points: n,
    }
}

/// Measures every structural assumption and, for log_power symbols, the log-growth envelope.
pub fn check_assumptions<T: Scalar>(
    spec: &MultiplierSpec<T>,
    r_grid: &[T],
    k_max: usize,
) -> Result<AssumptionReport> {
    validate_grid(r_grid)?;
    if r_grid[0] > T::c(1e-4) * T::c(1.0 + 1e-12)
        || *r_grid.last().unwrap() < T::c(1e4) * T::c(1.0 - 1e-12)
    {
        return argument("radial grid must span at least [1e-4, 1e4]");
    }
    if k_max == 0 || k_max > MAX_ORDER {
        return argument(format!("k_max must lie in 1..={MAX_ORDER}"));
    }
    let slack = T::c(ASSUMPTION_REL);
    let m: Vec<T> = r_grid
        .iter()
        .map(|&r| spec.eval(r))
        .collect::<Result<_>>()?;
    let ratio: Vec<T> = r_grid
        .iter()
        .map(|&r| spec.growth_ratio(r))
        .collect::<Result<_>>()?;

    let mut monotone = worst_of(
        r_grid
            .windows(2)
            .zip(m.windows(2))
            .map(|(r, v)| (r[1], (v[0] - v[1]) / v[1])),
        T::zero(),
        T::zero(),
    );
    monotone.bound = ASSUMPTION_REL;
    monotone.pass = m.iter().all(|&v| v > T::zero()) && monotone.worst <= ASSUMPTION_REL;

    let mik: Vec<Vec<T>> = r_grid
        .iter()
        .map(|&r| spec.mikhlin_ratios(r, k_max))
        .collect::<Result<_>>()?;
    let mikhlin: Vec<Check> = (0..k_max)
        .map(|n| {
            worst_of(
                r_grid.iter().zip(&mik).map(|(&r, v)| (r, v[n])),
                spec.b0,
                slack,
            )
        })
        .collect();
    let mikhlin_pass = mikhlin.iter().all(|c| c.pass);

    let growth = worst_of(
        r_grid
            .iter()
            .zip(&ratio)
            .filter(|(&r, _)| r >= spec.b1)
            .map(|(&r, &v)| (r, v)),
        spec.alpha,
        slack,
    );
    let global_growth = worst_of(
        r_grid.iter().copied().zip(ratio.iter().copied()),
        spec.alpha,
        slack,
    );
    let growth_crossover = {
        let lim = spec.alpha * (T::one() + slack);
        match ratio.iter().rposition(|&v| v > lim) {
            None => Some(r_grid[0].f64()),
            Some(i) if i + 1 < r_grid.len() => Some(r_grid[i + 1].f64()),
            Some(_) => None,
        }
    };

    let low_frequency = worst_of(
        r_grid
            .iter()
            .zip(&m)
            .filter(|(&r, _)| r <= T::one())
            .map(|(&r, &v)| {
                let q = v / r.powf(spec.lambda_low);
                (r, q.max(q.recip()))
            }),
        spec.b2,
        slack,
    );

    let log_envelope = match spec.kind {
        MultiplierKind::LogPower { .. } => {
            let b3 = spec.b3;
            Some(worst_of(
                r_grid
                    .iter()
                    .zip(&m)
                    .filter(|(&r, _)| r >= b3 && r.ln() > T::zero())
                    .map(|(&r, &v)| {
                        let lower = (b3 * v).recip();
                        let upper = v / (b3 * r.ln().powf(spec.mu));
                        (r, lower.max(upper))
                    }),
                T::one(),
                slack,
            ))
        }
        _ => None,
    };

    Ok(AssumptionReport {
        kind: spec.kind_name().to_string(),
        monotone,
        mikhlin,
        mikhlin_pass,
        growth,
        growth_crossover,
        low_frequency,
        global_growth,
        strict_declared: spec.strict,
        log_envelope,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorCheck {
    pub pass: bool,
    /// Largest relative drop `(g_i − g_{i+1})/g_i` of `g(r) = r^ρ m(1/r)`.
    pub worst_violation: f64,
    /// Right endpoint of the worst drop.
    pub at: Option<f64>,
    pub points: usize,
}

/// Checks that `r ↦ r^ρ m(1/r)` is nondecreasing on the grid, restricted to
/// `(0, 1/b1]` unless the symbol is declared strict. Requires `ρ ≥ α`.
pub fn monotone_factor_check<T: Scalar>(
    spec: &MultiplierSpec<T>,
    rho: T,
    r_grid: &[T],
) -> Result<FactorCheck> {
    if rho < spec.alpha {
        return argument(format!(
            "rho = {} is below alpha = {}; the monotonicity lemma does not apply",
            rho.f64(),
            spec.alpha.f64()
        ));
    }
    monotone_factor_scan(spec, rho, r_grid)
}

/// The monotonicity scan without the `ρ ≥ α` hypothesis.
pub fn monotone_factor_scan<T: Scalar>(
    spec: &MultiplierSpec<T>,
    rho: T,
    r_grid: &[T],
) -> Result<FactorCheck> {
    validate_grid(r_grid)?;
    let limit = spec.b1.recip();
    let pts: Vec<T> = r_grid
        .iter()
        .copied()
        .filter(|&r| spec.strict || r <= limit)
        .collect();
    if pts.is_empty() {
        return argument("no grid points inside (0, 1/b1]");
    }
    let g: Vec<T> = pts
        .iter()
        .map(|&r| Ok(r.powf(rho) * spec.eval(r.recip())?))
        .collect::<Result<_>>()?;
    let mut worst = f64::NEG_INFINITY;
    let mut at = None;
    for (i, w) in g.windows(2).enumerate() {
        let drop = ((w[0] - w[1]) / w[0]).f64();
        if drop > worst {
            worst = drop;
            at = Some(pts[i + 1].f64());
        }
    }
    if g.len() == 1 {
        worst = 0.0;
    }
    Ok(FactorCheck {
        pass: worst <= MONOTONE_REL,
        worst_violation: worst,
        at: if worst > MONOTONE_REL { at } else { None },
        points: pts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::logspace;
    use approx::assert_relative_eq;

    #[test]
    fn closed_forms() {
        assert_eq!(MultiplierSpec::<f64>::identity().eval(7.3).unwrap(), 1.0);
        assert_relative_eq!(
            MultiplierSpec::power(0.4).eval(5.0).unwrap(),
            1.903_653_938_715_879_3,
            max_relative = 1e-14
        );
        let pl = MultiplierSpec::power_log(0.2, 1.0, 0.3);
        assert_relative_eq!(pl.eval(1.0).unwrap(), 2f64.ln(), max_relative = 1e-15);
    }

    #[test]
    fn derivative_examples() {
        assert_relative_eq!(
            MultiplierSpec::power(0.4).eval_prime(5.0).unwrap(),
            0.4 * 5f64.powf(-0.6),
            max_relative = 1e-14
        );
        assert_eq!(
            MultiplierSpec::<f64>::identity().eval_prime(3.0).unwrap(),
            0.0
        );
        let e = std::f64::consts::E;
        let lp = MultiplierSpec::log_power(1.0, e, 0.4, 1.0);
        assert_relative_eq!(
            lp.eval_prime(e).unwrap(),
            1.0 / (2.0 * e),
            max_relative = 1e-14
        );
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(
            MultiplierSpec::power(0.4).eval(0.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            MultiplierSpec::power(0.4).eval(-1.0),
            Err(Error::Domain(_))
        ));
        let t = Table::new(vec![1.0, 2.0, 4.0], vec![1.0, 1.5, 2.0]).unwrap();
        let s = MultiplierSpec::tabulated(t, 0.5, 0.0);
        assert!(matches!(s.eval(8.0), Err(Error::Range(_))));
        assert!(matches!(s.eval(0.5), Err(Error::Range(_))));
    }

    // oracle: central differences of high order on the closed form
    fn fd_oracle(f: impl Fn(f64) -> f64, r: f64, k: usize) -> f64 {
        let h = 1e-2 * r;
        let nodes: Vec<f64> = (-6..=6).map(|i| i as f64 * h).collect();
        let w = fornberg(&nodes, k);
        w[k].iter().zip(&nodes).map(|(wi, d)| wi * f(r + d)).sum()
    }

    #[test]
    fn analytic_derivatives_match_finite_differences() {
        let pl = MultiplierSpec::power_log(0.2, 1.0, 0.3);
        let lp = MultiplierSpec::log_power(0.7, 2.0, 0.4, 1.0);
        for &r in &[0.3, 1.0, 7.0] {
            let d = pl.derivatives(r, 5).unwrap();
            let dl = lp.derivatives(r, 5).unwrap();
            for k in 1..=4 {
                let o = fd_oracle(|x| x.powf(0.2) * (1.0 + x).ln(), r, k);
                assert_relative_eq!(d[k], o, max_relative = 2e-5, epsilon = 1e-8);
                if r < std::f64::consts::E - 2.0 {
                    // floor of the log symbol
                    assert_eq!(dl[k], 0.0);
                    continue;
                }
                let o = fd_oracle(|x| (2.0 + x).ln().powf(0.7), r, k);
                assert_relative_eq!(dl[k], o, max_relative = 2e-5, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn tabulated_log_fd_matches_power() {
        let r = logspace(1e-6, 1e6, 2001);
        let m: Vec<f64> = r.iter().map(|x: &f64| x.powf(0.3)).collect();
        let s = MultiplierSpec::tabulated(Table::new(r, m).unwrap(), 0.3, 0.3);
        let ratios = s.mikhlin_ratios(10.0, 3).unwrap();
        assert_relative_eq!(ratios[0], 0.3, max_relative = 1e-3);
        assert_relative_eq!(ratios[1], 0.3 * 0.7, max_relative = 2e-2);
    }

    #[test]
    fn stirling_rows() {
        let s = stirling_first(5);
        assert_eq!(s[3][1..=3], [2, -3, 1]);
        assert_eq!(s[5][1..=5], [24, -50, 35, -10, 1]);
    }

    #[test]
    fn pchip_preserves_monotonicity() {
        let t = Table::new(vec![1.0, 2.0, 3.0, 4.0, 5.0], vec![1.0, 1.0, 1.0, 3.0, 3.1]).unwrap();
        let xs = crate::scalar::linspace(1.0, 5.0, 401);
        let vals: Vec<f64> = xs.iter().map(|&x| t.eval(x).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[1] >= w[0] - 1e-14));
    }

    #[test]
    fn power_assumptions_pass() {
        let grid = logspace(1e-4, 1e4, 161);
        let rep = check_assumptions(&MultiplierSpec::power(0.4), &grid, 5).unwrap();
        assert!(
            rep.monotone.pass
                && rep.mikhlin_pass
                && rep.growth.pass
                && rep.low_frequency.pass
                && rep.global_growth.pass
        );
        assert_eq!(rep.growth.worst, 0.4);
        let id = check_assumptions(
            &MultiplierSpec::<f64>::identity().with_strict(true),
            &grid,
            5,
        )
        .unwrap();
        assert_eq!(id.low_frequency.worst, 1.0);
        assert!(id.low_frequency.pass);
    }

    #[test]
    fn log_power_crossover() {
        let grid = logspace(1e-4, 1e4, 401);
        let s = MultiplierSpec::log_power(1.0, 1.0, 0.4, 1.0);
        let rep = check_assumptions(&s, &grid, 3).unwrap();
        assert!(!rep.global_growth.pass);
        assert!(!rep.growth.pass);
        let cross = rep.growth_crossover.unwrap();
        // dense oracle: ratio r/((1+r) ln(1+r)) drops below 0.4 once and stays there
        let dense = logspace(1.0f64, 1e4, 200_001);
        let first = dense
            .iter()
            .rposition(|&r| r / ((1.0 + r) * (1.0 + r).ln()) > 0.4)
            .map(|i| dense[i + 1])
            .unwrap();
        assert!(
            cross >= first && cross <= first * 1.05,
            "{cross} vs {first}"
        );
        let s2 = s.clone().with_constants(5.0, cross, 1.0, 1.0);
        assert!(check_assumptions(&s2, &grid, 3).unwrap().growth.pass);
    }

    #[test]
    fn grid_validation() {
        let s = MultiplierSpec::power(0.4);
        assert!(check_assumptions(&s, &logspace(1e-2, 1e4, 10), 5).is_err());
        assert!(check_assumptions(&s, &[1e-4, 1e4, 1.0], 5).is_err());
        assert!(check_assumptions(&s, &[], 5).is_err());
    }

    #[test]
    fn factor_check() {
        let grid = logspace(1e-6, 1.0, 100);
        let s = MultiplierSpec::power(0.4);
        assert!(monotone_factor_check(&s, 0.4, &grid).unwrap().pass);
        assert!(monotone_factor_check(&s, 0.6, &grid).unwrap().pass);
        assert!(matches!(
            monotone_factor_check(&s, 0.2, &grid),
            Err(Error::Argument(_))
        ));
        assert!(!monotone_factor_scan(&s, 0.2, &grid).unwrap().pass);
    }

    #[test]
    fn factor_check_log_power_dense_oracle() {
        let s = MultiplierSpec::log_power(1.0, 1.0, 0.4, 1.0).with_constants(5.0, 1.0, 1.0, 1.0);
        let grid = logspace(1e-6, 1.0, 300);
        let got = monotone_factor_check(&s, 0.5, &grid).unwrap();
        let dense = logspace(1e-6, 1.0, 30_000);
        let g: Vec<f64> = dense
            .iter()
            .map(|&r: &f64| r.powf(0.5) * s.eval(1.0 / r).unwrap())
            .collect();
        let oracle = g.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-10));
        assert_eq!(got.pass, oracle);
    }
}
