use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::diagnostics::DiagnosticsRecord;
use super::fft::Fft2;
use super::field::{in_band, physical_norms, wavenumber, SpectralField};
use super::modulus::empirical_modulus_with;
use super::ops::{product, Symbols};
use crate::error::{argument, Error};
use crate::multiplier::MultiplierSpec;
use crate::{Result, Scalar};

/// Name of the generator behind `InitialData::RandomBand`, recorded in manifests.
pub const RNG_NAME: &str = "ChaCha8 (rand_chacha), seed_from_u64";

/// Points on the contour used for the ETDRK4 φ-functions.
const CONTOUR_POINTS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Integrator {
    Etdrk4,
    Ifrk4,
}

#[derive(Clone, Debug, PartialEq)]
pub enum InitialData<T> {
    /// `amp·cos(k·x)`.
    SingleMode { k: [i64; 2], amp: T },
    /// Gaussian coefficients on `2^{j_lo} ≤ |k| < 2^{j_hi+1}`, scaled to RMS `amp`.
    RandomBand {
        j_lo: u32,
        j_hi: u32,
        seed: u64,
        amp: T,
    },
    /// Row-major physical samples.
    Physical(Vec<T>),
}

/// One run of `∂tθ + u·∇θ + νΛ^βθ − εΔθ = 0` on the periodic square.
#[derive(Clone, Debug)]
pub struct SimConfig<T> {
    pub n: usize,
    pub l: T,
    pub beta: T,
    pub nu: T,
    pub epsilon: T,
    pub multiplier: MultiplierSpec<T>,
    pub dt: T,
    pub t_end: T,
    pub integrator: Integrator,
    pub initial: InitialData<T>,
    /// Steps between diagnostics records (0: only the first and last).
    pub output_every: usize,
    /// When false the transport term is dropped and the run is linear.
    pub transport: bool,
}

impl<T: Scalar> SimConfig<T> {
    pub fn new(
        n: usize,
        beta: T,
        nu: T,
        epsilon: T,
        multiplier: MultiplierSpec<T>,
        dt: T,
        t_end: T,
    ) -> Self {
        Self {
            n,
            l: T::c(2.0) * T::PI(),
            beta,
            nu,
            epsilon,
            multiplier,
            dt,
            t_end,
            integrator: Integrator::Etdrk4,
            initial: InitialData::SingleMode {
                k: [1, 0],
                amp: T::one(),
            },
            output_every: 0,
            transport: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > T::zero() && self.dt.is_finite()) {
            return argument("dt must be positive");
        }
        if !(self.t_end >= T::zero() && self.t_end.is_finite()) {
            return argument("T_end must be nonnegative");
        }
        // Symbols checks β, ν, ε and n
        Symbols::new(
            self.n,
            self.l,
            self.beta,
            self.nu,
            self.epsilon,
            &self.multiplier,
        )
        .map(|_| ())
    }

    pub fn n_steps(&self) -> usize {
        (self.t_end / self.dt).round().to_usize().unwrap_or(0)
    }

    pub fn initial_field(&self) -> Result<SpectralField<T>> {
        let mut f = match &self.initial {
            InitialData::SingleMode { k, amp } => {
                let mut f = SpectralField::zeros(self.n, self.l)?;
                if *k == [0, 0] {
                    return argument("single-mode data needs a nonzero wavevector");
                }
                if !in_band(k[0], k[1], self.n) {
                    return argument(format!("mode {k:?} lies outside the dealiased band"));
                }
                f.set_mode(k[0], k[1], Complex::new(T::c(0.5) * *amp, T::zero()));
                f
            }
            InitialData::RandomBand {
                j_lo,
                j_hi,
                seed,
                amp,
            } => random_band(self.n, self.l, *j_lo, *j_hi, *seed, *amp)?,
            InitialData::Physical(v) => {
                let mut f = SpectralField::from_physical(self.n, self.l, v, &Fft2::new(self.n))?;
                f.c[0] = Complex::default();
                f
            }
        };
        f.dealias();
        f.symmetrize();
        Ok(f)
    }
}

/// Mean-zero random field with Gaussian coefficients on the band
/// `2^{j_lo} ≤ |k| < 2^{j_hi+1}` inside the 2/3 mask, scaled to RMS `amp`.
pub fn random_band<T: Scalar>(
    n: usize,
    l: T,
    j_lo: u32,
    j_hi: u32,
    seed: u64,
    amp: T,
) -> Result<SpectralField<T>> {
    if j_lo > j_hi || j_hi > 30 {
        return argument("band needs j_lo ≤ j_hi ≤ 30");
    }
    let mut f = SpectralField::zeros(n, l)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = (
        (1u64 << (2 * j_lo)) as f64,
        (1u64 << (2 * (j_hi + 1))) as f64,
    );
    for i in 0..n * n {
        let (k1, k2) = (wavenumber(i / n, n), wavenumber(i % n, n));
        // one representative of each ±k pair
        if (k1, k2) <= (-k1, -k2) {
            continue;
        }
        let r2 = (k1 * k1 + k2 * k2) as f64;
        if r2 < lo || r2 >= hi || !in_band(k1, k2, n) {
            continue;
        }
        let a: f64 = StandardNormal.sample(&mut rng);
        let b: f64 = StandardNormal.sample(&mut rng);
        f.set_mode(k1, k2, Complex::new(T::c(a), T::c(b)));
    }
    let rms = f.l2() / l;
    if rms == T::zero() {
        return argument("the band contains no resolved modes");
    }
    let s = amp / rms;
    f.c.iter_mut().for_each(|z| *z = z.scale(s));
    Ok(f)
}

/// ETDRK4 coefficients per mode.
#[derive(Clone, Debug)]
struct Etd<T> {
    e: Vec<T>,
    e2: Vec<T>,
    q: Vec<T>,
    f1: Vec<T>,
    f2: Vec<T>,
    f3: Vec<T>,
}

impl<T: Scalar> Etd<T> {
    /// Contour averages of the φ-functions at `z = −L·dt`, after Kassam and Trefethen.
    fn new(linear: &[T], dt: T) -> Self {
        let m = CONTOUR_POINTS;
        let roots: Vec<Complex<T>> = (1..=m)
            .map(|j| {
                Complex::from_polar(T::one(), T::PI() * (T::usize(j) - T::c(0.5)) / T::usize(m))
            })
            .collect();
        let len = linear.len();
        let mut s = Self {
            e: vec![T::zero(); len],
            e2: vec![T::zero(); len],
            q: vec![T::zero(); len],
            f1: vec![T::zero(); len],
            f2: vec![T::zero(); len],
            f3: vec![T::zero(); len],
        };
        let inv_m = T::usize(m).recip();
        let c = |x: f64| Complex::new(T::c(x), T::zero());
        for (i, &lk) in linear.iter().enumerate() {
            let z = -lk * dt;
            s.e[i] = z.exp();
            s.e2[i] = (T::c(0.5) * z).exp();
            let (mut q, mut f1, mut f2, mut f3) = (T::zero(), T::zero(), T::zero(), T::zero());
            for &w in &roots {
                let r = w + Complex::new(z, T::zero());
                let er = r.exp();
                let r3 = r * r * r;
                q += ((r.scale(T::c(0.5))).exp() - c(1.0)).fdiv(r).re;
                f1 += ((c(-4.0) - r + er * (c(4.0) - r.scale(T::c(3.0)) + r * r)) / r3).re;
                f2 += ((c(2.0) + r + er * (r - c(2.0))) / r3).re;
                f3 += ((c(-4.0) - r.scale(T::c(3.0)) - r * r + er * (c(4.0) - r)) / r3).re;
            }
            s.q[i] = dt * q * inv_m;
            s.f1[i] = dt * f1 * inv_m;
            s.f2[i] = dt * f2 * inv_m;
            s.f3[i] = dt * f3 * inv_m;
        }
        s
    }
}

type Coeffs<T> = Vec<Complex<T>>;

/// Time stepper holding the state and the running energy budget.
pub struct Solver<T: Scalar> {
    pub cfg: SimConfig<T>,
    sym: Symbols<T>,
    fft: Fft2<T>,
    etd: Etd<T>,
    state: SpectralField<T>,
    steps: usize,
    e0: T,
    /// Trapezoidal sum of the dissipation rate over completed steps.
    trap: T,
    rate: T,
    rate_dot0: T,
}

impl<T: Scalar> std::fmt::Debug for Solver<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Solver")
            .field("n", &self.cfg.n)
            .field("t", &self.time())
            .finish()
    }
}

impl<T: Scalar> Solver<T> {
    pub fn new(cfg: SimConfig<T>) -> Result<Self> {
        let init = cfg.initial_field()?;
        Self::with_state(cfg, init)
    }

    pub fn with_state(cfg: SimConfig<T>, state: SpectralField<T>) -> Result<Self> {
        cfg.validate()?;
        if state.n != cfg.n {
            return argument("state and configuration grids differ");
        }
        let sym = Symbols::new(cfg.n, cfg.l, cfg.beta, cfg.nu, cfg.epsilon, &cfg.multiplier)?;
        let etd = Etd::new(&sym.linear, cfg.dt);
        let mut s = Self {
            fft: Fft2::new(cfg.n),
            etd,
            e0: state.l2_sq(),
            state,
            sym,
            cfg,
            steps: 0,
            trap: T::zero(),
            rate: T::zero(),
            rate_dot0: T::zero(),
        };
        s.rate = s.dissipation_rate(&s.state.c);
        let n0 = s.nonlinear(&s.state.c);
        s.rate_dot0 = s.rate_derivative(&s.state.c, &n0);
        Ok(s)
    }

    pub fn state(&self) -> &SpectralField<T> {
        &self.state
    }

    pub fn time(&self) -> T {
        T::usize(self.steps) * self.cfg.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn symbols(&self) -> &Symbols<T> {
        &self.sym
    }

    pub fn fft(&self) -> &Fft2<T> {
        &self.fft
    }

    /// `−(u·∇θ)^` for coefficients `v`.
    fn nonlinear(&self, v: &[Complex<T>]) -> Coeffs<T> {
        if !self.cfg.transport {
            return vec![Complex::default(); v.len()];
        }
        let s = &self.sym;
        let mul = |f: &dyn Fn(usize) -> T| -> Coeffs<T> {
            v.iter()
                .enumerate()
                .map(|(i, z)| Complex::new(-z.im, z.re).scale(f(i)))
                .collect()
        };
        let ux = mul(&|i| -s.ky[i] * s.stream[i]);
        let uy = mul(&|i| s.kx[i] * s.stream[i]);
        let gx = mul(&|i| s.kx[i]);
        let gy = mul(&|i| s.ky[i]);
        let mut out = product(&self.state, &ux, &uy, &gx, &gy, &self.fft, Some(&s.mask)).c;
        out.iter_mut().for_each(|z| *z = -*z);
        out
    }

    /// `2ν‖θ‖²_{Ḣ^{β/2}} + 2ε‖∇θ‖²`.
    fn dissipation_rate(&self, v: &[Complex<T>]) -> T {
        let l2 = self.cfg.l * self.cfg.l;
        T::c(2.0)
            * l2
            * v.iter()
                .zip(&self.sym.linear)
                .fold(T::zero(), |a, (z, &lk)| a + lk * z.norm_sqr())
    }

    /// Time derivative of the dissipation rate along the semi-discrete flow.
    fn rate_derivative(&self, v: &[Complex<T>], nv: &[Complex<T>]) -> T {
        let l2 = self.cfg.l * self.cfg.l;
        let mut s = T::zero();
        for i in 0..v.len() {
            let lk = self.sym.linear[i];
            let vdot = nv[i] - v[i].scale(lk);
            s += lk * (v[i].conj() * vdot).re;
        }
        T::c(4.0) * l2 * s
    }

    fn step_etdrk4(&self, v: &[Complex<T>]) -> Coeffs<T> {
        let k = &self.etd;
        let nv = self.nonlinear(v);
        let a: Coeffs<T> = (0..v.len())
            .map(|i| v[i].scale(k.e2[i]) + nv[i].scale(k.q[i]))
            .collect();
        let na = self.nonlinear(&a);
        let b: Coeffs<T> = (0..v.len())
            .map(|i| v[i].scale(k.e2[i]) + na[i].scale(k.q[i]))
            .collect();
        let nb = self.nonlinear(&b);
        let two = T::c(2.0);
        let c: Coeffs<T> = (0..v.len())
            .map(|i| a[i].scale(k.e2[i]) + (nb[i].scale(two) - nv[i]).scale(k.q[i]))
            .collect();
        let nc = self.nonlinear(&c);
        (0..v.len())
            .map(|i| {
                v[i].scale(k.e[i])
                    + nv[i].scale(k.f1[i])
                    + (na[i] + nb[i]).scale(two * k.f2[i])
                    + nc[i].scale(k.f3[i])
            })
            .collect()
    }

    fn step_ifrk4(&self, v: &[Complex<T>]) -> Coeffs<T> {
        let (e, e2) = (&self.etd.e, &self.etd.e2);
        let h = self.cfg.dt;
        let hh = T::c(0.5) * h;
        let k1 = self.nonlinear(v);
        let a: Coeffs<T> = (0..v.len())
            .map(|i| (v[i] + k1[i].scale(hh)).scale(e2[i]))
            .collect();
        let k2 = self.nonlinear(&a);
        let b: Coeffs<T> = (0..v.len())
            .map(|i| v[i].scale(e2[i]) + k2[i].scale(hh))
            .collect();
        let k3 = self.nonlinear(&b);
        let c: Coeffs<T> = (0..v.len())
            .map(|i| v[i].scale(e[i]) + k3[i].scale(h * e2[i]))
            .collect();
        let k4 = self.nonlinear(&c);
        let w = h / T::c(6.0);
        (0..v.len())
            .map(|i| {
                v[i].scale(e[i])
                    + (k1[i].scale(e[i]) + (k2[i] + k3[i]).scale(T::c(2.0) * e2[i]) + k4[i])
                        .scale(w)
            })
            .collect()
    }

    /// Advances one step; on a non-finite result the state is left at the last good time.
    pub fn step(&mut self) -> Result<()> {
        let v = &self.state.c;
        let next = match self.cfg.integrator {
            Integrator::Etdrk4 => self.step_etdrk4(v),
            Integrator::Ifrk4 => self.step_ifrk4(v),
        };
        let mut f = self.state.with_coefficients(next);
        if !f.is_finite() {
            return Err(Error::BlowUp {
                t: self.time().f64(),
            });
        }
        for (z, &keep) in f.c.iter_mut().zip(&self.sym.mask) {
            if !keep {
                *z = Complex::default();
            }
        }
        f.symmetrize();
        let r = self.dissipation_rate(&f.c);
        self.trap += T::c(0.5) * self.cfg.dt * (self.rate + r);
        self.rate = r;
        self.state = f;
        self.steps += 1;
        Ok(())
    }

    /// `∫₀ᵗ (2ν‖θ‖²_{Ḣ^{β/2}} + 2ε‖∇θ‖²)` by the endpoint-corrected trapezoidal rule.
    pub fn dissipated(&self) -> T {
        let v = &self.state.c;
        let nv = self.nonlinear(v);
        let d1 = self.rate_derivative(v, &nv);
        let h = self.cfg.dt;
        self.trap + h * h / T::c(12.0) * (self.rate_dot0 - d1)
    }

    /// `‖θ(t)‖² + ∫(dissipation) − ‖θ₀‖²`.
    pub fn energy_residual(&self) -> T {
        self.state.l2_sq() + self.dissipated() - self.e0
    }

    pub fn initial_energy(&self) -> T {
        self.e0
    }

    pub fn diagnostics(&self, r_grid: Option<&[T]>) -> Result<DiagnosticsRecord> {
        let phys = self.state.to_physical(&self.fft);
        let h = self.state.dx();
        let (l1, l2, linf) = physical_norms(&phys, h);
        let u = super::ops::velocity_with(&self.state, &self.sym);
        let (ux, uy) = self.fft.inverse_real_pair(&u[0].c, &u[1].c);
        let max_u = ux
            .iter()
            .zip(&uy)
            .fold(T::zero(), |m, (a, b)| m.max(a.hypot(*b)));
        let cfl_dt = if max_u > T::zero() {
            T::c(0.5) * h / max_u
        } else {
            T::infinity()
        };
        let dissipated = self.dissipated();
        let empirical = match r_grid {
            Some(r) => Some(empirical_modulus_with(
                &self.state,
                &phys,
                r,
                self.steps as u64,
            )?),
            None => None,
        };
        Ok(DiagnosticsRecord {
            t: self.time().f64(),
            l1: l1.f64(),
            l2: l2.f64(),
            linf: linf.f64(),
            hdot_half_beta: self.state.hdot_sq(T::c(0.5) * self.cfg.beta).sqrt().f64(),
            dissipated: dissipated.f64(),
            residual: (self.state.l2_sq() + dissipated - self.e0).f64(),
            max_u: max_u.f64(),
            cfl_dt: cfl_dt.f64(),
            cfl_ok: self.cfg.dt <= cfl_dt,
            empirical: empirical.map(|e| crate::moduli::EmpiricalModulus {
                r: e.r.iter().map(|x| x.f64()).collect(),
                value: e.value.iter().map(|x| x.f64()).collect(),
            }),
        })
    }

    /// Steps to `t_end`, recording diagnostics at `t = 0`, every
    /// `output_every` steps and at the end. `on_output` sees each record
    /// together with the solver (for snapshots).
    pub fn run(
        &mut self,
        r_grid: Option<&[T]>,
        mut on_output: impl FnMut(&DiagnosticsRecord, &Self) -> Result<()>,
    ) -> Result<Vec<DiagnosticsRecord>> {
        let total = self.cfg.n_steps();
        let mut trace = Vec::new();
        let mut emit = |s: &Self, trace: &mut Vec<DiagnosticsRecord>| -> Result<()> {
            let d = s.diagnostics(r_grid)?;
            on_output(&d, s)?;
            trace.push(d);
            Ok(())
        };
        emit(self, &mut trace)?;
        while self.steps < total {
            self.step()?;
            let every = self.cfg.output_every;
            if self.steps == total || (every > 0 && self.steps.is_multiple_of(every)) {
                emit(self, &mut trace)?;
            }
        }
        Ok(trace)
    }
}
