use std::f64::consts::PI;

use gsqg_core::multiplier::MultiplierSpec;
use gsqg_core::spectral::{
    apply_fractional_laplacian, apply_multiplier, divergence_defect, in_band, velocity,
    InitialData, Integrator, SimConfig, Solver, SpectralField,
};
use num_complex::Complex;
use proptest::prelude::*;

const N: usize = 32;

fn mode(k1: i64, k2: i64, l: f64) -> SpectralField<f64> {
    let mut f = SpectralField::zeros(N, l).unwrap();
    f.set_mode(k1, k2, Complex::new(0.3, 0.4));
    f
}

fn run(cfg: SimConfig<f64>) -> Solver<f64> {
    let mut s = Solver::new(cfg).unwrap();
    for _ in 0..s.cfg.n_steps() {
        s.step().unwrap();
    }
    s
}

fn small(beta: f64, nu: f64, seed: u64, integrator: Integrator) -> SimConfig<f64> {
    let mut c = SimConfig::new(
        N,
        beta,
        nu,
        0.0,
        MultiplierSpec::power_log(0.2, 1.0, 0.3),
        2e-3,
        0.1,
    );
    c.integrator = integrator;
    c.initial = InitialData::RandomBand {
        j_lo: 1,
        j_hi: 2,
        seed,
        amp: 1.0,
    };
    c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn symbols_act_on_single_modes(k1 in -10i64..=10, k2 in -10i64..=10, beta in 0.1f64..1.0, lscale in 0.5f64..4.0) {
        prop_assume!((k1, k2) != (0, 0) && in_band(k1, k2, N));
        let l = 2.0 * PI * lscale;
        let f = mode(k1, k2, l);
        let kappa = (2.0 * PI / l) * (k1 as f64).hypot(k2 as f64);
        let lap = apply_fractional_laplacian(&f, beta).unwrap();
        let want = f.get(k1, k2) * kappa.powf(beta);
        prop_assert!((lap.get(k1, k2) - want).norm() <= 1e-13 * want.norm());
        let m = MultiplierSpec::power(0.3);
        let g = apply_multiplier(&f, &m).unwrap();
        let want = f.get(k1, k2) * kappa.powf(0.3);
        prop_assert!((g.get(k1, k2) - want).norm() <= 1e-13 * want.norm());
        let u = velocity(&f, beta, &m).unwrap();
        prop_assert!(divergence_defect(&u) <= 4.0 * f64::EPSILON);
    }

    #[test]
    fn dissipative_runs_lose_energy(beta in 0.3f64..1.0, seed in 0u64..1000) {
        let s = run(small(beta, 0.5, seed, Integrator::Etdrk4));
        prop_assert!(s.state().l2_sq() < Solver::new(small(beta, 0.5, seed, Integrator::Etdrk4)).unwrap().state().l2_sq());
        prop_assert!((s.energy_residual() / s.initial_energy()).abs() < 1e-6);
    }
}

#[test]
fn runs_are_deterministic() {
    for integ in [Integrator::Etdrk4, Integrator::Ifrk4] {
        let a = run(small(0.6, 0.1, 7, integ));
        let b = run(small(0.6, 0.1, 7, integ));
        assert_eq!(a.state().c, b.state().c);
    }
}

#[test]
fn integrators_agree() {
    let a = run(small(0.6, 0.1, 3, Integrator::Etdrk4));
    let b = run(small(0.6, 0.1, 3, Integrator::Ifrk4));
    let mut d = a.state().clone();
    for (x, y) in d.c.iter_mut().zip(&b.state().c) {
        *x -= *y;
    }
    assert!(d.l2() <= 1e-8 * a.state().l2(), "{:e}", d.l2());
}

#[test]
fn seeds_change_the_data() {
    let a = Solver::new(small(0.6, 0.1, 1, Integrator::Etdrk4)).unwrap();
    let b = Solver::new(small(0.6, 0.1, 2, Integrator::Etdrk4)).unwrap();
    assert_ne!(a.state().c, b.state().c);
    assert!(a.state().is_hermitian() && a.state().is_dealiased());
}
