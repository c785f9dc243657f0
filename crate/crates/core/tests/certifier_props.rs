mod common;

use std::sync::Arc;

use gsqg_core::certifier::{certify_stationary, dissipation_bound, BoundOptions, CertOptions};
use gsqg_core::harness::compute_t_star_alpha;
use gsqg_core::moduli::{AdmissibleConstants, HolderLog, StationaryModulus};
use gsqg_core::multiplier::MultiplierSpec;
use gsqg_core::scalar::logspace;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// A concave modulus is a touching profile: the dissipation never helps the wrong way.
    #[test]
    fn dissipation_is_nonpositive(
        alpha in 0.05f64..0.45, beta in 0.2f64..1.0, u in 0.1f64..0.9, ld in -4.0f64..-0.7, lx in -3.0f64..3.0,
    ) {
        let sigma = alpha + u * ((alpha + beta).min(1.0) - alpha);
        let delta = 10f64.powf(ld);
        let w = HolderLog::new(0.2, 0.05, delta, sigma, None, Arc::new(MultiplierSpec::power(alpha))).unwrap();
        let mut xi = delta * 10f64.powf(lx);
        if (xi / delta - 1.0).abs() < 1e-3 {
            xi *= 1.01;
        }
        let d = dissipation_bound(&w, xi, beta, 1.0, &BoundOptions::default()).unwrap();
        prop_assert!(d.value <= 0.0, "D({xi:e}) = {:e}", d.value);
        prop_assert!(d.converged);
    }

    #[test]
    fn t_star_alpha_decreases(a in 0.03f64..0.45, step in 0.005f64..0.05) {
        let b = (a + step).min(0.49);
        let t = |al: f64| compute_t_star_alpha(al, 0.5, 1.0, 0.01, 0.1, 1.0, 1.0, 1.0).unwrap().log10;
        prop_assert!(t(a) < t(b), "log10 T*({a}) = {} >= log10 T*({b}) = {}", t(a), t(b));
    }
}

/// Inflating γ past its admissible value erodes the worst margin monotonically.
#[test]
fn margin_degrades_with_gamma() {
    let (a, b, s) = (0.3, 0.4, 0.5);
    let c1 = gsqg_core::certifier::estimate_c1(b).unwrap().value;
    let k = AdmissibleConstants::compute(1.0, c1, 1.0, a, b, s).unwrap();
    let m = Arc::new(MultiplierSpec::power(a));
    let g = logspace(1e-8, 100.0, 60);
    let mut prev = f64::NEG_INFINITY;
    for f in [1.0, 2.0, 5.0, 10.0] {
        let w = StationaryModulus::holder_log(
            k.stationary.kappa,
            f * k.stationary.gamma,
            0.01,
            s,
            m.clone(),
        )
        .unwrap();
        let r = certify_stationary(&w, b, &m, &k, &g, &CertOptions::default()).unwrap();
        assert!(
            r.worst_relative_margin >= prev,
            "factor {f}: {} < {prev}",
            r.worst_relative_margin
        );
        if f == 1.0 {
            assert!(r.pass && r.guaranteed);
        } else if f >= 5.0 {
            assert!(!r.guaranteed);
        }
        prev = r.worst_relative_margin;
    }
}

/// Tightening the quadrature moves the margins by far less than they are.
#[test]
fn margins_are_stable_under_tightening() {
    let d = common::Draw {
        alpha: 0.25,
        beta: 0.6,
        sigma: 0.5,
        delta: 0.01,
    };
    let (w, _, _) = common::stationary(&d);
    let c1 = gsqg_core::certifier::estimate_c1(d.beta).unwrap().value;
    let k = AdmissibleConstants::compute(1.0, c1, 1.0, d.alpha, d.beta, d.sigma).unwrap();
    let sw =
        StationaryModulus::holder_log(w.kappa, w.gamma, d.delta, d.sigma, w.multiplier.clone())
            .unwrap();
    let g = logspace(1e-7, 10.0, 40);
    let r1 =
        certify_stationary(&sw, d.beta, &w.multiplier, &k, &g, &CertOptions::default()).unwrap();
    let r2 = certify_stationary(
        &sw,
        d.beta,
        &w.multiplier,
        &k,
        &g,
        &CertOptions::default().tightened(4.0),
    )
    .unwrap();
    for (p, q) in r1.points.iter().zip(&r2.points) {
        assert!(
            (p.margin - q.margin).abs() <= 1e-6 * p.scale,
            "xi {}: {} vs {}",
            p.xi,
            p.margin,
            q.margin
        );
    }
}
