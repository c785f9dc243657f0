//! Closed-form eventual-regularity times and their limits.

use serde::Serialize;

use crate::error::{argument, domain};
use crate::Result;

/// Values below this are reported as `"< 1e-300"`.
pub const REPORT_FLOOR: f64 = 1e-300;

#[derive(Clone, Debug, Serialize)]
pub struct TStar {
    /// The time itself; 0 when it underflows.
    pub value: f64,
    /// `log₁₀` of the time, finite even when `value` underflows.
    pub log10: f64,
    /// The bracket raised to the power.
    pub inner: f64,
    pub exponent: f64,
    /// Entry scale and inner breakpoint (`α` path only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    pub warnings: Vec<String>,
}

impl TStar {
    /// `value` formatted with the reporting floor.
    pub fn display(&self) -> String {
        if self.log10 < REPORT_FLOOR.log10() {
            "< 1e-300".into()
        } else {
            format!("{:.6e}", self.value)
        }
    }

    fn from_log(ln_value: f64, inner: f64, exponent: f64) -> Self {
        Self {
            value: ln_value.exp(),
            log10: ln_value / std::f64::consts::LN_10,
            inner,
            exponent,
            a0: None,
            delta: None,
            warnings: Vec::new(),
        }
    }
}

/// `t₁ = (1/(βρ))·(4C_β m(1) α‖θ₀‖_{L²} / ((1−α)γ t′^{1/β}))^{β/α}`,
/// the time at which the shrinking front reaches zero when `A₀` is chosen
/// from the smoothing bound at `t′`. Evaluated in log space.
#[allow(clippy::too_many_arguments)]
pub fn compute_t_star_alpha(
    alpha: f64,
    beta: f64,
    t_prime: f64,
    theta0_l2: f64,
    gamma: f64,
    rho: f64,
    c_beta: f64,
    m_at_1: f64,
) -> Result<TStar> {
    for (name, v) in [
        ("alpha", alpha),
        ("beta", beta),
        ("t_prime", t_prime),
        ("theta0_L2", theta0_l2),
        ("gamma", gamma),
        ("rho", rho),
        ("C_beta", c_beta),
        ("m(1)", m_at_1),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return argument(format!("{name} must be positive and finite"));
        }
    }
    if alpha >= 1.0 || beta > 1.0 {
        return argument("need alpha < 1 and beta ≤ 1");
    }
    let inner = 4.0 * c_beta * m_at_1 * alpha * theta0_l2
        / ((1.0 - alpha) * gamma * t_prime.powf(1.0 / beta));
    let exponent = beta / alpha;
    let ln_t = exponent * inner.ln() - (beta * rho).ln();
    let mut t = TStar::from_log(ln_t, inner, exponent);
    let a0 = inner.powf(1.0 / alpha);
    t.a0 = Some(a0);
    t.delta = Some(a0 / 4f64.powf(1.0 / alpha));
    let range = ((1.0 - beta) / 2.0).min(beta / 2.0).min(0.25);
    if alpha >= range {
        t.warnings.push(format!(
            "alpha = {alpha} is outside the standing range (0, {range}); formula evaluated anyway"
        ));
    }
    if inner >= 1.0 {
        t.warnings
            .push("the bracket is not below 1, so T* need not decrease as alpha falls".into());
    }
    Ok(t)
}

/// `T*(β) = (1/(C₀β))·(4C₀ m(1)(1−β)‖θ₀‖_{L∞}/β³)^{β/(1−β)}`.
pub fn compute_t_star_beta(beta: f64, theta0_linf: f64, c0: f64, m_at_1: f64) -> Result<TStar> {
    if !(beta > 0.0 && beta < 1.0) {
        return domain(format!("beta = {beta} must lie in (0, 1)"));
    }
    for (name, v) in [("theta0_Linf", theta0_linf), ("C0", c0), ("m(1)", m_at_1)] {
        if !(v > 0.0 && v.is_finite()) {
            return argument(format!("{name} must be positive and finite"));
        }
    }
    let inner = 4.0 * c0 * m_at_1 * (1.0 - beta) * theta0_linf / beta.powi(3);
    let exponent = beta / (1.0 - beta);
    let mut t = TStar::from_log(exponent * inner.ln() - (c0 * beta).ln(), inner, exponent);
    if inner >= 1.0 {
        t.warnings.push("the bracket is not below 1".into());
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn worked_alpha_values() {
        let t = compute_t_star_alpha(0.2, 0.5, 1.0, 0.01, 0.1, 1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(t.inner, 0.1, max_relative = 1e-14);
        assert_relative_eq!(t.value, 2.0 * 0.1f64.powf(2.5), max_relative = 1e-13);
        let t = compute_t_star_alpha(0.1, 0.5, 1.0, 0.01, 0.1, 1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(
            t.value,
            2.0 * (0.004f64 / 0.09).powi(5),
            max_relative = 1e-13
        );
        assert!(t.warnings.is_empty());
        let t = compute_t_star_alpha(0.3, 0.5, 1.0, 0.01, 0.1, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(t.warnings.len(), 1);
    }

    #[test]
    fn underflow_is_reported_by_floor() {
        let t = compute_t_star_alpha(1e-4, 0.5, 1.0, 0.01, 0.1, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(t.value, 0.0);
        assert!(t.log10.is_finite() && t.log10 < -300.0);
        assert_eq!(t.display(), "< 1e-300");
    }

    #[test]
    fn beta_values() {
        let t = compute_t_star_beta(0.9, 0.1, 1.0, 1.0).unwrap();
        assert_relative_eq!(t.inner, 0.04 / 0.729, max_relative = 1e-14);
        assert_relative_eq!(
            t.value,
            (0.04f64 / 0.729).powi(9) / 0.9,
            max_relative = 1e-12
        );
        assert!(compute_t_star_beta(1.0, 0.1, 1.0, 1.0).is_err());
        // bracket exactly 1 at β = 1/2: 4·C0·(1/2)·θ/(1/8) = 1 ⇔ θ = 1/16
        let t = compute_t_star_beta(0.5, 1.0 / 16.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(t.value, 2.0, max_relative = 1e-14);
    }
}
