//! Numerical tolerances used across the crate, gathered so that every
//! pass/fail decision can be traced to one constant.

/// Relative slack when checking that a sampled function is nondecreasing.
pub const MONOTONE_REL: f64 = 1e-10;

/// Relative slack for pointwise assumption checks on closed-form symbols.
pub const ASSUMPTION_REL: f64 = 1e-12;

/// Relative finite-difference step for `m'` of tabulated symbols.
pub const FD_REL_STEP: f64 = 1e-6;

/// Step in `t = ln r` for higher derivatives of tabulated symbols.
pub const FD_LOG_STEP: f64 = 0.05;

/// Absolute tolerance of the log integral inside the moduli.
pub const MODULUS_INTEGRAL_ABS: f64 = 1e-12;

/// Relative half-width of the neighbourhood excluded around a breakpoint.
pub const BREAKPOINT_EXCLUSION: f64 = 1e-6;

/// Pass threshold: margin < -MARGIN_FLOOR * scale.
pub const MARGIN_FLOOR: f64 = 1e-14;

/// Default relative tolerance of the certificate quadratures.
pub const CERT_QUAD_REL: f64 = 1e-10;

/// Relative size of the truncated tail of the dissipation and drift integrals.
pub const CERT_TAIL_REL: f64 = 1e-12;

/// Fraction of ξ below which the second difference is replaced by its Taylor head.
pub const TAYLOR_HEAD: f64 = 1e-4;

/// Hermitian symmetry is restored whenever it drifts by more than this.
pub const HERMITIAN_REL: f64 = 1e-13;

/// Relative slack on L² growth between diagnostics records.
pub const L2_GROWTH_REL: f64 = 1e-10;

/// Relative slack on L¹ and L∞ growth from Fourier truncation wiggle.
pub const LINF_WIGGLE_REL: f64 = 1e-3;
