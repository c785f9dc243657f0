//! Pseudo-spectral simulation and modulus-of-continuity certificates for the
//! generalized surface quasi-geostrophic equation
//!
//! ```text
//! ∂tθ + u·∇θ + νΛ^βθ − εΔθ = 0,    u = ∇⊥ Λ^{β−2} m(Λ) θ
//! ```
//!
//! The numerical core is generic over the floating-point type through
//! [`Scalar`]; the aliases at the bottom of this file fix it to `f64`.

#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::excessive_precision,
    clippy::too_many_arguments
)]

pub mod certifier;
pub mod error;
pub mod harness;
pub mod moduli;
pub mod multiplier;
pub mod quad;
pub mod scalar;
pub mod spectral;
pub mod tolerances;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Multiplier = multiplier::MultiplierSpec<f64>;
pub type Stationary = moduli::StationaryModulus<f64>;
pub type Family = moduli::TimeDependentModulus<f64>;
pub type Field = spectral::SpectralField<f64>;
pub type Solver = spectral::Solver<f64>;
pub type Empirical = moduli::EmpiricalModulus<f64>;
