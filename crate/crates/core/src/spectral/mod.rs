//! Fourier pseudo-spectral solver on the periodic square.

mod diagnostics;
mod fft;
mod field;
mod lp;
mod modulus;
mod ops;
pub mod snapshot;
mod solver;

pub use diagnostics::{
    energy_report, write_diagnostics_csv, DiagnosticsRecord, EnergyReport, NormCheck,
};
pub use fft::Fft2;
pub use field::{in_band, index_of, physical_norms, wavenumber, SpectralField};
pub use lp::{
    bernstein_ratio, bernstein_sweep, chi, lp_project, lp_symbol, BernsteinLevel, BernsteinSweep,
    LpKind,
};
pub use modulus::{empirical_modulus, empirical_modulus_with, PAIRS_PER_BIN};
pub use ops::{
    apply_fractional_laplacian, apply_multiplier, divergence_defect, gradient, nonlinear_term,
    velocity, Symbols,
};
pub use solver::{random_band, InitialData, Integrator, SimConfig, Solver, RNG_NAME};
