//! Quadrature evaluation of the dissipation and drift bounds at the touching
//! scenario, and grid certificates for the breakthrough inequalities.

mod bounds;
mod certify;
mod kernel;
mod profile;

pub use bounds::{dissipation_bound, drift_bound, BoundOptions, Dissipation, Drift, DriftVariant};
pub use certify::{
    analytic_appendix_condition, certify_appendix, certify_stationary, certify_time_dependent,
    largest_passing_delta, nudge_off_breakpoints, AppendixCondition, CertOptions,
    CertificateReport, PointRecord,
};
pub use kernel::{estimate_c1, stable_density, KernelConstant};
pub use profile::Profile;
