//! Run configurations, manifests, closed-form eventual times and modulus tracking.

pub mod config;
mod eventual;
mod manifest;
mod run;
mod track;

pub use config::RunConfig;
pub use eventual::{compute_t_star_alpha, compute_t_star_beta, TStar, REPORT_FLOOR};
pub use manifest::{sha256_file, sha256_hex, OutputFile, RunManifest, MANIFEST_FILE};
pub use run::{
    exit_code_for, print_outcome, run_config, run_parsed, RunOptions, RunOutcome, EXIT_BLOW_UP,
    EXIT_CONFIG, EXIT_FAIL, EXIT_NOT_GUARANTEED, EXIT_OK,
};
pub use track::{modulus_track, EntryCheck, TrackOutcome, TrackPoint, TrackReport};
