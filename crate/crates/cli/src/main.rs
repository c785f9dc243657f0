use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gsqg_core::harness::{
    exit_code_for, print_outcome, run_parsed, RunConfig, RunOptions, EXIT_CONFIG,
};

/// Simulations, certificates and closed-form sweeps for the generalized SQG equation.
#[derive(Parser)]
#[command(name = "gsqg", version)]
struct Cli {
    #[command(subcommand)]
    kind: Kind,
}

#[derive(Subcommand)]
enum Kind {
    /// Pseudo-spectral run with diagnostics and snapshots.
    Simulate(Common),
    /// Grid certificate for a stationary, time-dependent or small-scale modulus.
    Certify(Common),
    /// The admissible constant table.
    Constants(Common),
    /// Closed-form eventual-regularity times over alpha or beta.
    EventualTime(Common),
    /// Random-band Bernstein ratio sweep.
    Bernstein(Common),
    /// Tabulate a modulus and its one-sided slopes.
    ModuliEval(Common),
    /// Track a simulation against a shrinking-front family.
    ModulusTrack(Common),
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
}

impl Kind {
    fn split(self) -> (&'static str, Common) {
        match self {
            Kind::Simulate(c) => ("simulate", c),
            Kind::Certify(c) => ("certify", c),
            Kind::Constants(c) => ("constants", c),
            Kind::EventualTime(c) => ("eventual-time", c),
            Kind::Bernstein(c) => ("bernstein", c),
            Kind::ModuliEval(c) => ("moduli-eval", c),
            Kind::ModulusTrack(c) => ("modulus-track", c),
        }
    }
}

fn main() -> ExitCode {
    let (kind, args) = Cli::parse().kind.split();
    let cfg = match RunConfig::load(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("gsqg: {}: {e}", args.config.display());
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    if cfg.kind() != kind {
        eprintln!(
            "gsqg: {} declares kind `{}`, not `{kind}`",
            args.config.display(),
            cfg.kind()
        );
        return ExitCode::from(EXIT_CONFIG as u8);
    }
    let base = args.config.parent().map(PathBuf::from).unwrap_or_default();
    let opts = RunOptions {
        seed: args.seed,
        threads: args.threads,
    };
    match run_parsed(&cfg, &base, &args.out, &opts) {
        Ok(o) => {
            let _ = print_outcome(&o, &mut std::io::stdout());
            ExitCode::from(o.exit_code as u8)
        }
        Err(e) => {
            eprintln!("gsqg: {e}");
            ExitCode::from(exit_code_for(&e) as u8)
        }
    }
}
