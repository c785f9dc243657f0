//! Executes one run configuration into an output directory.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Serialize;

use super::config::*;
use super::eventual::{compute_t_star_alpha, compute_t_star_beta, TStar};
use super::manifest::RunManifest;
use super::track::{modulus_track, TrackOutcome};
use crate::certifier::{
    certify_appendix, certify_stationary, certify_time_dependent, largest_passing_delta,
    CertOptions, CertificateReport,
};
use crate::error::Error;
use crate::moduli::{
    solve_constants_log, AdmissibleConstants, FamilyVariant, HolderLog, Modulus, Side,
    StationaryModulus, TimeDependentModulus,
};
use crate::multiplier::MultiplierSpec;
use crate::scalar::logspace;
use crate::spectral::snapshot::{write_snapshot, Snapshot, SnapshotMeta, FLAG_INCOMPLETE};
use crate::spectral::{
    bernstein_sweep, energy_report, physical_norms, write_diagnostics_csv, DiagnosticsRecord,
    Solver, RNG_NAME,
};
use crate::Result;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 2;
pub const EXIT_NOT_GUARANTEED: i32 = 3;
pub const EXIT_CONFIG: i32 = 4;
pub const EXIT_BLOW_UP: i32 = 5;

/// Exit status for an error that ended a run.
pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::BlowUp { .. } => EXIT_BLOW_UP,
        Error::Io(_) => 1,
        _ => EXIT_CONFIG,
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Replaces the seed of random initial data, or the Bernstein seed list.
    pub seed: Option<u64>,
    /// Worker threads for grid sweeps and transforms (default: all cores).
    pub threads: Option<usize>,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub dir: PathBuf,
    pub manifest: RunManifest,
    /// One-line human summary.
    pub summary: String,
}

/// Loads `config`, runs it into `out` and writes `manifest.json` there.
///
/// Relative paths inside the configuration resolve against its directory.
pub fn run_config(config: &Path, out: &Path, opts: &RunOptions) -> Result<RunOutcome> {
    let cfg = RunConfig::load(config)?;
    let base = config.parent().unwrap_or(Path::new(".")).to_path_buf();
    run_parsed(&cfg, &base, out, opts)
}

pub fn run_parsed(
    cfg: &RunConfig,
    base: &Path,
    out: &Path,
    opts: &RunOptions,
) -> Result<RunOutcome> {
    match opts.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
            pool.install(|| run_inner(cfg, base, out, opts))
        }
        None => run_inner(cfg, base, out, opts),
    }
}

struct Ctx<'a> {
    dir: &'a Path,
    manifest: RunManifest,
}

impl Ctx<'_> {
    fn json(&mut self, name: &str, v: &impl Serialize) -> Result<()> {
        std::fs::write(self.dir.join(name), serde_json::to_string_pretty(v)?)?;
        self.manifest.record(self.dir, name)
    }

    fn text(&mut self, name: &str, s: &str) -> Result<()> {
        std::fs::write(self.dir.join(name), s)?;
        self.manifest.record(self.dir, name)
    }
}

fn run_inner(cfg: &RunConfig, base: &Path, out: &Path, opts: &RunOptions) -> Result<RunOutcome> {
    std::fs::create_dir_all(out)?;
    let (seed, rng) = effective_seed(cfg, opts.seed);
    let mut ctx = Ctx {
        dir: out,
        manifest: RunManifest::new(cfg.kind(), serde_json::to_value(cfg)?, seed, rng),
    };
    let (code, summary) = match cfg {
        RunConfig::Simulate(s) => simulate(&mut ctx, s, base, opts.seed)?,
        RunConfig::Certify { certificate } => certify(&mut ctx, certificate, base)?,
        RunConfig::Constants(c) => {
            let k = c.build()?;
            ctx.json("constants.json", &k)?;
            (
                EXIT_OK,
                format!(
                    "constants: kappa = {:.6e}, gamma = {:.6e}",
                    k.stationary.kappa, k.stationary.gamma
                ),
            )
        }
        RunConfig::EventualTime {
            alpha_sweep,
            beta_sweep,
        } => eventual_time(&mut ctx, alpha_sweep.as_ref(), beta_sweep.as_ref())?,
        RunConfig::Bernstein(b) => bernstein(&mut ctx, b, base, opts.seed)?,
        RunConfig::ModuliEval { modulus, xi } => moduli_eval(&mut ctx, modulus, xi, base)?,
        RunConfig::ModulusTrack(t) => track(&mut ctx, t, base, opts.seed)?,
    };
    ctx.manifest.exit_code = code;
    if code == EXIT_BLOW_UP {
        ctx.manifest.complete = false;
    }
    ctx.manifest.write(out)?;
    Ok(RunOutcome {
        exit_code: code,
        dir: out.to_path_buf(),
        manifest: ctx.manifest,
        summary,
    })
}

fn effective_seed(cfg: &RunConfig, over: Option<u64>) -> (Option<u64>, Option<&'static str>) {
    let band = |s: &SimulateConfig| match s.initial_data {
        InitialDataConfig::RandomBand { seed, .. } => Some(over.unwrap_or(seed)),
        _ => None,
    };
    let seed = match cfg {
        RunConfig::Simulate(s) => band(s),
        RunConfig::ModulusTrack(t) => band(&t.simulation),
        RunConfig::Bernstein(b) => over.or(b.seeds.first().copied()),
        _ => None,
    };
    (seed, seed.map(|_| RNG_NAME))
}

fn grid(g: &GridConfig, scale: f64) -> Result<Vec<f64>> {
    let (lo, hi) = (g.lo * scale, g.hi);
    if !(lo > 0.0 && hi > lo && g.points >= 2) {
        return Err(Error::Config(format!(
            "grid needs 0 < lo·scale = {lo:.3e} < hi = {hi:.3e} and at least 2 points"
        )));
    }
    Ok(logspace(lo, hi, g.points))
}

fn snapshot_of(solver: &Solver<f64>, flags: u16, config_hash: &str) -> (Snapshot, SnapshotMeta) {
    let s = solver.state();
    let data = s.physical();
    let (l1, l2, linf) = physical_norms(&data, s.dx());
    (
        Snapshot {
            nx: s.n,
            ny: s.n,
            flags,
            data,
        },
        SnapshotMeta {
            t: solver.time(),
            config_hash: config_hash.into(),
            n: s.n,
            l: s.l,
            l1,
            l2,
            linf,
        },
    )
}

fn write_modulus_csv(trace: &[DiagnosticsRecord], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "r", "omega_emp"])?;
    for d in trace {
        if let Some(e) = &d.empirical {
            for (r, v) in e.r.iter().zip(&e.value) {
                w.write_record([
                    format!("{:.17e}", d.t),
                    format!("{r:.17e}"),
                    format!("{v:.17e}"),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn simulate(
    ctx: &mut Ctx,
    s: &SimulateConfig,
    base: &Path,
    seed: Option<u64>,
) -> Result<(i32, String)> {
    let sim = s.build(base, seed)?;
    let mut solver = Solver::new(sim.clone())?;
    let hash = ctx.manifest.config_sha256.clone();
    let dir = ctx.dir.to_path_buf();
    let mut trace = Vec::new();
    let mut snaps = Vec::new();
    let radii = s.modulus_radii.as_deref();
    let res = solver.run(radii, |d, sv| {
        trace.push(d.clone());
        if s.snapshots {
            let name = format!("snap_{:05}.bin", snaps.len());
            let (sn, meta) = snapshot_of(sv, 0, &hash);
            write_snapshot(&dir.join(&name), &sn, Some(&meta))?;
            snaps.push(name);
        }
        Ok(())
    });
    let blow = match res {
        Ok(_) => None,
        Err(Error::BlowUp { t }) => Some(t),
        Err(e) => return Err(e),
    };
    for name in &snaps {
        ctx.manifest.record(&dir, name)?;
        ctx.manifest.record(&dir, &format!("{name}.json"))?;
    }
    write_diagnostics_csv(&trace, &dir.join("diagnostics.csv"))?;
    ctx.manifest.record(&dir, "diagnostics.csv")?;
    if radii.is_some() {
        write_modulus_csv(&trace, &dir.join("modulus.csv"))?;
        ctx.manifest.record(&dir, "modulus.csv")?;
    }
    let (sn, meta) = snapshot_of(
        &solver,
        if blow.is_some() { FLAG_INCOMPLETE } else { 0 },
        &hash,
    );
    write_snapshot(&dir.join("final.bin"), &sn, Some(&meta))?;
    ctx.manifest.record(&dir, "final.bin")?;
    ctx.manifest.record(&dir, "final.bin.json")?;
    if let Some(t) = blow {
        return Ok((
            EXIT_BLOW_UP,
            format!("simulate: blow-up after t = {t:.6e}; partial outputs written"),
        ));
    }
    let rep = energy_report(&trace, &sim)?;
    ctx.json("energy_report.json", &rep)?;
    Ok((
        EXIT_OK,
        format!(
            "simulate: t = {:.4}, relative energy residual {:.3e}, max L2 growth {:.3e}",
            solver.time(),
            rep.relative_residual,
            rep.l2.excess
        ),
    ))
}

fn holder_base(
    m: Arc<MultiplierSpec<f64>>,
    kappa: f64,
    gamma: f64,
    delta: f64,
    sigma: f64,
    cap: Option<f64>,
) -> Result<HolderLog<f64>> {
    HolderLog::new(kappa, gamma, delta, sigma, cap, m)
}

/// `(ρ, κ, γ)` defaults for a family variant.
fn family_defaults(k: &AdmissibleConstants<f64>, v: FamilyVariant) -> Result<(f64, f64, f64)> {
    Ok(match v {
        FamilyVariant::Eventual => (k.eventual.rho, k.eventual.kappa, k.eventual.gamma),
        FamilyVariant::LogSupercritical => {
            let l = solve_constants_log(k.c1, k.c, k.alpha, k.beta, k.sigma)?;
            (l.rho, l.kappa, l.gamma)
        }
    })
}

fn build_family(
    f: &FamilyConfig,
    k: &AdmissibleConstants<f64>,
    m: Arc<MultiplierSpec<f64>>,
) -> Result<TimeDependentModulus<f64>> {
    let (rho, kappa, gamma) = family_defaults(k, f.variant)?;
    let delta = f.delta.unwrap_or(f.a0 / 4f64.powf(1.0 / k.alpha));
    let base = holder_base(
        m,
        f.kappa.unwrap_or(kappa),
        f.gamma.unwrap_or(gamma),
        delta,
        k.sigma,
        f.cap,
    )?;
    TimeDependentModulus::new(base, f.a0, f.rho.unwrap_or(rho), k.beta, f.variant)
}

fn certify(ctx: &mut Ctx, c: &CertificateConfig, base: &Path) -> Result<(i32, String)> {
    let opts = CertOptions::default();
    let mut extra = None;
    let report: CertificateReport = match c {
        CertificateConfig::Stationary {
            constants,
            multiplier,
            modulus,
            grid: g,
            precision_check,
        } => {
            let k = constants.build()?;
            let m = Arc::new(multiplier.build(base)?);
            let kappa = modulus.kappa.unwrap_or(k.stationary.kappa);
            let gamma = modulus.gamma.unwrap_or(k.stationary.gamma);
            let w = match modulus.variant {
                StationaryVariantConfig::HolderLog => {
                    if modulus.cap.is_some() {
                        return Err(Error::Config("the holder_log variant takes no cap".into()));
                    }
                    StationaryModulus::holder_log(kappa, gamma, modulus.delta, k.sigma, m.clone())?
                }
                StationaryVariantConfig::Capped => match modulus.cap {
                    Some(c) => StationaryModulus::HolderLog(holder_base(
                        m.clone(),
                        kappa,
                        gamma,
                        modulus.delta,
                        k.sigma,
                        Some(c),
                    )?),
                    None => {
                        StationaryModulus::capped(kappa, gamma, modulus.delta, k.sigma, m.clone())?
                    }
                },
            };
            let xs = grid(g, modulus.delta)?;
            let mut rep = certify_stationary(&w, k.beta, &m, &k, &xs, &opts)?;
            if *precision_check {
                let fine = certify_stationary(&w, k.beta, &m, &k, &xs, &opts.tightened(2.0))?;
                let same = fine.pass == rep.pass;
                rep.notes.push(format!(
                    "precision doubling: verdict {}, worst margin/scale {:.6e} -> {:.6e}",
                    if same { "unchanged" } else { "CHANGED" },
                    rep.worst_relative_margin,
                    fine.worst_relative_margin
                ));
                if !same {
                    rep.pass = false;
                }
            }
            rep
        }
        CertificateConfig::TimeDependent {
            constants,
            multiplier,
            family,
            epsilon,
            xi_grid,
            xi0_grid,
        } => {
            let k = constants.build()?;
            let m = Arc::new(multiplier.build(base)?);
            let fam = build_family(family, &k, m.clone())?;
            let xs = grid(xi_grid, fam.base.delta)?;
            let x0s = grid(xi0_grid, fam.base.delta)?;
            certify_time_dependent(&fam, &m, &k, *epsilon, &xs, &x0s, &opts)?
        }
        CertificateConfig::Appendix {
            delta,
            alpha,
            beta,
            epsilon,
            multiplier,
            c: cc,
            points,
            search_delta,
        } => {
            let m = multiplier.build(base)?;
            let xs = logspace(delta * 1e-6, 0.5 * delta * (1.0 - 1e-9), (*points).max(2));
            let rep = certify_appendix(*delta, *alpha, *beta, *epsilon, &m, *cc, &xs, &opts)?;
            if *search_delta {
                let d = largest_passing_delta(
                    *alpha,
                    *beta,
                    *epsilon,
                    &m,
                    *cc,
                    (*points).max(2),
                    1e-3,
                    &opts,
                )?;
                extra = Some(serde_json::json!({
                    "largest_passing_delta": d,
                    "analytic_delta_max": rep.analytic.map(|a| a.delta_max),
                }));
            }
            rep
        }
    };
    ctx.json("certificate.json", &report)?;
    report.write_margins_csv(&ctx.dir.join("margins.csv"))?;
    ctx.manifest.record(ctx.dir, "margins.csv")?;
    if let Some(e) = extra {
        ctx.json("delta_search.json", &e)?;
    }
    let mut line = Vec::new();
    report.summary_line(&mut line)?;
    Ok((
        report.exit_code(),
        String::from_utf8_lossy(&line).trim_end().to_string(),
    ))
}

#[derive(Serialize)]
struct SweepRow<'a> {
    parameter: &'static str,
    value: f64,
    t_star: &'a TStar,
    display: String,
}

fn eventual_time(
    ctx: &mut Ctx,
    a: Option<&AlphaSweepConfig>,
    b: Option<&BetaSweepConfig>,
) -> Result<(i32, String)> {
    if a.is_none() && b.is_none() {
        return Err(Error::Config(
            "eventual-time needs alpha_sweep or beta_sweep".into(),
        ));
    }
    let mut rows = Vec::new();
    if let Some(a) = a {
        for &al in &a.alphas {
            rows.push((
                "alpha",
                al,
                compute_t_star_alpha(
                    al,
                    a.beta,
                    a.t_prime,
                    a.theta0_l2,
                    a.gamma,
                    a.rho,
                    a.c_beta,
                    a.m_at_1,
                )?,
            ));
        }
    }
    if let Some(b) = b {
        for &be in &b.betas {
            rows.push((
                "beta",
                be,
                compute_t_star_beta(be, b.theta0_linf, b.c0, b.m_at_1)?,
            ));
        }
    }
    let mut csv = String::from("parameter,value,t_star,log10_t_star,inner,exponent\n");
    for (p, v, t) in &rows {
        csv.push_str(&format!(
            "{p},{v:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
            t.value, t.log10, t.inner, t.exponent
        ));
    }
    let json: Vec<SweepRow> = rows
        .iter()
        .map(|(p, v, t)| SweepRow {
            parameter: p,
            value: *v,
            t_star: t,
            display: t.display(),
        })
        .collect();
    ctx.json("eventual_time.json", &json)?;
    ctx.text("eventual_time.csv", &csv)?;
    let summary = rows
        .iter()
        .map(|(p, v, t)| format!("{p}={v}: {}", t.display()))
        .collect::<Vec<_>>()
        .join(", ");
    Ok((EXIT_OK, format!("eventual-time: {summary}")))
}

#[derive(Serialize)]
struct BernsteinSummary {
    multiplier: String,
    sups: Vec<f64>,
    /// `(max − min)/mean` of the per-seed suprema.
    spread: f64,
    sweeps: Vec<crate::spectral::BernsteinSweep>,
}

fn bernstein(
    ctx: &mut Ctx,
    b: &BernsteinConfig,
    base: &Path,
    seed: Option<u64>,
) -> Result<(i32, String)> {
    let seeds = match seed {
        Some(s) => vec![s],
        None => b.seeds.clone(),
    };
    if seeds.is_empty() || b.multipliers.is_empty() {
        return Err(Error::Config(
            "bernstein needs at least one multiplier and one seed".into(),
        ));
    }
    let mut out = Vec::new();
    for mc in &b.multipliers {
        let m = mc.build(base)?;
        let sweeps = seeds
            .iter()
            .map(|&s| bernstein_sweep(&m, b.j_lo, b.j_hi, b.n, b.samples, s))
            .collect::<Result<Vec<_>>>()?;
        let sups: Vec<f64> = sweeps.iter().map(|s| s.sup).collect();
        let (lo, hi) = sups
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, c), &x| {
                (a.min(x), c.max(x))
            });
        let mean = sups.iter().sum::<f64>() / sups.len() as f64;
        out.push(BernsteinSummary {
            multiplier: m.kind_name().into(),
            sups,
            spread: (hi - lo) / mean,
            sweeps,
        });
    }
    ctx.json("bernstein.json", &out)?;
    let s = out
        .iter()
        .map(|o| {
            format!(
                "{} sup {:.4} (spread {:.2e})",
                o.multiplier, o.sups[0], o.spread
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    Ok((EXIT_OK, format!("bernstein: {s}")))
}

fn moduli_eval(
    ctx: &mut Ctx,
    mc: &ModulusConfig,
    xi: &[f64],
    base: &Path,
) -> Result<(i32, String)> {
    let mut csv = String::from("xi,omega,slope_left,slope_right,curvature\n");
    let mut row = |w: &dyn Modulus<f64>, x: f64| -> Result<()> {
        csv.push_str(&format!(
            "{x:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
            w.value(x)?,
            w.slope(x, Side::Left)?,
            w.slope(x, Side::Right)?,
            w.curvature(x)?
        ));
        Ok(())
    };
    match mc {
        ModulusConfig::Stationary {
            multiplier,
            variant,
            kappa,
            gamma,
            delta,
            sigma,
            cap,
        } => {
            let m = Arc::new(multiplier.build(base)?);
            let cap = match variant {
                StationaryVariantConfig::HolderLog => None,
                StationaryVariantConfig::Capped => {
                    Some(cap.ok_or_else(|| Error::Config("the capped variant needs cap".into()))?)
                }
            };
            let w = holder_base(m, *kappa, *gamma, *delta, *sigma, cap)?;
            for &x in xi {
                row(&w, x)?;
            }
        }
        ModulusConfig::Appendix {
            delta,
            lambda,
            alpha,
            beta,
        } => {
            let w = StationaryModulus::appendix(*delta, *lambda, *alpha, *beta)?;
            for &x in xi {
                row(&w, x)?;
            }
        }
        ModulusConfig::Family {
            multiplier,
            kappa,
            gamma,
            delta,
            sigma,
            cap,
            variant,
            a0,
            rho,
            beta,
            xi0,
        } => {
            let m = Arc::new(multiplier.build(base)?);
            let fam = TimeDependentModulus::new(
                holder_base(m, *kappa, *gamma, *delta, *sigma, *cap)?,
                *a0,
                *rho,
                *beta,
                *variant,
            )?;
            let s = fam.slice(*xi0)?;
            for &x in xi {
                row(&s, x)?;
            }
        }
    }
    ctx.text("moduli.csv", &csv)?;
    Ok((EXIT_OK, format!("moduli-eval: {} points", xi.len())))
}

fn track(ctx: &mut Ctx, t: &TrackConfig, base: &Path, seed: Option<u64>) -> Result<(i32, String)> {
    let sim = t.simulation.build(base, seed)?;
    let k = t.constants.build()?;
    let m = Arc::new(sim.multiplier.clone());
    if k.beta != sim.beta {
        return Err(Error::Config(
            "constants.beta and simulation.beta differ".into(),
        ));
    }
    let fam = build_family(&t.family, &k, m)?;
    let mut solver = Solver::new(sim)?;
    let rep = modulus_track(&mut solver, &fam, t.t_offset, t.c_beta, &t.radii)?;
    ctx.json("track.json", &rep)?;
    write_diagnostics_csv(&rep.trace, &ctx.dir.join("diagnostics.csv"))?;
    ctx.manifest.record(ctx.dir, "diagnostics.csv")?;
    let summary = format!("modulus-track: {}", rep.summary());
    let code = if rep.blow_up_at.is_some() {
        EXIT_BLOW_UP
    } else {
        match rep.outcome {
            TrackOutcome::Preserved { .. } => EXIT_OK,
            TrackOutcome::Breakdown { .. } => EXIT_FAIL,
            TrackOutcome::Refused { .. } => EXIT_NOT_GUARANTEED,
        }
    };
    Ok((code, summary))
}

/// Writes `summary` and the exit status line used by the CLI.
pub fn print_outcome(o: &RunOutcome, out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "{}", o.summary)?;
    writeln!(out, "outputs in {} (exit {})", o.dir.display(), o.exit_code)
}
