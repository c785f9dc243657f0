//! JSON run configurations, one document per run with a `kind` discriminator.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::certifier::estimate_c1;
use crate::error::Error;
use crate::moduli::{AdmissibleConstants, FamilyVariant};
use crate::multiplier::{MultiplierSpec, Table};
use crate::spectral::{InitialData, Integrator, SimConfig};
use crate::Result;

fn config_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MultiplierKindConfig {
    Identity,
    Power {
        a: f64,
    },
    PowerLog {
        a: f64,
        shift: f64,
        alpha: f64,
    },
    LogPower {
        mu: f64,
        base_shift: f64,
        alpha: f64,
        b3: f64,
    },
    Tabulated {
        csv: PathBuf,
        alpha: f64,
        lambda_low: f64,
    },
}

/// Unknown keys are rejected by the flattened kind.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplierConfig {
    #[serde(flatten)]
    pub kind: MultiplierKindConfig,
    /// Overrides `(b0, b1, b2, b3)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strict: Option<bool>,
}

impl MultiplierConfig {
    pub fn power(a: f64) -> Self {
        Self {
            kind: MultiplierKindConfig::Power { a },
            constants: None,
            strict: None,
        }
    }

    /// Relative table paths resolve against `base`.
    pub fn build(&self, base: &Path) -> Result<MultiplierSpec<f64>> {
        let mut m = match &self.kind {
            MultiplierKindConfig::Identity => MultiplierSpec::identity(),
            MultiplierKindConfig::Power { a } => MultiplierSpec::power(*a),
            MultiplierKindConfig::PowerLog { a, shift, alpha } => {
                MultiplierSpec::power_log(*a, *shift, *alpha)
            }
            MultiplierKindConfig::LogPower {
                mu,
                base_shift,
                alpha,
                b3,
            } => MultiplierSpec::log_power(*mu, *base_shift, *alpha, *b3),
            MultiplierKindConfig::Tabulated {
                csv,
                alpha,
                lambda_low,
            } => MultiplierSpec::tabulated(Table::from_csv(&base.join(csv))?, *alpha, *lambda_low),
        };
        if let Some([b0, b1, b2, b3]) = self.constants {
            m = m.with_constants(b0, b1, b2, b3);
        }
        if let Some(s) = self.strict {
            m = m.with_strict(s);
        }
        Ok(m)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialDataConfig {
    SingleMode {
        k: [i64; 2],
        amp: f64,
    },
    RandomBand {
        j_lo: u32,
        j_hi: u32,
        seed: u64,
        amp: f64,
    },
    /// A snapshot written by a previous run.
    File {
        path: PathBuf,
    },
}

fn default_l() -> f64 {
    2.0 * std::f64::consts::PI
}

fn default_integrator() -> Integrator {
    Integrator::Etdrk4
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub n: usize,
    #[serde(default = "default_l")]
    pub l: f64,
    pub beta: f64,
    pub nu: f64,
    #[serde(default)]
    pub epsilon: f64,
    pub multiplier: MultiplierConfig,
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "default_integrator")]
    pub integrator: Integrator,
    pub initial_data: InitialDataConfig,
    /// Steps between diagnostics rows (0: first and last only).
    #[serde(default)]
    pub output_every: usize,
    /// Write a snapshot with every diagnostics row.
    #[serde(default)]
    pub snapshots: bool,
    #[serde(default = "default_true")]
    pub transport: bool,
    /// Radii for the empirical modulus, computed at every output when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus_radii: Option<Vec<f64>>,
}

impl SimulateConfig {
    /// `seed` replaces the random-band seed when given.
    pub fn build(&self, base: &Path, seed: Option<u64>) -> Result<SimConfig<f64>> {
        let initial = match &self.initial_data {
            InitialDataConfig::SingleMode { k, amp } => {
                InitialData::SingleMode { k: *k, amp: *amp }
            }
            InitialDataConfig::RandomBand {
                j_lo,
                j_hi,
                seed: s,
                amp,
            } => InitialData::RandomBand {
                j_lo: *j_lo,
                j_hi: *j_hi,
                seed: seed.unwrap_or(*s),
                amp: *amp,
            },
            InitialDataConfig::File { path } => {
                let snap = crate::spectral::snapshot::read_snapshot(&base.join(path))?;
                if snap.nx != self.n || snap.ny != self.n {
                    return config_err(format!(
                        "snapshot is {}×{}, config has n = {}",
                        snap.nx, snap.ny, self.n
                    ));
                }
                InitialData::Physical(snap.data)
            }
        };
        let cfg = SimConfig {
            n: self.n,
            l: self.l,
            beta: self.beta,
            nu: self.nu,
            epsilon: self.epsilon,
            multiplier: self.multiplier.build(base)?,
            dt: self.dt,
            t_end: self.t_end,
            integrator: self.integrator,
            initial,
            output_every: self.output_every,
            transport: self.transport,
        };
        cfg.validate()
            .map_err(|e| Error::Config(format!("simulate: {e}")))?;
        Ok(cfg)
    }
}

/// Absolute constants; `c1` defaults to the stable-kernel constant at β.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsConfig {
    pub alpha: f64,
    pub beta: f64,
    pub sigma: f64,
    #[serde(default = "one")]
    pub c0: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,
    #[serde(default = "one")]
    pub c: f64,
}

fn one() -> f64 {
    1.0
}

impl ConstantsConfig {
    pub fn build(&self) -> Result<AdmissibleConstants<f64>> {
        let c1 = match self.c1 {
            Some(c) => c,
            None => estimate_c1(self.beta)?.value,
        };
        AdmissibleConstants::compute(self.c0, c1, self.c, self.alpha, self.beta, self.sigma)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StationaryVariantConfig {
    HolderLog,
    Capped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StationaryModulusConfig {
    pub variant: StationaryVariantConfig,
    /// Defaults to the solved admissible values.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    pub delta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyConfig {
    pub variant: FamilyVariant,
    pub a0: f64,
    /// Defaults to `A₀/4^{1/α}`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Required for the log-supercritical variant.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum CertificateConfig {
    Stationary {
        constants: ConstantsConfig,
        multiplier: MultiplierConfig,
        modulus: StationaryModulusConfig,
        /// `lo` is a multiple of δ.
        grid: GridConfig,
        #[serde(default)]
        precision_check: bool,
    },
    TimeDependent {
        constants: ConstantsConfig,
        multiplier: MultiplierConfig,
        family: FamilyConfig,
        #[serde(default)]
        epsilon: f64,
        /// `lo` is a multiple of δ; `hi` is capped at `A₀`.
        xi_grid: GridConfig,
        xi0_grid: GridConfig,
    },
    Appendix {
        delta: f64,
        alpha: f64,
        beta: f64,
        epsilon: f64,
        multiplier: MultiplierConfig,
        #[serde(default = "one")]
        c: f64,
        points: usize,
        /// Also bisect for the largest passing δ.
        #[serde(default)]
        search_delta: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphaSweepConfig {
    pub alphas: Vec<f64>,
    pub beta: f64,
    pub t_prime: f64,
    pub theta0_l2: f64,
    pub gamma: f64,
    pub rho: f64,
    #[serde(default = "one")]
    pub c_beta: f64,
    #[serde(default = "one")]
    pub m_at_1: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BetaSweepConfig {
    pub betas: Vec<f64>,
    pub theta0_linf: f64,
    #[serde(default = "one")]
    pub c0: f64,
    #[serde(default = "one")]
    pub m_at_1: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BernsteinConfig {
    pub multipliers: Vec<MultiplierConfig>,
    pub j_lo: u32,
    pub j_hi: u32,
    pub n: usize,
    pub samples: usize,
    pub seeds: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModulusConfig {
    Stationary {
        multiplier: MultiplierConfig,
        variant: StationaryVariantConfig,
        kappa: f64,
        gamma: f64,
        delta: f64,
        sigma: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cap: Option<f64>,
    },
    Appendix {
        delta: f64,
        lambda: f64,
        alpha: f64,
        beta: f64,
    },
    Family {
        multiplier: MultiplierConfig,
        kappa: f64,
        gamma: f64,
        delta: f64,
        sigma: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cap: Option<f64>,
        variant: FamilyVariant,
        a0: f64,
        rho: f64,
        beta: f64,
        xi0: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrackConfig {
    pub simulation: SimulateConfig,
    pub constants: ConstantsConfig,
    pub family: FamilyConfig,
    /// Plays the role of `t′`.
    pub t_offset: f64,
    /// `C_β` of the L∞ smoothing bound used in the entry condition.
    #[serde(default = "one")]
    pub c_beta: f64,
    pub radii: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RunConfig {
    Simulate(SimulateConfig),
    Certify {
        certificate: CertificateConfig,
    },
    Constants(ConstantsConfig),
    EventualTime {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alpha_sweep: Option<AlphaSweepConfig>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        beta_sweep: Option<BetaSweepConfig>,
    },
    Bernstein(BernsteinConfig),
    ModuliEval {
        modulus: ModulusConfig,
        xi: Vec<f64>,
    },
    ModulusTrack(TrackConfig),
}

impl RunConfig {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Simulate(_) => "simulate",
            Self::Certify { .. } => "certify",
            Self::Constants(_) => "constants",
            Self::EventualTime { .. } => "eventual-time",
            Self::Bernstein(_) => "bernstein",
            Self::ModuliEval { .. } => "moduli-eval",
            Self::ModulusTrack(_) => "modulus-track",
        }
    }

    /// Parses a document, reporting the JSON path of the first schema violation.
    pub fn parse(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            Error::Config(
                diagnose(text).unwrap_or_else(|| format!("at `{}`: {}", e.path(), e.inner())),
            )
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

fn probe<T: serde::de::DeserializeOwned>(prefix: &str, v: serde_json::Value) -> Option<String> {
    serde_path_to_error::deserialize::<_, T>(v).err().map(|e| {
        let path = e.path().to_string();
        let path = match (prefix, path.as_str()) {
            ("", p) => p.to_owned(),
            (pre, ".") => pre.to_owned(),
            (pre, p) => format!("{pre}.{p}"),
        };
        format!("at `{path}`: {}", e.inner())
    })
}

/// Internally tagged enums buffer their content, which hides the failing
/// field from the path tracker; re-parse the payload of the declared kind
/// on its own to recover it.
fn diagnose(text: &str) -> Option<String> {
    let serde_json::Value::Object(mut obj) = serde_json::from_str(text).ok()? else {
        return None;
    };
    let kind = obj.remove("kind")?.as_str()?.to_owned();
    let field = |k: &str| obj.get(k).cloned();
    match kind.as_str() {
        "simulate" => probe::<SimulateConfig>("", serde_json::Value::Object(obj.clone())),
        "constants" => probe::<ConstantsConfig>("", serde_json::Value::Object(obj.clone())),
        "bernstein" => probe::<BernsteinConfig>("", serde_json::Value::Object(obj.clone())),
        "modulus-track" => probe::<TrackConfig>("", serde_json::Value::Object(obj.clone())),
        "certify" => probe::<CertificateConfig>("certificate", field("certificate")?),
        "moduli-eval" => probe::<ModulusConfig>("modulus", field("modulus")?),
        "eventual-time" => field("alpha_sweep")
            .and_then(|v| probe::<AlphaSweepConfig>("alpha_sweep", v))
            .or_else(|| {
                field("beta_sweep").and_then(|v| probe::<BetaSweepConfig>("beta_sweep", v))
            }),
        _ => None,
    }
}
