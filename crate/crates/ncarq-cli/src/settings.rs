//! Layered run settings: built-in defaults, then the optional key=value
//! config file, then command-line flags (flags win).

use ncarq::{FrameConfig, LinkProfile, SchemeId, TruncationPolicy};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 1;
/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "NCARQ_OUT_DIR";

/// Shared command-line options; every field may also appear as a config key
/// of the same name.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct CommonOpts {
    /// Optional key=value config file ('#' starts a comment); flags override it.
    pub config: Option<PathBuf>,
    /// PT->PR loss probability.
    #[arg(long)]
    pub p1: Option<f64>,
    /// ST->SR loss probability.
    #[arg(long)]
    pub p2: Option<f64>,
    /// PT->SR loss probability.
    #[arg(long)]
    pub p12: Option<f64>,
    /// ST->PR loss probability.
    #[arg(long)]
    pub p21: Option<f64>,
    /// PT->ST loss probability.
    #[arg(long)]
    pub q: Option<f64>,
    /// Primary packets per frame.
    #[arg(long)]
    pub np: Option<u32>,
    /// Secondary packets per frame.
    #[arg(long)]
    pub ns: Option<u32>,
    /// Frame cap in resource units; omit (or `inf`) for adaptive frames.
    #[arg(long)]
    pub cap: Option<String>,
    /// Target outage probability for sizing.
    #[arg(long)]
    pub pout: Option<f64>,
    /// Schemes to run (repeatable or comma-separated); default all three.
    #[arg(long, value_delimiter = ',')]
    pub scheme: Vec<String>,
    /// Monte Carlo trials; 0 means analysis only.
    #[arg(long)]
    pub trials: Option<u64>,
    /// Base seed for the per-trial random streams.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output CSV path; stdout when omitted. Relative paths are resolved
    /// against $NCARQ_OUT_DIR when it is set.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Swept field for `sweep`: one of p1, p2, p12, p21, q, np, ns, cap.
    #[arg(long)]
    pub varying: Option<String>,
    /// Sweep range start.
    #[arg(long)]
    pub start: Option<f64>,
    /// Sweep range stop (inclusive).
    #[arg(long)]
    pub stop: Option<f64>,
    /// Sweep range step.
    #[arg(long)]
    pub step: Option<f64>,
}

/// Config-layer parse failure; always maps to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl core::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

/// Fully resolved settings.
#[derive(Debug, Clone)]
pub struct Settings {
    pub p1: Option<f64>,
    pub p2: Option<f64>,
    pub p12: Option<f64>,
    pub p21: Option<f64>,
    pub q: Option<f64>,
    pub np: Option<u32>,
    pub ns: Option<u32>,
    pub cap: Option<u64>,
    pub pout: Option<f64>,
    pub schemes: Vec<SchemeId>,
    pub trials: u64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub varying: Option<String>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub step: Option<f64>,
}

pub fn parse_config_file(path: &Path) -> Result<BTreeMap<String, String>, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| err(format!("cannot read config `{}`: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("line {}: expected key=value, got `{raw}`", idx + 1)))?;
        let key = key.trim().to_ascii_lowercase();
        let value = value.trim().to_string();
        if value.is_empty() {
            return Err(err(format!("line {}: empty value for key `{key}`", idx + 1)));
        }
        map.insert(key, value);
    }
    Ok(map)
}

fn parse_field<T: core::str::FromStr>(
    file: &BTreeMap<String, String>,
    key: &str,
) -> Result<Option<T>, ConfigError>
where
    T::Err: core::fmt::Display,
{
    match file.get(key) {
        None => Ok(None),
        Some(v) => v
            .parse::<T>()
            .map(Some)
            .map_err(|e| err(format!("config key `{key}`: cannot parse `{v}`: {e}"))),
    }
}

fn parse_cap(value: &str) -> Result<Option<u64>, ConfigError> {
    if value.eq_ignore_ascii_case("inf") || value.eq_ignore_ascii_case("none") {
        return Ok(None);
    }
    value
        .parse::<u64>()
        .map(Some)
        .map_err(|e| err(format!("cap: cannot parse `{value}`: {e}")))
}

/// Merge defaults, config file and flags into one settings value.
pub fn resolve(opts: &CommonOpts) -> Result<Settings, ConfigError> {
    let file = match &opts.config {
        Some(path) => parse_config_file(path)?,
        None => BTreeMap::new(),
    };
    for key in file.keys() {
        const KNOWN: [&str; 17] = [
            "p1", "p2", "p12", "p21", "q", "np", "ns", "cap", "pout", "scheme", "trials",
            "seed", "out", "varying", "start", "stop", "step",
        ];
        if !KNOWN.contains(&key.as_str()) {
            return Err(err(format!("config key `{key}` is not recognised")));
        }
    }

    let cap = match &opts.cap {
        Some(v) => parse_cap(v)?,
        None => match file.get("cap") {
            Some(v) => parse_cap(v)?,
            None => None,
        },
    };
    let scheme_names: Vec<String> = if !opts.scheme.is_empty() {
        opts.scheme.clone()
    } else if let Some(v) = file.get("scheme") {
        v.split(',').map(|s| s.trim().to_string()).collect()
    } else {
        vec!["ARQ".into(), "SNC".into(), "ANC".into()]
    };
    let mut schemes = Vec::new();
    for name in &scheme_names {
        schemes.push(name.parse::<SchemeId>().map_err(err)?);
    }

    Ok(Settings {
        p1: opts.p1.or(parse_field(&file, "p1")?),
        p2: opts.p2.or(parse_field(&file, "p2")?),
        p12: opts.p12.or(parse_field(&file, "p12")?),
        p21: opts.p21.or(parse_field(&file, "p21")?),
        q: opts.q.or(parse_field(&file, "q")?),
        np: opts.np.or(parse_field(&file, "np")?),
        ns: opts.ns.or(parse_field(&file, "ns")?),
        cap,
        pout: opts.pout.or(parse_field(&file, "pout")?),
        schemes,
        trials: opts.trials.or(parse_field(&file, "trials")?).unwrap_or(DEFAULT_TRIALS),
        seed: opts.seed.or(parse_field(&file, "seed")?).unwrap_or(DEFAULT_SEED),
        out: opts.out.clone().or_else(|| file.get("out").map(PathBuf::from)),
        varying: opts.varying.clone().or_else(|| file.get("varying").cloned()),
        start: opts.start.or(parse_field(&file, "start")?),
        stop: opts.stop.or(parse_field(&file, "stop")?),
        step: opts.step.or(parse_field(&file, "step")?),
    })
}

impl Settings {
    pub fn profile(&self) -> Result<LinkProfile, ConfigError> {
        let get = |name: &str, v: Option<f64>| {
            v.ok_or_else(|| err(format!("missing link probability `{name}` (flag --{name} or config key)")))
        };
        Ok(LinkProfile::new(
            get("p1", self.p1)?,
            get("p2", self.p2)?,
            get("p12", self.p12)?,
            get("p21", self.p21)?,
            get("q", self.q)?,
        ))
    }

    pub fn frame_config(&self) -> Result<FrameConfig, ConfigError> {
        let np = self.np.ok_or_else(|| err("missing packet count `np`"))?;
        let ns = self.ns.ok_or_else(|| err("missing packet count `ns`"))?;
        FrameConfig::new(np, ns).map_err(|e| err(e.to_string()))
    }

    pub fn policy(&self) -> Result<TruncationPolicy, ConfigError> {
        let base = match self.cap {
            Some(cap) => TruncationPolicy::capped(cap),
            None => TruncationPolicy::unbounded(),
        };
        match self.pout {
            Some(t) => base.with_target_outage(t).map_err(|e| err(e.to_string())),
            None => Ok(base),
        }
    }

    /// Resolve the output path against $NCARQ_OUT_DIR for relative paths.
    pub fn out_path(&self) -> Option<PathBuf> {
        let out = self.out.clone()?;
        if out.is_relative() {
            if let Ok(dir) = std::env::var(OUT_DIR_ENV) {
                if !dir.is_empty() {
                    return Some(PathBuf::from(dir).join(out));
                }
            }
        }
        Some(out)
    }
}
