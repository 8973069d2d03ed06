//! Run configuration: a flat TOML document, overridden key by key by
//! command-line flags.
//!
//! ```toml
//! input = ["NASDAQ=data/nasdaq.csv"]   # relative to this file
//! tau = 1
//! p = [5, 10, 15, 20, 30]
//! n_max = 240
//! max_lag = 100
//! bins = 50
//! seed = 42
//! experiment = ["all"]
//! outdir = "volclust-out"
//! overwrite = false
//! run_id = "nasdaq-full"               # optional
//! ```

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

/// Default output root when neither config nor flags name one.
pub const OUTDIR_ENV: &str = "VOLCLUST_OUTDIR";
pub const DEFAULT_OUTDIR: &str = "volclust-out";
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_P_LIST: [f64; 5] = [5.0, 10.0, 15.0, 20.0, 30.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Pdf,
    Acf,
    Rearranged,
    Binarized,
    Swap,
    Windowdist,
    Index,
    SmallestIndex,
    Asymmetry,
    Transitions,
    SignedTransitions,
}

impl Experiment {
    pub const ALL: [Experiment; 11] = [
        Experiment::Pdf,
        Experiment::Acf,
        Experiment::Rearranged,
        Experiment::Binarized,
        Experiment::Swap,
        Experiment::Windowdist,
        Experiment::Index,
        Experiment::SmallestIndex,
        Experiment::Asymmetry,
        Experiment::Transitions,
        Experiment::SignedTransitions,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Pdf => "pdf",
            Experiment::Acf => "acf",
            Experiment::Rearranged => "rearranged",
            Experiment::Binarized => "binarized",
            Experiment::Swap => "swap",
            Experiment::Windowdist => "windowdist",
            Experiment::Index => "index",
            Experiment::SmallestIndex => "smallest_index",
            Experiment::Asymmetry => "asymmetry",
            Experiment::Transitions => "transitions",
            Experiment::SignedTransitions => "signed_transitions",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Expands a list of experiment names (`all` included) into a set.
pub fn parse_experiments<S: AsRef<str>>(names: &[S]) -> Result<BTreeSet<Experiment>> {
    let mut set = BTreeSet::new();
    for name in names {
        let name = name.as_ref().trim();
        if name == "all" {
            set.extend(Experiment::ALL);
            continue;
        }
        match Experiment::ALL.iter().find(|e| e.name() == name) {
            Some(e) => {
                set.insert(*e);
            }
            None => bail!("unknown experiment `{name}`"),
        }
    }
    Ok(set)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputSpec {
    pub symbol: String,
    pub path: PathBuf,
}

impl FromStr for InputSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let Some((symbol, path)) = s.split_once('=') else {
            bail!("input `{s}` is not of the form SYMBOL=path");
        };
        let symbol = symbol.trim();
        if symbol.is_empty()
            || !symbol
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
            || symbol.starts_with('.')
        {
            bail!("symbol `{symbol}` may only use letters, digits, `_`, `-` and `.`");
        }
        if path.trim().is_empty() {
            bail!("input `{s}` has an empty path");
        }
        Ok(InputSpec {
            symbol: symbol.to_string(),
            path: PathBuf::from(path.trim()),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub inputs: Vec<InputSpec>,
    pub tau: usize,
    pub p_list: Vec<f64>,
    pub n_max: usize,
    pub max_lag: usize,
    pub bins: usize,
    pub seed: u64,
    pub experiments: BTreeSet<Experiment>,
    pub outdir: PathBuf,
    pub overwrite: bool,
    pub run_id: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            inputs: Vec::new(),
            tau: 1,
            p_list: DEFAULT_P_LIST.to_vec(),
            n_max: volclust::cluster::DEFAULT_N_MAX,
            max_lag: volclust::stats::DEFAULT_MAX_LAG,
            bins: 50,
            seed: DEFAULT_SEED,
            experiments: BTreeSet::new(),
            outdir: default_outdir(),
            overwrite: false,
            run_id: None,
        }
    }
}

fn default_outdir() -> PathBuf {
    std::env::var_os(OUTDIR_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTDIR))
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.inputs.is_empty() {
            bail!("no inputs given");
        }
        let mut symbols = BTreeSet::new();
        for input in &self.inputs {
            if !symbols.insert(input.symbol.as_str()) {
                bail!("symbol `{}` given twice", input.symbol);
            }
        }
        for (name, v) in [
            ("tau", self.tau),
            ("n_max", self.n_max),
            ("max_lag", self.max_lag),
            ("bins", self.bins),
        ] {
            if v == 0 {
                bail!("{name} must be positive");
            }
        }
        if self.bins < 2 {
            bail!("bins must be at least 2");
        }
        if self.p_list.is_empty() {
            bail!("p list is empty");
        }
        let mut seen = BTreeSet::new();
        for &p in &self.p_list {
            if !(p > 0.0 && p <= 50.0) {
                bail!("p = {p} outside (0, 50]");
            }
            if !seen.insert(p.to_bits()) {
                bail!("p = {p} listed twice");
            }
        }
        if self.experiments.is_empty() {
            bail!("no experiments selected");
        }
        Ok(())
    }
}

/// Keys of the config file. Everything is optional so a file can carry any
/// subset and flags fill in the rest.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub input: Option<Vec<String>>,
    pub tau: Option<usize>,
    pub p: Option<Vec<f64>>,
    pub n_max: Option<usize>,
    pub max_lag: Option<usize>,
    pub bins: Option<usize>,
    pub seed: Option<u64>,
    pub experiment: Option<Vec<String>>,
    pub outdir: Option<PathBuf>,
    pub overwrite: Option<bool>,
    pub run_id: Option<String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// Builds a config from this file; relative input paths are resolved
    /// against `base` (the config file's directory).
    pub fn into_config(self, base: &Path) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(inputs) = self.input {
            cfg.inputs = inputs
                .iter()
                .map(|s| {
                    let mut spec: InputSpec = s.parse()?;
                    if spec.path.is_relative() {
                        spec.path = base.join(&spec.path);
                    }
                    Ok(spec)
                })
                .collect::<Result<_>>()?;
        }
        if let Some(v) = self.tau {
            cfg.tau = v;
        }
        if let Some(v) = self.p {
            cfg.p_list = v;
        }
        if let Some(v) = self.n_max {
            cfg.n_max = v;
        }
        if let Some(v) = self.max_lag {
            cfg.max_lag = v;
        }
        if let Some(v) = self.bins {
            cfg.bins = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.experiment {
            cfg.experiments = parse_experiments(&v)?;
        }
        if let Some(v) = self.outdir {
            cfg.outdir = v;
        }
        if let Some(v) = self.overwrite {
            cfg.overwrite = v;
        }
        cfg.run_id = self.run_id;
        Ok(cfg)
    }
}
