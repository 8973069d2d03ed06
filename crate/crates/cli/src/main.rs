use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use volclust_cli::{parse_experiments, run_analysis, ConfigFile, InputSpec, RunConfig};

/// Volatility-clustering analysis of daily closing-price series.
#[derive(Parser)]
#[command(name = "volclust", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run experiments on one or more price series and write plot data,
    /// tables, a summary and a manifest.
    Analyze(AnalyzeArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Flat TOML config; every key can be overridden by the same-named flag.
    #[arg(long)]
    config: Option<PathBuf>,
    /// SYMBOL=path of a `date,close` CSV. Repeatable.
    #[arg(long = "input", value_name = "SYMBOL=PATH")]
    inputs: Vec<InputSpec>,
    /// Return horizon in trading days.
    #[arg(long)]
    tau: Option<usize>,
    /// Comma-separated percentages in (0, 50].
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<f64>>,
    /// Largest moving-window size.
    #[arg(long)]
    n_max: Option<usize>,
    /// Largest autocorrelation lag.
    #[arg(long)]
    max_lag: Option<usize>,
    /// Histogram bins.
    #[arg(long)]
    bins: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated experiments, or `all`.
    #[arg(long = "experiment", value_delimiter = ',')]
    experiments: Option<Vec<String>>,
    /// Output root; defaults to $VOLCLUST_OUTDIR or ./volclust-out.
    #[arg(long)]
    outdir: Option<PathBuf>,
    /// Replace an existing run directory.
    #[arg(long)]
    overwrite: bool,
    /// Name of the run directory; derived from settings and inputs if omitted.
    #[arg(long)]
    run_id: Option<String>,
}

impl AnalyzeArgs {
    fn into_config(self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let base = path.parent().map(PathBuf::from).unwrap_or_default();
                ConfigFile::load(path)?.into_config(&base)?
            }
            None => RunConfig::default(),
        };
        if !self.inputs.is_empty() {
            cfg.inputs = self.inputs;
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
        if let Some(v) = self.experiments {
            cfg.experiments = parse_experiments(&v)?;
        }
        if let Some(v) = self.outdir {
            cfg.outdir = v;
        }
        if self.overwrite {
            cfg.overwrite = true;
        }
        if self.run_id.is_some() {
            cfg.run_id = self.run_id;
        }
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let Command::Analyze(args) = Cli::parse().command;
    let outcome = args.into_config().and_then(|cfg| run_analysis(&cfg));
    match outcome {
        Ok(outcome) => {
            println!(
                "{}: {} artifacts",
                outcome.run_dir.display(),
                outcome.manifest.artifacts.len()
            );
            if outcome.all_succeeded() {
                return ExitCode::SUCCESS;
            }
            for f in &outcome.manifest.failures {
                eprintln!("failed: {} / {}: {}", f.symbol, f.experiment, f.error);
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
