//! Orchestration of (series x experiment) cells.
//!
//! Each series is processed on its own thread; within a series the cells run
//! in a fixed order. A failing cell contributes no tables, only a failure
//! record. Seeds are derived per cell from the master seed and the label
//! `<symbol>/<purpose>`, so results do not depend on scheduling.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde_json::{json, Map, Value};
use volclust::asym::{
    asymmetry_profile, transition_matrix, transition_matrix_signed, TransitionMatrix,
};
use volclust::cluster::{clustering_profile, window_frequency, ClusteringProfile};
use volclust::ingest::{
    fmt_f64, parse_price_csv, sha256_hex, write_outputs, ArtifactKind, Failure, InputDigest,
    ResultManifest, ResultSet, Table, DATE_FORMAT,
};
use volclust::returns::{compute_returns, normalize_returns};
use volclust::rng::derive_seed;
use volclust::stats::{acf, histogram_pdf, rank_correlation, AcfSeries};
use volclust::surrogate::{binarize, gaussian_surrogate, rank_rearrange, shuffle, swap_extremes};
use volclust::{ReturnSeries, Which};

use crate::config::{Experiment, RunConfig};

/// Window used for the window-count frequency tables.
pub const WINDOWDIST_N: usize = 10;

/// Window sizes whose indices are copied into the summary.
const SUMMARY_WINDOWS: [usize; 6] = [1, 10, 20, 60, 120, 240];

#[derive(Debug)]
pub struct RunOutcome {
    pub run_dir: PathBuf,
    pub manifest: ResultManifest,
}

impl RunOutcome {
    pub fn all_succeeded(&self) -> bool {
        self.manifest.failures.is_empty()
    }
}

struct CellOutput {
    tables: Vec<Table>,
    summary: Value,
}

struct SeriesOutcome {
    symbol: String,
    digest: Option<InputDigest>,
    tables: Vec<Table>,
    summary: Map<String, Value>,
    failures: Vec<Failure>,
}

/// Runs every requested experiment on every input and writes the results.
///
/// Errors are returned only for problems that stop the run as a whole:
/// invalid configuration or an unwritable output directory. Per-series and
/// per-experiment problems are recorded in the manifest.
pub fn run_analysis(cfg: &RunConfig) -> Result<RunOutcome> {
    cfg.validate()?;

    let outcomes: Vec<SeriesOutcome> = std::thread::scope(|scope| {
        let handles: Vec<_> = cfg
            .inputs
            .iter()
            .map(|input| scope.spawn(move || run_series(cfg, &input.symbol, &input.path)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("series worker panicked"))
            .collect()
    });

    let mut results = ResultSet::default();
    let mut series_summary = Map::new();
    for outcome in outcomes {
        results.inputs.extend(outcome.digest);
        results.tables.extend(outcome.tables);
        results.failures.extend(outcome.failures);
        series_summary.insert(outcome.symbol, Value::Object(outcome.summary));
    }
    results.summary = Some(json!({
        "config": config_summary(cfg),
        "series": series_summary,
    }));

    let run_id = match &cfg.run_id {
        Some(id) => id.clone(),
        None => default_run_id(cfg, &results.inputs),
    };
    let manifest = write_outputs(&results, &cfg.outdir, &run_id, cfg.overwrite)
        .with_context(|| format!("writing results under {}", cfg.outdir.display()))?;
    Ok(RunOutcome {
        run_dir: cfg.outdir.join(&run_id),
        manifest,
    })
}

fn config_summary(cfg: &RunConfig) -> Value {
    json!({
        "tau": cfg.tau,
        "p": cfg.p_list,
        "n_max": cfg.n_max,
        "max_lag": cfg.max_lag,
        "bins": cfg.bins,
        "seed": cfg.seed,
        "experiments": cfg.experiments.iter().map(|e| e.name()).collect::<Vec<_>>(),
    })
}

/// `run-` plus 12 hex digits of a digest over the analysis settings and the
/// input contents. The output location plays no part.
fn default_run_id(cfg: &RunConfig, inputs: &[InputDigest]) -> String {
    let key = json!({
        "settings": config_summary(cfg),
        "inputs": inputs.iter().map(|i| (&i.symbol, &i.sha256)).collect::<Vec<_>>(),
        "symbols": cfg.inputs.iter().map(|i| &i.symbol).collect::<Vec<_>>(),
    });
    format!("run-{}", &sha256_hex(key.to_string().as_bytes())[..12])
}

fn run_series(cfg: &RunConfig, symbol: &str, path: &Path) -> SeriesOutcome {
    let mut outcome = SeriesOutcome {
        symbol: symbol.to_string(),
        digest: None,
        tables: Vec::new(),
        summary: Map::new(),
        failures: Vec::new(),
    };
    let fail_all = |outcome: &mut SeriesOutcome, stage: &str, err: String| {
        outcome.failures.push(Failure {
            symbol: symbol.to_string(),
            experiment: stage.to_string(),
            error: err,
        });
    };

    let bytes = match std::fs::read(path) {
        Ok(b) => b,
        Err(e) => {
            fail_all(&mut outcome, "ingest", format!("{}: {e}", path.display()));
            return outcome;
        }
    };
    outcome.digest = Some(InputDigest {
        symbol: symbol.to_string(),
        path: path.display().to_string(),
        sha256: sha256_hex(&bytes),
    });
    let returns = parse_price_csv(symbol, &bytes)
        .map_err(|e| ("ingest", format!("{}: {e}", path.display())))
        .and_then(|prices| compute_returns(&prices, cfg.tau).map_err(|e| ("returns", e.to_string())));
    let rs = match returns {
        Ok(rs) => rs,
        Err((stage, msg)) => {
            fail_all(&mut outcome, stage, msg);
            return outcome;
        }
    };

    outcome.summary.insert("n_returns".into(), json!(rs.len()));
    outcome.summary.insert("mu".into(), num(rs.mu()));
    outcome.summary.insert("sigma".into(), num(rs.sigma()));
    let mut experiments = Map::new();
    for &exp in &cfg.experiments {
        match run_cell(cfg, &rs, exp) {
            Ok(cell) => {
                outcome.tables.extend(cell.tables);
                experiments.insert(exp.name().into(), cell.summary);
            }
            Err(e) => outcome.failures.push(Failure {
                symbol: symbol.to_string(),
                experiment: exp.name().to_string(),
                error: format!("{e:#}"),
            }),
        }
    }
    outcome.summary.insert("experiments".into(), Value::Object(experiments));
    outcome
}

/// Finite numbers as JSON numbers, anything else as null.
fn num(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

fn p_tag(p: f64) -> String {
    format!("p{}", fmt_f64(p))
}

fn acf_table(name: String, acf: &AcfSeries) -> Table {
    let mut t = Table::new(name, ArtifactKind::Plotdata, &["lag", "acf"]);
    for (lag, v) in acf.values.iter().enumerate() {
        t.push_numbers(&[lag as f64, *v]);
    }
    t
}

fn acf_summary(acf: &AcfSeries) -> Value {
    json!({
        "lag1": num(acf.at(1)),
        "lag_max": num(acf.at(acf.max_lag())),
        "noise_band": num(acf.noise_band),
        "fraction_inside_band": num(acf.fraction_inside_band()),
    })
}

fn abs_acf(rs: &ReturnSeries, max_lag: usize) -> volclust::Result<AcfSeries> {
    acf(&rs.abs_values(), max_lag)
}

fn series_table(name: String, rs: &ReturnSeries) -> Table {
    let mut t = Table::new(name, ArtifactKind::Plotdata, &["date", "value"]);
    for (i, v) in rs.values().iter().enumerate() {
        let date = match rs.dates().get(i) {
            Some(d) => d.format(DATE_FORMAT).to_string(),
            None => i.to_string(),
        };
        t.push_row(vec![date, fmt_f64(*v)]);
    }
    t
}

fn profile_table(name: String, prof: &ClusteringProfile) -> Table {
    let mut t = Table::new(name, ArtifactKind::Plotdata, &["n", "sigma_e", "sigma_g", "r_n", "r_lim"]);
    for r in &prof.rows {
        t.push_numbers(&[r.n as f64, r.sigma_e, r.sigma_g, r.r_n, r.r_lim]);
    }
    t
}

fn profile_summary(prof: &ClusteringProfile) -> Value {
    let picks: Map<String, Value> = SUMMARY_WINDOWS
        .iter()
        .filter_map(|&n| prof.row(n).map(|r| (format!("r_{n}"), num(r.r_n))))
        .collect();
    Value::Object(picks)
}

fn transition_table(name: String, tm: &TransitionMatrix) -> Table {
    let mut columns = vec!["from"];
    columns.extend(tm.labels.iter().map(String::as_str));
    let mut t = Table::new(name, ArtifactKind::Table, &columns);
    for (label, row) in tm.labels.iter().zip(&tm.probs) {
        let mut cells = vec![label.clone()];
        cells.extend(row.iter().map(|&v| fmt_f64(v)));
        t.push_row(cells);
    }
    t
}

fn transition_summary(tm: &TransitionMatrix) -> Value {
    let rows: Map<String, Value> = tm
        .labels
        .iter()
        .zip(&tm.probs)
        .zip(&tm.support)
        .map(|((label, row), support)| {
            (label.clone(), json!({ "probs": row, "support": support }))
        })
        .collect();
    Value::Object(rows)
}

fn run_cell(cfg: &RunConfig, rs: &ReturnSeries, exp: Experiment) -> Result<CellOutput> {
    let sym = rs.symbol();
    let seed = |purpose: &str| derive_seed(cfg.seed, &format!("{sym}/{purpose}"));
    let mut tables = Vec::new();
    let mut summary = Map::new();

    match exp {
        Experiment::Pdf => {
            let z = normalize_returns(rs)?;
            let h = histogram_pdf(&z, cfg.bins)?;
            let mut t = Table::new(
                format!("{sym}_pdf"),
                ArtifactKind::Plotdata,
                &["bin_center", "density", "reference"],
            );
            for b in 0..h.bins() {
                t.push_numbers(&[h.center(b), h.densities[b], h.reference[b]]);
            }
            tables.push(t);
            summary.insert("min_z".into(), num(h.bin_edges[0]));
            summary.insert("max_z".into(), num(h.bin_edges[h.bins()]));
            summary.insert("mass".into(), num(h.total_mass()));
        }
        Experiment::Acf => {
            let plain = acf(rs.values(), cfg.max_lag)?;
            let abs = abs_acf(rs, cfg.max_lag)?;
            tables.push(acf_table(format!("{sym}_acf_returns"), &plain));
            tables.push(acf_table(format!("{sym}_acf_abs"), &abs));
            summary.insert("returns".into(), acf_summary(&plain));
            summary.insert("abs_returns".into(), acf_summary(&abs));
        }
        Experiment::Rearranged => {
            let empirical = abs_acf(rs, cfg.max_lag)?;
            let gaussian = gaussian_surrogate(rs, seed("gaussian"))?;
            let rearranged = rank_rearrange(rs, &gaussian)?;
            let shuffled = shuffle(rs, seed("shuffle"));
            let g = abs_acf(&gaussian, cfg.max_lag)?;
            let r = abs_acf(&rearranged, cfg.max_lag)?;
            let s = abs_acf(&shuffled, cfg.max_lag)?;
            let rho = rank_correlation(&empirical.values[1..], &r.values[1..]).ok();
            tables.push(acf_table(format!("{sym}_acf_abs_rearranged"), &r));
            tables.push(acf_table(format!("{sym}_acf_abs_gaussian"), &g));
            tables.push(acf_table(format!("{sym}_acf_abs_shuffled"), &s));
            summary.insert("rank_correlation_empirical_vs_rearranged".into(), rho.map_or(Value::Null, num));
            summary.insert("rearranged".into(), acf_summary(&r));
            summary.insert("gaussian".into(), acf_summary(&g));
            summary.insert("shuffled".into(), acf_summary(&s));
        }
        Experiment::Binarized => {
            for &p in &cfg.p_list {
                let ind = binarize(rs, p, Which::Largest)?;
                let a = acf(&ind.as_f64(), cfg.max_lag)?;
                tables.push(acf_table(format!("{sym}_acf_binarized_{}", p_tag(p)), &a));
                summary.insert(p_tag(p), acf_summary(&a));
            }
        }
        Experiment::Swap => {
            for &p in &cfg.p_list {
                let swapped = swap_extremes(rs, p)?;
                let a = abs_acf(&swapped, cfg.max_lag)?;
                tables.push(series_table(format!("{sym}_swapped_{}_series", p_tag(p)), &swapped));
                tables.push(acf_table(format!("{sym}_acf_abs_swapped_{}", p_tag(p)), &a));
                summary.insert(p_tag(p), acf_summary(&a));
            }
        }
        Experiment::Windowdist => {
            let n = WINDOWDIST_N.min(rs.len());
            for &p in &cfg.p_list {
                let ind = binarize(rs, p, Which::Largest)?;
                let freq = window_frequency(&ind, n)?;
                let mut t = Table::new(
                    format!("{sym}_windowdist_{}_n{n}", p_tag(p)),
                    ArtifactKind::Plotdata,
                    &["m", "count", "binomial_reference"],
                );
                for (m, (&c, &b)) in freq.counts.iter().zip(&freq.binomial_reference).enumerate() {
                    t.push_numbers(&[m as f64, c as f64, b]);
                }
                tables.push(t);
                let row = volclust::cluster::clustering_profile_of(&ind, p, Which::Largest, n)?;
                let last = row.rows[n - 1];
                summary.insert(
                    p_tag(p),
                    json!({ "n": n, "sigma_e": num(last.sigma_e), "sigma_g": num(last.sigma_g), "r_n": num(last.r_n) }),
                );
            }
        }
        Experiment::Index | Experiment::SmallestIndex => {
            let which = if exp == Experiment::Index { Which::Largest } else { Which::Smallest };
            for &p in &cfg.p_list {
                let prof = clustering_profile(rs, p, cfg.n_max, which)?;
                tables.push(profile_table(format!("{sym}_index_{}_{}", which.as_str(), p_tag(p)), &prof));
                summary.insert(p_tag(p), profile_summary(&prof));
            }
        }
        Experiment::Asymmetry => {
            for &p in &cfg.p_list {
                let prof = asymmetry_profile(rs, p, cfg.n_max)?;
                let mut t = Table::new(
                    format!("{sym}_asymmetry_{}", p_tag(p)),
                    ArtifactKind::Plotdata,
                    &["n", "a_ls", "a_pm", "r_l", "r_s", "r_plus", "r_minus"],
                );
                for r in &prof.rows {
                    t.push_numbers(&[r.n as f64, r.a_ls, r.a_pm, r.r_l, r.r_s, r.r_plus, r.r_minus]);
                }
                tables.push(t);
                let beyond_one = &prof.rows[1.min(prof.rows.len() - 1)..];
                let count = |f: &dyn Fn(&volclust::AsymmetryRow) -> bool| beyond_one.iter().filter(|r| f(r)).count();
                let mut s = json!({
                    "windows_checked": beyond_one.len(),
                    "a_ls_positive": count(&|r| r.a_ls > 0.0),
                    "a_pm_negative": count(&|r| r.a_pm < 0.0),
                });
                if let Some(r) = prof.rows.iter().find(|r| r.n == WINDOWDIST_N) {
                    s["a_ls_n10"] = num(r.a_ls);
                    s["a_pm_n10"] = num(r.a_pm);
                }
                summary.insert(p_tag(p), s);
            }
        }
        Experiment::Transitions | Experiment::SignedTransitions => {
            let signed = exp == Experiment::SignedTransitions;
            for &p in &cfg.p_list {
                let tm = if signed {
                    transition_matrix_signed(rs, p)?
                } else {
                    transition_matrix(rs, p)?
                };
                let stem = if signed { "signed_transitions" } else { "transitions" };
                tables.push(transition_table(format!("{sym}_{stem}_{}", p_tag(p)), &tm));
                summary.insert(p_tag(p), transition_summary(&tm));
            }
        }
    }
    Ok(CellOutput {
        tables,
        summary: Value::Object(summary),
    })
}
