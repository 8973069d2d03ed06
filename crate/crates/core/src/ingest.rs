//! Price-series input and result output.
//!
//! Input files are UTF-8 CSV with the header `date,close`, one ISO-8601
//! calendar day and one positive decimal close per row. Consecutive rows are
//! consecutive trading days; calendar gaps carry no meaning.
//!
//! Outputs land in `<dir>/<run_id>/`: one CSV per [`Table`], an optional
//! `summary.json`, and `manifest.json` listing everything written. Nothing
//! time- or host-dependent is recorded, so identical inputs give identical
//! bytes.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const DATE_FORMAT: &str = "%Y-%m-%d";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const SUMMARY_FILE: &str = "summary.json";

/// Daily closing prices, strictly increasing in date, every close positive.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    symbol: String,
    dates: Vec<NaiveDate>,
    closes: Vec<f64>,
}

impl PriceSeries {
    /// Builds a series from parallel vectors, sorting by date and enforcing
    /// the same invariants as [`parse_price_csv`]. Reported line numbers are
    /// 1-based positions in the given vectors.
    pub fn new(symbol: impl Into<String>, dates: Vec<NaiveDate>, closes: Vec<f64>) -> Result<Self> {
        if dates.len() != closes.len() {
            return Err(Error::LengthMismatch {
                left: dates.len(),
                right: closes.len(),
            });
        }
        let rows = dates
            .into_iter()
            .zip(closes)
            .enumerate()
            .map(|(i, (d, c))| Row {
                line: i + 1,
                date: d,
                close: c,
            })
            .collect();
        Self::from_rows(symbol.into(), rows)
    }

    fn from_rows(symbol: String, mut rows: Vec<Row>) -> Result<Self> {
        for row in &rows {
            if !row.close.is_finite() {
                return Err(Error::MalformedRow {
                    line: row.line,
                    msg: format!("close is not finite: {}", row.close),
                });
            }
            if row.close <= 0.0 {
                return Err(Error::NonPositiveClose {
                    line: row.line,
                    close: row.close,
                });
            }
        }
        rows.sort_by_key(|r| r.date);
        for pair in rows.windows(2) {
            if pair[0].date == pair[1].date {
                return Err(Error::DuplicateDate {
                    line: pair[0].line.max(pair[1].line),
                    date: pair[1].date.format(DATE_FORMAT).to_string(),
                });
            }
        }
        if rows.len() < 2 {
            return Err(Error::TooShort(rows.len()));
        }
        Ok(PriceSeries {
            symbol,
            dates: rows.iter().map(|r| r.date).collect(),
            closes: rows.iter().map(|r| r.close).collect(),
        })
    }

    pub fn symbol(&self) -> &str {
        &self.symbol
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn closes(&self) -> &[f64] {
        &self.closes
    }

    pub fn len(&self) -> usize {
        self.closes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.closes.is_empty()
    }
}

struct Row {
    line: usize,
    date: NaiveDate,
    close: f64,
}

/// Parses a `date,close` CSV. Rows may arrive in any order; the result is
/// sorted ascending by date. Blank lines are skipped, blank fields are not.
pub fn parse_price_csv(symbol: impl Into<String>, bytes: &[u8]) -> Result<PriceSeries> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::MalformedRow {
        line: 1 + bytes[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count(),
        msg: "input is not valid UTF-8".into(),
    })?;
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));

    match lines.next() {
        Some((_, header)) if header.trim().trim_start_matches('\u{feff}') == "date,close" => {}
        Some((line, header)) => {
            return Err(Error::MalformedRow {
                line,
                msg: format!("expected header `date,close`, found `{header}`"),
            })
        }
        None => return Err(Error::TooShort(0)),
    }

    let mut rows = Vec::new();
    for (line, raw) in lines {
        if raw.trim().is_empty() {
            continue;
        }
        let malformed = |msg: String| Error::MalformedRow { line, msg };
        let mut fields = raw.split(',');
        let (date, close) = match (fields.next(), fields.next(), fields.next()) {
            (Some(d), Some(c), None) => (d.trim(), c.trim()),
            _ => return Err(malformed(format!("expected 2 fields, found `{raw}`"))),
        };
        let date = NaiveDate::parse_from_str(date, DATE_FORMAT)
            .map_err(|e| malformed(format!("bad date `{date}`: {e}")))?;
        if close.is_empty() {
            return Err(malformed("missing close".into()));
        }
        let close: f64 = close
            .parse()
            .map_err(|_| malformed(format!("bad close `{close}`")))?;
        rows.push(Row { line, date, close });
    }
    PriceSeries::from_rows(symbol.into(), rows)
}

/// Renders a series as `date,close` CSV. Closes use the shortest decimal
/// representation that parses back to the same `f64`.
pub fn write_price_csv(series: &PriceSeries) -> String {
    let mut out = String::from("date,close\n");
    for (d, c) in series.dates.iter().zip(&series.closes) {
        let _ = writeln!(out, "{},{}", d.format(DATE_FORMAT), c);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArtifactKind {
    Table,
    Plotdata,
    Summary,
}

/// A named CSV artifact. Cells are stored pre-rendered so the writer never
/// has to guess a number format.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub kind: ArtifactKind,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: impl Into<String>, kind: ArtifactKind, columns: &[&str]) -> Self {
        Table {
            name: name.into(),
            kind,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Appends a row of numbers, formatted with [`fmt_f64`].
    pub fn push_numbers(&mut self, values: &[f64]) {
        self.rows.push(values.iter().map(|&v| fmt_f64(v)).collect());
    }

    pub fn push_row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Shortest round-trip representation; integral values keep no trailing
/// `.0` and negative zero prints as `0`.
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    format!("{v}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub symbol: String,
    pub path: String,
    pub sha256: String,
}

/// A (series, experiment) cell that did not complete.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub symbol: String,
    pub experiment: String,
    pub error: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultSet {
    pub inputs: Vec<InputDigest>,
    pub tables: Vec<Table>,
    pub summary: Option<serde_json::Value>,
    pub failures: Vec<Failure>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Artifact {
    pub name: String,
    /// Relative to the run directory.
    pub path: String,
    pub kind: ArtifactKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultManifest {
    pub run_id: String,
    pub inputs: Vec<InputDigest>,
    pub artifacts: Vec<Artifact>,
    #[serde(default)]
    pub failures: Vec<Failure>,
}

impl ResultManifest {
    pub fn read(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_slice(&bytes)?)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && !name.starts_with('.')
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

/// Writes every table and the summary to `<dir>/<run_id>/` and returns the
/// manifest, which is also written there as `manifest.json`.
///
/// An existing run directory is an error unless `overwrite` is set, in which
/// case it is removed first so no stale artifacts survive.
pub fn write_outputs(
    results: &ResultSet,
    dir: &Path,
    run_id: &str,
    overwrite: bool,
) -> Result<ResultManifest> {
    if !valid_name(run_id) {
        return Err(Error::invalid(format!("run id `{run_id}` is not a safe file name")));
    }
    let mut seen = BTreeSet::new();
    for table in &results.tables {
        if !valid_name(&table.name) {
            return Err(Error::invalid(format!("table name `{}` is not a safe file name", table.name)));
        }
        if !seen.insert(table.name.as_str()) {
            return Err(Error::invalid(format!("duplicate table name `{}`", table.name)));
        }
        if let Some(row) = table.rows.iter().find(|r| r.len() != table.columns.len()) {
            return Err(Error::invalid(format!(
                "table `{}` has a row of width {} under {} columns",
                table.name,
                row.len(),
                table.columns.len()
            )));
        }
    }

    let run_dir: PathBuf = dir.join(run_id);
    if run_dir.exists() {
        if !overwrite {
            return Err(Error::RunExists(run_dir));
        }
        fs::remove_dir_all(&run_dir).map_err(|e| Error::io(&run_dir, e))?;
    }
    fs::create_dir_all(&run_dir).map_err(|e| Error::io(&run_dir, e))?;

    let write = |file: &str, contents: &[u8]| -> Result<()> {
        let path = run_dir.join(file);
        fs::write(&path, contents).map_err(|e| Error::io(path, e))
    };

    let mut artifacts = Vec::with_capacity(results.tables.len() + 1);
    for table in &results.tables {
        let file = format!("{}.csv", table.name);
        write(&file, table.to_csv().as_bytes())?;
        artifacts.push(Artifact {
            name: table.name.clone(),
            path: file,
            kind: table.kind,
        });
    }
    if let Some(summary) = &results.summary {
        let mut text = serde_json::to_string_pretty(summary)?;
        text.push('\n');
        write(SUMMARY_FILE, text.as_bytes())?;
        artifacts.push(Artifact {
            name: "summary".into(),
            path: SUMMARY_FILE.into(),
            kind: ArtifactKind::Summary,
        });
    }

    let manifest = ResultManifest {
        run_id: run_id.to_string(),
        inputs: results.inputs.clone(),
        artifacts,
        failures: results.failures.clone(),
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    write(MANIFEST_FILE, text.as_bytes())?;
    Ok(manifest)
}
