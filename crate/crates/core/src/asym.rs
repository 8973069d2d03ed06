//! Asymmetry indices and next-day transition tables.
//!
//! Days are split into three magnitude classes (the `p`% largest |r|, the
//! `p`% smallest |r|, the rest) and, for the signed variants, into rises
//! (`r > 0`) and falls (`r <= 0`). Zero returns count as falls so the six
//! signed classes always partition the series.

use crate::cluster::{clustering_index_of, clustering_profile_of};
use crate::error::{Error, Result};
use crate::returns::ReturnSeries;
use crate::surrogate::{select_extremes, IndicatorSequence, Which};

/// `(a - b) / (a + b)`.
pub fn normalized_difference(a: f64, b: f64) -> Result<f64> {
    let sum = a + b;
    if sum.is_nan() || sum <= 0.0 {
        return Err(Error::degenerate(format!("indices {a} and {b} sum to zero")));
    }
    Ok((a - b) / sum)
}

fn is_rise(r: f64) -> bool {
    r > 0.0
}

fn selection_indicators(rs: &ReturnSeries, p_pct: f64) -> Result<(IndicatorSequence, IndicatorSequence)> {
    let sel = select_extremes(rs, p_pct)?;
    Ok((
        IndicatorSequence::from_positions(rs.len(), &sel.indices_large)?,
        IndicatorSequence::from_positions(rs.len(), &sel.indices_small)?,
    ))
}

/// Splits the `p`% largest |r| into rises and falls, each its own indicator
/// sequence with its own realized fraction.
fn signed_indicators(rs: &ReturnSeries, p_pct: f64) -> Result<(IndicatorSequence, IndicatorSequence)> {
    let sel = select_extremes(rs, p_pct)?;
    let (rises, falls): (Vec<usize>, Vec<usize>) =
        sel.indices_large.iter().partition(|&&i| is_rise(rs.values()[i]));
    if rises.is_empty() || falls.is_empty() {
        return Err(Error::degenerate(format!(
            "the {p_pct}% largest returns are one-sided ({} rises, {} falls)",
            rises.len(),
            falls.len()
        )));
    }
    Ok((
        IndicatorSequence::from_positions(rs.len(), &rises)?,
        IndicatorSequence::from_positions(rs.len(), &falls)?,
    ))
}

/// `A_ls = (R_l - R_s) / (R_l + R_s)` at window `n`.
pub fn asymmetry_ls(rs: &ReturnSeries, p_pct: f64, n: usize) -> Result<f64> {
    let (large, small) = selection_indicators(rs, p_pct)?;
    normalized_difference(clustering_index_of(&large, n)?, clustering_index_of(&small, n)?)
}

/// `A_+- = (R_+ - R_-) / (R_+ + R_-)` at window `n`, over the rises and falls
/// among the `p`% largest |r|.
pub fn asymmetry_pm(rs: &ReturnSeries, p_pct: f64, n: usize) -> Result<f64> {
    let (plus, minus) = signed_indicators(rs, p_pct)?;
    normalized_difference(clustering_index_of(&plus, n)?, clustering_index_of(&minus, n)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymmetryRow {
    pub n: usize,
    pub a_ls: f64,
    pub a_pm: f64,
    pub r_l: f64,
    pub r_s: f64,
    pub r_plus: f64,
    pub r_minus: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymmetryProfile {
    pub p_pct: f64,
    pub rows: Vec<AsymmetryRow>,
}

pub fn asymmetry_profile(rs: &ReturnSeries, p_pct: f64, n_max: usize) -> Result<AsymmetryProfile> {
    let (large, small) = selection_indicators(rs, p_pct)?;
    let (plus, minus) = signed_indicators(rs, p_pct)?;
    let prof = |ind: &IndicatorSequence| clustering_profile_of(ind, p_pct, Which::Largest, n_max);
    let (l, s, pl, mi) = (prof(&large)?, prof(&small)?, prof(&plus)?, prof(&minus)?);
    let rows = (0..n_max)
        .map(|i| {
            let (r_l, r_s) = (l.rows[i].r_n, s.rows[i].r_n);
            let (r_plus, r_minus) = (pl.rows[i].r_n, mi.rows[i].r_n);
            Ok(AsymmetryRow {
                n: i + 1,
                a_ls: normalized_difference(r_l, r_s)?,
                a_pm: normalized_difference(r_plus, r_minus)?,
                r_l,
                r_s,
                r_plus,
                r_minus,
            })
        })
        .collect::<Result<_>>()?;
    Ok(AsymmetryProfile { p_pct, rows })
}

/// Conditional next-day category probabilities. Row `a`, column `b` is
/// `#(day t in a and day t+1 in b) / #(day t in a)` over days with a
/// successor.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    pub labels: Vec<String>,
    pub probs: Vec<Vec<f64>>,
    /// Conditioning days per row.
    pub support: Vec<usize>,
}

impl TransitionMatrix {
    pub fn get(&self, from: &str, to: &str) -> Option<f64> {
        let i = self.labels.iter().position(|l| l == from)?;
        let j = self.labels.iter().position(|l| l == to)?;
        Some(self.probs[i][j])
    }

    pub fn row(&self, label: &str) -> Option<&[f64]> {
        let i = self.labels.iter().position(|l| l == label)?;
        Some(&self.probs[i])
    }
}

pub const MAGNITUDE_LABELS: [&str; 3] = ["largest", "smallest", "rest"];

/// Rise/fall pairs in the paired column layout: largest rise, largest fall,
/// smallest rise, and so on.
pub const SIGNED_LABELS: [&str; 6] = [
    "largest_rise",
    "largest_fall",
    "smallest_rise",
    "smallest_fall",
    "rest_rise",
    "rest_fall",
];

/// Magnitude class per day: 0 largest, 1 smallest, 2 rest.
fn magnitude_classes(rs: &ReturnSeries, p_pct: f64) -> Result<Vec<usize>> {
    let sel = select_extremes(rs, p_pct)?;
    let mut class = vec![2usize; rs.len()];
    for &i in &sel.indices_large {
        class[i] = 0;
    }
    for &i in &sel.indices_small {
        class[i] = 1;
    }
    Ok(class)
}

fn tabulate(classes: &[usize], labels: &[&str]) -> Result<TransitionMatrix> {
    let k = labels.len();
    let mut counts = vec![vec![0usize; k]; k];
    for pair in classes.windows(2) {
        counts[pair[0]][pair[1]] += 1;
    }
    let support: Vec<usize> = counts.iter().map(|row| row.iter().sum()).collect();
    if let Some(empty) = support.iter().position(|&s| s == 0) {
        return Err(Error::degenerate(format!("no `{}` day has a successor", labels[empty])));
    }
    let probs = counts
        .iter()
        .zip(&support)
        .map(|(row, &total)| row.iter().map(|&c| c as f64 / total as f64).collect())
        .collect();
    Ok(TransitionMatrix {
        labels: labels.iter().map(|l| l.to_string()).collect(),
        probs,
        support,
    })
}

pub fn transition_matrix(rs: &ReturnSeries, p_pct: f64) -> Result<TransitionMatrix> {
    if rs.len() < 2 {
        return Err(Error::invalid("transition table needs at least 2 days"));
    }
    tabulate(&magnitude_classes(rs, p_pct)?, &MAGNITUDE_LABELS)
}

pub fn transition_matrix_signed(rs: &ReturnSeries, p_pct: f64) -> Result<TransitionMatrix> {
    if rs.len() < 2 {
        return Err(Error::invalid("transition table needs at least 2 days"));
    }
    let classes: Vec<usize> = magnitude_classes(rs, p_pct)?
        .into_iter()
        .zip(rs.values())
        .map(|(c, &r)| 2 * c + usize::from(!is_rise(r)))
        .collect();
    tabulate(&classes, &SIGNED_LABELS)
}
