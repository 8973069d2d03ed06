//! Autocorrelation functions and empirical densities.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::returns::ReturnSeries;

pub const DEFAULT_MAX_LAG: usize = 100;

/// Two-sided 95% band for sample autocorrelations of white noise.
pub const NOISE_Z: f64 = 1.96;

/// Mean and population standard deviation (divide by `N`). Empty input
/// gives `(NaN, NaN)`.
pub fn mean_std(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct AcfSeries {
    /// `values[k]` is the autocorrelation at lag `k`, `k = 0..=max_lag`.
    pub values: Vec<f64>,
    pub n_obs: usize,
    pub noise_band: f64,
}

impl AcfSeries {
    pub fn max_lag(&self) -> usize {
        self.values.len() - 1
    }

    pub fn at(&self, lag: usize) -> f64 {
        self.values[lag]
    }

    /// Fraction of lags `1..=max_lag` whose |value| lies strictly inside
    /// the noise band.
    pub fn fraction_inside_band(&self) -> f64 {
        let inside = self.values[1..].iter().filter(|v| v.abs() < self.noise_band).count();
        inside as f64 / self.max_lag() as f64
    }
}

/// Sample autocorrelation for lags `0..=max_lag`.
///
/// At lag `k` the two overlapping segments `x[..N-k]` and `x[k..]` are each
/// centred and scaled by their own mean and standard deviation, then
/// correlated. Lag 0 is exactly 1.
pub fn acf(x: &[f64], max_lag: usize) -> Result<AcfSeries> {
    if max_lag == 0 {
        return Err(Error::invalid("max_lag must be positive"));
    }
    if x.len() <= max_lag + 1 {
        return Err(Error::invalid(format!(
            "max_lag {max_lag} too large for {} observations",
            x.len()
        )));
    }
    let mut values = Vec::with_capacity(max_lag + 1);
    values.push(1.0);
    for lag in 1..=max_lag {
        values.push(lagged_correlation(x, lag)?);
    }
    Ok(AcfSeries {
        values,
        n_obs: x.len(),
        noise_band: NOISE_Z / (x.len() as f64).sqrt(),
    })
}

fn lagged_correlation(x: &[f64], lag: usize) -> Result<f64> {
    let head = &x[..x.len() - lag];
    let tail = &x[lag..];
    let (m_head, s_head) = mean_std(head);
    let (m_tail, s_tail) = mean_std(tail);
    if !(s_head > 0.0 && s_tail > 0.0) {
        return Err(Error::degenerate(format!("zero variance in overlap at lag {lag}")));
    }
    let cov = head
        .iter()
        .zip(tail)
        .map(|(a, b)| (a - m_head) * (b - m_tail))
        .sum::<f64>()
        / head.len() as f64;
    Ok((cov / (s_head * s_tail)).clamp(-1.0, 1.0))
}

pub fn standard_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    /// `bins + 1` ascending edges spanning `[min, max]`.
    pub bin_edges: Vec<f64>,
    pub densities: Vec<f64>,
    /// Standard normal density at each bin centre.
    pub reference: Vec<f64>,
}

impl Histogram {
    pub fn bins(&self) -> usize {
        self.densities.len()
    }

    pub fn width(&self, bin: usize) -> f64 {
        self.bin_edges[bin + 1] - self.bin_edges[bin]
    }

    pub fn center(&self, bin: usize) -> f64 {
        0.5 * (self.bin_edges[bin] + self.bin_edges[bin + 1])
    }

    pub fn total_mass(&self) -> f64 {
        (0..self.bins()).map(|b| self.densities[b] * self.width(b)).sum()
    }
}

/// Density histogram of a normalized series over `[min, max]` with equal
/// bins; the maximum falls in the last bin.
pub fn histogram_pdf(rs: &ReturnSeries, bins: usize) -> Result<Histogram> {
    if rs.is_empty() {
        return Err(Error::degenerate("empty series"));
    }
    if bins < 2 {
        return Err(Error::invalid("need at least 2 bins"));
    }
    if rs.mu().abs() > 1e-6 || (rs.sigma() - 1.0).abs() > 1e-6 {
        return Err(Error::invalid(format!(
            "series is not normalized (mean {}, std {})",
            rs.mu(),
            rs.sigma()
        )));
    }
    let values = rs.values();
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = (max - min) / bins as f64;
    let mut bin_edges: Vec<f64> = (0..bins).map(|i| min + i as f64 * width).collect();
    bin_edges.push(max);

    let mut counts = vec![0usize; bins];
    for &v in values {
        let idx = (((v - min) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let n = values.len() as f64;
    let mut hist = Histogram {
        bin_edges,
        densities: Vec::with_capacity(bins),
        reference: Vec::with_capacity(bins),
    };
    for (b, &c) in counts.iter().enumerate() {
        hist.densities.push(c as f64 / (n * hist.width(b)));
        hist.reference.push(standard_normal_pdf(hist.center(b)));
    }
    Ok(hist)
}

/// Ranks starting at 1, ties sharing their average rank.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && x[order[j + 1]] == x[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let (ma, sa) = mean_std(a);
    let (mb, sb) = mean_std(b);
    if !(sa > 0.0 && sb > 0.0) {
        return Err(Error::degenerate("zero variance"));
    }
    let cov = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / a.len() as f64;
    Ok((cov / (sa * sb)).clamp(-1.0, 1.0))
}

/// Spearman rank correlation.
pub fn rank_correlation(a: &[f64], b: &[f64]) -> Result<f64> {
    pearson(&average_ranks(a), &average_ranks(b))
}
