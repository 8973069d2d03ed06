//! Controlled surrogate series and extreme-fluctuation indicators.
//!
//! Ranking is always by absolute value. Equal magnitudes are ordered by
//! time, earlier first, in both the "largest" and the "smallest" ranking.
//! The size of an extreme set is `k = round(P * N)` capped at `N / 2`, so the
//! largest and smallest sets never overlap.

use rand::seq::SliceRandom;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::returns::ReturnSeries;
use crate::rng::seeded;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Which {
    Largest,
    Smallest,
}

impl Which {
    pub fn as_str(self) -> &'static str {
        match self {
            Which::Largest => "largest",
            Which::Smallest => "smallest",
        }
    }
}

/// A 0/1 marking of selected days.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndicatorSequence {
    bits: Vec<u8>,
    ones: usize,
}

impl IndicatorSequence {
    pub fn from_bits(bits: Vec<u8>) -> Result<Self> {
        if let Some(i) = bits.iter().position(|&b| b > 1) {
            return Err(Error::invalid(format!("bit {i} is {} (expected 0 or 1)", bits[i])));
        }
        let ones = bits.iter().filter(|&&b| b == 1).count();
        Ok(IndicatorSequence { bits, ones })
    }

    /// Marks the given positions in a sequence of length `len`.
    pub fn from_positions(len: usize, positions: &[usize]) -> Result<Self> {
        let mut bits = vec![0u8; len];
        for &p in positions {
            if p >= len {
                return Err(Error::invalid(format!("position {p} out of range for length {len}")));
            }
            bits[p] = 1;
        }
        Self::from_bits(bits)
    }

    /// The maximal-clustering arrangement: `ones` ones followed by zeros.
    pub fn block(len: usize, ones: usize) -> Result<Self> {
        if ones > len {
            return Err(Error::invalid(format!("{ones} ones do not fit in length {len}")));
        }
        let mut bits = vec![0u8; len];
        bits[..ones].fill(1);
        Ok(IndicatorSequence { bits, ones })
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Number of ones, `k`.
    pub fn ones(&self) -> usize {
        self.ones
    }

    /// Realized fraction `P = k / N`.
    pub fn fraction(&self) -> f64 {
        self.ones as f64 / self.bits.len() as f64
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.bits.iter().map(|&b| b as f64).collect()
    }
}

/// Positions of the `k` largest and `k` smallest |r|, each listed in rank
/// order (most extreme first).
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremeSelection {
    pub indices_large: Vec<usize>,
    pub indices_small: Vec<usize>,
    pub p_pct: f64,
}

impl ExtremeSelection {
    pub fn k(&self) -> usize {
        self.indices_large.len()
    }

    pub fn indices(&self, which: Which) -> &[usize] {
        match which {
            Which::Largest => &self.indices_large,
            Which::Smallest => &self.indices_small,
        }
    }
}

/// `round(p_pct / 100 * len)`, capped at `len / 2`.
pub fn extreme_count(len: usize, p_pct: f64) -> usize {
    let k = (p_pct / 100.0 * len as f64).round() as usize;
    k.min(len / 2)
}

/// Indices ordered by |value| descending, earlier index first among ties.
pub fn rank_by_magnitude_desc(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].abs().total_cmp(&values[a].abs()).then(a.cmp(&b)));
    order
}

/// Indices ordered by |value| ascending, earlier index first among ties.
pub fn rank_by_magnitude_asc(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].abs().total_cmp(&values[b].abs()).then(a.cmp(&b)));
    order
}

fn check_pct(p_pct: f64, allow_zero: bool) -> Result<()> {
    let low_ok = if allow_zero { p_pct >= 0.0 } else { p_pct > 0.0 };
    if !(low_ok && p_pct <= 50.0) {
        let range = if allow_zero { "[0, 50]" } else { "(0, 50]" };
        return Err(Error::invalid(format!("percentage {p_pct} outside {range}")));
    }
    Ok(())
}

/// `N` iid draws from `Normal(mu, sigma)` of the input, same dates.
pub fn gaussian_surrogate(rs: &ReturnSeries, seed: u64) -> Result<ReturnSeries> {
    if rs.is_empty() || rs.sigma().is_nan() || rs.sigma() <= 0.0 {
        return Err(Error::degenerate("gaussian surrogate needs a non-constant series"));
    }
    let normal = Normal::new(rs.mu(), rs.sigma())
        .map_err(|e| Error::degenerate(format!("bad normal parameters: {e}")))?;
    let mut rng = seeded(seed);
    let values = (0..rs.len()).map(|_| normal.sample(&mut rng)).collect();
    Ok(rs.replace_values(values))
}

/// Places the surrogate value of |value|-rank `j` at the position of the
/// empirical value of rank `j`. The surrogate's own signs are kept.
pub fn rank_rearrange(empirical: &ReturnSeries, surrogate: &ReturnSeries) -> Result<ReturnSeries> {
    if empirical.len() != surrogate.len() {
        return Err(Error::LengthMismatch {
            left: empirical.len(),
            right: surrogate.len(),
        });
    }
    let positions = rank_by_magnitude_desc(empirical.values());
    let donors = rank_by_magnitude_desc(surrogate.values());
    let mut values = vec![0.0; empirical.len()];
    for (&pos, &src) in positions.iter().zip(&donors) {
        values[pos] = surrogate.values()[src];
    }
    Ok(empirical.replace_values(values))
}

/// Uniform random permutation of the values (Fisher-Yates); dates stay put.
pub fn shuffle(rs: &ReturnSeries, seed: u64) -> ReturnSeries {
    let mut values = rs.values().to_vec();
    values.shuffle(&mut seeded(seed));
    rs.replace_values(values)
}

/// Exchanges the `j`-th largest and `j`-th smallest |r| for `j = 1..=k`.
pub fn swap_extremes(rs: &ReturnSeries, p_pct: f64) -> Result<ReturnSeries> {
    check_pct(p_pct, true)?;
    let k = extreme_count(rs.len(), p_pct);
    let large = rank_by_magnitude_desc(rs.values());
    let small = rank_by_magnitude_asc(rs.values());
    let mut values = rs.values().to_vec();
    for (&a, &b) in large.iter().zip(&small).take(k) {
        values.swap(a, b);
    }
    Ok(rs.replace_values(values))
}

pub fn select_extremes(rs: &ReturnSeries, p_pct: f64) -> Result<ExtremeSelection> {
    check_pct(p_pct, false)?;
    let k = extreme_count(rs.len(), p_pct);
    if k == 0 {
        return Err(Error::degenerate(format!(
            "{p_pct}% of {} observations rounds to zero",
            rs.len()
        )));
    }
    let mut indices_large = rank_by_magnitude_desc(rs.values());
    indices_large.truncate(k);
    let mut indices_small = rank_by_magnitude_asc(rs.values());
    indices_small.truncate(k);
    Ok(ExtremeSelection {
        indices_large,
        indices_small,
        p_pct,
    })
}

pub fn binarize(rs: &ReturnSeries, p_pct: f64, which: Which) -> Result<IndicatorSequence> {
    let sel = select_extremes(rs, p_pct)?;
    IndicatorSequence::from_positions(rs.len(), sel.indices(which))
}
