//! Moving-window clustering statistics.
//!
//! A window of `n` days slides over an indicator sequence one day at a time.
//! The spread of the per-window count of marked days, measured about its
//! expected value `P * n`, is compared to the spread the same count would
//! have if the marked days were scattered independently (binomial,
//! `sqrt(n P (1 - P))`). The ratio is the clustering index `R_n`: 1 for an
//! iid arrangement, approaching `sqrt(n)` when all marked days sit in one
//! block.

use crate::error::{Error, Result};
use crate::returns::ReturnSeries;
use crate::surrogate::{binarize, gaussian_surrogate, IndicatorSequence, Which};

pub const DEFAULT_N_MAX: usize = 240;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowCountDistribution {
    pub n: usize,
    /// Marked days in the window starting at each position, `N - n + 1` entries.
    pub counts: Vec<u32>,
    /// `frequency[m]` windows contain exactly `m` marked days, `m = 0..=n`.
    pub frequency: Vec<usize>,
}

impl WindowCountDistribution {
    pub fn windows(&self) -> usize {
        self.counts.len()
    }
}

fn check_window(len: usize, n: usize) -> Result<()> {
    if n == 0 || n > len {
        return Err(Error::invalid(format!("window {n} outside 1..={len}")));
    }
    Ok(())
}

/// Per-position window counts by rolling update, O(N).
pub fn window_counts(ind: &IndicatorSequence, n: usize) -> Result<WindowCountDistribution> {
    check_window(ind.len(), n)?;
    let bits = ind.bits();
    let windows = bits.len() - n + 1;
    let mut counts = Vec::with_capacity(windows);
    let mut frequency = vec![0usize; n + 1];
    let mut current: u32 = bits[..n].iter().map(|&b| b as u32).sum();
    counts.push(current);
    frequency[current as usize] += 1;
    for t in 1..windows {
        current = current + bits[t + n - 1] as u32 - bits[t - 1] as u32;
        counts.push(current);
        frequency[current as usize] += 1;
    }
    Ok(WindowCountDistribution {
        n,
        counts,
        frequency,
    })
}

fn check_fraction(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("fraction {p} outside [0, 1]")));
    }
    Ok(())
}

/// Standard deviation of a Binomial(n, P) count, `sqrt(n P (1 - P))`.
pub fn sigma_gaussian(n: usize, p: f64) -> Result<f64> {
    check_fraction(p)?;
    Ok((n as f64 * p * (1.0 - p)).sqrt())
}

/// Binomial(n, P) probabilities for `m = 0..=n`, accumulated in log space so
/// large `n` neither overflows nor underflows prematurely.
pub fn binomial_pmf(n: usize, p: f64) -> Result<Vec<f64>> {
    check_fraction(p)?;
    if p == 0.0 || p == 1.0 {
        let mut pmf = vec![0.0; n + 1];
        pmf[if p == 0.0 { 0 } else { n }] = 1.0;
        return Ok(pmf);
    }
    let (ln_p, ln_q) = (p.ln(), (1.0 - p).ln());
    let mut ln_choose = 0.0;
    let mut pmf = Vec::with_capacity(n + 1);
    for m in 0..=n {
        if m > 0 {
            ln_choose += ((n - m + 1) as f64).ln() - (m as f64).ln();
        }
        pmf.push((ln_choose + m as f64 * ln_p + (n - m) as f64 * ln_q).exp());
    }
    Ok(pmf)
}

/// The binomial standard deviation by explicit summation over the
/// probability mass function. Agrees with [`sigma_gaussian`]; kept as an
/// independent route for validation.
pub fn sigma_gaussian_by_sum(n: usize, p: f64) -> Result<f64> {
    let mean = p * n as f64;
    let var: f64 = binomial_pmf(n, p)?
        .iter()
        .enumerate()
        .map(|(m, w)| (m as f64 - mean).powi(2) * w)
        .sum();
    Ok(var.sqrt())
}

fn spread_about(dist: &WindowCountDistribution, center: f64) -> f64 {
    let sum: f64 = dist
        .frequency
        .iter()
        .enumerate()
        .filter(|(_, &f)| f > 0)
        .map(|(m, &f)| f as f64 * (m as f64 - center).powi(2))
        .sum();
    (sum / dist.windows() as f64).sqrt()
}

/// Root-mean-square deviation of the window counts from `P * n`, with `P`
/// the realized fraction of the sequence.
///
/// Accumulation runs over the count histogram, so two sequences with the
/// same histogram give bit-identical results.
pub fn sigma_empirical(ind: &IndicatorSequence, n: usize) -> Result<f64> {
    let dist = window_counts(ind, n)?;
    Ok(spread_about(&dist, ind.fraction() * n as f64))
}

/// Number of marked days used by the block arrangement: `round(P * N)`.
pub fn block_ones(len: usize, p: f64) -> usize {
    (p * len as f64).round() as usize
}

/// Window-count spread of the block arrangement (all `round(P N)` marked
/// days first, the rest after) in closed form:
///
/// `[n^2 (N-n-1) P(1-P) + n(n+1)(2n+1)/6 - n^3 (P^2 + (1-P)^2)] / (N - n + 1)`
///
/// `P` is replaced by `round(P N) / N` so the block is realizable.
pub fn sigma_extreme(len: usize, n: usize, p: f64) -> Result<f64> {
    check_fraction(p)?;
    let ones = block_ones(len, p);
    if n == 0 || n > ones || n > len - ones {
        return Err(Error::invalid(format!(
            "window {n} exceeds a block ({ones} marked, {} unmarked)",
            len - ones
        )));
    }
    let big_n = len as f64;
    let p = ones as f64 / big_n;
    let nf = n as f64;
    let var = (nf * nf * (big_n - nf - 1.0) * p * (1.0 - p) + nf * (nf + 1.0) * (2.0 * nf + 1.0) / 6.0
        - nf.powi(3) * (p * p + (1.0 - p) * (1.0 - p)))
        / (big_n - nf + 1.0);
    Ok(var.max(0.0).sqrt())
}

/// Large-`N` limit of [`sigma_extreme`], `sqrt(n^2 P (1 - P))`.
pub fn sigma_limit(n: usize, p: f64) -> Result<f64> {
    check_fraction(p)?;
    Ok(n as f64 * (p * (1.0 - p)).sqrt())
}

/// `R_n = sigma_empirical / sigma_gaussian` for an indicator sequence.
pub fn clustering_index_of(ind: &IndicatorSequence, n: usize) -> Result<f64> {
    Ok(index_row(ind, n)?.r_n)
}

pub fn clustering_index(rs: &ReturnSeries, p_pct: f64, n: usize, which: Which) -> Result<f64> {
    clustering_index_of(&binarize(rs, p_pct, which)?, n)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileRow {
    pub n: usize,
    pub sigma_e: f64,
    pub sigma_g: f64,
    pub r_n: f64,
    pub r_lim: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusteringProfile {
    pub p_pct: f64,
    pub which: Which,
    pub rows: Vec<ProfileRow>,
}

impl ClusteringProfile {
    pub fn row(&self, n: usize) -> Option<&ProfileRow> {
        self.rows.iter().find(|r| r.n == n)
    }
}

fn index_row(ind: &IndicatorSequence, n: usize) -> Result<ProfileRow> {
    check_window(ind.len(), n)?;
    let p = ind.fraction();
    if ind.ones() == 0 || ind.ones() == ind.len() {
        return Err(Error::degenerate(format!(
            "indicator fraction {p} leaves no spread to compare"
        )));
    }
    let sigma_e = sigma_empirical(ind, n)?;
    let sigma_g = sigma_gaussian(n, p)?;
    Ok(ProfileRow {
        n,
        sigma_e,
        sigma_g,
        r_n: sigma_e / sigma_g,
        r_lim: (n as f64).sqrt(),
    })
}

/// Index rows for `n = 1..=n_max` of one indicator sequence.
pub fn clustering_profile_of(
    ind: &IndicatorSequence,
    p_pct: f64,
    which: Which,
    n_max: usize,
) -> Result<ClusteringProfile> {
    check_window(ind.len(), n_max)?;
    let rows = (1..=n_max).map(|n| index_row(ind, n)).collect::<Result<_>>()?;
    Ok(ClusteringProfile { p_pct, which, rows })
}

pub fn clustering_profile(
    rs: &ReturnSeries,
    p_pct: f64,
    n_max: usize,
    which: Which,
) -> Result<ClusteringProfile> {
    clustering_profile_of(&binarize(rs, p_pct, which)?, p_pct, which, n_max)
}

/// Observed window-count frequencies next to the binomial expectation
/// `(N - n + 1) * C(n, m) P^m (1 - P)^(n - m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyComparison {
    pub n: usize,
    pub counts: Vec<usize>,
    pub binomial_reference: Vec<f64>,
}

pub fn window_frequency(ind: &IndicatorSequence, n: usize) -> Result<FrequencyComparison> {
    let dist = window_counts(ind, n)?;
    let windows = dist.windows() as f64;
    let binomial_reference = binomial_pmf(n, ind.fraction())?
        .into_iter()
        .map(|w| w * windows)
        .collect();
    Ok(FrequencyComparison {
        n,
        counts: dist.frequency,
        binomial_reference,
    })
}

/// Baseline spread measured on a simulated Gaussian series instead of taken
/// from the closed form. Validation only: the result carries Monte Carlo
/// noise that [`sigma_gaussian`] does not.
pub fn sigma_gaussian_monte_carlo(len: usize, n: usize, p_pct: f64, seed: u64) -> Result<f64> {
    // any non-degenerate template works, only length and moments are used
    let template = ReturnSeries::from_values("mc", (0..len).map(|i| (i % 2) as f64).collect());
    let noise = gaussian_surrogate(&template, seed)?;
    sigma_empirical(&binarize(&noise, p_pct, Which::Largest)?, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use proptest::prelude::*;
    use rand::Rng;

    fn bits(b: &[u8]) -> IndicatorSequence {
        IndicatorSequence::from_bits(b.to_vec()).unwrap()
    }

    fn random_bits(len: usize, p: f64, seed: u64) -> IndicatorSequence {
        let mut rng = seeded(seed);
        IndicatorSequence::from_bits((0..len).map(|_| rng.random_bool(p) as u8).collect()).unwrap()
    }

    fn direct_counts(b: &[u8], n: usize) -> Vec<u32> {
        b.windows(n).map(|w| w.iter().map(|&x| x as u32).sum()).collect()
    }

    #[test]
    fn saturated_counts() {
        let d = window_counts(&bits(&[1; 7]), 3).unwrap();
        assert!(d.counts.iter().all(|&c| c == 3));
        assert_eq!(d.windows(), 5);
        assert_eq!(d.frequency, vec![0, 0, 0, 5]);
    }

    #[test]
    fn hand_enumerated_counts() {
        let d = window_counts(&bits(&[1, 0, 1, 1, 0]), 2).unwrap();
        assert_eq!(d.counts, vec![1, 1, 2, 1]);
        assert_eq!(d.frequency, vec![0, 3, 1]);
        assert!(window_counts(&bits(&[1, 0]), 3).is_err());
        assert!(window_counts(&bits(&[1, 0]), 0).is_err());
    }

    #[test]
    fn gaussian_sigma_values() {
        assert_eq!(sigma_gaussian(7, 0.0).unwrap(), 0.0);
        assert!((sigma_gaussian(10, 0.2).unwrap() - 1.264_911_064_067_351_7).abs() < 1e-12);
        assert!((sigma_gaussian(25, 0.5).unwrap() - 2.5).abs() < 1e-12);
        assert!((sigma_gaussian_by_sum(25, 0.5).unwrap() - 2.5).abs() < 1e-12);
        assert!(sigma_gaussian(3, 1.5).is_err());
    }

    #[test]
    fn log_space_sum_survives_large_n() {
        for n in [500, 2_000, 10_000] {
            let a = sigma_gaussian(n, 0.2).unwrap();
            let b = sigma_gaussian_by_sum(n, 0.2).unwrap();
            assert!((a - b).abs() / a < 1e-9, "n = {n}: {a} vs {b}");
        }
    }

    #[test]
    fn pmf_sums_to_one() {
        for (n, p) in [(1, 0.3), (40, 0.05), (240, 0.2), (5, 0.0), (5, 1.0)] {
            let total: f64 = binomial_pmf(n, p).unwrap().iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn empirical_sigma_edge_cases() {
        assert_eq!(sigma_empirical(&bits(&[1; 10]), 4).unwrap(), 0.0);
        assert!(sigma_empirical(&bits(&[1, 0]), 3).is_err());
    }

    #[test]
    fn iid_bits_match_binomial() {
        let ind = random_bits(100_000, 0.2, 42);
        let se = sigma_empirical(&ind, 10).unwrap();
        let sg = sigma_gaussian(10, 0.2).unwrap();
        assert!((se / sg - 1.0).abs() < 0.02, "{se} vs {sg}");
    }

    /// Eq.-style first form: all-ones windows, all-zero windows, and the
    /// `n + 1` transition windows.
    fn extreme_by_parts(len: usize, n: usize, p: f64) -> f64 {
        let (big_n, nf) = (len as f64, n as f64);
        let pn = p * nf;
        let transition: f64 = (0..=n).map(|m| (m as f64 - pn).powi(2)).sum();
        ((p * big_n - nf) * (nf - pn).powi(2) + ((1.0 - p) * big_n - nf) * pn * pn + transition)
            / (big_n - nf + 1.0)
    }

    #[test]
    fn extreme_closed_form_matches_parts_and_scan() {
        for (len, n, p) in [(10_000, 10, 0.2), (1_000, 7, 0.3), (50, 5, 0.5), (200, 1, 0.1)] {
            let closed = sigma_extreme(len, n, p).unwrap();
            let parts = extreme_by_parts(len, n, p).sqrt();
            let scan = sigma_empirical(&IndicatorSequence::block(len, block_ones(len, p)).unwrap(), n).unwrap();
            assert!((closed - parts).abs() / closed < 1e-12, "{len} {n} {p}");
            assert!((closed - scan).abs() / closed < 1e-9, "{len} {n} {p}");
        }
    }

    #[test]
    fn extreme_limit_and_unit_window() {
        let ratio = sigma_extreme(1_000_000, 10, 0.2).unwrap() / sigma_limit(10, 0.2).unwrap();
        assert!((ratio - 1.0).abs() < 1e-3);
        let r1 = sigma_extreme(10_000, 1, 0.2).unwrap() / sigma_gaussian(1, 0.2).unwrap();
        assert!((r1 - 1.0).abs() < 1e-12);
        assert!(sigma_extreme(100, 30, 0.2).is_err());
        assert!(sigma_extreme(100, 30, 0.8).is_err());
    }

    #[test]
    fn unit_window_index_is_one() {
        for seed in 0..5 {
            let ind = random_bits(997, 0.13, seed);
            assert!((clustering_index_of(&ind, 1).unwrap() - 1.0).abs() < 1e-12);
        }
        let r = clustering_index_of(&IndicatorSequence::block(100, 20).unwrap(), 1).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_fraction() {
        assert!(matches!(clustering_index_of(&bits(&[0; 5]), 2), Err(Error::Degenerate(_))));
        assert!(matches!(clustering_index_of(&bits(&[1; 5]), 2), Err(Error::Degenerate(_))));
    }

    #[test]
    fn block_index_near_sqrt_n() {
        let ind = IndicatorSequence::block(1_000_000, 200_000).unwrap();
        let r = clustering_index_of(&ind, 10).unwrap();
        assert!((r / 10f64.sqrt() - 1.0).abs() < 0.01, "{r}");
    }

    #[test]
    fn profile_rows() {
        let ind = random_bits(2_000, 0.2, 7);
        let prof = clustering_profile_of(&ind, 20.0, Which::Largest, 30).unwrap();
        assert_eq!(prof.rows.len(), 30);
        assert!((prof.row(1).unwrap().r_n - 1.0).abs() < 1e-12);
        for row in &prof.rows {
            assert_eq!(row.r_lim, (row.n as f64).sqrt());
            assert_eq!(row.sigma_g, sigma_gaussian(row.n, ind.fraction()).unwrap());
        }
        assert!(clustering_profile_of(&ind, 20.0, Which::Largest, 2_001).is_err());
    }

    #[test]
    fn block_profile_is_monotone_below_half_block() {
        // finite-N edge effects make R_n dip just before n reaches the block
        // length, so the check stops at half of it
        for len in 6..160 {
            for ones in 2..=len / 2 {
                let ind = IndicatorSequence::block(len, ones).unwrap();
                let prof = clustering_profile_of(&ind, 0.0, Which::Largest, ones / 2).unwrap();
                for w in prof.rows.windows(2) {
                    assert!(w[1].r_n >= w[0].r_n - 1e-12, "{len} {ones} n = {}", w[1].n);
                }
            }
        }
    }

    #[test]
    fn block_profile_dips_near_block_length() {
        let ind = IndicatorSequence::block(60, 12).unwrap();
        let prof = clustering_profile_of(&ind, 20.0, Which::Largest, 12).unwrap();
        assert!(prof.rows[11].r_n < prof.rows[10].r_n);
    }

    #[test]
    fn frequency_reference_totals() {
        let ind = random_bits(5_000, 0.2, 1);
        let f = window_frequency(&ind, 10).unwrap();
        assert_eq!(f.counts.iter().sum::<usize>(), 4_991);
        let total: f64 = f.binomial_reference.iter().sum();
        assert!((total - 4_991.0).abs() < 1e-8);
    }

    #[test]
    fn monte_carlo_baseline_is_close() {
        let mc = sigma_gaussian_monte_carlo(100_000, 10, 20.0, 42).unwrap();
        assert!((mc / sigma_gaussian(10, 0.2).unwrap() - 1.0).abs() < 0.02, "{mc}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn rolling_equals_direct(seed in any::<u64>(), len in 1usize..=1_000, p in 0.0f64..1.0, n_frac in 0.0f64..1.0) {
            let ind = random_bits(len, p, seed);
            let n = 1 + ((len - 1) as f64 * n_frac) as usize;
            let d = window_counts(&ind, n).unwrap();
            prop_assert_eq!(&d.counts, &direct_counts(ind.bits(), n));
            prop_assert_eq!(d.frequency.iter().sum::<usize>(), len - n + 1);
        }

        #[test]
        fn extreme_matches_block_scan(len in 20usize..3_000, p in 0.05f64..0.95, n_frac in 0.0f64..1.0) {
            let ones = block_ones(len, p);
            let max_n = ones.min(len - ones);
            prop_assume!(max_n >= 1);
            let n = 1 + ((max_n - 1) as f64 * n_frac) as usize;
            let closed = sigma_extreme(len, n, p).unwrap();
            let scan = sigma_empirical(&IndicatorSequence::block(len, ones).unwrap(), n).unwrap();
            prop_assert!((closed - scan).abs() <= 1e-9 * closed.max(1e-300));
        }

        #[test]
        fn index_never_exceeds_bound_much(seed in any::<u64>(), p in 0.05f64..0.5, n in 1usize..40) {
            let ind = random_bits(5_000, p, seed);
            prop_assume!(ind.ones() > 0);
            let r = clustering_index_of(&ind, n).unwrap();
            prop_assert!(r >= 0.0);
            prop_assert!(r <= (n as f64).sqrt() * 1.05);
        }
    }
}
