//! Simple returns `R_tau(t) = (p(t) - p(t - tau)) / p(t - tau)` and their
//! standardized form.
//!
//! Standard deviations use the population convention (divide by `N`)
//! throughout the crate.

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::ingest::PriceSeries;
use crate::stats::mean_std;

/// Returns aligned to the later day of each pair, with cached moments.
///
/// `dates` is either empty (an undated series built from raw values) or the
/// same length as `values`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries {
    symbol: String,
    tau: usize,
    dates: Vec<NaiveDate>,
    values: Vec<f64>,
    mu: f64,
    sigma: f64,
}

impl ReturnSeries {
    /// An undated daily (`tau = 1`) series.
    pub fn from_values(symbol: impl Into<String>, values: Vec<f64>) -> Self {
        Self::build(symbol.into(), 1, Vec::new(), values)
    }

    pub fn with_dates(
        symbol: impl Into<String>,
        tau: usize,
        dates: Vec<NaiveDate>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if !dates.is_empty() && dates.len() != values.len() {
            return Err(Error::LengthMismatch {
                left: dates.len(),
                right: values.len(),
            });
        }
        Ok(Self::build(symbol.into(), tau, dates, values))
    }

    fn build(symbol: String, tau: usize, dates: Vec<NaiveDate>, values: Vec<f64>) -> Self {
        let (mu, sigma) = mean_std(&values);
        ReturnSeries {
            symbol,
            tau,
            dates,
            values,
            mu,
            sigma,
        }
    }

    /// Same symbol, horizon and dates, new values.
    pub(crate) fn replace_values(&self, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        Self::build(self.symbol.clone(), self.tau, self.dates.clone(), values)
    }

    pub fn symbol(&self) -> &str {
        &self.symbol
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn abs_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.abs()).collect()
    }
}

pub fn compute_returns(prices: &PriceSeries, tau: usize) -> Result<ReturnSeries> {
    if tau == 0 {
        return Err(Error::invalid("tau must be positive"));
    }
    if tau >= prices.len() {
        return Err(Error::invalid(format!(
            "tau = {tau} leaves no returns in a series of length {}",
            prices.len()
        )));
    }
    let closes = prices.closes();
    let values = closes
        .iter()
        .zip(&closes[tau..])
        .map(|(&before, &after)| (after - before) / before)
        .collect();
    let dates = prices.dates()[tau..].to_vec();
    ReturnSeries::with_dates(prices.symbol(), tau, dates, values)
}

/// `(r - mu) / sigma` for every return.
pub fn normalize_returns(rs: &ReturnSeries) -> Result<ReturnSeries> {
    if rs.is_empty() {
        return Err(Error::degenerate("empty return series"));
    }
    if rs.sigma.is_nan() || rs.sigma <= 0.0 {
        return Err(Error::degenerate("zero variance, cannot normalize"));
    }
    let values = rs.values.iter().map(|v| (v - rs.mu) / rs.sigma).collect();
    Ok(rs.replace_values(values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn prices(closes: &[f64]) -> PriceSeries {
        let base = NaiveDate::from_ymd_opt(2009, 6, 1).unwrap();
        let dates = (0..closes.len()).map(|i| base + chrono::Days::new(i as u64)).collect();
        PriceSeries::new("T", dates, closes.to_vec()).unwrap()
    }

    #[test]
    fn constant_prices_give_zero_returns() {
        let rs = compute_returns(&prices(&[100.0, 100.0, 100.0]), 1).unwrap();
        assert_eq!(rs.values(), &[0.0, 0.0]);
    }

    #[test]
    fn hand_evaluated_returns() {
        let rs = compute_returns(&prices(&[100.0, 110.0]), 1).unwrap();
        assert!((rs.values()[0] - 0.10).abs() < 1e-15);

        let p = prices(&[100.0, 110.0, 99.0]);
        let rs = compute_returns(&p, 2).unwrap();
        assert_eq!(rs.len(), 1);
        assert!((rs.values()[0] + 0.01).abs() < 1e-15);
        assert_eq!(rs.dates(), &p.dates()[2..]);
        assert_eq!(rs.tau(), 2);
    }

    #[test]
    fn bad_tau() {
        let p = prices(&[100.0, 110.0, 99.0]);
        assert!(compute_returns(&p, 0).is_err());
        assert!(compute_returns(&p, 3).is_err());
    }

    #[test]
    fn normalize_population_convention() {
        let rs = ReturnSeries::from_values("T", vec![-1.0, 1.0]);
        let z = normalize_returns(&rs).unwrap();
        assert_eq!(z.values(), &[-1.0, 1.0]);
    }

    #[test]
    fn normalize_rejects_constant() {
        let rs = ReturnSeries::from_values("T", vec![5.0, 5.0, 5.0]);
        assert!(matches!(normalize_returns(&rs), Err(Error::Degenerate(_))));
    }

    #[test]
    fn exponential_growth_gives_constant_returns() {
        let g: f64 = 0.0123;
        let closes: Vec<f64> = (0..200).map(|t| 50.0 * (1.0 + g).powi(t)).collect();
        let rs = compute_returns(&prices(&closes), 1).unwrap();
        for r in rs.values() {
            assert!(((r - g) / g).abs() <= 1e-12, "{r}");
        }
    }

    proptest! {
        #[test]
        fn normalized_moments(values in prop::collection::vec(-1.0f64..1.0, 3..300)) {
            let rs = ReturnSeries::from_values("T", values);
            prop_assume!(rs.sigma() > 1e-6);
            let z = normalize_returns(&rs).unwrap();
            prop_assert!(z.mu().abs() <= 1e-12);
            prop_assert!((z.sigma() - 1.0).abs() <= 1e-12);
            let zz = normalize_returns(&z).unwrap();
            for (a, b) in z.values().iter().zip(zz.values()) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }

        #[test]
        fn scaling_prices_leaves_returns(
            closes in prop::collection::vec(0.5f64..500.0, 2..100),
            c in 1e-3f64..1e3,
        ) {
            let a = compute_returns(&prices(&closes), 1).unwrap();
            let scaled: Vec<f64> = closes.iter().map(|p| p * c).collect();
            let b = compute_returns(&prices(&scaled), 1).unwrap();
            for (x, y) in a.values().iter().zip(b.values()) {
                prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1e-3));
            }
        }
    }
}
