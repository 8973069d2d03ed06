//! Regenerates the bundled price fixtures under `fixtures/`.
//!
//! Each fixture is a synthetic daily closing-price path. Its variance follows
//! a GJR-GARCH(1,1) recursion on the shocks, which are unit-variance
//! Student-t(5) draws. Negative shocks raise next-day variance more than
//! positive ones, and the drift falls by `FEEDBACK` times the excess of
//! today's volatility over its long-run level, so turbulent stretches lean
//! towards losses and large falls bunch together more than large rises. The
//! paths stand in for real index data without copying any real market.
//!
//! Run with `cargo run -p volclust-cli --example make_fixtures -- <dir>`.

use std::path::PathBuf;

use rand_distr::{Distribution, StudentT};
use volclust::ingest::{write_price_csv, PriceSeries};
use volclust::rng::seeded;

const RETURNS: usize = 10_000;
const DOF: f64 = 5.0;
const DRIFT: f64 = 0.0004;
const OMEGA: f64 = 2e-6;
const ALPHA: f64 = 0.03;
const GAMMA: f64 = 0.10;
const BETA: f64 = 0.90;
const FEEDBACK: f64 = 0.5;

fn simulate(seed: u64) -> Vec<f64> {
    let mut rng = seeded(seed);
    let t = StudentT::new(DOF).unwrap();
    let scale = ((DOF - 2.0) / DOF).sqrt();
    let mut var = OMEGA / (1.0 - ALPHA - GAMMA / 2.0 - BETA);
    let long_run_vol = var.sqrt();
    let mut price = 100.0;
    let mut closes = vec![price];
    for _ in 0..RETURNS {
        let z = t.sample(&mut rng) * scale;
        let vol = var.sqrt();
        let shock = vol * z;
        let r = DRIFT - FEEDBACK * (vol - long_run_vol) + shock;
        price *= 1.0 + r;
        closes.push(price);
        let leverage = if shock < 0.0 { GAMMA } else { 0.0 };
        var = OMEGA + (ALPHA + leverage) * shock * shock + BETA * var;
    }
    closes
}

/// Consecutive weekdays from 1971-02-08.
fn trading_days(count: usize) -> Vec<chrono::NaiveDate> {
    let mut day = chrono::NaiveDate::from_ymd_opt(1971, 2, 8).unwrap();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        use chrono::Datelike;
        if day.weekday().number_from_monday() <= 5 {
            out.push(day);
        }
        day = day.succ_opt().unwrap();
    }
    out
}

fn main() {
    let dir = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("fixtures"));
    std::fs::create_dir_all(&dir).unwrap();
    for (name, seed) in [("gjr_a", 1u64), ("gjr_b", 2), ("gjr_c", 3)] {
        let closes = simulate(seed);
        let series = PriceSeries::new(name, trading_days(closes.len()), closes).unwrap();
        let path = dir.join(format!("{name}.csv"));
        std::fs::write(&path, write_price_csv(&series)).unwrap();
        println!("wrote {}", path.display());
    }
}
