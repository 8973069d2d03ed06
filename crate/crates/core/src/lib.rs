//! Volatility-clustering analytics for daily financial time series.
//!
//! The crate covers the full chain from closing prices to clustering
//! statistics:
//!
//! * [`ingest`]: price CSV parsing and deterministic result writing.
//! * [`returns`]: simple and normalized returns.
//! * [`stats`]: autocorrelation functions and density histograms.
//! * [`surrogate`]: Gaussian, rank-rearranged, shuffled and swapped series,
//!   plus 0/1 indicator sequences of extreme fluctuations.
//! * [`cluster`]: moving-window counts, the binomial baseline, the
//!   maximal-clustering bound and the clustering index `R_n`.
//! * [`asym`]: largest/smallest and positive/negative asymmetry indices and
//!   next-day transition tables.
//!
//! All randomness flows through [`rng`], so every result is a pure function
//! of its inputs and a `u64` seed.

pub mod asym;
pub mod cluster;
mod error;
pub mod ingest;
pub mod returns;
pub mod rng;
pub mod stats;
pub mod surrogate;

pub use asym::{AsymmetryProfile, AsymmetryRow, TransitionMatrix};
pub use cluster::{ClusteringProfile, ProfileRow, WindowCountDistribution};
pub use error::{Error, Result};
pub use ingest::{Artifact, ArtifactKind, PriceSeries, ResultManifest, ResultSet, Table};
pub use returns::ReturnSeries;
pub use stats::{AcfSeries, Histogram};
pub use surrogate::{ExtremeSelection, IndicatorSequence, Which};
