//! Ramanujan primes, the biased-coin head-coloring model, and the run
//! statistics used to compare the two.
//!
//! * [`sieve`] builds prime tables with O(1) `π(x)` queries.
//! * [`ramanujan`] computes (generalized) Ramanujan primes and classifies primes.
//! * [`coin_model`] simulates the biased walk and its red/blue head coloring.
//! * [`run_stats`] extracts longest runs and first occurrences from labeled streams.
//! * [`analytics`] holds the closed-form predictions.
//! * [`poisson_lab`] simulates the continuous-time Poisson pictures.
//! * [`experiments`] wires these into the multi-trial experiments used by the CLI.

pub mod analytics;
pub mod coin_model;
pub mod error;
pub mod experiments;
pub mod poisson_lab;
pub mod ramanujan;
pub mod rng;
pub mod run_stats;
pub mod sieve;
pub mod stats;

pub use coin_model::{Color, Coloring, Toss, TossSequence, WalkPath};
pub use error::{Error, Result};
pub use ramanujan::{PrimeClassification, RamanujanTable, RpParams};
pub use run_stats::{FirstOccurrence, Label, LabelStream, RunReport};
pub use sieve::PrimeTable;
