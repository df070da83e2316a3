//! A laboratory for the elitist (μ+λ) evolutionary algorithm with the
//! 1-Bit-Swap recombination operator on the Royal Roads plateau function.
//!
//! The crate has four layers:
//!
//! * [`problem`]: bin geometry, genomes, Royal Roads and OneMax fitness,
//!   initialization policies.
//! * [`engine`]: tournament selection, 1-Bit-Swap, elitist replacement and
//!   first-hitting-time measurement for single seeded runs.
//! * [`theory`]: the probability model of an improvement step and the exact,
//!   approximate and asymptotic expected hitting times, together with the
//!   digamma function and quadrature oracles used to check them.
//! * [`experiments`]: seeded replicate batches, summary statistics and the
//!   CSV tables that put theory and simulation side by side.

pub mod engine;
pub mod error;
pub mod experiments;
pub mod problem;
pub mod theory;

pub use error::{Error, Result};
pub use problem::{FitnessValue, Genome, InitPolicy, RoyalRoadLayout};
