//! Closed-form analysis and Monte Carlo validation of combined selfish-mining
//! and double-spending attacks on longest-chain proof-of-work blockchains.
//!
//! The crate is organised bottom-up:
//!
//! - [`combinatorics`]: Catalan numbers, Pre-Dyck path counts, the Catalan
//!   generating function and the Wald extension term.
//! - [`analytic`]: cycle-outcome probabilities, revenue ratios, double-spend
//!   event probabilities and combined revenue for L-stubborn and S-stealth
//!   mining.
//! - [`optimize`]: optimal (`L*`, `S*`) and maximal profitable (`L̄`, `S̄`)
//!   stubbornness levels.
//! - [`sim`]: a seeded, worker-count invariant attack-cycle simulator.
//! - [`cli`]: the `stubborn` command-line front end.

pub mod analytic;
pub mod cli;
pub mod combinatorics;
pub mod error;
pub mod optimize;
pub mod report;
pub mod sim;

pub use analytic::{
    CombinedRevenueParams, EventProbs, ModelParams, RevenueReport, RewardBound, Strategy,
    StubbornLevel,
};
pub use error::{Error, Result};
pub use optimize::{OptimizerResult, SearchMethod};
pub use sim::{SimConfig, SimEstimate};
