//! Optimal relay transform matrices (RTMs) for two-hop amplify-and-forward
//! MIMO relay networks with a direct source-to-destination link.
//!
//! The crate is `no_std` (it needs `alloc`) and carries only the numerics:
//!
//! - [`matalg`]: Hermitian eigendecomposition and the thin factorizations
//!   the optimizers are built from.
//! - [`network`]: antenna counts, channel sets, power budgets and the SNR
//!   scenario normalization.
//! - [`opt_capacity`]: the capacity-optimal RTM and its water-filling solver.
//! - [`opt_ostbc`]: the OSTBC-capacity-optimal RTM, its exact
//!   piecewise-linear water-filling and the rearrangement bounds.
//! - [`evaluate`]: capacities, the naive amplify-and-forward baseline, KKT
//!   residuals and a brute-force oracle for the water-filling problems.
//!
//! Channel sampling, Monte Carlo sweeps and the command-line front end live
//! in the `relay-rtm` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
pub mod evaluate;
pub mod matalg;
pub mod network;
pub mod opt_capacity;
pub mod opt_ostbc;
#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
pub use evaluate::{CapacityReport, KktReport, Metric, Objective};
pub use matalg::{CMatrix, HermEig, ThinUd, DEFAULT_RANK_TOL};
pub use network::{ChannelSet, Dims, PowerBudget, SnrScenario};
pub use opt_capacity::{
    Criterion, RtmKind, RtmSolution, SpectraBundle, WaterLevel, WaterfillSolution,
};

pub use num_complex::Complex64;
