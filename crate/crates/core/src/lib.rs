//! Conservative multi-armed bandits.
//!
//! A learner chooses among `K + 1` arms, where arm 0 is a *default* arm whose
//! return serves as a baseline. The conservative learner must keep its
//! cumulative reward above a `(1 - alpha)` fraction of what the default arm
//! would have earned, at every round, while still minimizing regret.
//!
//! The crate is organised as:
//!
//! - [`domain`]: arm statistics, problem instances, budget accounting and
//!   regret metrics.
//! - [`confidence`]: the confidence-width functions and interval radius.
//! - [`policies`]: UCB, Conservative UCB (known and unknown default mean, plus
//!   the lower-confidence fallback), BudgetFirst, Unbalanced MOSS, EXP3-IX and
//!   the safe-playing wrapper for adversarial learners.
//! - [`environments`]: stochastic and adversarial reward generators.
//! - [`harness`]: episode runner, Monte Carlo aggregation, audits and CSV
//!   output.

pub mod confidence;
pub mod domain;
pub mod environments;
mod error;
pub mod harness;
pub mod policies;
pub mod rng;
pub mod sum;

pub use error::{Error, Result};

/// Index of the default (conservative) arm.
pub const DEFAULT_ARM: usize = 0;
