//! A tabular offline-reinforcement-learning laboratory for heuristic
//! blending (HUBL).
//!
//! The pipeline: generate behavior-policy rollouts from a known tabular MDP
//! ([`dataset`]), compute Monte-Carlo return heuristics and per-trajectory
//! blending factors and relabel the data with blended rewards and shrunk
//! discounts ([`relabel`]), solve the result with pessimistic value
//! iteration ([`solver`]), and account for the exact bias/regret split of
//! the induced suboptimality against dynamic-programming oracles
//! ([`mdp`], [`analysis`]).
//!
//! Every random process is seeded and documented; every solver is
//! deterministic; every identity the design relies on is checked by tests
//! against independently computed oracles.

pub mod analysis;
pub mod benchmark;
pub mod config;
pub mod dataset;
pub mod error;
pub mod mdp;
pub mod pipeline;
pub mod relabel;
pub mod solver;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
