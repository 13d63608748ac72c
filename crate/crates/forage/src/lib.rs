//! Patch-foraging simulation and analysis toolkit.
//!
//! The crate has three layers:
//!
//! * [`mvt`] computes, in closed form over a scanned range, how long a
//!   forager should stay in a depleting patch before moving on, and the
//!   intake rate that residence achieves.
//! * [`map`] and [`env`] implement a deterministic two-patch grid world
//!   with exponentially depleting rewards, opposite-patch replenishment,
//!   and partial observations (local tile window plus a freshness cue).
//! * [`agents`] and [`eval`] train tabular model-free and model-based
//!   foragers on that world and measure how their patch-leaving behaviour
//!   compares to the analytic optimum.
//!
//! The `forage` binary wires these together behind `mvt`, `train`, `probe`
//! and `play` subcommands driven by a TOML run configuration.

pub mod agents;
pub mod config;
pub mod env;
pub mod error;
pub mod eval;
pub mod map;
pub mod mvt;
pub mod rng;

pub use error::{Error, Result};
