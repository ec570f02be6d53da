//! Slotted-time MaxWeight feedback allocation simulator.

pub mod config;
pub mod engine;
pub mod sweep;

pub use config::{CodebookParams, Policy, SimConfig};
pub use engine::{equal_static_allocation, overhead_estimate, run, run_with, SimResult};
pub use sweep::{stability_sweep, SweepReport};
