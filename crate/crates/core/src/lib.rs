//! Feedback-bit allocation for limited-feedback OFDMA downlinks.
//!
//! The crate is organised bottom-up:
//!
//! * [`problem`] holds the allocation data model (rate tables, budgets,
//!   virtual users) shared by every solver and by the simulator.
//! * [`rates`] materialises rate tables from physical-layer models: the
//!   SISO uniform-quantizer link, the 2x1 MISO random-vector-quantization
//!   approximation and Monte-Carlo RVQ codebooks.
//! * [`solvers`] contains the exact dynamic program, the greedy
//!   marginal-utility allocator, the water-filling relaxation with floor
//!   rounding and a brute-force oracle.
//! * [`sim`] runs the slotted MaxWeight feedback allocation loop over a
//!   fixed slow schedule and measures stability knees.

pub mod error;
pub mod problem;
pub mod quad;
pub mod rates;
pub mod rng;
pub mod sim;
pub mod solvers;

pub use error::{Error, Result};
pub use problem::{
    virtualize, weighted_sum_rate, Allocation, AllocationProblem, Assignment,
    FractionalAllocation, RateTable, VirtualSystem,
};
pub use rates::{ChannelProfile, MisoModel, RateModel, SisoModel, SuperCodebook};
pub use sim::{Policy, SimConfig, SimResult};
pub use solvers::{Certificate, Solution, SolverKind};
