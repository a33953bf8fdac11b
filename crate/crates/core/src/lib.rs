#![no_std]
//! Scheduling tasks on unrelated crowd workers who are reached only through opportunistic
//! contacts with a requester.
//!
//! A task `j` handed to worker `i` completes at `C_j = 2φ_i + Σ p_ik` over the tasks up to and
//! including `j` in the worker's sequence, where `φ_i` is the expected inter-contact time. The
//! crate minimizes `Σ_j w_j C_j` with list-scheduling baselines ([`lrf`]), LP relaxations
//! ([`lp`]), randomized rounding and its derandomizations ([`rounding`]), and an online re-planning
//! loop driven by contact traces ([`online`]). [`oracle`] gives exact optima on tiny instances and
//! [`data`] builds synthetic and trace-derived instances.

extern crate alloc;

pub mod data;
pub mod error;
mod fenwick;
pub mod lp;
pub mod lrf;
pub mod model;
pub mod online;
pub mod oracle;
pub mod rounding;

pub use error::{Error, Result};
pub use lp::{lower_bound, FractionalSolution, LpModel};
pub use lrf::{lrf_identical, lrf_variant, LrfVariant};
pub use model::{evaluate, Evaluation, Instance, Schedule, TaskProfile, WorkerProfile};
