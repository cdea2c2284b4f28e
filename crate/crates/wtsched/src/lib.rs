//! Solver toolkit for total weighted tardiness on unrelated parallel
//! machines with sequence- and machine-dependent setup times and a renewable
//! limit `WR` on how many setups may run at once.
//!
//! The crate provides:
//! - [`model`]: the domain types, sequential (contention-free) evaluation
//!   and the schedule feasibility checker;
//! - [`instgen`]: a seeded benchmark-instance generator and instance
//!   statistics;
//! - [`relaxation`]: a lower-bounding MILP built from per-job minimum setup
//!   times, with neutral MPS export, solution import, an in-process exact
//!   solver for tiny instances and the sequence-fixing primal repair;
//! - [`resalloc`]: exact optimal resource allocation for fixed sequences via
//!   branch-and-bound over active schedules, plus a greedy allocator;
//! - [`heuristics`]: ATCS dispatching, a genetic algorithm and simulated
//!   annealing, all coupled with the exact allocator;
//! - [`oracle`]: a brute-force exact solver for tiny instances, the ground
//!   truth used by the test suites;
//! - [`bench`]: Gap/Err metrics, experiment suites and what-if scenarios.
//!
//! With the default `parallel` feature the enumeration and batch-evaluation
//! loops run on rayon; without it every code path is sequential.

pub mod bench;
pub mod error;
pub mod heuristics;
pub mod instgen;
pub mod io;
pub mod model;
pub mod oracle;
mod par;
pub mod relaxation;
pub mod resalloc;
pub mod seeding;

pub use error::{Error, Result};
pub use model::{
    evaluate_sequential, extract_plan, validate, weighted_tardiness, Instance, InstanceMeta,
    JobId, JobTiming, MachineId, SequencePlan, Time, TimedSchedule, ValidationReport, Violation,
    ViolationKind,
};
