//! Primal methods: ATCS dispatching, a genetic algorithm over job
//! permutations, and simulated annealing over plans. Each method finishes by
//! handing its sequences to the exact resource allocator, so every returned
//! schedule is feasible for the instance's `WR`.

mod atcs;
mod ga;
mod sa;

pub use atcs::{atcs_priority, atcs_run, atcs_scaling, atcs_sequence, AtcsScaling};
pub use ga::{
    ga_crossover, ga_decode, ga_mutate, ga_run, ga_run_with_stats, Chromosome, DecodeOutcome,
    GaParams, GaStats, PruningAudit,
};
pub use sa::{
    acceptance_probability, cooling_steps, sa_external_swap, sa_internal_swap, sa_run,
    sa_run_with_stats, SaParams, SaStats,
};
