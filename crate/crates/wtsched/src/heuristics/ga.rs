//! Genetic algorithm over job permutations.
//!
//! A chromosome orders all jobs; decoding assigns them left to right to the
//! machine with the smallest weighted-tardiness increase (ties: earliest
//! completion, then lowest machine id). The accumulated decode value uses
//! contention-free timing, so when resources bind it is a lower bound on the
//! true cost of the decoded plan: offspring whose bound already reaches the
//! population cutoff are discarded without running the exact allocator,
//! which is where most of the run time would otherwise go.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Instance, JobId, SequencePlan, Time, TimedSchedule};
use crate::par;
use crate::relaxation::mip_primal;
use crate::resalloc::{allocate_exact, AllocLimits};

/// A permutation of all job ids.
pub type Chromosome = Vec<JobId>;

#[derive(Debug, Clone)]
pub struct GaParams {
    pub pop_size: usize,
    pub generations: usize,
    /// Two drawn individuals become parents when `r_c > crossover_threshold`.
    pub crossover_threshold: f64,
    /// Offspring pair is mutated when `r_m < mutation_rate`.
    pub mutation_rate: f64,
    pub time_limit: Option<Duration>,
    pub seed: u64,
    pub alloc_limits: AllocLimits,
    /// Recompute the exact fitness of pruned offspring and record it
    /// alongside the cutoff; used by the pruning-soundness checks.
    pub audit_pruning: bool,
}

impl Default for GaParams {
    fn default() -> Self {
        GaParams {
            pop_size: 100,
            generations: 150,
            crossover_threshold: 0.5,
            mutation_rate: 0.1,
            time_limit: Some(Duration::from_secs(3600)),
            seed: 0,
            alloc_limits: AllocLimits::default(),
            audit_pruning: false,
        }
    }
}

/// Decode result: `fitness` is exact unless `pruned` is set, in which case
/// it carries the contention-free proxy that hit the cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutcome {
    pub fitness: i64,
    pub plan: SequencePlan,
    pub pruned: bool,
}

/// Exact fitness recomputed for a pruned chromosome, with the cutoff that
/// pruned it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PruningAudit {
    pub proxy: i64,
    pub cutoff: i64,
    pub exact: i64,
}

/// Run diagnostics.
#[derive(Debug, Clone, Default)]
pub struct GaStats {
    pub generations_run: usize,
    pub decoded: u64,
    /// Exact allocator invocations made while decoding.
    pub exact_evaluations: u64,
    pub pruned_count: u64,
    /// Best exact fitness after the initial population and each generation.
    pub best_history: Vec<i64>,
    pub pruning_audit: Vec<PruningAudit>,
}

/// Decodes a chromosome. With `WR = |M|` the accumulated value is exact.
/// Otherwise, when a `cutoff` is given and the accumulated value already
/// reaches it the chromosome is discarded as pruned (sound, because the
/// accumulated value lower-bounds the allocated one); otherwise the exact
/// value comes from the optimal resource allocation of the decoded plan.
pub fn ga_decode(
    genes: &[JobId],
    inst: &Instance,
    cutoff: Option<i64>,
    limits: &AllocLimits,
) -> Result<DecodeOutcome> {
    if genes.len() != inst.jobs {
        return Err(Error::InvalidArgument(format!(
            "chromosome length {} != {} jobs",
            genes.len(),
            inst.jobs
        )));
    }
    let mut seen = vec![false; inst.jobs];
    for &j in genes {
        if j >= inst.jobs || seen[j] {
            return Err(Error::InvalidArgument("chromosome is not a permutation".into()));
        }
        seen[j] = true;
    }

    let mut loads: Vec<Time> = vec![0; inst.machines];
    let mut last: Vec<Option<JobId>> = vec![None; inst.machines];
    let mut seq: Vec<Vec<JobId>> = vec![Vec::new(); inst.machines];
    let mut accumulated: i64 = 0;
    for &j in genes {
        let mut best: Option<(i64, Time, usize)> = None;
        for m in 0..inst.machines {
            let completion = loads[m] + inst.setup_after(last[m], j, m) + inst.p[j][m];
            let wt = inst.w[j] * 0.max(completion - inst.d[j]);
            if best.is_none_or(|(bwt, bc, _)| (wt, completion) < (bwt, bc)) {
                best = Some((wt, completion, m));
            }
        }
        let (wt, completion, m) = best.unwrap();
        loads[m] = completion;
        last[m] = Some(j);
        seq[m].push(j);
        accumulated += wt;
    }
    let plan = SequencePlan::new(seq);

    if inst.wr == inst.machines {
        return Ok(DecodeOutcome { fitness: accumulated, plan, pruned: false });
    }
    if let Some(cut) = cutoff {
        if accumulated >= cut {
            return Ok(DecodeOutcome { fitness: accumulated, plan, pruned: true });
        }
    }
    let exact = allocate_exact(inst, &plan, limits)?.objective;
    Ok(DecodeOutcome { fitness: exact, plan, pruned: false })
}

/// One-point crossover with repair. Offspring keep their left donor's head
/// and the other parent's tail; genes of the head duplicated in the tail are
/// dropped, then the missing genes are inserted at the split point in the
/// order they appear in the left donor.
pub fn ga_crossover(p1: &[JobId], p2: &[JobId], split: usize) -> (Chromosome, Chromosome) {
    assert_eq!(p1.len(), p2.len(), "parents must have equal length");
    assert!(split >= 1 && split < p1.len(), "split point out of range");

    fn repaired(left_donor: &[JobId], tail: &[JobId]) -> Chromosome {
        let cap = left_donor.iter().copied().max().map_or(0, |g| g + 1);
        let mut in_tail = vec![false; cap];
        for &g in tail {
            in_tail[g] = true;
        }
        let split = left_donor.len() - tail.len();
        let mut out: Chromosome =
            left_donor[..split].iter().copied().filter(|&g| !in_tail[g]).collect();
        let mut present = in_tail;
        for &g in &out {
            present[g] = true;
        }
        out.extend(left_donor.iter().copied().filter(|&g| !present[g]));
        out.extend_from_slice(tail);
        out
    }

    (repaired(p1, &p2[split..]), repaired(p2, &p1[split..]))
}

/// Swaps two distinct uniformly drawn positions. Single-gene chromosomes
/// have no swap and are left untouched.
pub fn ga_mutate<R: Rng>(genes: &mut [JobId], rng: &mut R) {
    if genes.len() < 2 {
        return;
    }
    let a = rng.random_range(0..genes.len());
    let mut b = rng.random_range(0..genes.len());
    while b == a {
        b = rng.random_range(0..genes.len());
    }
    genes.swap(a, b);
}

#[derive(Clone)]
struct Individual {
    genes: Chromosome,
    fitness: i64,
    pruned: bool,
}

/// Runs the genetic algorithm and returns the best schedule found.
pub fn ga_run(inst: &Instance, params: &GaParams) -> Result<TimedSchedule> {
    ga_run_with_stats(inst, params).map(|(sched, _)| sched)
}

pub fn ga_run_with_stats(inst: &Instance, params: &GaParams) -> Result<(TimedSchedule, GaStats)> {
    if params.pop_size < 2 {
        return Err(Error::InvalidArgument("population size must be at least 2".into()));
    }
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut stats = GaStats::default();

    let identity: Chromosome = (0..inst.jobs).collect();
    let initial_genes: Vec<Chromosome> = (0..params.pop_size)
        .map(|_| {
            let mut genes = identity.clone();
            shuffle(&mut genes, &mut rng);
            genes
        })
        .collect();

    // The first generation is decoded without a cutoff: every fitness is
    // exact, which is what defines the first cutoff.
    let decoded = decode_batch(inst, &initial_genes, None, params, &mut stats)?;
    let mut population: Vec<Individual> = initial_genes
        .into_iter()
        .zip(decoded)
        .map(|(genes, out)| Individual { genes, fitness: out.fitness, pruned: out.pruned })
        .collect();
    population.sort_by_key(|ind| (ind.fitness, ind.pruned));
    stats.best_history.push(best_exact(&population).expect("initial decode is exact").fitness);

    // A single job admits a single chromosome: nothing to evolve.
    let generations = if inst.jobs < 2 { 0 } else { params.generations };
    for generation in 1..=generations {
        if let Some(limit) = params.time_limit {
            if start.elapsed() >= limit {
                log::info!("time limit reached after {} generations", generation - 1);
                break;
            }
        }
        let cutoff = population
            .iter()
            .filter(|ind| !ind.pruned)
            .map(|ind| ind.fitness)
            .max()
            .expect("population always holds exact individuals");

        // Pair off a working copy; parents only breed when the draw clears
        // the crossover threshold, and one draw gates mutating both
        // offspring.
        let mut working: Vec<usize> = (0..population.len()).collect();
        let mut offspring_genes: Vec<Chromosome> = Vec::new();
        while working.len() >= 2 {
            let x = working.swap_remove(rng.random_range(0..working.len()));
            let y = working.swap_remove(rng.random_range(0..working.len()));
            let r_c: f64 = rng.random();
            if r_c > params.crossover_threshold {
                let split = rng.random_range(1..inst.jobs);
                let (mut a, mut b) =
                    ga_crossover(&population[x].genes, &population[y].genes, split);
                let r_m: f64 = rng.random();
                if r_m < params.mutation_rate {
                    ga_mutate(&mut a, &mut rng);
                    ga_mutate(&mut b, &mut rng);
                }
                offspring_genes.push(a);
                offspring_genes.push(b);
            }
        }

        let decoded = decode_batch(inst, &offspring_genes, Some(cutoff), params, &mut stats)?;
        population.extend(offspring_genes.into_iter().zip(decoded).map(|(genes, out)| {
            Individual { genes, fitness: out.fitness, pruned: out.pruned }
        }));

        // Survival: smallest fitness first; on equal fitness an exact
        // individual outranks a pruned one.
        population.sort_by_key(|ind| (ind.fitness, ind.pruned));
        population.truncate(params.pop_size);
        stats.best_history.push(best_exact(&population).expect("exact survivor exists").fitness);
        stats.generations_run = generation;
    }

    let best = best_exact(&population).expect("exact individual exists").genes.clone();
    let outcome = ga_decode(&best, inst, None, &params.alloc_limits)?;
    let sched = mip_primal(inst, &outcome.plan, &params.alloc_limits)?;
    Ok((sched, stats))
}

fn best_exact(population: &[Individual]) -> Option<&Individual> {
    population.iter().filter(|ind| !ind.pruned).min_by_key(|ind| ind.fitness)
}

fn decode_batch(
    inst: &Instance,
    genes: &[Chromosome],
    cutoff: Option<i64>,
    params: &GaParams,
    stats: &mut GaStats,
) -> Result<Vec<DecodeOutcome>> {
    // Decoding is pure given the frozen cutoff, so the batch runs in
    // parallel without touching the driver's RNG sequence.
    let outcomes: Vec<Result<DecodeOutcome>> = par::map_indexed(genes, |g| {
        ga_decode(g, inst, cutoff, &params.alloc_limits)
    });
    let outcomes: Vec<DecodeOutcome> = outcomes.into_iter().collect::<Result<_>>()?;
    stats.decoded += outcomes.len() as u64;
    if inst.wr < inst.machines {
        for out in &outcomes {
            if out.pruned {
                stats.pruned_count += 1;
            } else {
                stats.exact_evaluations += 1;
            }
        }
        if params.audit_pruning {
            let pruned: Vec<&DecodeOutcome> = outcomes.iter().filter(|o| o.pruned).collect();
            if !pruned.is_empty() {
                let cutoff = cutoff.expect("pruned outcomes imply a cutoff");
                let exacts: Vec<Result<i64>> = par::map_indexed(&pruned, |out| {
                    allocate_exact(inst, &out.plan, &params.alloc_limits).map(|s| s.objective)
                });
                for (out, exact) in pruned.iter().zip(exacts) {
                    stats.pruning_audit.push(PruningAudit {
                        proxy: out.fitness,
                        cutoff,
                        exact: exact?,
                    });
                }
            }
        }
    }
    Ok(outcomes)
}

/// Fisher-Yates driven by the run's seeded stream.
fn shuffle<R: Rng>(genes: &mut [JobId], rng: &mut R) {
    for i in (1..genes.len()).rev() {
        let j = rng.random_range(0..=i);
        genes.swap(i, j);
    }
}
