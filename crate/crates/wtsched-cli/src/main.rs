//! Command-line entry point wiring all toolkit modules. Exit codes: 0 on
//! success, 1 on domain errors (size caps, infeasible schedules, bad
//! files), 2 on usage errors (clap). See `docs/cli.md` for a worked
//! end-to-end session.

mod meta;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use wtsched::bench::{
    self, aggregates_csv, records_csv, render_summary, AlgoConfig, AlgoKind, GaKnobs, SaKnobs,
    SuiteSpec, WhatIfChange,
};
use wtsched::heuristics::{
    atcs_run, ga_run_with_stats, sa_run_with_stats, GaParams, SaParams,
};
use wtsched::instgen::{self, GenConfig, SetupMode, WrMode};
use wtsched::io;
use wtsched::model::{validate, Instance, TimedSchedule};
use wtsched::oracle::{solve_exact_tiny_with_caps, OracleCaps};
use wtsched::relaxation::{
    build_relaxation, compute_tmax, export_model, import_solution, mip_primal,
    solve_tiny_exact_with_caps, LbStatus, TinyCaps,
};
use wtsched::resalloc::{allocate_exact, allocate_greedy, AllocLimits};
use wtsched::seeding::derive_seed;

use meta::MetaWriter;

/// Environment variable holding an external MILP solver command template;
/// `{model}` and `{solution}` are substituted before the command runs.
const SOLVER_CMD_ENV: &str = "WTSCHED_SOLVER_CMD";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Csv,
    Json,
}

#[derive(Parser)]
#[command(
    name = "wtsched",
    version,
    about = "Weighted-tardiness scheduling on unrelated machines with resource-constrained setups"
)]
struct Cli {
    /// Master seed for anything stochastic in the subcommand.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Wall-clock limit in seconds for the iterative methods.
    #[arg(long, global = true)]
    time_limit: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    /// Log filter (error|warn|info|debug|trace).
    #[arg(long, global = true, default_value = "warn")]
    log_level: String,
    /// Worker threads for parallel sections (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random benchmark instance.
    Gen(GenArgs),
    /// Print observed due-date factors and mean durations of an instance.
    Stats {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Lower bounds via the relaxed MILP: export it, solve it in process for
    /// small instances, or import an external solver's solution.
    Lb(LbArgs),
    /// Allocate setup resources for a fixed plan.
    Alloc(AllocArgs),
    /// Solve an instance with one of the primal methods.
    Solve(SolveArgs),
    /// Exact brute-force optimum for tiny instances.
    Oracle {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 6)]
        cap_jobs: usize,
        #[arg(long, default_value_t = 3)]
        cap_machines: usize,
    },
    /// Run a declarative experiment suite and write CSV reports.
    Bench(BenchArgs),
    /// Re-solve an instance under a changed resource count or machine park.
    Whatif(WhatifArgs),
    /// Check a schedule file against its instance.
    Validate {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
    },
}

#[derive(Args)]
struct GenArgs {
    /// Number of machines (the benchmark grid uses 2, 5, 10, 15, 20).
    #[arg(long)]
    machines: usize,
    /// Jobs per machine (the benchmark grid uses 5 or 10).
    #[arg(long)]
    mult: u32,
    /// Setup recipe: alo = U[0.1,0.5]*p, ahi = U[0.5,1]*p, u525 = U(5,25).
    #[arg(long, default_value = "u525")]
    setup: String,
    /// Due-date tightness factor (benchmarks use 0.5 or 0.8).
    #[arg(long, default_value_t = 0.5)]
    tau: f64,
    /// Due-date range factor.
    #[arg(long, default_value_t = 0.8)]
    due_range: f64,
    /// Resource count: half = ceil(|M|/2), full = |M|.
    #[arg(long, default_value = "half")]
    wr: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct LbArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Primal upper bound for the tardiness horizon; defaults to the ATCS
    /// objective.
    #[arg(long)]
    ub: Option<i64>,
    /// Write the relaxed model as MPS text.
    #[arg(long)]
    export: Option<PathBuf>,
    /// Solve the relaxation exactly in process (size-capped).
    #[arg(long)]
    tiny: bool,
    /// Import a solver solution file (see docs/cli.md for the format).
    #[arg(long)]
    import: Option<PathBuf>,
    /// Write the recovered plan here.
    #[arg(long)]
    plan_out: Option<PathBuf>,
    #[arg(long, default_value_t = 8)]
    cap_jobs: usize,
    #[arg(long, default_value_t = 3)]
    cap_machines: usize,
}

#[derive(Args)]
struct AllocArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Plan file: JSON `{"seq": [[job ids per machine], ...]}`.
    #[arg(long)]
    plan: PathBuf,
    /// Use the greedy dispatcher instead of the exact search.
    #[arg(long)]
    greedy: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 5_000_000)]
    node_cap: u64,
    #[arg(long, default_value_t = 10)]
    time_cap: u64,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    /// One of: atcs, ga, sa-atcs, sa-ga, mip.
    #[arg(long)]
    algo: String,
    /// Independent repetitions with derived seeds; the best schedule wins.
    #[arg(long, default_value_t = 1)]
    runs: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 100)]
    ga_pop: usize,
    #[arg(long, default_value_t = 150)]
    ga_gens: usize,
    #[arg(long, default_value_t = 0.5)]
    ga_pc: f64,
    #[arg(long, default_value_t = 0.1)]
    ga_pm: f64,
    #[arg(long, default_value_t = 500.0)]
    sa_t0: f64,
    #[arg(long, default_value_t = 1.0)]
    sa_tcry: f64,
    #[arg(long, default_value_t = 0.9)]
    sa_q: f64,
    #[arg(long, default_value_t = 50)]
    sa_it: usize,
    /// Size caps for the mip method's in-process relaxation solve.
    #[arg(long, default_value_t = 8)]
    cap_jobs: usize,
    #[arg(long, default_value_t = 3)]
    cap_machines: usize,
}

#[derive(Args)]
struct BenchArgs {
    /// Suite file (JSON), see docs/cli.md.
    #[arg(long)]
    suite: PathBuf,
    /// Overrides the suite's repetition count.
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct WhatifArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Override the resource count.
    #[arg(long)]
    wr: Option<usize>,
    /// Add this many machines instead.
    #[arg(long)]
    add_machines: Option<usize>,
    /// Clone the new machines from this machine id (otherwise they are
    /// drawn from the generator distributions).
    #[arg(long)]
    donor: Option<usize>,
    #[arg(long, default_value = "ga")]
    algo: String,
    #[arg(long, default_value_t = 12)]
    ga_pop: usize,
    #[arg(long, default_value_t = 10)]
    ga_gens: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new().parse_filters(&cli.log_level).init();
    init_workers(cli.workers);
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

#[cfg(feature = "parallel")]
fn init_workers(workers: usize) {
    if workers > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global();
    }
}

#[cfg(not(feature = "parallel"))]
fn init_workers(_workers: usize) {}

fn run(cli: &Cli) -> anyhow::Result<()> {
    match &cli.command {
        Command::Gen(args) => cmd_gen(cli, args),
        Command::Stats { instance } => cmd_stats(cli, instance),
        Command::Lb(args) => cmd_lb(cli, args),
        Command::Alloc(args) => cmd_alloc(cli, args),
        Command::Solve(args) => cmd_solve(cli, args),
        Command::Oracle { instance, out, cap_jobs, cap_machines } => {
            cmd_oracle(cli, instance, out, *cap_jobs, *cap_machines)
        }
        Command::Bench(args) => cmd_bench(cli, args),
        Command::Whatif(args) => cmd_whatif(cli, args),
        Command::Validate { instance, schedule } => cmd_validate(cli, instance, schedule),
    }
}

fn cmd_gen(cli: &Cli, args: &GenArgs) -> anyhow::Result<()> {
    let config = GenConfig {
        machines: args.machines,
        jobs_multiplier: args.mult,
        setup_mode: SetupMode::parse(&args.setup)?,
        tau: args.tau,
        due_range: args.due_range,
        wr_mode: WrMode::parse(&args.wr)?,
        seed: cli.seed,
    };
    let meta = MetaWriter::new(cli.seed);
    let inst = instgen::generate(&config)?;
    io::write_instance(&args.out, &inst)?;
    meta.emit(&args.out, serde_json::to_value(&config)?)?;
    println!(
        "wrote {} ({} jobs x {} machines, WR {})",
        args.out.display(),
        inst.jobs,
        inst.machines,
        inst.wr
    );
    Ok(())
}

fn cmd_stats(cli: &Cli, instance: &Path) -> anyhow::Result<()> {
    let inst = io::read_instance(instance)?;
    let st = instgen::stats(&inst)?;
    match cli.format {
        OutputFormat::Json => println!("{}", serde_json::to_string_pretty(&st)?),
        OutputFormat::Csv => {
            println!("metric,value");
            println!("tau_real,{:.6}", st.tau_real);
            println!("range_real,{:.6}", st.range_real);
            println!("cmax_estimate,{}", st.cmax_estimate);
            println!("mean_p,{:.6}", st.mean_p);
            println!("mean_s,{:.6}", st.mean_s);
        }
        OutputFormat::Text => {
            println!("tau_real       {:.6}", st.tau_real);
            println!("range_real     {:.6}", st.range_real);
            println!("cmax_estimate  {}", st.cmax_estimate);
            println!("mean_p         {:.6}", st.mean_p);
            println!("mean_s         {:.6}", st.mean_s);
        }
    }
    Ok(())
}

fn cmd_lb(cli: &Cli, args: &LbArgs) -> anyhow::Result<()> {
    let inst = io::read_instance(&args.instance)?;
    let meta = MetaWriter::new(cli.seed);
    let caps = TinyCaps { max_jobs: args.cap_jobs, max_machines: args.cap_machines };

    if let Some(export_path) = &args.export {
        let ub = match args.ub {
            Some(ub) => ub,
            None => atcs_run(&inst, &AllocLimits::default())?.objective,
        };
        let t_max = compute_tmax(&inst, ub)?;
        let model = build_relaxation(&inst, t_max)?;
        std::fs::write(export_path, export_model(&model))?;
        meta.emit(export_path, serde_json::json!({ "ub": ub, "t_max": t_max }))?;
        println!("exported model with t_max {t_max} to {}", export_path.display());

        // With a solver command template configured, produce the solution
        // file for a pending --import in one go.
        if let Some(import_path) = &args.import {
            if !import_path.exists() {
                if let Ok(template) = std::env::var(SOLVER_CMD_ENV) {
                    run_external_solver(&template, export_path, import_path)?;
                }
            }
        }
    }

    let result = if args.tiny {
        Some(solve_tiny_exact_with_caps(&inst, &caps)?)
    } else if let Some(import_path) = &args.import {
        let model_tmax = match args.ub {
            Some(ub) => compute_tmax(&inst, ub)?,
            None => compute_tmax(&inst, atcs_run(&inst, &AllocLimits::default())?.objective)?,
        };
        let model = build_relaxation(&inst, model_tmax)?;
        let text = std::fs::read_to_string(import_path)?;
        Some(import_solution(&model, &text)?)
    } else {
        None
    };

    if let Some(result) = result {
        let status = match result.status {
            LbStatus::Optimal => "optimal",
            LbStatus::BoundOnly => "bound_only",
            LbStatus::InfeasibleModel => "infeasible",
        };
        println!("bound {} status {}", result.bound, status);
        if let Some(plan) = &result.plan {
            println!("plan {}", serde_json::to_string(&plan.seq)?);
            if let Some(path) = &args.plan_out {
                io::write_plan(path, plan)?;
                meta.emit(path, serde_json::json!({ "bound": result.bound, "status": status }))?;
            }
        }
    } else if args.export.is_none() {
        anyhow::bail!("nothing to do: pass --tiny, --import FILE or --export FILE");
    }
    Ok(())
}

fn run_external_solver(template: &str, model: &Path, solution: &Path) -> anyhow::Result<()> {
    let command = template
        .replace("{model}", &model.display().to_string())
        .replace("{solution}", &solution.display().to_string());
    log::info!("running external solver: {command}");
    let status = std::process::Command::new("sh").arg("-c").arg(&command).status()?;
    anyhow::ensure!(status.success(), "external solver command failed: {command}");
    Ok(())
}

fn cmd_alloc(cli: &Cli, args: &AllocArgs) -> anyhow::Result<()> {
    let inst = io::read_instance(&args.instance)?;
    let plan = io::read_plan(&args.plan, &inst)?;
    let meta = MetaWriter::new(cli.seed);
    let limits = AllocLimits {
        node_cap: args.node_cap,
        time_cap: std::time::Duration::from_secs(args.time_cap),
    };
    let sched = if args.greedy {
        allocate_greedy(&inst, &plan)?
    } else {
        allocate_exact(&inst, &plan, &limits)?
    };
    print_schedule_line(&sched);
    if let Some(out) = &args.out {
        io::write_schedule(out, &sched)?;
        meta.emit(out, serde_json::json!({ "greedy": args.greedy }))?;
    }
    Ok(())
}

fn print_schedule_line(sched: &TimedSchedule) {
    println!(
        "objective {} proven_optimal_allocation {}",
        sched.objective, sched.proven_optimal_allocation
    );
}

fn solve_once(
    inst: &Instance,
    algo: AlgoKind,
    seed: u64,
    args: &SolveArgs,
    time_limit: Option<u64>,
) -> anyhow::Result<TimedSchedule> {
    let limits = AllocLimits::default();
    let ga_params = GaParams {
        pop_size: args.ga_pop,
        generations: args.ga_gens,
        crossover_threshold: args.ga_pc,
        mutation_rate: args.ga_pm,
        time_limit: time_limit.map(std::time::Duration::from_secs),
        seed,
        alloc_limits: limits,
        audit_pruning: false,
    };
    let sa_params = SaParams {
        t0: args.sa_t0,
        t_cry: args.sa_tcry,
        cooling: args.sa_q,
        iters_per_temp: args.sa_it,
        seed: derive_seed(seed, &[3]),
        alloc_limits: limits,
    };
    let sched = match algo {
        AlgoKind::Atcs => atcs_run(inst, &limits)?,
        AlgoKind::Ga => ga_run_with_stats(inst, &ga_params)?.0,
        AlgoKind::SaAtcs => {
            let initial = atcs_run(inst, &limits)?;
            sa_run_with_stats(inst, &initial, &sa_params)?.0
        }
        AlgoKind::SaGa => {
            let initial = ga_run_with_stats(inst, &ga_params)?.0;
            sa_run_with_stats(inst, &initial, &sa_params)?.0
        }
        AlgoKind::Mip => {
            let caps = TinyCaps { max_jobs: args.cap_jobs, max_machines: args.cap_machines };
            let lb = solve_tiny_exact_with_caps(inst, &caps)?;
            let plan = lb.plan.expect("exact solve returns a plan");
            mip_primal(inst, &plan, &limits)?
        }
    };
    Ok(sched)
}

fn cmd_solve(cli: &Cli, args: &SolveArgs) -> anyhow::Result<()> {
    anyhow::ensure!(args.runs >= 1, "--runs must be at least 1");
    let inst = io::read_instance(&args.instance)?;
    let algo = AlgoKind::parse(&args.algo)?;
    let meta = MetaWriter::new(cli.seed);

    let mut best: Option<TimedSchedule> = None;
    for rep in 0..args.runs {
        let seed = derive_seed(cli.seed, &[4, rep as u64]);
        let sched = solve_once(&inst, algo, seed, args, cli.time_limit)?;
        println!("run {rep} seed {seed} objective {}", sched.objective);
        if best.as_ref().is_none_or(|b| sched.objective < b.objective) {
            best = Some(sched);
        }
    }
    let best = best.unwrap();
    let report = validate(&inst, &best);
    anyhow::ensure!(report.feasible, "produced schedule failed validation: {:?}", report.violations);
    print_schedule_line(&best);
    io::write_schedule(&args.out, &best)?;
    meta.emit(
        &args.out,
        serde_json::json!({
            "algo": args.algo,
            "runs": args.runs,
            "objective": best.objective,
            "ga": { "pop": args.ga_pop, "gens": args.ga_gens, "pc": args.ga_pc, "pm": args.ga_pm },
            "sa": { "t0": args.sa_t0, "tcry": args.sa_tcry, "q": args.sa_q, "it": args.sa_it },
            "time_limit_s": cli.time_limit,
        }),
    )?;
    Ok(())
}

fn cmd_oracle(
    cli: &Cli,
    instance: &Path,
    out: &Path,
    cap_jobs: usize,
    cap_machines: usize,
) -> anyhow::Result<()> {
    let inst = io::read_instance(instance)?;
    let meta = MetaWriter::new(cli.seed);
    let caps = OracleCaps { max_jobs: cap_jobs, max_machines: cap_machines };
    let sched = solve_exact_tiny_with_caps(&inst, &caps)?;
    print_schedule_line(&sched);
    io::write_schedule(out, &sched)?;
    meta.emit(out, serde_json::json!({ "cap_jobs": cap_jobs, "cap_machines": cap_machines }))?;
    Ok(())
}

fn cmd_bench(cli: &Cli, args: &BenchArgs) -> anyhow::Result<()> {
    let meta = MetaWriter::new(cli.seed);
    let text = std::fs::read_to_string(&args.suite)?;
    let mut spec: SuiteSpec = serde_json::from_str(&text)?;
    if let Some(reps) = args.reps {
        spec.reps = reps;
    }
    if let Some(limit) = cli.time_limit {
        spec.config.time_limit_s = Some(limit);
    }
    let output = bench::run_suite(&spec, cli.workers)?;
    std::fs::create_dir_all(&args.out)?;
    let records_path = args.out.join("records.csv");
    let aggregates_path = args.out.join("aggregates.csv");
    let summary_path = args.out.join("summary.txt");
    std::fs::write(&records_path, records_csv(&output.records))?;
    std::fs::write(&aggregates_path, aggregates_csv(&output.aggregates))?;
    let summary = render_summary(&output);
    std::fs::write(&summary_path, &summary)?;
    let spec_echo = serde_json::to_value(&spec)?;
    for artifact in [&records_path, &aggregates_path, &summary_path] {
        meta.emit(artifact, spec_echo.clone())?;
    }
    match cli.format {
        OutputFormat::Csv => print!("{}", records_csv(&output.records)),
        _ => print!("{summary}"),
    }
    anyhow::ensure!(
        output.failures.is_empty(),
        "{} runs failed; see {}",
        output.failures.len(),
        summary_path.display()
    );
    Ok(())
}

fn cmd_whatif(cli: &Cli, args: &WhatifArgs) -> anyhow::Result<()> {
    let inst = io::read_instance(&args.instance)?;
    let change = match (args.wr, args.add_machines) {
        (Some(wr), None) => WhatIfChange::Wr(wr),
        (None, Some(count)) => WhatIfChange::AddMachines { count, donor: args.donor },
        _ => anyhow::bail!("pass exactly one of --wr N or --add-machines N"),
    };
    let algo = AlgoKind::parse(&args.algo)?;
    let config = AlgoConfig {
        ga: GaKnobs {
            pop_size: args.ga_pop,
            generations: args.ga_gens,
            ..GaKnobs::default()
        },
        sa: SaKnobs::default(),
        time_limit_s: cli.time_limit,
        ..AlgoConfig::default()
    };
    let report = bench::whatif(&inst, &change, algo, cli.seed, &config)?;
    match cli.format {
        OutputFormat::Json => println!("{}", serde_json::to_string_pretty(&report)?),
        _ => {
            println!("scenario        {}", report.scenario);
            println!("algo            {}", report.algo);
            println!("base objective  {}", report.base_objective);
            println!("new objective   {}", report.new_objective);
            println!("change          {}", report.absolute_change);
            match report.percent_change {
                Some(pct) => println!("change %        {pct:.2}"),
                None => println!("change %        n/a (base objective is 0)"),
            }
        }
    }
    Ok(())
}

fn cmd_validate(cli: &Cli, instance: &Path, schedule: &Path) -> anyhow::Result<()> {
    let inst = io::read_instance(instance)?;
    let sched = io::read_schedule(schedule, &inst)?;
    let report = validate(&inst, &sched);
    match cli.format {
        OutputFormat::Json => println!("{}", serde_json::to_string_pretty(&report)?),
        _ => {
            println!("feasible {}", report.feasible);
            for v in &report.violations {
                println!("violation {} {}", v.kind, v.detail);
            }
        }
    }
    anyhow::ensure!(report.feasible, "schedule is infeasible");
    Ok(())
}

#[cfg(test)]
mod tests {
    #[test]
    fn solver_template_substitution() {
        let template = "mysolver {model} --out {solution}";
        let cmd = template
            .replace("{model}", "/tmp/m.mps")
            .replace("{solution}", "/tmp/s.txt");
        assert_eq!(cmd, "mysolver /tmp/m.mps --out /tmp/s.txt");
    }
}
