//! End-to-end checks of the command-line surface: exit codes, artifact
//! round trips, metadata sidecars, and the external-solver hook.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn wtsched(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wtsched"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn gen_instance(dir: &Path, name: &str, mult: &str, seed: &str) -> PathBuf {
    let path = dir.join(name);
    let out = wtsched(
        &[
            "gen",
            "--machines",
            "2",
            "--mult",
            mult,
            "--setup",
            "u525",
            "--tau",
            "0.5",
            "--wr",
            "half",
            "--seed",
            seed,
            "--out",
            path.to_str().unwrap(),
        ],
        dir,
    );
    assert!(out.status.success(), "gen failed: {}", String::from_utf8_lossy(&out.stderr));
    path
}

#[test]
fn gen_solve_validate_happy_path() {
    let dir = TempDir::new().unwrap();
    let inst = gen_instance(dir.path(), "inst.json", "2", "7");
    assert!(dir.path().join("inst.json.meta.json").exists());

    let sched = dir.path().join("sched.json");
    let out = wtsched(
        &[
            "solve",
            "--instance",
            inst.to_str().unwrap(),
            "--algo",
            "atcs",
            "--out",
            sched.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("objective"));
    assert!(dir.path().join("sched.json.meta.json").exists());

    let out = wtsched(
        &[
            "validate",
            "--instance",
            inst.to_str().unwrap(),
            "--schedule",
            sched.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("feasible true"));
}

#[test]
fn missing_required_flag_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let out = wtsched(&["solve", "--algo", "ga"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let out = wtsched(&["frobnicate"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn lb_tiny_respects_the_size_cap() {
    let dir = TempDir::new().unwrap();
    // 2 machines x 6 jobs/machine = 12 jobs > the default 8-job cap.
    let inst = gen_instance(dir.path(), "big.json", "6", "3");
    let out = wtsched(
        &["lb", "--instance", inst.to_str().unwrap(), "--tiny"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("size cap"));
}

#[test]
fn lb_tiny_reports_bound_and_plan() {
    let dir = TempDir::new().unwrap();
    let inst = gen_instance(dir.path(), "tiny.json", "2", "5");
    let plan_path = dir.path().join("plan.json");
    let out = wtsched(
        &[
            "lb",
            "--instance",
            inst.to_str().unwrap(),
            "--tiny",
            "--plan-out",
            plan_path.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("bound"));
    assert!(stdout.contains("status optimal"));
    assert!(plan_path.exists());
}

#[test]
fn generation_is_reproducible_at_the_cli() {
    let dir = TempDir::new().unwrap();
    let a = gen_instance(dir.path(), "a.json", "2", "99");
    let b = gen_instance(dir.path(), "b.json", "2", "99");
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}

#[test]
fn alloc_prices_a_plan_file() {
    let dir = TempDir::new().unwrap();
    let inst_path = gen_instance(dir.path(), "inst.json", "2", "13");
    let inst = wtsched::io::read_instance(&inst_path).unwrap();
    let plan = wtsched::model::SequencePlan::new(vec![(0..2).collect(), (2..4).collect()]);
    let plan_path = dir.path().join("plan.json");
    wtsched::io::write_plan(&plan_path, &plan).unwrap();

    for extra in [None, Some("--greedy")] {
        let sched_path = dir.path().join("alloc.json");
        let mut args = vec![
            "alloc",
            "--instance",
            inst_path.to_str().unwrap(),
            "--plan",
            plan_path.to_str().unwrap(),
            "--out",
            sched_path.to_str().unwrap(),
        ];
        if let Some(flag) = extra {
            args.push(flag);
        }
        let out = wtsched(&args, dir.path());
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let sched = wtsched::io::read_schedule(&sched_path, &inst).unwrap();
        assert!(wtsched::model::validate(&inst, &sched).feasible);
    }
}

#[test]
fn validate_flags_tampered_schedules() {
    let dir = TempDir::new().unwrap();
    let inst_path = gen_instance(dir.path(), "inst.json", "2", "21");
    let inst = wtsched::io::read_instance(&inst_path).unwrap();
    let plan = wtsched::model::SequencePlan::new(vec![(0..2).collect(), (2..4).collect()]);
    let mut sched = wtsched::model::evaluate_sequential(&inst, &plan).unwrap();
    sched.objective += 1;
    let sched_path = dir.path().join("bad.json");
    wtsched::io::write_schedule(&sched_path, &sched).unwrap();

    let out = wtsched(
        &[
            "validate",
            "--instance",
            inst_path.to_str().unwrap(),
            "--schedule",
            sched_path.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("objective-mismatch"));
}

#[test]
fn lb_export_then_import_via_solver_template() {
    let dir = TempDir::new().unwrap();
    let inst_path = gen_instance(dir.path(), "inst.json", "2", "17");
    let inst = wtsched::io::read_instance(&inst_path).unwrap();

    // Stage a solution file the way an external solver would produce one.
    let lb = wtsched::relaxation::solve_tiny_exact(&inst).unwrap();
    let t_max = wtsched::relaxation::compute_tmax(&inst, 500).unwrap();
    let model = wtsched::relaxation::build_relaxation(&inst, t_max).unwrap();
    let staged = dir.path().join("staged.txt");
    std::fs::write(
        &staged,
        wtsched::relaxation::solution_text(&model, lb.plan.as_ref().unwrap(), lb.bound, lb.bound),
    )
    .unwrap();

    let model_path = dir.path().join("model.mps");
    let solution_path = dir.path().join("solution.txt");
    let out = Command::new(env!("CARGO_BIN_EXE_wtsched"))
        .args([
            "lb",
            "--instance",
            inst_path.to_str().unwrap(),
            "--ub",
            "500",
            "--export",
            model_path.to_str().unwrap(),
            "--import",
            solution_path.to_str().unwrap(),
        ])
        .env("WTSCHED_SOLVER_CMD", format!("cp {} {{solution}}", staged.display()))
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(model_path.exists());
    assert!(solution_path.exists());
    assert!(stdout.contains(&format!("bound {}", lb.bound)));

    // The exported text is valid MPS as far as our reader is concerned.
    let text = std::fs::read_to_string(&model_path).unwrap();
    let parsed = wtsched::relaxation::parse_mps(&text).unwrap();
    assert!(!parsed.rows.is_empty());
}

#[test]
fn oracle_writes_a_proven_schedule() {
    let dir = TempDir::new().unwrap();
    let inst_path = gen_instance(dir.path(), "inst.json", "2", "41");
    let inst = wtsched::io::read_instance(&inst_path).unwrap();
    let out_path = dir.path().join("oracle.json");
    let out = wtsched(
        &[
            "oracle",
            "--instance",
            inst_path.to_str().unwrap(),
            "--out",
            out_path.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let sched = wtsched::io::read_schedule(&out_path, &inst).unwrap();
    assert!(sched.proven_optimal_allocation);
    assert!(wtsched::model::validate(&inst, &sched).feasible);

    // Above the cap the subcommand reports a domain error.
    let big = gen_instance(dir.path(), "big.json", "5", "41");
    let out = wtsched(
        &["oracle", "--instance", big.to_str().unwrap(), "--out", out_path.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn stats_subcommand_reports_factors() {
    let dir = TempDir::new().unwrap();
    let inst = gen_instance(dir.path(), "inst.json", "2", "29");
    let out = wtsched(
        &["--format", "json", "stats", "--instance", inst.to_str().unwrap()],
        dir.path(),
    );
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v.get("tau_real").is_some());
    assert!(v.get("cmax_estimate").is_some());
}

#[test]
fn whatif_wr_identity_is_zero_change() {
    let dir = TempDir::new().unwrap();
    let inst_path = gen_instance(dir.path(), "inst.json", "2", "33");
    let inst = wtsched::io::read_instance(&inst_path).unwrap();
    let out = wtsched(
        &[
            "whatif",
            "--instance",
            inst_path.to_str().unwrap(),
            "--wr",
            &inst.wr.to_string(),
            "--algo",
            "atcs",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("change          0"));
}
