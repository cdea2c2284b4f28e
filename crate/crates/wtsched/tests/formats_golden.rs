//! The documented example pair under `docs/formats/` must stay parseable
//! and byte-stable under a read/write round trip.

use std::path::PathBuf;

use wtsched::io;
use wtsched::model::validate;

fn docs_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/formats").join(name)
}

#[test]
fn golden_instance_round_trips_byte_for_byte() {
    let path = docs_path("instance.json");
    let text = std::fs::read_to_string(&path).unwrap();
    let inst = io::instance_from_str(&text).unwrap();
    assert_eq!(io::instance_to_string(&inst).unwrap(), text);
    assert_eq!((inst.jobs, inst.machines, inst.wr), (4, 2, 1));
}

#[test]
fn golden_schedule_round_trips_and_validates() {
    let inst = io::read_instance(&docs_path("instance.json")).unwrap();
    let text = std::fs::read_to_string(docs_path("schedule.json")).unwrap();
    let sched = io::schedule_from_str(&text, &inst).unwrap();
    assert_eq!(io::schedule_to_string(&sched).unwrap(), text);
    let report = validate(&inst, &sched);
    assert!(report.feasible, "{:?}", report.violations);
}
