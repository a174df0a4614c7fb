use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use healsim::profiles::FailureTrace;

fn healsim(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_healsim"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn gen_trace_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.csv", "b.csv"] {
        let out = healsim(&["gen-trace", "grid5000", "--variant", "short", "--seed", "7", "--out", name], dir.path());
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = fs::read_to_string(dir.path().join("a.csv")).unwrap();
    assert_eq!(a, fs::read_to_string(dir.path().join("b.csv")).unwrap());
    let trace = FailureTrace::from_csv(&a).unwrap();
    assert_eq!(trace.groups.len(), 50);
    assert!(a.starts_with("# model=grid5000"));
}

#[test]
fn gen_trace_synthetic_group() {
    let dir = tempfile::tempdir().unwrap();
    let out = healsim(&["gen-trace", "synthetic", "--fgs", "100", "--runs", "1", "--out", "s.csv"], dir.path());
    assert_eq!(code(&out), 0);
    let trace = FailureTrace::from_csv(&fs::read_to_string(dir.path().join("s.csv")).unwrap()).unwrap();
    assert_eq!(trace.density(), 100);
    assert!(trace.entries.iter().all(|e| e.time_s == 0.0));
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["gen-trace", "nosuch", "--out", "x.csv"][..],
        &["bogus"],
        &["reward", "--likelihood", "1.5", "--trace", "single"],
        &["analytical", "fig12"],
    ] {
        let out = healsim(args, dir.path());
        assert_eq!(code(&out), 1, "{args:?}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.starts_with("error: ") && !err.contains("error: error:"), "{err}");
    }
    assert_eq!(code(&healsim(&["--help"], dir.path())), 0);
}

#[test]
fn runtime_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = healsim(&["reward", "--trace", "missing.csv", "--shops", "1", "--seeds", "1"], dir.path());
    assert_eq!(code(&out), 2);
    assert_eq!(code(&healsim(&["validate-rules"], dir.path())), 0);
    assert_eq!(code(&healsim(&["validate-rules", "--inject-exceptions"], dir.path())), 2);
}

#[test]
fn reward_csv_is_reproducible_and_flags_beat_config() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("run.conf"),
        "# small grid\nshops = 2\ntrace = synthetic:3x2@100\nseeds = 3\nplanner = static,udriven\n",
    )
    .unwrap();
    let args = ["--config", "run.conf", "reward", "--seeds", "1", "--out"];
    for out_dir in ["r1", "r2"] {
        let mut a = args.to_vec();
        a.push(out_dir);
        let out = healsim(&a, dir.path());
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    let r1 = fs::read_to_string(dir.path().join("r1/reward.csv")).unwrap();
    assert_eq!(r1, fs::read_to_string(dir.path().join("r2/reward.csv")).unwrap());
    let lines: Vec<&str> = r1.lines().collect();
    assert_eq!(lines[0], "experiment,planner,components,trace,metric,value,stddev");
    // two planners, four metrics, one seed so no spread
    assert_eq!(lines.len(), 1 + 2 * 4);
    assert!(lines[1..].iter().all(|l| l.ends_with(",0")));
}

#[test]
fn analytical_writes_timelines() {
    let dir = tempfile::tempdir().unwrap();
    let out = healsim(&["analytical", "fig10a", "--out", "an"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for planner in ["static", "u-driven", "oracle"] {
        let csv = fs::read_to_string(dir.path().join(format!("an/fig10a_{planner}.csv"))).unwrap();
        assert!(csv.starts_with("time_s,utility\n"));
        assert!(csv.lines().count() >= 5);
    }
}
