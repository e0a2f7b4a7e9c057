use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

fn hazbench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hazbench")).args(args).output().expect("binary runs")
}

fn with_corpus(args: &[&str]) -> Output {
    let haz = corpus("casestudy.haz");
    let htd = corpus("casestudy.htd");
    let mut all: Vec<&str> = args.to_vec();
    all.push(haz.to_str().unwrap());
    all.push(htd.to_str().unwrap());
    hazbench(&all)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn validate_corpus() {
    let out = with_corpus(&["validate"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).ends_with("0 errors, 4 warnings\n"), "{}", stdout(&out));
    assert_eq!(stderr(&out).matches("warning[R7]").count(), 4);
}

#[test]
fn validate_reports_errors_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.haz");
    fs::write(&file, "loss L1 \"x\"\nhazard H1 \"y\" -> L9\n").unwrap();
    let out = hazbench(&["validate", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("error[R1] H1"), "{}", stderr(&out));
    assert!(stdout(&out).contains("1 errors, 1 warnings"), "{}", stdout(&out));
}

#[test]
fn parse_errors_exit_two_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("m.haz");
    fs::write(&file, "hazard H3 ->\n").unwrap();
    let out = hazbench(&["validate", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("m.haz:1:13: expected loss id, found end of line"), "{}", stderr(&out));
}

#[test]
fn table_matches_golden() {
    let out = hazbench(&["table", "SetQ", corpus("casestudy.haz").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), fs::read_to_string(corpus("golden/table_setq.txt")).unwrap());
}

#[test]
fn trace_and_skeleton() {
    let out = with_corpus(&["trace", "HS-1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("CSTR-A-1"));

    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("draft.htd");
    let out = with_corpus(&["skeleton", "HS-1", "-o", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).is_empty());
    let draft = fs::read_to_string(&target).unwrap();
    assert!(draft.contains("vary d_MSMT-1 [0] s"));

    let out = with_corpus(&["trace", "HS-7"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn run_writes_csv_report_and_traces() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let report = dir.path().join("report.txt");
    let traces = dir.path().join("traces");
    let out = with_corpus(&[
        "run",
        "ES-1",
        "--csv",
        csv.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
        "--traces",
        traces.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(fs::read_to_string(&csv).unwrap().lines().count(), 5);
    assert!(fs::read_to_string(&report).unwrap().contains("Reactive Power Control is Inhibited"));
    assert_eq!(fs::read_dir(&traces).unwrap().count(), 4);
}

#[test]
fn run_is_byte_identical_on_stdout() {
    let a = with_corpus(&["run", "ES-3"]);
    let b = with_corpus(&["run", "ES-3"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains(",H3,L1;L5,true"));
}

#[test]
fn run_with_missing_feeder_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    fs::copy(corpus("casestudy.haz"), dir.path().join("casestudy.haz")).unwrap();
    fs::copy(corpus("casestudy.htd"), dir.path().join("casestudy.htd")).unwrap();
    let out = hazbench(&[
        "run",
        "ES-1",
        dir.path().join("casestudy.haz").to_str().unwrap(),
        dir.path().join("casestudy.htd").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("reference.net"), "{}", stderr(&out));
}

#[test]
fn all_runs_failing_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("iso.net"),
        "slack B0 230\nbus B1 load 500 100\nline B0 B1 r 0.5 x 0.5\nbems B1 qmax 1000\n",
    )
    .unwrap();
    let model = dir.path().join("m.haz");
    fs::write(
        &model,
        "loss L1 \"l\"\nhazard H1 -> L1\ncontrolloop CL-1 {\n  controller C\n  actuator A\n  action SetQ levels lo hi\n  link K-1 C -> A command\n}\nhca HC-1 action SetQ.lo when any_time causes H1\nscenario HS-1 {\n  title \"s\"\n  hazards H1\n  hcas HC-1\n}\n",
    )
    .unwrap();
    let tests = dir.path().join("t.htd");
    fs::write(
        &tests,
        "testspec TS-1 {\n  from_scenario HS-1\n  title \"t\"\n  initial nominal 230 V tolerance 0.1 delay 0 s\n}\nexperiment ES-1 {\n  from_test TS-1\n  feeder \"iso.net\"\n  dt 0.1\n  duration 5\n  droop 3 3.1 3.2 3.3\n}\n",
    )
    .unwrap();
    let out = hazbench(&["run", "ES-1", model.to_str().unwrap(), tests.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert_eq!(stdout(&out), "run,d,target,n,osc_any,max_p2p_V,over_cnt,under_cnt,hazards,losses,converged\n0,0,B1,1,,,,,,,false\n");
}

#[test]
fn check_feeder() {
    let out = hazbench(&["check-feeder", corpus("reference.net").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("8 buses, 7 lines, 4 bems"));
    assert!(stdout(&out).contains("B4         242.304 V"), "{}", stdout(&out));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.net");
    fs::write(&bad, "bus B1\n").unwrap();
    let out = hazbench(&["check-feeder", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("bad.net"));
}

#[test]
fn usage_errors_and_help() {
    assert_eq!(hazbench(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(hazbench(&["validate", "--bogus", "x.haz"]).status.code(), Some(2));
    assert_eq!(hazbench(&["validate"]).status.code(), Some(2));
    assert_eq!(hazbench(&["--help"]).status.code(), Some(0));
    for sub in ["validate", "trace", "table", "skeleton", "run", "check-feeder"] {
        let out = hazbench(&[sub, "--help"]);
        assert_eq!(out.status.code(), Some(0), "{sub}");
        assert!(!out.stdout.is_empty());
    }
}
