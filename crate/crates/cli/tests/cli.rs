use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn qmstp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmstp")).args(args).output().expect("run qmstp")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn generated(dir: &Path, family: &str, n: &str, density: &str, seed: &str) -> PathBuf {
    let path = dir.join(format!("{family}-{n}-{density}-{seed}.txt"));
    let p = path.to_str().unwrap();
    let o = qmstp(&["generate", "--family", family, "--n", n, "--density", density, "--seed", seed, "-o", p]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    path
}

fn value(line: &str, field: usize) -> f64 {
    line.split_whitespace().nth(field).unwrap().parse().unwrap()
}

#[test]
fn generate_is_deterministic_and_goes_to_stdout() {
    let a = qmstp(&["generate", "--family", "VS", "--n", "6", "--density", "67", "--seed", "3"]);
    let b = qmstp(&["generate", "--family", "VS", "--n", "6", "--density", "67", "--seed", "3"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("QMSTP 1\n6 11\n"));
}

#[test]
fn bounds_sit_below_the_exact_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let path = generated(dir.path(), "CP1", "7", "100", "2");
    let p = path.to_str().unwrap();
    let exact = qmstp(&["exact", p]);
    assert!(exact.status.success());
    let opt = value(&stdout(&exact), 2);
    for method in ["gl", "ax", "op", "lbb", "vs0", "vs1", "vs2", "rlt1"] {
        let o = qmstp(&["bound", p, "--method", method, "--time-limit", "60"]);
        assert!(o.status.success(), "{method}: {}", String::from_utf8_lossy(&o.stderr));
        let line = stdout(&o);
        assert!(value(&line, 2) <= opt + 1e-6, "{line}");
        assert!(line.contains("status=ok") || line.contains("status=iteration_limit"), "{line}");
    }
    let h = qmstp(&["heuristic", p, "--method", "vns", "--seed", "1"]);
    assert!(h.status.success());
    assert!(value(&stdout(&h), 2) >= opt - 1e-9);
}

#[test]
fn trace_and_benchmark_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = generated(dir.path(), "CP2", "8", "67", "1");
    let p = path.to_str().unwrap();
    let trace = dir.path().join("trace.csv");
    let o = qmstp(&["bound", p, "--method", "vs1", "--trace", trace.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&trace).unwrap();
    assert!(text.starts_with("iteration,bound,cuts_added,elapsed\n"));

    let csv = dir.path().join("bench.csv");
    let o = qmstp(&["benchmark", p, "--generate", "VS:7:100:2", "--methods", "gl,vs0", "-o", csv.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 5);
}

#[test]
fn verify_exits_zero_on_a_sound_instance() {
    let dir = tempfile::tempdir().unwrap();
    let path = generated(dir.path(), "CP3", "6", "100", "4");
    let o = qmstp(&["verify", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn bad_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let asym = dir.path().join("asym.txt");
    std::fs::write(&asym, "QMSTP 1\n3 3\n0 1\n0 2\n1 2\n9 10 1\n10 9 5\n1 6 7\n").unwrap();
    let o = qmstp(&["bound", asym.to_str().unwrap(), "--method", "gl"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));

    let o = qmstp(&["exact", dir.path().join("missing.txt").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unsupported_requests_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = generated(dir.path(), "CP1", "7", "67", "1");
    let p = path.to_str().unwrap();
    // LBB needs a complete graph.
    assert_eq!(qmstp(&["bound", p, "--method", "lbb"]).status.code(), Some(1));
    assert_eq!(qmstp(&["exact", p, "--limit-n", "5"]).status.code(), Some(1));
}
