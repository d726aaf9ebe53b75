use qmstp_lp::lpfile::{model_to_string, parse_model, read_model, read_solution, write_model, write_solution};
use qmstp_lp::{solve, Limits, LinearProgram, ObjectiveSense, Sense, Status};

fn sample() -> LinearProgram {
    let mut lp = LinearProgram::new(ObjectiveSense::Maximize).with_name("sample");
    let x = lp.add_var("x", 0.0, 4.0, 3.0);
    let y = lp.add_var("y", f64::NEG_INFINITY, f64::INFINITY, 0.1);
    let z = lp.add_var("z", 1.5, 1.5, 0.0);
    let w = lp.add_var("w", -2.0, f64::INFINITY, 1e-3);
    lp.add_constraint("c1", [(x, 1.0), (y, 2.5), (w, 1.0)], Sense::Le, 7.25);
    lp.add_constraint("c2", [(x, 1.0), (y, -1.0), (z, 3.0)], Sense::Ge, -1.0);
    lp.add_constraint("c3", [(y, 1.0), (w, 1.0)], Sense::Eq, 0.5);
    lp
}

#[test]
fn model_round_trips() {
    let lp = sample();
    let text = model_to_string(&lp);
    assert_eq!(parse_model(&text).unwrap(), lp);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.lp");
    write_model(&lp, &path).unwrap();
    assert_eq!(read_model(&path).unwrap(), lp);
}

#[test]
fn empty_model_round_trips() {
    let lp = LinearProgram::new(ObjectiveSense::Minimize).with_name("empty");
    let text = model_to_string(&lp);
    assert_eq!(text, "\\ empty\nMinimize\nSubject To\nBounds\nEnd\n");
    assert_eq!(parse_model(&text).unwrap(), lp);
}

#[test]
fn long_rows_wrap_and_still_parse() {
    let mut lp = LinearProgram::new(ObjectiveSense::Minimize);
    let vars: Vec<_> = (0..30).map(|j| lp.add_var(format!("v_{j}"), 0.0, 1.0, j as f64)).collect();
    lp.add_constraint("all", vars.iter().map(|&v| (v, -1.0)), Sense::Ge, -12.0);
    assert_eq!(parse_model(&model_to_string(&lp)).unwrap(), lp);
}

#[test]
fn malformed_input_is_rejected() {
    assert!(parse_model("Minimize\n obj: x\nSubject To\n c: x 3\nEnd\n").is_err());
    assert!(parse_model("Minimize\n obj: x\nSubject To\n").is_err());
    assert!(parse_model("Minimize\n obj: x\nBounds\n x <= oops\nEnd\n").is_err());
}

#[test]
fn solution_round_trips() {
    let lp = sample();
    let sol = solve(&lp, &Limits::default()).unwrap();
    assert_eq!(sol.status, Status::Optimal);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.sol");
    write_solution(&lp, &sol, &path).unwrap();
    let back = read_solution(&path, &lp).unwrap();
    assert_eq!(back.status, Status::Optimal);
    assert_eq!(back.primal, sol.primal);
    assert_eq!(back.objective, sol.objective);
}

/// Cross-checks the simplex against scipy/HiGHS when a Python interpreter
/// with scipy is available; otherwise the test is a no-op.
#[test]
fn agrees_with_external_solver() {
    let script = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scripts/solve_lp_scipy.py");
    let have_scipy = std::process::Command::new("python3")
        .args(["-c", "import scipy.optimize"])
        .status()
        .map(|s| s.success())
        .unwrap_or(false);
    if !have_scipy {
        eprintln!("python3 with scipy not found; skipping");
        return;
    }
    let lp = sample();
    let dir = tempfile::tempdir().unwrap();
    let (model, sol_path) = (dir.path().join("m.lp"), dir.path().join("m.sol"));
    write_model(&lp, &model).unwrap();
    let ok = std::process::Command::new("python3").arg(&script).arg(&model).arg(&sol_path).status().unwrap();
    assert!(ok.success());
    let theirs = read_solution(&sol_path, &lp).unwrap();
    let ours = solve(&lp, &Limits::default()).unwrap();
    assert_eq!(theirs.status, Status::Optimal);
    assert!((theirs.objective - ours.objective).abs() < 1e-6);
    assert!(lp.max_violation(&theirs.primal) < 1e-6);
}
