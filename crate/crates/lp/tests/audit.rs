// One test only: the audit state is process-wide.
use qmstp_lp::{audit, solve, Limits, LinearProgram, ObjectiveSense, Sense, Status, Tolerances};

fn small() -> LinearProgram {
    let mut lp = LinearProgram::new(ObjectiveSense::Minimize);
    let x = lp.add_var("x", 0.0, 10.0, 1.0);
    let y = lp.add_var("y", 0.0, 10.0, 2.0);
    lp.add_constraint("c", [(x, 1.0), (y, 1.0)], Sense::Ge, 3.0);
    lp
}

#[test]
fn records_optimal_solves_only_while_enabled() {
    assert!(!audit::is_enabled());
    solve(&small(), &Limits::default()).unwrap();

    audit::enable(Tolerances::default());
    let sol = solve(&small(), &Limits::default()).unwrap();
    assert_eq!(sol.status, Status::Optimal);
    let mut infeasible = small();
    let x = infeasible.add_var("z", 0.0, 1.0, 0.0);
    infeasible.add_constraint("bad", [(x, 1.0)], Sense::Ge, 2.0);
    assert_ne!(solve(&infeasible, &Limits::default()).unwrap().status, Status::Optimal);

    let s = audit::summary();
    assert_eq!(s.optimal_solves, 1);
    assert_eq!(s.failures, 0);
    assert!(s.worst_primal_residual <= 1e-9 && s.worst_relative_gap <= 1e-9);

    audit::disable();
    solve(&small(), &Limits::default()).unwrap();
    assert_eq!(audit::summary().optimal_solves, 1);

    audit::enable(Tolerances::default());
    assert_eq!(audit::summary().optimal_solves, 0);
    audit::disable();
}
