mod common;

use std::collections::HashMap;
use std::time::Duration;

use common::{instance, weak_sum_instance};
use qmstp::bench::{gap_pct, render_markdown, run_benchmark, write_csv, BenchmarkOptions};
use qmstp::bound::{compute_bound, BoundConfig, Method};
use qmstp::verify::{verify_instance, VerifyOptions};
use qmstp::Family;

fn opts(methods: &[Method]) -> BenchmarkOptions {
    BenchmarkOptions { methods: methods.to_vec(), ..BenchmarkOptions::default() }
}

#[test]
fn gap_uses_the_upper_bound_as_denominator() {
    assert_eq!(gap_pct(200.0, 150.0), 25.0);
    assert_eq!(gap_pct(50.0, 50.0), 0.0);
}

#[test]
fn two_methods_share_one_upper_bound() {
    let inst = instance(Family::Cp1, 8, 67, 3);
    let rows = run_benchmark(&[inst], &opts(&[Method::Gl, Method::Vs0])).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].upper_bound, rows[1].upper_bound);
    for r in &rows {
        let b = r.bound.unwrap();
        assert!((r.gap_pct.unwrap() - 100.0 * (r.upper_bound - b) / r.upper_bound).abs() <= 1e-12);
        assert_eq!(r.status, "ok");
        assert_eq!((r.n, r.density), (8, 68));
    }
}

#[test]
fn exact_method_has_zero_gap_against_itself() {
    let inst = instance(Family::Cp2, 7, 100, 1);
    let exact = compute_bound(&inst, Method::Exact, &BoundConfig::default()).unwrap().value;
    let o = BenchmarkOptions { known_upper_bounds: HashMap::from([(inst.name().to_string(), exact)]), ..opts(&[Method::Exact]) };
    let rows = run_benchmark(&[inst], &o).unwrap();
    assert_eq!(rows[0].gap_pct, Some(0.0));
}

#[test]
fn vs1_closes_the_gap_on_a_small_vs_instance() {
    let inst = instance(Family::Vs, 10, 33, 1);
    let rows = run_benchmark(&[inst], &opts(&[Method::Vs1])).unwrap();
    assert!(rows[0].gap_pct.unwrap().abs() <= 1e-6, "{:?}", rows[0]);
}

#[test]
fn failures_land_in_the_status_column() {
    // LBB is undefined on incomplete graphs; the other method still runs.
    let inst = instance(Family::Cp1, 7, 67, 2);
    let rows = run_benchmark(&[inst], &opts(&[Method::Lbb, Method::Gl])).unwrap();
    assert!(rows[0].status.starts_with("error"));
    assert!(rows[0].bound.is_none());
    assert_eq!(rows[1].status, "ok");
}

#[test]
fn csv_and_markdown_output() {
    let insts = [instance(Family::Cp1, 7, 67, 1), instance(Family::Vs, 7, 100, 2)];
    let mut o = opts(&[Method::Gl, Method::Vs1]);
    o.config.time_limit = Some(Duration::from_secs(60));
    let rows = run_benchmark(&insts, &o).unwrap();
    assert_eq!(rows.len(), 4);
    // Everything but the wall time is reproducible.
    let key = |rows: &[qmstp::bench::BenchmarkRow]| {
        rows.iter().map(|r| (r.instance.clone(), r.method, r.upper_bound, r.bound, r.status.clone())).collect::<Vec<_>>()
    };
    assert_eq!(key(&rows), key(&run_benchmark(&insts, &o).unwrap()));
    let mut buf = Vec::new();
    write_csv(&rows, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("instance,n,density,method,bound,time_s,gap_pct,status\n"));
    assert_eq!(text.lines().count(), 5);
    let md = render_markdown(&rows);
    assert!(md.starts_with("| instance | n | d | UB | gl | vs1 | gap gl | gap vs1 |"));
    assert_eq!(md.lines().count(), 4);
}

#[test]
fn verify_passes_on_a_complete_instance() {
    let inst = instance(Family::Cp1, 7, 100, 5);
    let report = verify_instance(&inst, &VerifyOptions::default());
    assert!(report.passed(), "{report}");
    for name in ["lbb equals vs0", "tree point feasible", "vs0 duality", "bounds below optimum"] {
        assert!(report.checks.iter().any(|c| c.name == name), "missing check {name}");
    }
}

#[test]
fn verify_reports_tight_lbb_on_weak_sum_costs() {
    let (inst, _) = weak_sum_instance(6, 7);
    let report = verify_instance(&inst, &VerifyOptions::default());
    assert!(report.passed(), "{report}");
    assert!(report.checks.iter().any(|c| c.name == "lbb tight" && c.passed));
}

#[test]
fn verify_skips_oracle_checks_on_large_instances() {
    let inst = instance(Family::Cp1, 9, 33, 1);
    let report = verify_instance(&inst, &VerifyOptions { oracle_limit_n: 8, ..VerifyOptions::default() });
    assert!(report.passed(), "{report}");
    assert!(!report.checks.iter().any(|c| c.name == "bounds below optimum"));
    assert!(report.to_string().contains("PASS"));
}
