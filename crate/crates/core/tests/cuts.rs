mod common;

use std::collections::HashSet;
use std::time::Duration;

use common::{brute_optimum, brute_trees, complete_edges, instance, k6_point, rng, tree_xy};
use proptest::prelude::*;
use qmstp::bound::BoundStatus;
use qmstp::cuts::{separate, vs_bound, write_trace_csv, Cut, CutKind, CutOptions, CutPool, Level};
use qmstp::extbounds::{vs0_bound, RelaxationPoint};
use qmstp::{Family, Instance};
use rand::Rng;

fn point(x: Vec<f64>, y: Vec<f64>) -> RelaxationPoint {
    RelaxationPoint { m: x.len(), x, y }
}

/// Every candidate cut with its violation, computed straight from the
/// inequality definitions.
fn all_violations(pt: &RelaxationPoint, level: Level) -> Vec<(f64, (CutKind, usize, usize, usize))> {
    let m = pt.m;
    let (x, y) = (&pt.x, |a: usize, b: usize| pt.y[a * m + b]);
    let mut out = Vec::new();
    for e in 0..m {
        for f in 0..m {
            if e == f {
                continue;
            }
            out.push((y(e, f) - x[e], (CutKind::Ub, e, f, usize::MAX)));
            if e < f {
                out.push((x[e] + x[f] - 1.0 - y(e, f), (CutKind::Lift, e, f, usize::MAX)));
            }
            if level == Level::Vs2 && e < f {
                for g in (0..m).filter(|&g| g != e && g != f) {
                    out.push((y(e, g) + y(f, g) - x[g] - y(e, f), (CutKind::Tri1, e, f, g)));
                    if f < g {
                        out.push((x[e] + x[f] + x[g] - y(e, f) - y(e, g) - y(f, g) - 1.0, (CutKind::Tri2, e, f, g)));
                    }
                }
            }
        }
    }
    out
}

fn brute_separate(pt: &RelaxationPoint, level: Level, batch: usize, tol: f64) -> Vec<(CutKind, usize, usize, usize)> {
    let mut v: Vec<_> = all_violations(pt, level).into_iter().filter(|c| c.0 > tol).collect();
    v.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    v.into_iter().take(batch).map(|c| c.1).collect()
}

fn random_point(m: usize, seed: u64) -> RelaxationPoint {
    let mut r = rng(seed);
    let x: Vec<f64> = (0..m).map(|_| r.gen_range(0..=4) as f64 / 4.0).collect();
    let mut y = vec![0.0; m * m];
    for e in 0..m {
        y[e * m + e] = x[e];
        for f in e + 1..m {
            let v = r.gen_range(0..=4) as f64 / 4.0;
            y[e * m + f] = v;
            y[f * m + e] = v;
        }
    }
    point(x, y)
}

#[test]
fn tree_points_violate_nothing() {
    let inst = instance(Family::Cp1, 6, 67, 1);
    for t in brute_trees(&inst) {
        let (x, y) = tree_xy(inst.m(), &t);
        assert!(separate(&point(x, y), Level::Vs2, usize::MAX, 1e-9).is_empty());
    }
}

#[test]
fn every_cut_is_valid_for_every_tree() {
    let k5 = Instance::new("k5", 5, complete_edges(5), vec![0.0; 100]).unwrap();
    for t in brute_trees(&k5) {
        let (x, y) = tree_xy(k5.m(), &t);
        let worst = all_violations(&point(x, y), Level::Vs2).into_iter().map(|c| c.0).fold(f64::NEG_INFINITY, f64::max);
        assert!(worst <= 0.0);
    }
}

#[test]
fn k6_point_violates_the_lifting_cut_by_half() {
    let (x, y) = k6_point();
    let pt = point(x, y);
    let cut = Cut::new(CutKind::Lift, 1, 0, None);
    assert_eq!((cut.e, cut.f), (0, 1));
    assert_eq!(cut.violation_at(&pt), 0.5);
    let found = separate(&pt, Level::Vs1, usize::MAX, 1e-6);
    assert!(found.iter().any(|c| c.key() == cut.key() && c.violation == 0.5));
}

#[test]
fn zero_violation_is_not_returned() {
    let t = 2.0 / 3.0;
    let s = 1.0 / 3.0;
    let pt = point(vec![t, t, t], vec![t, s, s, s, t, s, s, s, t]);
    let tri2 = Cut::new(CutKind::Tri2, 2, 0, Some(1));
    assert!(tri2.violation_at(&pt).abs() <= 1e-15);
    assert!(separate(&pt, Level::Vs2, 100, 1e-6).is_empty());
}

#[test]
fn cut_indices_are_normalized() {
    assert_eq!(Cut::new(CutKind::Tri2, 5, 1, Some(3)).key(), (CutKind::Tri2, 1, 3, 5));
    assert_eq!(Cut::new(CutKind::Tri1, 5, 1, Some(3)).key(), (CutKind::Tri1, 1, 5, 3));
    assert_eq!(Cut::new(CutKind::Ub, 5, 1, None).key(), (CutKind::Ub, 5, 1, usize::MAX));
    assert_ne!(Cut::new(CutKind::Ub, 5, 1, None).key(), Cut::new(CutKind::Ub, 1, 5, None).key());
}

#[test]
fn pool_rejects_duplicates() {
    let mut pool = CutPool::new();
    assert!(pool.insert(Cut::new(CutKind::Lift, 0, 1, None)));
    assert!(!pool.insert(Cut::new(CutKind::Lift, 1, 0, None)));
    assert!(pool.insert(Cut::new(CutKind::Ub, 1, 0, None)));
    assert!(pool.insert(Cut::new(CutKind::Tri2, 0, 1, Some(2))));
    assert!(!pool.insert(Cut::new(CutKind::Tri2, 2, 0, Some(1))));
    assert_eq!(pool.len(), 3);
    assert_eq!(pool.duplicate_attempts, 2);
    assert_eq!(pool.count(CutKind::Lift), 1);
}

#[test]
fn separation_matches_brute_force_on_lp_points() {
    for seed in 0..4 {
        let inst = instance([Family::Cp1, Family::Vs][seed % 2], 7, 67, seed as u64);
        let (_, pt) = vs0_bound(&inst).unwrap();
        for level in [Level::Vs1, Level::Vs2] {
            for batch in [1, 7, inst.n() * inst.m(), usize::MAX] {
                let got: Vec<_> = separate(&pt, level, batch, 1e-6).iter().map(|c| c.key()).collect();
                assert_eq!(got, brute_separate(&pt, level, batch, 1e-6), "seed {seed} {level:?} batch {batch}");
            }
        }
    }
}

#[test]
fn ladder_is_monotone_and_below_the_optimum() {
    for seed in 0..4 {
        let inst = instance([Family::Cp1, Family::Vs, Family::Cp2, Family::OpSym][seed], 6 + seed % 2, [67, 100][seed % 2], seed as u64);
        let vs0 = vs0_bound(&inst).unwrap().0.value;
        let opts = CutOptions::default();
        let (vs1, run1) = vs_bound(&inst, Level::Vs1, &opts).unwrap();
        let (vs2, run2) = vs_bound(&inst, Level::Vs2, &opts).unwrap();
        let opt = brute_optimum(&inst);
        assert!(vs0 <= vs1.value + 1e-6 && vs1.value <= vs2.value + 1e-6 && vs2.value <= opt + 1e-6, "{vs0} {} {} {opt}", vs1.value, vs2.value);
        for run in [&run1, &run2] {
            assert!(run.trace.windows(2).all(|w| w[1].bound >= w[0].bound - 1e-9));
            assert_eq!(run.pool.duplicate_attempts, 0);
            let keys: HashSet<_> = run.pool.cuts().iter().map(|c| c.key()).collect();
            assert_eq!(keys.len(), run.pool.len());
            assert!(run.pool.cuts().iter().all(|c| c.violation > opts.cut_tol));
        }
        assert_eq!(run1.pool.count(CutKind::Tri1) + run1.pool.count(CutKind::Tri2), 0);
        assert_eq!(vs1.status, BoundStatus::Converged);
        // VS2 passes through the converged VS1 value.
        let v = run2.vs1_value.unwrap();
        assert!((v - vs1.value).abs() <= 1e-6 * (1.0 + v.abs()));
    }
}

#[test]
fn cuts_in_the_pool_hold_on_every_tree() {
    let inst = instance(Family::Cp1, 6, 100, 3);
    let (_, run) = vs_bound(&inst, Level::Vs2, &CutOptions::default()).unwrap();
    assert!(!run.pool.is_empty());
    for t in brute_trees(&inst).iter().step_by(7) {
        let (x, y) = tree_xy(inst.m(), t);
        let pt = point(x, y);
        assert!(run.pool.cuts().iter().all(|c| c.violation_at(&pt) <= 0.0));
    }
}

#[test]
fn small_batches_reach_the_same_bound() {
    let inst = instance(Family::Cp1, 6, 67, 2);
    let full = vs_bound(&inst, Level::Vs1, &CutOptions::default()).unwrap().0;
    let small = vs_bound(&inst, Level::Vs1, &CutOptions { batch: Some(3), ..CutOptions::default() }).unwrap().0;
    assert!((full.value - small.value).abs() <= 1e-6 * (1.0 + full.value.abs()));
}

#[test]
fn time_limit_keeps_a_valid_bound() {
    let inst = instance(Family::Cp1, 10, 100, 1);
    let opts = CutOptions { time_limit: Some(Duration::from_millis(300)), ..CutOptions::default() };
    let (res, run) = vs_bound(&inst, Level::Vs2, &opts).unwrap();
    assert_eq!(res.status, BoundStatus::TimeLimit);
    assert!(!run.trace.is_empty());
    assert_eq!(res.value, run.trace.last().unwrap().bound);
}

#[test]
fn trace_csv_has_one_row_per_solve() {
    let inst = instance(Family::Vs, 7, 67, 1);
    let (_, run) = vs_bound(&inst, Level::Vs1, &CutOptions::default()).unwrap();
    let mut buf = Vec::new();
    write_trace_csv(&run.trace, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("iteration,bound,cuts_added,elapsed"));
    assert_eq!(lines.count(), run.trace.len());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn separation_matches_brute_force_on_random_points(m in 3usize..9, seed in any::<u64>(), batch in 1usize..40) {
        let pt = random_point(m, seed);
        for level in [Level::Vs1, Level::Vs2] {
            let got: Vec<_> = separate(&pt, level, batch, 1e-6).iter().map(|c| c.key()).collect();
            prop_assert_eq!(got, brute_separate(&pt, level, batch, 1e-6));
        }
    }
}
