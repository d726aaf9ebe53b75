mod common;

use common::{brute_cost, brute_optimum, brute_trees, diagonal_instance, instance, rng, weak_sum_instance};
use proptest::prelude::*;
use qmstp::extbounds::{gl_lp_bound, SubsetRows};
use qmstp::glbounds::{
    assad_xu, gl_bound, gl_evaluate, lagrangian_costs, leveled_costs, oncan_punnen, LevelingOptions, MultiplierVector,
    SubgradientOptions,
};
use qmstp::{mst, Family, Instance};
use rand::Rng;

fn cost_under(q: &[f64], m: usize, tree: &[usize]) -> f64 {
    tree.iter().flat_map(|&e| tree.iter().map(move |&f| q[e * m + f])).sum()
}

fn op_opts(ub: f64, iters: usize) -> SubgradientOptions {
    SubgradientOptions { max_iters: iters, upper_bound: Some(ub), ..SubgradientOptions::default() }
}

#[test]
fn diagonal_costs_reduce_to_mst() {
    let base = instance(Family::Cp1, 8, 67, 1);
    let mut r = rng(1);
    let p: Vec<f64> = (0..base.m()).map(|_| r.gen_range(1..=50) as f64).collect();
    let inst = diagonal_instance(&base, &p);
    let want = mst(&inst, &p).unwrap().linear_cost(&p);
    assert_eq!(gl_bound(&inst).value, want);
    let (ax, _) = assad_xu(&inst, &LevelingOptions::default());
    assert!((ax.value - want).abs() <= 1e-9);
    let (op, _) = oncan_punnen(&inst, &op_opts(want, 50));
    assert!((op.value - want).abs() <= 1e-9);
}

#[test]
fn gl_is_below_the_optimum() {
    for seed in 0..6 {
        let inst = instance([Family::Cp1, Family::Cp2, Family::Vs][seed % 3], 7, [67, 100][seed % 2], seed as u64);
        let opt = brute_optimum(&inst);
        assert!(gl_bound(&inst).value <= opt + 1e-9);
    }
}

#[test]
fn gl_subproblems_match_enumeration() {
    let inst = instance(Family::Cp4, 6, 100, 3);
    let m = inst.m();
    let ev = gl_evaluate(&inst, inst.q_matrix());
    let trees = brute_trees(&inst);
    for e in 0..m {
        let best = trees
            .iter()
            .filter(|t| t.contains(&e))
            .map(|t| t.iter().filter(|&&f| f != e).map(|&f| inst.q(e, f)).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        assert_eq!(ev.z[e], best);
        assert!(ev.subtrees[e].contains(e));
    }
    let master: Vec<f64> = (0..m).map(|e| ev.z[e] + inst.q(e, e)).collect();
    let best = trees.iter().map(|t| t.iter().map(|&e| master[e]).sum::<f64>()).fold(f64::INFINITY, f64::min);
    assert_eq!(ev.value, best);
}

#[test]
fn leveling_starts_at_gl_and_every_iterate_is_a_bound() {
    for seed in 0..6 {
        let inst = instance([Family::Cp1, Family::Cp3, Family::OpSym][seed % 3], 7, 100, seed as u64);
        let gl = gl_bound(&inst).value;
        let opts = LevelingOptions { max_iters: 300, ..LevelingOptions::default() };
        let (ax, state) = assad_xu(&inst, &opts);
        assert_eq!(ax.trace[0], gl);
        assert_eq!(ax.trace.len(), ax.iterations);
        assert_eq!(state.bound_trace, ax.trace);
        let opt = brute_optimum(&inst);
        assert!(ax.trace.iter().all(|&v| v <= opt + 1e-6), "seed {seed}");
        for w in state.decreases.iter() {
            assert!(ax.trace[*w] < ax.trace[*w - 1]);
        }
    }
}

#[test]
fn one_leveling_step_at_zero_is_gl() {
    let inst = instance(Family::Cp2, 8, 67, 5);
    let (ax, state) = assad_xu(&inst, &LevelingOptions { max_iters: 1, ..LevelingOptions::default() });
    assert_eq!(ax.value, gl_bound(&inst).value);
    assert!(state.gamma.iter().all(|&g| g == 0.0));
}

#[test]
fn leveling_closes_the_gap_on_weak_sum_costs() {
    for seed in 0..3 {
        let (inst, _) = weak_sum_instance(6, seed);
        let opt = brute_optimum(&inst);
        let (ax, _) = assad_xu(&inst, &LevelingOptions::default());
        assert!((ax.value - opt).abs() <= 1e-4 * (1.0 + opt), "seed {seed}: ax {} opt {opt}", ax.value);
    }
}

#[test]
fn leveled_costs_keep_every_tree_cost() {
    let inst = instance(Family::Cp1, 6, 67, 8);
    let mut r = rng(8);
    let gamma: Vec<f64> = (0..inst.m()).map(|_| r.gen_range(-5.0..5.0)).collect();
    let q = leveled_costs(&inst, &gamma);
    for t in brute_trees(&inst) {
        let a = cost_under(&q, inst.m(), &t);
        assert!((a - brute_cost(&inst, &t)).abs() <= 1e-9);
    }
}

#[test]
fn lagrangian_at_zero_is_gl() {
    let inst = instance(Family::Vs, 8, 67, 2);
    let (op, lambda) = oncan_punnen(&inst, &op_opts(1e9, 1));
    assert_eq!(op.value, gl_bound(&inst).value);
    assert!(lambda.as_slice().iter().all(|&l| l == 0.0));
    assert_eq!(lagrangian_costs(&inst, &MultiplierVector::zeros(inst.n(), inst.m(), 1.0)), inst.q_matrix());
}

#[test]
fn lagrangian_best_is_nondecreasing_and_valid() {
    for seed in 0..4 {
        let inst = instance(Family::Cp1, 7, [67, 100][seed % 2], seed as u64);
        let opt = brute_optimum(&inst);
        let (op, lambda) = oncan_punnen(&inst, &op_opts(opt, 200));
        assert!(op.trace.windows(2).all(|w| w[1] >= w[0]));
        assert!(op.value <= opt + 1e-6);
        assert!(op.value >= gl_bound(&inst).value);
        assert!(lambda.as_slice().iter().all(|&l| l >= 0.0));
    }
}

#[test]
fn gl_equals_its_linear_program() {
    for seed in 0..4 {
        let inst = instance([Family::Cp1, Family::Cp4][seed % 2], 6 + seed % 2, [67, 100][seed % 2], seed as u64);
        let gl = gl_bound(&inst).value;
        for rows in [SubsetRows::Explicit, SubsetRows::Separated] {
            let lp = gl_lp_bound(&inst, rows).unwrap().value;
            assert!((lp - gl).abs() <= 1e-6 * (1.0 + gl.abs()), "{rows:?}: lp {lp} gl {gl}");
        }
    }
}

fn lambda_from(inst: &Instance, raw: &[f64]) -> MultiplierVector {
    let mut l = MultiplierVector::zeros(inst.n(), inst.m(), 1.0);
    l.step(raw, 1.0);
    l
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Relaxing the degree rows can only lower the cost of a tree, so every
    /// multiplier vector gives a valid bound.
    #[test]
    fn any_multipliers_give_a_bound(seed in 0u64..500, scale in 0.0f64..5.0) {
        let inst = instance(Family::Cp1, 6, 100, seed);
        let mut r = rng(seed);
        let raw: Vec<f64> = (0..inst.n() * inst.m()).map(|_| r.gen_range(0.0..scale)).collect();
        let lambda = lambda_from(&inst, &raw);
        let q = lagrangian_costs(&inst, &lambda);
        for t in brute_trees(&inst) {
            prop_assert!(cost_under(&q, inst.m(), &t) <= brute_cost(&inst, &t) + 1e-9);
        }
        prop_assert!(gl_evaluate(&inst, &q).value <= brute_optimum(&inst) + 1e-9);
    }

    #[test]
    fn any_leveling_gives_a_bound(seed in 0u64..500, scale in 0.1f64..10.0) {
        let inst = instance(Family::Cp2, 6, 67, seed);
        let mut r = rng(seed);
        let gamma: Vec<f64> = (0..inst.m()).map(|_| r.gen_range(-scale..scale)).collect();
        let q = leveled_costs(&inst, &gamma);
        prop_assert!(gl_evaluate(&inst, &q).value <= brute_optimum(&inst) + 1e-9);
    }
}
