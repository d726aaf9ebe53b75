mod common;

use common::{brute_optimum, brute_trees, complete_edges, diagonal_instance, instance, rng, weak_sum_instance};
use qmstp::oracle::{exact_qmstp, for_each_spanning_tree, linearization_vector, weak_sum_decompose, DEFAULT_LIMIT_N};
use qmstp::{mst, Error, Family, Instance};
use rand::Rng;

#[test]
fn cayley_counts() {
    for n in 3..=7 {
        let m = n * (n - 1) / 2;
        let inst = Instance::new("k", n, complete_edges(n), vec![0.0; m * m]).unwrap();
        let report = exact_qmstp(&inst, 9).unwrap();
        assert_eq!(report.tree_count, (n as u64).pow(n as u32 - 2));
    }
}

#[test]
fn tree_count_matches_subset_enumeration() {
    for seed in 0..5 {
        let inst = instance(Family::Cp1, 7, 67, seed);
        let mut count = 0;
        for_each_spanning_tree(&inst, |edges, cost| {
            count += 1;
            assert!((cost - inst.quadratic_cost(edges)).abs() <= 1e-9);
        });
        assert_eq!(count, brute_trees(&inst).len());
        assert_eq!(exact_qmstp(&inst, 9).unwrap().tree_count, count as u64);
    }
}

#[test]
fn optimum_matches_independent_enumeration() {
    for seed in 0..8 {
        let family = [Family::Cp1, Family::Cp3, Family::OpVsym, Family::Vs][seed as usize % 4];
        let d = if family.is_op() { 100 } else { [33, 67, 100][seed as usize % 3] };
        let inst = instance(family, 7, d, seed);
        let report = exact_qmstp(&inst, 9).unwrap();
        assert_eq!(report.optimal_cost, brute_optimum(&inst));
        assert_eq!(report.optimal_tree.quadratic_cost(&inst), report.optimal_cost);
    }
}

#[test]
fn diagonal_optimum_is_the_mst() {
    let base = instance(Family::Cp1, 8, 67, 2);
    let mut r = rng(2);
    let p: Vec<f64> = (0..base.m()).map(|_| r.gen_range(1..=40) as f64).collect();
    let inst = diagonal_instance(&base, &p);
    assert_eq!(exact_qmstp(&inst, 9).unwrap().optimal_cost, mst(&inst, &p).unwrap().linear_cost(&p));
}

#[test]
fn size_limit_is_enforced() {
    let inst = instance(Family::Cp1, 10, 33, 0);
    assert!(matches!(exact_qmstp(&inst, DEFAULT_LIMIT_N), Err(Error::Unsupported(_))));
    let small = instance(Family::Cp1, 6, 67, 0);
    assert!(exact_qmstp(&small, 5).is_err());
}

#[test]
fn weak_sum_round_trip() {
    for (n, seed) in [(5, 0), (6, 1), (8, 2)] {
        let (inst, a) = weak_sum_instance(n, seed);
        let got = weak_sum_decompose(&inst).expect("decomposable");
        let m = inst.m();
        for e in 0..m {
            for f in 0..m {
                if e != f {
                    assert!((got[e] + got[f] - inst.q(e, f)).abs() <= 1e-9);
                }
            }
        }
        // With m ≥ 3 the off-diagonal system pins a down exactly.
        assert!(got.iter().zip(&a).all(|(g, a)| (g - a).abs() <= 1e-9));
    }
}

#[test]
fn perturbed_matrix_is_not_decomposable() {
    let (inst, _) = weak_sum_instance(6, 3);
    let m = inst.m();
    let mut q = inst.q_matrix().to_vec();
    q[2 * m + 7] += 0.5;
    q[7 * m + 2] += 0.5;
    assert!(weak_sum_decompose(&inst.with_costs(q).unwrap()).is_none());
    assert!(weak_sum_decompose(&instance(Family::Cp1, 6, 100, 0)).is_none());
}

#[test]
fn weak_sum_optimum_is_an_mst() {
    for (n, seed) in [(5, 4), (6, 5), (7, 6)] {
        let (inst, _) = weak_sum_instance(n, seed);
        let a = weak_sum_decompose(&inst).unwrap();
        let p = linearization_vector(&inst, &a);
        let opt = exact_qmstp(&inst, 9).unwrap().optimal_cost;
        assert!((mst(&inst, &p).unwrap().linear_cost(&p) - opt).abs() <= 1e-9);
        // Every tree costs exactly its linearized value.
        for t in brute_trees(&inst).iter().step_by(11) {
            let lin: f64 = t.iter().map(|&e| p[e]).sum();
            assert!((lin - inst.quadratic_cost(t)).abs() <= 1e-9);
        }
    }
}
