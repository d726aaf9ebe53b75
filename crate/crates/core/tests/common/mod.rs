#![allow(dead_code)]

use qmstp::{generate, Family, GeneratorSpec, Instance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn complete_edges(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect()
}

pub fn instance(family: Family, n: usize, density: u32, seed: u64) -> Instance {
    generate(&GeneratorSpec::new(family, n, density, seed)).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complete graph with `q_ef = a_e + a_f` off the diagonal; returns `a`.
pub fn weak_sum_instance(n: usize, seed: u64) -> (Instance, Vec<f64>) {
    let edges = complete_edges(n);
    let m = edges.len();
    let mut r = rng(seed);
    let a: Vec<f64> = (0..m).map(|_| r.gen_range(1..=10) as f64).collect();
    let mut q = vec![0.0; m * m];
    for e in 0..m {
        for f in 0..m {
            q[e * m + f] = if e == f { r.gen_range(1..=10) as f64 } else { a[e] + a[f] };
        }
    }
    (Instance::new(format!("ws{n}-{seed}"), n, edges, q).unwrap(), a)
}

/// Same graph, Q replaced by `Diag(p)`.
pub fn diagonal_instance(inst: &Instance, p: &[f64]) -> Instance {
    let m = inst.m();
    let mut q = vec![0.0; m * m];
    for e in 0..m {
        q[e * m + e] = p[e];
    }
    inst.with_costs(q).unwrap()
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        x = parent[x];
    }
    x
}

/// Edge subsets of size n−1 that form a tree, by plain combination
/// enumeration; independent of the library's enumerator.
pub fn brute_trees(inst: &Instance) -> Vec<Vec<usize>> {
    let (n, m) = (inst.n(), inst.m());
    let k = n - 1;
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let mut parent: Vec<usize> = (0..n).collect();
        let acyclic = idx.iter().all(|&e| {
            let (u, v) = inst.edge(e);
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            parent[a] = b;
            a != b
        });
        if acyclic {
            out.push(idx.clone());
        }
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + m - k) else { break };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
    out
}

pub fn brute_cost(inst: &Instance, tree: &[usize]) -> f64 {
    let mut c = 0.0;
    for &e in tree {
        for &f in tree {
            c += inst.q(e, f);
        }
    }
    c
}

pub fn brute_optimum(inst: &Instance) -> f64 {
    brute_trees(inst).iter().map(|t| brute_cost(inst, t)).fold(f64::INFINITY, f64::min)
}

pub fn brute_linear_optimum(inst: &Instance, p: &[f64]) -> f64 {
    brute_trees(inst).iter().map(|t| t.iter().map(|&e| p[e]).sum::<f64>()).fold(f64::INFINITY, f64::min)
}

/// `(x, y = x xᵀ)` of a tree, y row-major.
pub fn tree_xy(m: usize, tree: &[usize]) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; m];
    for &e in tree {
        x[e] = 1.0;
    }
    let mut y = vec![0.0; m * m];
    for e in 0..m {
        for f in 0..m {
            y[e * m + f] = x[e] * x[f];
        }
    }
    (x, y)
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

/// The fractional K6 point used to show that pairwise BQP cuts are not
/// implied by the incomplete RLT relaxation. Edges are 1-based in the
/// listing and follow the lexicographic order of K6.
pub fn k6_point() -> (Vec<f64>, Vec<f64>) {
    let m = 15;
    let mut x = vec![0.0; m];
    for e in [1, 2, 9, 12] {
        x[e - 1] = 0.75;
    }
    x[9] = 1.0;
    x[12] = 1.0;
    let mut y = vec![0.0; m * m];
    for e in 0..m {
        y[e * m + e] = x[e];
    }
    let pairs = [(1, 9), (2, 9), (1, 10), (2, 10), (9, 10), (1, 12), (2, 12), (10, 12), (1, 13), (2, 13), (9, 13), (12, 13)];
    for (e, f) in pairs {
        y[(e - 1) * m + f - 1] = 0.75;
        y[(f - 1) * m + e - 1] = 0.75;
    }
    y[9 * m + 12] = 1.0;
    y[12 * m + 9] = 1.0;
    (x, y)
}
