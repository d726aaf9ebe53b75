//! Upper bounds: tabu search over edge exchanges and a variable
//! neighbourhood search polish.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::instance::Instance;
use crate::mst::{SpanningTree, UnionFind};

/// A spanning tree with the row sums `s[g] = Σ_{f∈T} q_gf` that make the
/// cost of an edge exchange an O(1) computation.
#[derive(Debug, Clone)]
pub struct SearchState<'a> {
    inst: &'a Instance,
    in_tree: Vec<bool>,
    adj: Vec<Vec<usize>>,
    s: Vec<f64>,
    cost: f64,
}

impl<'a> SearchState<'a> {
    pub fn new(inst: &'a Instance, tree: &SpanningTree) -> Self {
        let m = inst.m();
        let mut in_tree = vec![false; m];
        let mut adj = vec![Vec::new(); inst.n()];
        for &e in tree.edges() {
            in_tree[e] = true;
            let (u, v) = inst.edge(e);
            adj[u].push(e);
            adj[v].push(e);
        }
        let s: Vec<f64> = (0..m).map(|g| tree.edges().iter().map(|&f| inst.q(g, f)).sum()).collect();
        let cost = tree.edges().iter().map(|&e| s[e]).sum();
        SearchState { inst, in_tree, adj, s, cost }
    }

    pub fn cost(&self) -> f64 {
        self.cost
    }

    pub fn tree(&self) -> SpanningTree {
        let edges = (0..self.inst.m()).filter(|&e| self.in_tree[e]).collect();
        SpanningTree::from_edges(self.inst, edges).expect("search state always holds a spanning tree")
    }

    fn tree_edges(&self) -> Vec<usize> {
        (0..self.inst.m()).filter(|&e| self.in_tree[e]).collect()
    }

    /// Change in cost when tree edge `out` is replaced by `inc`.
    pub fn delta(&self, out: usize, inc: usize) -> f64 {
        let q = |a, b| self.inst.q(a, b);
        -2.0 * self.s[out] + q(out, out) + 2.0 * (self.s[inc] - q(inc, out)) + q(inc, inc)
    }

    /// Vertices on the side of `u` after deleting tree edge `out`.
    fn side(&self, out: usize) -> Vec<bool> {
        let (u, _) = self.inst.edge(out);
        let mut mark = vec![false; self.inst.n()];
        let mut stack = vec![u];
        mark[u] = true;
        while let Some(x) = stack.pop() {
            for &e in &self.adj[x] {
                if e == out {
                    continue;
                }
                let (a, b) = self.inst.edge(e);
                let y = if a == x { b } else { a };
                if !mark[y] {
                    mark[y] = true;
                    stack.push(y);
                }
            }
        }
        mark
    }

    /// Non-tree edges that reconnect the tree after removing `out`.
    fn reconnecting(&self, out: usize) -> Vec<usize> {
        let side = self.side(out);
        (0..self.inst.m())
            .filter(|&e| {
                let (a, b) = self.inst.edge(e);
                !self.in_tree[e] && side[a] != side[b]
            })
            .collect()
    }

    pub fn apply(&mut self, out: usize, inc: usize) {
        self.cost += self.delta(out, inc);
        self.in_tree[out] = false;
        self.in_tree[inc] = true;
        let (u, v) = self.inst.edge(out);
        self.adj[u].retain(|&e| e != out);
        self.adj[v].retain(|&e| e != out);
        let (a, b) = self.inst.edge(inc);
        self.adj[a].push(inc);
        self.adj[b].push(inc);
        for g in 0..self.inst.m() {
            self.s[g] += self.inst.q(g, inc) - self.inst.q(g, out);
        }
    }

    /// Best exchange accepted by `allowed`, ties broken by (out, inc).
    fn best_move(&self, mut allowed: impl FnMut(usize, usize, f64) -> bool) -> Option<(usize, usize, f64)> {
        let mut best: Option<(usize, usize, f64)> = None;
        for out in self.tree_edges() {
            for inc in self.reconnecting(out) {
                let d = self.delta(out, inc);
                if allowed(out, inc, d) && best.is_none_or(|(_, _, bd)| d < bd) {
                    best = Some((out, inc, d));
                }
            }
        }
        best
    }

    /// Best-improvement descent to a local minimum.
    pub fn descend(&mut self) {
        while let Some((out, inc, d)) = self.best_move(|_, _, d| d < -1e-9) {
            debug_assert!(d < 0.0);
            self.apply(out, inc);
        }
    }

    fn random_exchange(&mut self, rng: &mut ChaCha8Rng) -> bool {
        let mut edges = self.tree_edges();
        edges.shuffle(rng);
        for out in edges {
            let cands = self.reconnecting(out);
            if let Some(&inc) = cands.choose(rng) {
                self.apply(out, inc);
                return true;
            }
        }
        false
    }
}

/// Spanning tree from Kruskal over a random edge order.
pub fn random_tree(inst: &Instance, rng: &mut ChaCha8Rng) -> SpanningTree {
    let mut order: Vec<usize> = (0..inst.m()).collect();
    order.shuffle(rng);
    let mut uf = UnionFind::new(inst.n());
    let edges: Vec<usize> = order
        .into_iter()
        .filter(|&e| {
            let (u, v) = inst.edge(e);
            uf.union(u, v)
        })
        .collect();
    SpanningTree::from_edges(inst, edges).expect("connected instance")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TabuOptions {
    /// Iterations shared by all restarts.
    pub iters: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Defaults to ⌈√m⌉.
    pub tenure: Option<usize>,
}

impl Default for TabuOptions {
    fn default() -> Self {
        TabuOptions { iters: 5000, restarts: 5, seed: 0, tenure: None }
    }
}

fn run_tabu(inst: &Instance, iters: usize, tenure: usize, rng: &mut ChaCha8Rng) -> (SpanningTree, f64) {
    let start = random_tree(inst, rng);
    let mut state = SearchState::new(inst, &start);
    let mut best_cost = state.cost();
    let mut best_tree = start;
    // Iteration until which re-adding (resp. removing) an edge is tabu.
    let mut tabu_until = vec![0usize; inst.m()];
    for it in 1..=iters {
        let current = state.cost();
        let mv = state.best_move(|out, inc, d| {
            let tabu = tabu_until[out] >= it || tabu_until[inc] >= it;
            !tabu || current + d < best_cost - 1e-9
        });
        let Some((out, inc, _)) = mv else { break };
        state.apply(out, inc);
        tabu_until[out] = it + tenure;
        tabu_until[inc] = it + tenure;
        if state.cost() < best_cost - 1e-9 {
            best_cost = state.cost();
            best_tree = state.tree();
        }
    }
    let cost = best_tree.quadratic_cost(inst);
    (best_tree, cost)
}

/// Best tree over independent restarts, each from a random tree with its own
/// RNG stream. The reported cost is recomputed from scratch.
pub fn tabu_search(inst: &Instance, opts: &TabuOptions) -> (SpanningTree, f64) {
    let restarts = opts.restarts.max(1);
    let tenure = opts.tenure.unwrap_or_else(|| (inst.m() as f64).sqrt().ceil() as usize);
    let per_run = opts.iters.div_ceil(restarts);
    let runs: Vec<(SpanningTree, f64)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(r as u64);
            run_tabu(inst, per_run, tenure, &mut rng)
        })
        .collect();
    runs.into_iter()
        .reduce(|a, b| if b.1 < a.1 { b } else { a })
        .expect("at least one restart")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VnsOptions {
    pub k_max: usize,
    /// Full shaking cycles without improvement before stopping.
    pub max_cycles: usize,
    pub seed: u64,
}

impl Default for VnsOptions {
    fn default() -> Self {
        VnsOptions { k_max: 3, max_cycles: 20, seed: 0 }
    }
}

/// Shaking by k random exchanges (k = 1..k_max) followed by descent; the
/// result is never worse than `start`.
pub fn vns_polish(inst: &Instance, start: &SpanningTree, opts: &VnsOptions) -> (SpanningTree, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(1 << 32);
    let mut current = SearchState::new(inst, start);
    current.descend();
    let mut cycles = 0;
    let mut k = 1;
    while cycles < opts.max_cycles {
        let mut trial = current.clone();
        let mut shaken = false;
        for _ in 0..k {
            shaken |= trial.random_exchange(&mut rng);
        }
        if !shaken {
            break;
        }
        trial.descend();
        if trial.cost() < current.cost() - 1e-9 {
            current = trial;
            k = 1;
        } else {
            k += 1;
            if k > opts.k_max.max(1) {
                k = 1;
                cycles += 1;
            }
        }
    }
    let tree = current.tree();
    let start_cost = start.quadratic_cost(inst);
    let cost = tree.quadratic_cost(inst);
    if cost <= start_cost {
        (tree, cost)
    } else {
        (start.clone(), start_cost)
    }
}

/// Draws a random tree; convenience for examples and tests.
pub fn random_tree_seeded(inst: &Instance, seed: u64) -> SpanningTree {
    random_tree(inst, &mut ChaCha8Rng::seed_from_u64(seed))
}
