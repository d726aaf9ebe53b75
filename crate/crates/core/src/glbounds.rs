//! Gilmore-Lawler type bounds: the plain bound, Assad-Xu leveling and the
//! Öncan-Punnen Lagrangian relaxation.

use std::time::Instant;

use rayon::prelude::*;

use crate::bound::{BoundResult, BoundStatus, Certificate, Method};
use crate::heuristics::{tabu_search, TabuOptions};
use crate::instance::Instance;
use crate::mst::{mst, mst_with_forced_edge, SpanningTree};

/// One evaluation of the GL scheme under a (not necessarily symmetric)
/// row-major cost matrix over the instance's edges.
#[derive(Debug, Clone)]
pub struct GlEvaluation {
    pub value: f64,
    /// Best off-diagonal contribution of each edge (diagonal excluded).
    pub z: Vec<f64>,
    /// Tree attaining `z[e]`, which contains `e`.
    pub subtrees: Vec<SpanningTree>,
    /// Minimum spanning tree under `z[e] + q[e][e]`.
    pub master: SpanningTree,
}

pub fn gl_evaluate(inst: &Instance, q: &[f64]) -> GlEvaluation {
    let m = inst.m();
    assert_eq!(q.len(), m * m, "cost matrix must be m x m");
    let parts: Vec<(f64, SpanningTree)> = (0..m)
        .into_par_iter()
        .map(|e| {
            let mut row = q[e * m..(e + 1) * m].to_vec();
            row[e] = 0.0;
            let t = mst_with_forced_edge(inst, &row, e).expect("connected instance with finite costs");
            (t.linear_cost(&row), t)
        })
        .collect();
    let (z, subtrees): (Vec<f64>, Vec<SpanningTree>) = parts.into_iter().unzip();
    let master_cost: Vec<f64> = (0..m).map(|e| z[e] + q[e * m + e]).collect();
    let master = mst(inst, &master_cost).expect("connected instance with finite costs");
    GlEvaluation { value: master.linear_cost(&master_cost), z, subtrees, master }
}

pub fn gl_bound(inst: &Instance) -> BoundResult {
    let start = Instant::now();
    let ev = gl_evaluate(inst, inst.q_matrix());
    BoundResult {
        method: Method::Gl,
        value: ev.value,
        status: BoundStatus::Converged,
        iterations: 1,
        elapsed: start.elapsed(),
        trace: vec![ev.value],
        certificate: Certificate::None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelingOptions {
    pub epsilon_stop: f64,
    pub max_iters: usize,
}

impl Default for LevelingOptions {
    fn default() -> Self {
        LevelingOptions { epsilon_stop: 1e-4, max_iters: 1000 }
    }
}

/// State of the leveling procedure after it stops.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelingState {
    /// γ used for the last evaluated bound.
    pub gamma: Vec<f64>,
    /// f_e(γ) at that γ.
    pub f: Vec<f64>,
    pub bound_trace: Vec<f64>,
    pub epsilon_stop: f64,
    /// Iterations (0-based) whose bound is below the previous one.
    pub decreases: Vec<usize>,
}

/// Costs q_ef(γ) = q_ef + γ_f (e ≠ f), q_ee(γ) = q_ee − (n−2)γ_e. Every
/// tree has the same objective under the transformed matrix.
pub fn leveled_costs(inst: &Instance, gamma: &[f64]) -> Vec<f64> {
    let m = inst.m();
    let shift = inst.n() as f64 - 2.0;
    let mut q = inst.q_matrix().to_vec();
    for e in 0..m {
        for f in 0..m {
            if e == f {
                q[e * m + e] -= shift * gamma[e];
            } else {
                q[e * m + f] += gamma[f];
            }
        }
    }
    q
}

pub fn assad_xu(inst: &Instance, opts: &LevelingOptions) -> (BoundResult, LevelingState) {
    let start = Instant::now();
    let m = inst.m();
    let denom = inst.n() as f64 - 1.0;
    let mut gamma = vec![0.0; m];
    let mut trace = Vec::new();
    let mut decreases = Vec::new();
    let mut status = BoundStatus::IterationLimit;
    let mut f = Vec::new();
    let mut used_gamma = gamma.clone();
    for it in 0..opts.max_iters.max(1) {
        let q = leveled_costs(inst, &gamma);
        let ev = gl_evaluate(inst, &q);
        if let Some(&prev) = trace.last() {
            if ev.value < prev {
                decreases.push(it);
            }
        }
        trace.push(ev.value);
        f = ev.z;
        used_gamma.clone_from(&gamma);
        let spread = f.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - f.iter().cloned().fold(f64::INFINITY, f64::min);
        if spread <= opts.epsilon_stop {
            status = BoundStatus::Converged;
            break;
        }
        for e in 0..m {
            gamma[e] += (f[e] + q[e * m + e]) / denom;
        }
    }
    let value = *trace.last().expect("at least one iteration");
    let result = BoundResult {
        method: Method::Ax,
        value,
        status,
        iterations: trace.len(),
        elapsed: start.elapsed(),
        trace: trace.clone(),
        certificate: Certificate::Gamma(used_gamma.clone()),
    };
    let state = LevelingState { gamma: used_gamma, f, bound_trace: trace, epsilon_stop: opts.epsilon_stop, decreases };
    (result, state)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubgradientOptions {
    pub max_iters: usize,
    /// Initial Polyak step factor.
    pub theta: f64,
    /// Non-improving iterations before the step factor is halved.
    pub patience: usize,
    /// Target value for the step rule; computed by tabu search when absent.
    pub upper_bound: Option<f64>,
    pub seed: u64,
}

impl Default for SubgradientOptions {
    fn default() -> Self {
        SubgradientOptions { max_iters: 200, theta: 2.0, patience: 10, upper_bound: None, seed: 0 }
    }
}

/// Multipliers λ_{i,f} ≥ 0 for the rows Σ_{e∈δ(i)} y_ef ≥ x_f.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierVector {
    n: usize,
    m: usize,
    values: Vec<f64>,
    pub theta: f64,
    pub stall: usize,
}

impl MultiplierVector {
    pub fn zeros(n: usize, m: usize, theta: f64) -> Self {
        MultiplierVector { n, m, values: vec![0.0; n * m], theta, stall: 0 }
    }

    pub fn get(&self, i: usize, f: usize) -> f64 {
        self.values[i * self.m + f]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// Moves along `g` by `step` and projects onto λ ≥ 0.
    pub fn step(&mut self, g: &[f64], step: f64) {
        for (l, d) in self.values.iter_mut().zip(g) {
            *l = (*l + step * d).max(0.0);
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.n, self.m)
    }
}

/// q_ef(λ) = q_ef − Σ_{i∈e} λ_{i,f} for e ≠ f and
/// q_ff(λ) = q_ff + Σ_{i∉f} λ_{i,f}.
pub fn lagrangian_costs(inst: &Instance, lambda: &MultiplierVector) -> Vec<f64> {
    let (n, m) = (inst.n(), inst.m());
    let mut q = inst.q_matrix().to_vec();
    let col_sum: Vec<f64> = (0..m).map(|f| (0..n).map(|i| lambda.get(i, f)).sum()).collect();
    for e in 0..m {
        let (u, v) = inst.edge(e);
        for f in 0..m {
            if e == f {
                q[e * m + e] += col_sum[e] - lambda.get(u, e) - lambda.get(v, e);
            } else {
                q[e * m + f] -= lambda.get(u, f) + lambda.get(v, f);
            }
        }
    }
    q
}

/// Subgradient x_f − Σ_{e∈δ(i)} y_ef at the (x, y) implied by a GL
/// evaluation: x is the master tree and row e of y is the subtree of e.
fn subgradient(inst: &Instance, ev: &GlEvaluation) -> Vec<f64> {
    let (n, m) = (inst.n(), inst.m());
    let mut g = vec![0.0; n * m];
    for &f in ev.master.edges() {
        for i in 0..n {
            g[i * m + f] += 1.0;
        }
    }
    for &e in ev.master.edges() {
        let (u, v) = inst.edge(e);
        for &f in ev.subtrees[e].edges() {
            g[u * m + f] -= 1.0;
            g[v * m + f] -= 1.0;
        }
    }
    g
}

pub fn oncan_punnen(inst: &Instance, opts: &SubgradientOptions) -> (BoundResult, MultiplierVector) {
    let start = Instant::now();
    let ub = opts.upper_bound.unwrap_or_else(|| {
        let t = TabuOptions { seed: opts.seed, ..TabuOptions::default() };
        tabu_search(inst, &t).1
    });
    let mut lambda = MultiplierVector::zeros(inst.n(), inst.m(), opts.theta);
    let mut best = f64::NEG_INFINITY;
    let mut best_lambda = lambda.clone();
    let mut trace = Vec::with_capacity(opts.max_iters);
    let mut status = BoundStatus::IterationLimit;
    for _ in 0..opts.max_iters.max(1) {
        let q = lagrangian_costs(inst, &lambda);
        let ev = gl_evaluate(inst, &q);
        if ev.value > best {
            best = ev.value;
            best_lambda = lambda.clone();
            lambda.stall = 0;
        } else {
            lambda.stall += 1;
            if lambda.stall >= opts.patience {
                lambda.theta /= 2.0;
                lambda.stall = 0;
            }
        }
        trace.push(best);
        let g = subgradient(inst, &ev);
        let norm2: f64 = g.iter().map(|v| v * v).sum();
        let gap = ub - ev.value;
        if norm2 == 0.0 || gap <= 1e-9 || lambda.theta < 1e-8 {
            status = BoundStatus::Converged;
            break;
        }
        lambda.step(&g, lambda.theta * gap / norm2);
    }
    let result = BoundResult {
        method: Method::Op,
        value: best,
        status,
        iterations: trace.len(),
        elapsed: start.elapsed(),
        trace,
        certificate: Certificate::Lambda(best_lambda.values.clone()),
    };
    (result, best_lambda)
}
