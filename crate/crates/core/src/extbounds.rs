//! LP relaxations built on the extended spanning tree formulation: the
//! x/z block, VS0, the linearization-based bound LBB, and relaxations with
//! the subset rows `Σ_{f∈E(S)} y_ef ≤ (|S|−1) x_e` (the GL LP and the
//! incomplete first-level RLT relaxation).

use std::time::{Duration, Instant};

use qmstp_lp::{LinearProgram, LpSolution, ObjectiveSense, RowId, Sense, Solver, Status, VarId};
use rayon::prelude::*;

use crate::bound::{BoundResult, BoundStatus, Certificate, Method};
use crate::instance::{edge_sets, Instance};
use crate::mst::{max_subset_excess, SpanningTree};
use crate::Error;

/// Variables and rows of the extended formulation:
///
/// * `Σ_e x_e = n − 1`
/// * `z_kij + z_kji = x_e` for every root `k` and edge `e = {i, j}`
/// * `Σ_j z_kij ≤ 1` for `i ≠ k` and `Σ_j z_kkj ≤ 0`
/// * `x, z ≥ 0`
///
/// `z_kij = 1` means that, in the tree rooted at `k`, the parent of `i` is `j`.
#[derive(Debug, Clone)]
pub struct ExtendedBlock {
    n: usize,
    m: usize,
    pub x: Vec<VarId>,
    z_base: usize,
    pub cardinality: RowId,
    /// Indexed `k * m + e`.
    pub pairing: Vec<RowId>,
    /// Indexed `k * n + i`.
    pub degree: Vec<RowId>,
}

impl ExtendedBlock {
    /// Appends the block to `lp` with objective `x_cost` on the x variables.
    pub fn build(inst: &Instance, lp: &mut LinearProgram, x_cost: &[f64]) -> Self {
        let (n, m) = (inst.n(), inst.m());
        let x: Vec<VarId> = (0..m).map(|e| lp.add_var(format!("x_{e}"), 0.0, f64::INFINITY, x_cost[e])).collect();
        let z_base = lp.num_vars();
        for k in 0..n {
            for (e, &(u, v)) in inst.edges().iter().enumerate() {
                lp.add_var(format!("z_{k}_{u}_{v}_{e}"), 0.0, f64::INFINITY, 0.0);
                lp.add_var(format!("z_{k}_{v}_{u}_{e}"), 0.0, f64::INFINITY, 0.0);
            }
        }
        let cardinality = lp.add_constraint("card", x.iter().map(|&v| (v, 1.0)), Sense::Eq, n as f64 - 1.0);
        let mut block = ExtendedBlock { n, m, x, z_base, cardinality, pairing: Vec::new(), degree: Vec::new() };
        for k in 0..n {
            for e in 0..m {
                let row = [(block.z(k, e, 0), 1.0), (block.z(k, e, 1), 1.0), (block.x[e], -1.0)];
                block.pairing.push(lp.add_constraint(format!("pair_{k}_{e}"), row, Sense::Eq, 0.0));
            }
        }
        for k in 0..n {
            for i in 0..n {
                let row: Vec<(VarId, f64)> = inst.incident(i).iter().map(|&e| (block.z_out(inst, k, i, e), 1.0)).collect();
                let rhs = if i == k { 0.0 } else { 1.0 };
                block.degree.push(lp.add_constraint(format!("deg_{k}_{i}"), row, Sense::Le, rhs));
            }
        }
        block
    }

    /// `dir = 0` is the orientation (u → v) of edge `(u, v)` with `u < v`.
    pub fn z(&self, k: usize, e: usize, dir: usize) -> VarId {
        VarId(self.z_base + (k * self.m + e) * 2 + dir)
    }

    /// `z_{k,i,j}` where `e = {i, j}`.
    pub fn z_out(&self, inst: &Instance, k: usize, i: usize, e: usize) -> VarId {
        let (u, _) = inst.edge(e);
        self.z(k, e, if i == u { 0 } else { 1 })
    }

    pub fn num_z(&self) -> usize {
        2 * self.n * self.m
    }

    /// Writes the block point of `tree` into `point`: x is the incidence
    /// vector and z orients every tree edge towards each root.
    pub fn fill_tree_point(&self, inst: &Instance, tree: &SpanningTree, point: &mut [f64]) {
        for e in 0..self.m {
            point[self.x[e].0] = if tree.contains(e) { 1.0 } else { 0.0 };
        }
        let mut adj = vec![Vec::new(); self.n];
        for &e in tree.edges() {
            let (u, v) = inst.edge(e);
            adj[u].push(e);
            adj[v].push(e);
        }
        for k in 0..self.n {
            let mut seen = vec![false; self.n];
            seen[k] = true;
            let mut stack = vec![k];
            while let Some(p) = stack.pop() {
                for &e in &adj[p] {
                    let (u, v) = inst.edge(e);
                    let c = if u == p { v } else { u };
                    if !seen[c] {
                        seen[c] = true;
                        point[self.z_out(inst, k, c, e).0] = 1.0;
                        stack.push(c);
                    }
                }
            }
        }
    }
}

/// The extended formulation with linear costs `p`; its optimum equals the
/// minimum spanning tree cost.
pub fn mst_lp(inst: &Instance, p: &[f64]) -> (LinearProgram, ExtendedBlock) {
    let mut lp = LinearProgram::new(ObjectiveSense::Minimize).with_name(format!("mst_{}", inst.name()));
    let block = ExtendedBlock::build(inst, &mut lp, p);
    (lp, block)
}

/// How the pair variables are laid out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairLayout {
    /// One variable per unordered pair `e < f` standing for `y_ef = y_fe`.
    Symmetric,
    /// Independent `y_ef` for every ordered pair `e ≠ f`.
    Asymmetric,
}

/// Pair variables `y_ef`; `y_ee` is substituted by `x_e`.
#[derive(Debug, Clone)]
pub struct PairVars {
    layout: PairLayout,
    m: usize,
    base: usize,
}

impl PairVars {
    pub fn layout(&self) -> PairLayout {
        self.layout
    }

    /// Variable for `y_ef`, `e ≠ f`.
    pub fn var(&self, e: usize, f: usize) -> VarId {
        debug_assert_ne!(e, f);
        match self.layout {
            PairLayout::Symmetric => {
                let (a, b) = if e < f { (e, f) } else { (f, e) };
                // Row-major upper triangle without the diagonal.
                VarId(self.base + a * (2 * self.m - a - 1) / 2 + (b - a - 1))
            }
            PairLayout::Asymmetric => VarId(self.base + e * (self.m - 1) + if f < e { f } else { f - 1 }),
        }
    }
}

/// VS0-type model: extended block plus pair variables with
/// `Σ_f y_ef = (n−1) x_e` (with `y_ee = x_e`), objective `Σ q_ef y_ef`.
pub struct QuadraticModel {
    pub block: ExtendedBlock,
    pub pairs: PairVars,
    solver: Solver,
    n: usize,
    m: usize,
}

impl QuadraticModel {
    pub fn new(inst: &Instance, layout: PairLayout, y_upper: f64) -> Result<Self, Error> {
        let (n, m) = (inst.n(), inst.m());
        let mut lp = LinearProgram::new(ObjectiveSense::Minimize).with_name(format!("quad_{}", inst.name()));
        let block = ExtendedBlock::build(inst, &mut lp, &inst.diagonal());
        let base = lp.num_vars();
        match layout {
            PairLayout::Symmetric => {
                for e in 0..m {
                    for f in e + 1..m {
                        lp.add_var(format!("y_{e}_{f}"), 0.0, y_upper, 2.0 * inst.q(e, f));
                    }
                }
            }
            PairLayout::Asymmetric => {
                for e in 0..m {
                    for f in (0..m).filter(|&f| f != e) {
                        lp.add_var(format!("y_{e}_{f}"), 0.0, y_upper, inst.q(e, f));
                    }
                }
            }
        }
        let pairs = PairVars { layout, m, base };
        for e in 0..m {
            let mut row: Vec<(VarId, f64)> = (0..m).filter(|&f| f != e).map(|f| (pairs.var(e, f), 1.0)).collect();
            row.push((block.x[e], -(n as f64 - 2.0)));
            lp.add_constraint(format!("rowsum_{e}"), row, Sense::Eq, 0.0);
        }
        let solver = Solver::new(lp)?;
        Ok(QuadraticModel { block, pairs, solver, n, m })
    }

    pub fn lp(&self) -> &LinearProgram {
        self.solver.lp()
    }

    pub fn solver_mut(&mut self) -> &mut Solver {
        &mut self.solver
    }

    pub fn solve(&mut self) -> LpSolution {
        self.solver.solve()
    }

    pub fn add_row(&mut self, name: String, row: Vec<(VarId, f64)>, sense: Sense, rhs: f64) -> Result<RowId, Error> {
        Ok(self.solver.add_constraint(name, row, sense, rhs)?)
    }

    /// `y_ef` expressed as a single LP variable (`x_e` on the diagonal).
    pub fn y_var(&self, e: usize, f: usize) -> VarId {
        if e == f {
            self.block.x[e]
        } else {
            self.pairs.var(e, f)
        }
    }

    pub fn point(&self, sol: &LpSolution) -> RelaxationPoint {
        let m = self.m;
        let x: Vec<f64> = self.block.x.iter().map(|v| sol.primal[v.0]).collect();
        let mut y = vec![0.0; m * m];
        for e in 0..m {
            for f in 0..m {
                y[e * m + f] = sol.primal[self.y_var(e, f).0];
            }
        }
        RelaxationPoint { m, x, y }
    }

    /// Model point of an integral tree with `y = x xᵀ`.
    pub fn tree_point(&self, inst: &Instance, tree: &SpanningTree) -> Vec<f64> {
        let mut p = vec![0.0; self.lp().num_vars()];
        self.block.fill_tree_point(inst, tree, &mut p);
        for &e in tree.edges() {
            for &f in tree.edges() {
                if e != f {
                    p[self.pairs.var(e, f).0] = 1.0;
                }
            }
        }
        p
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// Values of `x` and the full `m × m` matrix `y` (row-major).
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxationPoint {
    pub m: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl RelaxationPoint {
    pub fn y(&self, e: usize, f: usize) -> f64 {
        self.y[e * self.m + f]
    }

    pub fn objective(&self, inst: &Instance) -> f64 {
        self.y.iter().zip(inst.q_matrix()).map(|(a, b)| a * b).sum()
    }
}

fn ensure_optimal(sol: &LpSolution, what: &str) -> Result<(), Error> {
    if sol.status == Status::Optimal {
        Ok(())
    } else {
        Err(Error::Lp(format!("{what} ended with status {}", sol.status)))
    }
}

/// VS0 with its optimal point, for cut separation.
pub fn vs0_bound(inst: &Instance) -> Result<(BoundResult, RelaxationPoint), Error> {
    let start = Instant::now();
    let mut model = QuadraticModel::new(inst, PairLayout::Symmetric, f64::INFINITY)?;
    let sol = model.solve();
    ensure_optimal(&sol, "VS0")?;
    let point = model.point(&sol);
    let result = BoundResult {
        method: Method::Vs0,
        value: sol.objective,
        status: BoundStatus::Converged,
        iterations: sol.iterations,
        elapsed: start.elapsed(),
        trace: vec![sol.objective],
        certificate: Certificate::LpDuals(sol.dual.clone()),
    };
    Ok((result, point))
}

/// Weak-sum under-estimator `a` of Q with dual data of the spanning tree LP.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearizationCertificate {
    pub a: Vec<f64>,
    /// `p_e = 2(n−2) a_e + q_ee`.
    pub p: Vec<f64>,
    pub epsilon: f64,
    /// Indexed `k * m + e`.
    pub theta: Vec<f64>,
    /// Indexed `k * n + i`; zero on the diagonal.
    pub mu: Vec<f64>,
}

/// Builds the LBB model: maximize `−(n−1)ε − Σ μ` subject to
/// `a_e + a_f ≤ q_ef`, `Σ_k θ_ke − ε ≤ 2(n−2)a_e + q_ee`,
/// `μ_ki + θ_ke ≥ 0` for `e ∈ δ(i)`, `k ≠ i`, and `μ ≥ 0`.
pub fn lbb_lp(inst: &Instance) -> Result<(LinearProgram, LbbVars), Error> {
    if !inst.is_complete() {
        return Err(Error::Unsupported("LBB is defined for complete graphs only".into()));
    }
    let (n, m) = (inst.n(), inst.m());
    let mut lp = LinearProgram::new(ObjectiveSense::Maximize).with_name(format!("lbb_{}", inst.name()));
    let free = (f64::NEG_INFINITY, f64::INFINITY);
    let a: Vec<VarId> = (0..m).map(|e| lp.add_var(format!("a_{e}"), free.0, free.1, 0.0)).collect();
    let theta: Vec<VarId> = (0..n * m).map(|i| lp.add_var(format!("th_{}_{}", i / m, i % m), free.0, free.1, 0.0)).collect();
    let eps = lp.add_var("eps", free.0, free.1, -(n as f64 - 1.0));
    let mu: Vec<Option<VarId>> = (0..n * n)
        .map(|i| (i / n != i % n).then(|| lp.add_var(format!("mu_{}_{}", i / n, i % n), 0.0, f64::INFINITY, -1.0)))
        .collect();
    for e in 0..m {
        for f in e + 1..m {
            lp.add_constraint(format!("ws_{e}_{f}"), [(a[e], 1.0), (a[f], 1.0)], Sense::Le, inst.q(e, f));
        }
    }
    let shift = 2.0 * (n as f64 - 2.0);
    for e in 0..m {
        let mut row: Vec<(VarId, f64)> = (0..n).map(|k| (theta[k * m + e], 1.0)).collect();
        row.push((eps, -1.0));
        row.push((a[e], -shift));
        lp.add_constraint(format!("lin_{e}"), row, Sense::Le, inst.q(e, e));
    }
    for k in 0..n {
        for i in (0..n).filter(|&i| i != k) {
            for &e in inst.incident(i) {
                let row = [(mu[k * n + i].expect("k != i"), 1.0), (theta[k * m + e], 1.0)];
                lp.add_constraint(format!("mu_{k}_{i}_{e}"), row, Sense::Ge, 0.0);
            }
        }
    }
    Ok((lp, LbbVars { a, theta, eps, mu }))
}

#[derive(Debug, Clone)]
pub struct LbbVars {
    pub a: Vec<VarId>,
    pub theta: Vec<VarId>,
    pub eps: VarId,
    pub mu: Vec<Option<VarId>>,
}

pub fn lbb_bound(inst: &Instance) -> Result<(BoundResult, LinearizationCertificate), Error> {
    let start = Instant::now();
    let (lp, vars) = lbb_lp(inst)?;
    let sol = qmstp_lp::solve(&lp, &qmstp_lp::Limits::default())?;
    ensure_optimal(&sol, "LBB")?;
    let a: Vec<f64> = vars.a.iter().map(|v| sol.primal[v.0]).collect();
    let p = crate::oracle::linearization_vector(inst, &a);
    let cert = LinearizationCertificate {
        p,
        epsilon: sol.primal[vars.eps.0],
        theta: vars.theta.iter().map(|v| sol.primal[v.0]).collect(),
        mu: vars.mu.iter().map(|v| v.map_or(0.0, |v| sol.primal[v.0])).collect(),
        a,
    };
    let result = BoundResult {
        method: Method::Lbb,
        value: sol.objective,
        status: BoundStatus::Converged,
        iterations: sol.iterations,
        elapsed: start.elapsed(),
        trace: vec![sol.objective],
        certificate: Certificate::LpDuals(sol.dual),
    };
    Ok((result, cert))
}

/// How the exponential family of subset rows is handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubsetRows {
    /// Every `S` with `|S| ≥ 2` up front; only for tiny graphs.
    Explicit,
    /// Violated rows found by the separation LP, added in rounds.
    Separated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubsetOptions {
    pub rows: SubsetRows,
    pub time_limit: Option<Duration>,
    /// Minimum violation for a separated row.
    pub tol: f64,
    pub max_rounds: usize,
}

impl Default for SubsetOptions {
    fn default() -> Self {
        SubsetOptions { rows: SubsetRows::Separated, time_limit: None, tol: 1e-6, max_rounds: 10_000 }
    }
}

/// Row `Σ_{f∈E(S)} y_ef ≤ (|S|−1) x_e` in model variables.
fn subset_row(model: &QuadraticModel, inside: &[usize], size: usize, e: usize) -> Vec<(VarId, f64)> {
    let mut row: Vec<(VarId, f64)> = inside.iter().map(|&f| (model.y_var(e, f), 1.0)).collect();
    row.push((model.block.x[e], -(size as f64 - 1.0)));
    row
}

/// Most violated subset row for edge `e` at point `pt`, if above `tol`.
fn separate_edge(inst: &Instance, pt: &RelaxationPoint, e: usize, tol: f64) -> Result<Option<(f64, Vec<usize>)>, Error> {
    let xe = pt.x[e];
    if xe <= tol {
        // With x_e ≈ 0 the row sums force y_e· ≈ 0 as well.
        return Ok(None);
    }
    let w: Vec<f64> = (0..inst.m()).map(|f| pt.y(e, f).max(0.0)).collect();
    let mut best: Option<(f64, Vec<usize>)> = None;
    for k in 0..inst.n() {
        if inst.incident(k).iter().all(|&f| w[f] <= 0.0) {
            continue;
        }
        let sep = max_subset_excess(inst, k, &w, xe)?;
        if sep.value > tol && best.as_ref().is_none_or(|b| sep.value > b.0) {
            best = Some((sep.value, sep.set));
        }
    }
    Ok(best)
}

/// Minimizes `Σ q_ef y_ef` over the extended block, the row sums and all
/// subset rows. With [`PairLayout::Asymmetric`] this is the LP form of the
/// GL bound; with [`PairLayout::Symmetric`] it is the incomplete first-level
/// RLT relaxation.
pub fn subset_relaxation(inst: &Instance, layout: PairLayout, opts: &SubsetOptions) -> Result<BoundResult, Error> {
    let start = Instant::now();
    let deadline = opts.time_limit.map(|t| start + t);
    let (n, m) = (inst.n(), inst.m());
    let mut model = QuadraticModel::new(inst, layout, f64::INFINITY)?;
    if opts.rows == SubsetRows::Explicit {
        if n > 12 {
            return Err(Error::Unsupported(format!("explicit subset rows need n <= 12, got {n}")));
        }
        for mask in 0u32..(1 << n) {
            let set: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            if set.len() < 2 {
                continue;
            }
            let (inside, _) = edge_sets(inst, &set);
            for e in 0..m {
                let row = subset_row(&model, &inside, set.len(), e);
                model.add_row(format!("sub_{e}_{mask}"), row, Sense::Le, 0.0)?;
            }
        }
    }
    let method = match layout {
        PairLayout::Symmetric => Method::Rlt1,
        PairLayout::Asymmetric => Method::Gl,
    };
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut status = BoundStatus::IterationLimit;
    let mut added = 0usize;
    for round in 0..opts.max_rounds {
        if let Some(dl) = deadline {
            model.solver_mut().limits.time_limit = Some(dl.saturating_duration_since(Instant::now()));
        }
        let sol = model.solve();
        iterations += sol.iterations;
        if sol.status == Status::TimeLimit {
            status = BoundStatus::TimeLimit;
            break;
        }
        ensure_optimal(&sol, "subset relaxation")?;
        trace.push(sol.objective);
        if opts.rows == SubsetRows::Explicit {
            status = BoundStatus::Converged;
            break;
        }
        if deadline.is_some_and(|dl| Instant::now() >= dl) {
            status = BoundStatus::TimeLimit;
            break;
        }
        let pt = model.point(&sol);
        let found: Vec<(usize, Option<(f64, Vec<usize>)>)> = (0..m)
            .into_par_iter()
            .map(|e| separate_edge(inst, &pt, e, opts.tol).map(|r| (e, r)))
            .collect::<Result<_, _>>()?;
        let mut any = false;
        for (e, cut) in found {
            if let Some((_, set)) = cut {
                let (inside, _) = edge_sets(inst, &set);
                let row = subset_row(&model, &inside, set.len(), e);
                model.add_row(format!("sub_{e}_r{round}_{added}"), row, Sense::Le, 0.0)?;
                added += 1;
                any = true;
            }
        }
        if !any {
            status = BoundStatus::Converged;
            break;
        }
    }
    let value = trace.last().copied().unwrap_or(f64::NEG_INFINITY);
    Ok(BoundResult {
        method,
        value,
        status,
        iterations,
        elapsed: start.elapsed(),
        trace,
        certificate: Certificate::None,
    })
}

/// Incomplete first-level RLT bound by row generation.
pub fn rlt1_incomplete_bound(inst: &Instance, time_limit: Option<Duration>) -> Result<BoundResult, Error> {
    subset_relaxation(inst, PairLayout::Symmetric, &SubsetOptions { time_limit, ..SubsetOptions::default() })
}

/// GL bound computed as a linear program.
pub fn gl_lp_bound(inst: &Instance, rows: SubsetRows) -> Result<BoundResult, Error> {
    subset_relaxation(inst, PairLayout::Asymmetric, &SubsetOptions { rows, ..SubsetOptions::default() })
}

/// Largest violation of any incomplete-RLT row by `(x, y)`: the extended
/// block is checked through the subset rows on x (which describe the
/// spanning tree polytope), plus bounds, row sums, symmetry and all subset
/// rows on y by enumeration. Intended for small graphs.
pub fn rlt1_max_violation(inst: &Instance, x: &[f64], y: &[f64]) -> f64 {
    let (n, m) = (inst.n(), inst.m());
    let yy = |e: usize, f: usize| y[e * m + f];
    let mut worst: f64 = 0.0;
    let card: f64 = x.iter().sum();
    worst = worst.max((card - (n as f64 - 1.0)).abs());
    for e in 0..m {
        worst = worst.max(-x[e]);
        worst = worst.max((yy(e, e) - x[e]).abs());
        let rowsum: f64 = (0..m).map(|f| yy(e, f)).sum();
        worst = worst.max((rowsum - (n as f64 - 1.0) * x[e]).abs());
        for f in 0..m {
            worst = worst.max(-yy(e, f));
            worst = worst.max((yy(e, f) - yy(f, e)).abs());
        }
    }
    for mask in 0u32..(1 << n) {
        let set: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        if set.len() < 2 {
            continue;
        }
        let (inside, _) = edge_sets(inst, &set);
        let cap = set.len() as f64 - 1.0;
        worst = worst.max(inside.iter().map(|&f| x[f]).sum::<f64>() - cap);
        for e in 0..m {
            worst = worst.max(inside.iter().map(|&f| yy(e, f)).sum::<f64>() - cap * x[e]);
        }
    }
    worst
}
