//! Exhaustive ground truth for small graphs.

use rayon::prelude::*;

use crate::instance::Instance;
use crate::mst::SpanningTree;
use crate::Error;

/// Largest vertex count accepted by [`exact_qmstp`] by default.
pub const DEFAULT_LIMIT_N: usize = 9;

#[derive(Debug, Clone, PartialEq)]
pub struct EnumerationReport {
    pub tree_count: u64,
    pub optimal_cost: f64,
    pub optimal_tree: SpanningTree,
}

struct Enumerator<'a> {
    inst: &'a Instance,
    chosen: Vec<usize>,
    /// Edges not yet decided plus chosen ones, per vertex.
    avail_deg: Vec<usize>,
}

impl Enumerator<'_> {
    /// Include/exclude recursion over edges `e..`; `comp` labels the
    /// components of the chosen forest and `cost` is its quadratic cost.
    fn recurse(&mut self, e: usize, comp: &[u8], cost: f64, visit: &mut dyn FnMut(&[usize], f64)) {
        let n = self.inst.n();
        if self.chosen.len() + 1 == n {
            visit(&self.chosen, cost);
            return;
        }
        let m = self.inst.m();
        if e == m || m - e < n - 1 - self.chosen.len() {
            return;
        }
        let (u, v) = self.inst.edge(e);
        if comp[u] != comp[v] {
            let (keep, drop) = (comp[u], comp[v]);
            let next: Vec<u8> = comp.iter().map(|&c| if c == drop { keep } else { c }).collect();
            let add = self.inst.q(e, e) + 2.0 * self.chosen.iter().map(|&f| self.inst.q(e, f)).sum::<f64>();
            self.chosen.push(e);
            self.recurse(e + 1, &next, cost + add, visit);
            self.chosen.pop();
        }
        // Excluding e must leave both endpoints reachable.
        self.avail_deg[u] -= 1;
        self.avail_deg[v] -= 1;
        if self.avail_deg[u] > 0 && self.avail_deg[v] > 0 {
            self.recurse(e + 1, comp, cost, visit);
        }
        self.avail_deg[u] += 1;
        self.avail_deg[v] += 1;
    }
}

fn enumerator(inst: &Instance) -> Enumerator<'_> {
    let n = inst.n();
    Enumerator {
        inst,
        chosen: Vec::with_capacity(n),
        avail_deg: (0..n).map(|i| inst.incident(i).len()).collect(),
    }
}

/// Calls `visit(edges, cost)` for every spanning tree, with edges in
/// increasing index order and `cost = xᵀQx`.
pub fn for_each_spanning_tree(inst: &Instance, mut visit: impl FnMut(&[usize], f64)) {
    let comp: Vec<u8> = (0..inst.n() as u8).collect();
    enumerator(inst).recurse(0, &comp, 0.0, &mut visit);
}

/// Trees whose smallest edge index is `first`.
fn enumerate_branch(inst: &Instance, first: usize, visit: &mut dyn FnMut(&[usize], f64)) {
    let mut en = enumerator(inst);
    for e in 0..first {
        let (u, v) = inst.edge(e);
        en.avail_deg[u] -= 1;
        en.avail_deg[v] -= 1;
    }
    if en.avail_deg.iter().any(|&d| d == 0) {
        return;
    }
    let (u, v) = inst.edge(first);
    let mut comp: Vec<u8> = (0..inst.n() as u8).collect();
    comp[v] = comp[u];
    en.chosen.push(first);
    en.recurse(first + 1, &comp, inst.q(first, first), visit);
}

/// Exact optimum by enumerating every spanning tree. Ties are resolved
/// towards the lexicographically smallest edge list.
pub fn exact_qmstp(inst: &Instance, limit_n: usize) -> Result<EnumerationReport, Error> {
    if inst.n() > limit_n {
        return Err(Error::Unsupported(format!("exhaustive enumeration limited to n <= {limit_n}, got {}", inst.n())));
    }
    if inst.n() > u8::MAX as usize {
        return Err(Error::Unsupported("too many vertices for enumeration".into()));
    }
    let parts: Vec<(u64, f64, Vec<usize>)> = (0..inst.m())
        .into_par_iter()
        .map(|first| {
            let mut count = 0u64;
            let mut best = (f64::INFINITY, Vec::new());
            enumerate_branch(inst, first, &mut |edges, cost| {
                count += 1;
                if cost < best.0 || (cost == best.0 && edges < best.1.as_slice()) {
                    best = (cost, edges.to_vec());
                }
            });
            (count, best.0, best.1)
        })
        .collect();
    let tree_count = parts.iter().map(|p| p.0).sum();
    let (cost, edges) = parts
        .into_iter()
        .filter(|p| p.0 > 0)
        .map(|p| (p.1, p.2))
        .reduce(|a, b| if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a })
        .expect("connected graphs have a spanning tree");
    // Recompute from scratch rather than trusting the incremental sum.
    let optimal_tree = SpanningTree::from_edges(inst, edges)?;
    let optimal_cost = optimal_tree.quadratic_cost(inst);
    debug_assert!((optimal_cost - cost).abs() <= 1e-9 * (1.0 + cost.abs()));
    Ok(EnumerationReport { tree_count, optimal_cost, optimal_tree })
}

/// Finds `a` with `q_ef = a_e + a_f` for all `e ≠ f`, if it exists.
///
/// With row sums `R_e = Σ_{f≠e} q_ef = (m−2)a_e + Σa`, the system has the
/// closed form `Σa = ΣR / (2(m−1))`, `a_e = (R_e − Σa)/(m−2)`; the candidate
/// is then checked against every off-diagonal entry.
pub fn weak_sum_decompose(inst: &Instance) -> Option<Vec<f64>> {
    let m = inst.m();
    if m < 3 {
        return None;
    }
    let r: Vec<f64> = (0..m).map(|e| (0..m).filter(|&f| f != e).map(|f| inst.q(e, f)).sum()).collect();
    let total = r.iter().sum::<f64>() / (2.0 * (m as f64 - 1.0));
    let a: Vec<f64> = r.iter().map(|re| (re - total) / (m as f64 - 2.0)).collect();
    let scale = inst.q_matrix().iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    for e in 0..m {
        for f in e + 1..m {
            if (a[e] + a[f] - inst.q(e, f)).abs() > 1e-9 * scale {
                return None;
            }
        }
    }
    Some(a)
}

/// Linearization vector `p_e = 2(n−2)a_e + q_ee` of a weak-sum matrix.
pub fn linearization_vector(inst: &Instance, a: &[f64]) -> Vec<f64> {
    let k = 2.0 * (inst.n() as f64 - 2.0);
    (0..inst.m()).map(|e| k * a[e] + inst.q(e, e)).collect()
}
