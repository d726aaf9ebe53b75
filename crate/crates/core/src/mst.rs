//! Minimum spanning trees, forced-edge variants and subtour separation.

use qmstp_lp::{solve, Limits, LinearProgram, ObjectiveSense, Sense, Status, VarId};

use crate::instance::Instance;
use crate::Error;

#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), rank: vec![0; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the classes of `a` and `b`; false if already merged.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// A spanning tree given by its sorted edge indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpanningTree {
    edges: Vec<usize>,
    incidence: Vec<bool>,
}

impl SpanningTree {
    /// Validates that `edges` form a spanning tree of `inst`.
    pub fn from_edges(inst: &Instance, mut edges: Vec<usize>) -> Result<Self, Error> {
        edges.sort_unstable();
        edges.dedup();
        if edges.len() + 1 != inst.n() {
            return Err(Error::NotATree(format!("{} distinct edges for n = {}", edges.len(), inst.n())));
        }
        let mut uf = UnionFind::new(inst.n());
        let mut incidence = vec![false; inst.m()];
        for &e in &edges {
            if e >= inst.m() {
                return Err(Error::NotATree(format!("edge index {e} out of range")));
            }
            let (u, v) = inst.edge(e);
            if !uf.union(u, v) {
                return Err(Error::NotATree(format!("edge {e} closes a cycle")));
            }
            incidence[e] = true;
        }
        Ok(SpanningTree { edges, incidence })
    }

    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    pub fn contains(&self, e: usize) -> bool {
        self.incidence[e]
    }

    /// 0/1 incidence vector as reals.
    pub fn incidence(&self) -> Vec<f64> {
        self.incidence.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
    }

    pub fn linear_cost(&self, p: &[f64]) -> f64 {
        self.edges.iter().map(|&e| p[e]).sum()
    }

    pub fn quadratic_cost(&self, inst: &Instance) -> f64 {
        inst.quadratic_cost(&self.edges)
    }
}

fn check_costs(inst: &Instance, p: &[f64]) -> Result<(), Error> {
    if p.len() != inst.m() {
        return Err(Error::InvalidInstance(format!("cost vector has {} entries, expected {}", p.len(), inst.m())));
    }
    if let Some(e) = p.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidInstance(format!("cost of edge {e} is not finite")));
    }
    Ok(())
}

fn kruskal(inst: &Instance, p: &[f64], forced: Option<usize>) -> Result<SpanningTree, Error> {
    check_costs(inst, p)?;
    let mut order: Vec<usize> = (0..inst.m()).collect();
    order.sort_by(|&a, &b| p[a].total_cmp(&p[b]).then(a.cmp(&b)));
    let mut uf = UnionFind::new(inst.n());
    let mut chosen = Vec::with_capacity(inst.n() - 1);
    if let Some(e) = forced {
        let (u, v) = inst.edge(e);
        uf.union(u, v);
        chosen.push(e);
    }
    for e in order {
        if chosen.len() + 1 == inst.n() {
            break;
        }
        let (u, v) = inst.edge(e);
        if uf.union(u, v) {
            chosen.push(e);
        }
    }
    if chosen.len() + 1 != inst.n() {
        return Err(Error::Disconnected);
    }
    chosen.sort_unstable();
    let mut incidence = vec![false; inst.m()];
    for &e in &chosen {
        incidence[e] = true;
    }
    Ok(SpanningTree { edges: chosen, incidence })
}

/// Minimum spanning tree under edge costs `p`; ties go to the smaller edge
/// index.
pub fn mst(inst: &Instance, p: &[f64]) -> Result<SpanningTree, Error> {
    kruskal(inst, p, None)
}

/// Cheapest spanning tree that contains edge `e`.
pub fn mst_with_forced_edge(inst: &Instance, p: &[f64], e: usize) -> Result<SpanningTree, Error> {
    if e >= inst.m() {
        return Err(Error::InvalidInstance(format!("edge index {e} out of range")));
    }
    kruskal(inst, p, Some(e))
}

/// Result of a subtour separation problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Separation {
    /// `max_{S ∋ k} Σ_{f ∈ E(S)} w_f − c·(|S| − 1)`; never negative since
    /// `S = {k}` scores 0.
    pub value: f64,
    /// A maximizing vertex set (contains `k`).
    pub set: Vec<usize>,
}

/// Solves the separation LP for root `k`:
/// `max Σ_f w_f α_f − c Σ_{i≠k} θ_i` with `α_f ≤ θ_i` for both endpoints `i`
/// of `f`, `0 ≤ θ ≤ 1` and `θ_k = 1`. The constraint matrix is totally
/// unimodular, so a vertex optimum is the indicator of a vertex set.
pub fn max_subset_excess(inst: &Instance, k: usize, w: &[f64], c: f64) -> Result<Separation, Error> {
    check_costs(inst, w)?;
    if let Some(e) = w.iter().position(|&v| v < 0.0) {
        return Err(Error::InvalidInstance(format!("separation weight of edge {e} is negative")));
    }
    let n = inst.n();
    let mut lp = LinearProgram::new(ObjectiveSense::Maximize);
    let theta: Vec<VarId> = (0..n)
        .map(|i| {
            if i == k {
                lp.add_var(format!("t{i}"), 1.0, 1.0, 0.0)
            } else {
                lp.add_var(format!("t{i}"), 0.0, 1.0, -c)
            }
        })
        .collect();
    for (f, &(u, v)) in inst.edges().iter().enumerate() {
        if w[f] <= 0.0 {
            continue;
        }
        let a = lp.add_var(format!("a{f}"), 0.0, f64::INFINITY, w[f]);
        lp.add_constraint(format!("u{f}"), [(a, 1.0), (theta[u], -1.0)], Sense::Le, 0.0);
        lp.add_constraint(format!("v{f}"), [(a, 1.0), (theta[v], -1.0)], Sense::Le, 0.0);
    }
    let sol = solve(&lp, &Limits::default())?;
    if sol.status != Status::Optimal {
        return Err(Error::Lp(format!("separation LP ended with status {}", sol.status)));
    }
    let set: Vec<usize> = (0..n).filter(|&i| sol.primal[theta[i].0] > 0.5).collect();
    // Score the rounded set exactly rather than trusting the LP value.
    let (inside, _) = crate::instance::edge_sets(inst, &set);
    let value = inside.iter().map(|&f| w[f]).sum::<f64>() - c * (set.len() as f64 - 1.0);
    Ok(Separation { value: value.max(0.0), set })
}

/// Largest violation of a subtour constraint `Σ_{E(S)} x̃ ≤ |S| − 1` over
/// sets containing `k`, with a maximizing set.
pub fn separation_value(inst: &Instance, k: usize, x: &[f64]) -> Result<Separation, Error> {
    max_subset_excess(inst, k, x, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k4() -> Instance {
        let edges = vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        Instance::new("k4", 4, edges, vec![0.0; 36]).unwrap()
    }

    #[test]
    fn union_find_merges() {
        let mut uf = UnionFind::new(4);
        assert!(uf.union(0, 1));
        assert!(uf.union(2, 3));
        assert!(!uf.union(1, 0));
        assert!(uf.union(1, 3));
        assert_eq!(uf.find(0), uf.find(2));
    }

    #[test]
    fn rejects_cycles_and_wrong_sizes() {
        let g = k4();
        assert!(SpanningTree::from_edges(&g, vec![0, 1, 3]).is_err());
        assert!(SpanningTree::from_edges(&g, vec![0, 1]).is_err());
        assert!(SpanningTree::from_edges(&g, vec![0, 1, 2]).is_ok());
    }

    #[test]
    fn zero_costs_pick_lowest_indices() {
        let g = k4();
        assert_eq!(mst(&g, &[0.0; 6]).unwrap().edges(), &[0, 1, 2]);
    }
}
