//! Problem instances, benchmark generators and the instance file format.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::Error;

/// An undirected connected graph with a symmetric edge-interaction matrix.
///
/// `q[e][f]` (stored row-major) is the cost paid when edges `e` and `f` are
/// both in the tree; `q[e][e]` is the linear cost of `e`.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    name: String,
    n: usize,
    edges: Vec<(usize, usize)>,
    q: Vec<f64>,
    incident: Vec<Vec<usize>>,
}

impl Instance {
    /// Builds and validates an instance. `q` is row-major `m × m`.
    pub fn new(name: impl Into<String>, n: usize, edges: Vec<(usize, usize)>, q: Vec<f64>) -> Result<Self, Error> {
        let m = edges.len();
        if q.len() != m * m {
            return Err(Error::InvalidInstance(format!("Q has {} entries, expected {}", q.len(), m * m)));
        }
        for (e, &(u, v)) in edges.iter().enumerate() {
            if u >= v || v >= n {
                return Err(Error::InvalidInstance(format!("edge {e} = ({u}, {v}) must satisfy u < v < n = {n}")));
            }
            if e > 0 && edges[e - 1] >= (u, v) {
                return Err(Error::InvalidInstance(format!("edge {e} = ({u}, {v}) is duplicated or out of order")));
            }
        }
        for (i, v) in q.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::InvalidInstance(format!("Q[{}][{}] is not finite", i / m, i % m)));
            }
        }
        for e in 0..m {
            for f in e + 1..m {
                if q[e * m + f] != q[f * m + e] {
                    return Err(Error::Asymmetric { row: e, col: f, upper: q[e * m + f], lower: q[f * m + e] });
                }
            }
        }
        let mut incident = vec![Vec::new(); n];
        for (e, &(u, v)) in edges.iter().enumerate() {
            incident[u].push(e);
            incident[v].push(e);
        }
        let inst = Instance { name: name.into(), n, edges, q, incident };
        if !inst.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(inst)
    }

    /// Same graph with a different interaction matrix.
    pub fn with_costs(&self, q: Vec<f64>) -> Result<Self, Error> {
        Instance::new(self.name.clone(), self.n, self.edges.clone(), q)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    #[inline]
    pub fn q(&self, e: usize, f: usize) -> f64 {
        self.q[e * self.edges.len() + f]
    }

    pub fn q_row(&self, e: usize) -> &[f64] {
        let m = self.edges.len();
        &self.q[e * m..(e + 1) * m]
    }

    /// Row-major interaction matrix.
    pub fn q_matrix(&self) -> &[f64] {
        &self.q
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.m()).map(|e| self.q(e, e)).collect()
    }

    /// Edges incident to vertex `i` (δ(i)), in index order.
    pub fn incident(&self, i: usize) -> &[usize] {
        &self.incident[i]
    }

    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        let key = if u < v { (u, v) } else { (v, u) };
        self.edges.binary_search(&key).ok()
    }

    pub fn is_complete(&self) -> bool {
        self.m() == self.n * (self.n - 1) / 2
    }

    /// Objective `xᵀQx` of the edge set.
    pub fn quadratic_cost(&self, edges: &[usize]) -> f64 {
        edges.iter().map(|&e| edges.iter().map(|&f| self.q(e, f)).sum::<f64>()).sum()
    }

    fn is_connected(&self) -> bool {
        if self.n == 0 {
            return false;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &e in &self.incident[v] {
                let (a, b) = self.edges[e];
                let w = if a == v { b } else { a };
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }
}

/// Edges inside `s` (E(S)) and edges crossing its boundary (δ(S)).
pub fn edge_sets(inst: &Instance, s: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut member = vec![false; inst.n()];
    for &v in s {
        member[v] = true;
    }
    let mut inside = Vec::new();
    let mut boundary = Vec::new();
    for (e, &(u, v)) in inst.edges().iter().enumerate() {
        match (member[u], member[v]) {
            (true, true) => inside.push(e),
            (true, false) | (false, true) => boundary.push(e),
            _ => {}
        }
    }
    (inside, boundary)
}

/// Canonical text form: `QMSTP 1`, `n m`, the edge list, then Q row by row.
pub fn instance_to_string(inst: &Instance) -> String {
    use std::fmt::Write as _;
    let m = inst.m();
    let mut out = format!("QMSTP 1\n{} {}\n", inst.n(), m);
    for &(u, v) in inst.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    for e in 0..m {
        for (f, v) in inst.q_row(e).iter().enumerate() {
            if f > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    out
}

pub fn parse_instance(text: &str, name: &str) -> Result<Instance, Error> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let parse_err = |line: usize, msg: String| Error::Parse { line: line + 1, msg };

    let (ln, header) = lines.next().ok_or_else(|| parse_err(0, "empty file".into()))?;
    if header.split_whitespace().collect::<Vec<_>>() != ["QMSTP", "1"] {
        return Err(parse_err(ln, format!("expected header 'QMSTP 1', found '{header}'")));
    }
    let (ln, dims) = lines.next().ok_or_else(|| parse_err(1, "missing dimensions".into()))?;
    let d: Vec<usize> = dims
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| parse_err(ln, format!("bad dimensions '{dims}'")))?;
    let [n, m] = d[..] else {
        return Err(parse_err(ln, format!("expected 'n m', found '{dims}'")));
    };
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (ln, l) = lines.next().ok_or_else(|| parse_err(ln, "missing edge lines".into()))?;
        let t: Vec<usize> = l
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|_| parse_err(ln, format!("bad edge '{l}'")))?;
        let [u, v] = t[..] else {
            return Err(parse_err(ln, format!("expected 'u v', found '{l}'")));
        };
        edges.push((u, v));
    }
    let mut q = Vec::with_capacity(m * m);
    for e in 0..m {
        let (ln, l) = lines.next().ok_or_else(|| parse_err(ln, format!("missing row {e} of Q")))?;
        let row: Vec<f64> = l
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| parse_err(ln, format!("bad number in row {e} of Q")))?;
        if row.len() != m {
            return Err(parse_err(ln, format!("row {e} of Q has {} entries, expected {m}", row.len())));
        }
        q.extend(row);
    }
    if let Some((ln, _)) = lines.next() {
        return Err(parse_err(ln, "trailing content".into()));
    }
    Instance::new(name, n, edges, q)
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<Instance, Error> {
    let path = path.as_ref();
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("instance");
    parse_instance(&fs::read_to_string(path)?, name)
}

pub fn write_instance(inst: &Instance, path: impl AsRef<Path>) -> Result<(), Error> {
    fs::write(path, instance_to_string(inst))?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Cp1,
    Cp2,
    Cp3,
    Cp4,
    OpSym,
    OpVsym,
    OpEsym,
    Vs,
}

impl Family {
    pub const ALL: [Family; 8] =
        [Family::Cp1, Family::Cp2, Family::Cp3, Family::Cp4, Family::OpSym, Family::OpVsym, Family::OpEsym, Family::Vs];

    pub fn is_op(self) -> bool {
        matches!(self, Family::OpSym | Family::OpVsym | Family::OpEsym)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Cp1 => "CP1",
            Family::Cp2 => "CP2",
            Family::Cp3 => "CP3",
            Family::Cp4 => "CP4",
            Family::OpSym => "OPsym",
            Family::OpVsym => "OPvsym",
            Family::OpEsym => "OPesym",
            Family::Vs => "VS",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Family::ALL
            .into_iter()
            .find(|f| f.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Generator(format!("unknown family '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorSpec {
    pub family: Family,
    pub n: usize,
    /// Edge density in percent; OP families require 100.
    pub density: u32,
    pub seed: u64,
    pub vs_max_diag: f64,
    pub vs_max_offdiag: f64,
}

impl GeneratorSpec {
    pub fn new(family: Family, n: usize, density: u32, seed: u64) -> Self {
        GeneratorSpec { family, n, density, seed, vs_max_diag: 100.0, vs_max_offdiag: 100.0 }
    }

    /// Number of edges implied by the density: ⌈d/100 · n(n−1)/2⌉.
    pub fn edge_count(&self) -> usize {
        let pairs = self.n * (self.n - 1) / 2;
        (self.density as usize * pairs).div_ceil(100)
    }

    /// Instance name, e.g. `CP1-n10-d33-s7`.
    pub fn label(&self) -> String {
        format!("{}-n{}-d{}-s{}", self.family, self.n, self.density, self.seed)
    }

    fn stream(&self) -> u64 {
        // FNV-1a over (family, n, density) keeps streams of different specs
        // with the same seed apart, independently of platform and toolchain.
        let mut h: u64 = 0xcbf29ce484222325;
        let tag = format!("{}/{}/{}", self.family, self.n, self.density);
        for b in tag.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        h
    }
}

/// Auxiliary draws behind a generated instance, exposed for testing.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GeneratorTrace {
    /// Vertex weights of OPvsym.
    pub weights: Vec<f64>,
    /// Vertex coordinates of OPesym.
    pub coords: Vec<(f64, f64)>,
    /// Rows marked as "high" in the VS family.
    pub vs_selected: Vec<usize>,
}

pub fn generate(spec: &GeneratorSpec) -> Result<Instance, Error> {
    generate_with_trace(spec).map(|(inst, _)| inst)
}

pub fn generate_with_trace(spec: &GeneratorSpec) -> Result<(Instance, GeneratorTrace), Error> {
    if spec.n < 3 {
        return Err(Error::Generator(format!("n = {} is too small (need n >= 3)", spec.n)));
    }
    if !matches!(spec.density, 1..=100) {
        return Err(Error::Generator(format!("density {} is not a percentage", spec.density)));
    }
    if spec.family.is_op() && spec.density != 100 {
        return Err(Error::Generator(format!("{} instances are complete graphs (density 100)", spec.family)));
    }
    let m = spec.edge_count();
    if m < spec.n - 1 {
        return Err(Error::Generator(format!("density {} gives {m} edges, fewer than n-1", spec.density)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(spec.stream());

    let n = spec.n;
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let mut edges;
    let mut attempts = 0;
    loop {
        let mut picked: Vec<usize> = sample(&mut rng, pairs.len(), m).into_vec();
        picked.sort_unstable();
        edges = picked.into_iter().map(|i| pairs[i]).collect::<Vec<_>>();
        if spanning_connected(n, &edges) {
            break;
        }
        attempts += 1;
        if attempts > 100_000 {
            return Err(Error::Generator("could not draw a connected graph".into()));
        }
    }

    let mut trace = GeneratorTrace::default();
    let mut q = vec![0.0; m * m];
    let set = |q: &mut Vec<f64>, e: usize, f: usize, v: f64| {
        q[e * m + f] = v;
        q[f * m + e] = v;
    };
    let uniform_int = |rng: &mut ChaCha8Rng, hi: u32| rng.gen_range(1..=hi) as f64;
    match spec.family {
        Family::Cp1 | Family::Cp2 | Family::Cp3 | Family::Cp4 | Family::OpSym => {
            let (dh, oh) = match spec.family {
                Family::Cp1 => (10, 10),
                Family::Cp2 => (10, 100),
                Family::Cp3 => (100, 10),
                Family::Cp4 => (100, 100),
                _ => (100, 20),
            };
            for e in 0..m {
                for f in e..m {
                    let v = uniform_int(&mut rng, if e == f { dh } else { oh });
                    set(&mut q, e, f, v);
                }
            }
        }
        Family::OpVsym => {
            trace.weights = (0..n).map(|_| uniform_int(&mut rng, 10)).collect();
            let w = &trace.weights;
            for e in 0..m {
                let (i, j) = edges[e];
                set(&mut q, e, e, uniform_int(&mut rng, 10_000));
                for f in e + 1..m {
                    let (k, l) = edges[f];
                    set(&mut q, e, f, w[i] * w[j] * w[k] * w[l]);
                }
            }
        }
        Family::OpEsym => {
            trace.coords = (0..n).map(|_| (rng.gen_range(0.0..=100.0), rng.gen_range(0.0..=100.0))).collect();
            let c = &trace.coords;
            let mid = |e: usize| {
                let (i, j) = edges[e];
                ((c[i].0 + c[j].0) / 2.0, (c[i].1 + c[j].1) / 2.0)
            };
            let dist = |a: (f64, f64), b: (f64, f64)| (a.0 - b.0).hypot(a.1 - b.1);
            for e in 0..m {
                let (i, j) = edges[e];
                set(&mut q, e, e, dist(c[i], c[j]));
                for f in e + 1..m {
                    set(&mut q, e, f, dist(mid(e), mid(f)));
                }
            }
        }
        Family::Vs => {
            let high = m.div_ceil(10);
            let mut selected: Vec<usize> = sample(&mut rng, m, high).into_vec();
            selected.sort_unstable();
            let mut is_sel = vec![false; m];
            for &e in &selected {
                is_sel[e] = true;
            }
            trace.vs_selected = selected;
            let (md, mo) = (spec.vs_max_diag, spec.vs_max_offdiag);
            // Rows are drawn independently (the raw matrix is not symmetric)
            // and symmetrized by averaging.
            let mut raw = vec![0.0; m * m];
            for e in 0..m {
                for f in 0..m {
                    let (lo, hi, scale) = if e == f {
                        (0.0, 0.2, md)
                    } else if is_sel[e] && is_sel[f] {
                        (0.9, 1.0, mo)
                    } else if is_sel[e] {
                        (0.2, 0.4, mo)
                    } else {
                        (0.5, 0.7, mo)
                    };
                    raw[e * m + f] = (rng.gen_range(lo..=hi) * scale).round();
                }
            }
            for e in 0..m {
                for f in e..m {
                    set(&mut q, e, f, (raw[e * m + f] + raw[f * m + e]) / 2.0);
                }
            }
        }
    }
    let inst = Instance::new(spec.label(), n, edges, q)?;
    Ok((inst, trace))
}

fn spanning_connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut uf = crate::mst::UnionFind::new(n);
    let mut comps = n;
    for &(u, v) in edges {
        if uf.union(u, v) {
            comps -= 1;
        }
    }
    comps == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_count_rounds_up() {
        assert_eq!(GeneratorSpec::new(Family::Cp1, 10, 33, 0).edge_count(), 15);
        assert_eq!(GeneratorSpec::new(Family::Cp1, 10, 67, 0).edge_count(), 31);
        assert_eq!(GeneratorSpec::new(Family::Cp1, 10, 100, 0).edge_count(), 45);
    }

    #[test]
    fn family_names_parse_back() {
        for f in Family::ALL {
            assert_eq!(f.to_string().parse::<Family>().unwrap(), f);
        }
        assert!("CP9".parse::<Family>().is_err());
    }
}
