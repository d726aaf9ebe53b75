//! Boolean quadric polytope cuts and the cutting-plane loop behind VS1 and
//! VS2.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};
use std::io::Write;
use std::time::{Duration, Instant};

use qmstp_lp::{Sense, Status, VarId};
use rayon::prelude::*;

use crate::bound::{BoundResult, BoundStatus, Certificate, Method};
use crate::extbounds::{PairLayout, QuadraticModel, RelaxationPoint};
use crate::instance::Instance;
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CutKind {
    /// `y_ef ≤ x_e`
    Ub,
    /// `x_e + x_f ≤ 1 + y_ef`
    Lift,
    /// `y_eg + y_fg ≤ x_g + y_ef`, apex `g`
    Tri1,
    /// `x_e + x_f + x_g ≤ y_ef + y_eg + y_fg + 1`
    Tri2,
}

/// Dedup key: kind plus normalized indices (`usize::MAX` pads binary cuts).
pub type CutKey = (CutKind, usize, usize, usize);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cut {
    pub kind: CutKind,
    pub e: usize,
    pub f: usize,
    /// Third edge of ternary cuts (the apex for [`CutKind::Tri1`]).
    pub g: Option<usize>,
    /// Violation at the point that produced the cut.
    pub violation: f64,
}

impl Cut {
    /// Builds a cut with normalized indices.
    pub fn new(kind: CutKind, e: usize, f: usize, g: Option<usize>) -> Self {
        let (e, f, g) = match kind {
            CutKind::Ub => (e, f, None),
            CutKind::Lift => (e.min(f), e.max(f), None),
            CutKind::Tri1 => (e.min(f), e.max(f), g),
            CutKind::Tri2 => {
                let mut t = [e, f, g.expect("ternary cut")];
                t.sort_unstable();
                (t[0], t[1], Some(t[2]))
            }
        };
        Cut { kind, e, f, g, violation: 0.0 }
    }

    pub fn key(&self) -> CutKey {
        (self.kind, self.e, self.f, self.g.unwrap_or(usize::MAX))
    }

    /// `lhs − rhs` of the `≤` form at the given point.
    pub fn evaluate(&self, x: &[f64], y: impl Fn(usize, usize) -> f64) -> f64 {
        let (e, f) = (self.e, self.f);
        match self.kind {
            CutKind::Ub => y(e, f) - x[e],
            CutKind::Lift => x[e] + x[f] - 1.0 - y(e, f),
            CutKind::Tri1 => {
                let g = self.g.expect("ternary cut");
                y(e, g) + y(f, g) - x[g] - y(e, f)
            }
            CutKind::Tri2 => {
                let g = self.g.expect("ternary cut");
                x[e] + x[f] + x[g] - y(e, f) - y(e, g) - y(f, g) - 1.0
            }
        }
    }

    pub fn violation_at(&self, pt: &RelaxationPoint) -> f64 {
        self.evaluate(&pt.x, |a, b| pt.y(a, b))
    }

    /// Row of the cut in `model` variables as `(coefficients, rhs)` with
    /// sense `≤`.
    pub fn row(&self, model: &QuadraticModel) -> (Vec<(VarId, f64)>, f64) {
        let x = &model.block.x;
        let y = |a, b| model.y_var(a, b);
        let (e, f) = (self.e, self.f);
        match self.kind {
            CutKind::Ub => (vec![(y(e, f), 1.0), (x[e], -1.0)], 0.0),
            CutKind::Lift => (vec![(x[e], 1.0), (x[f], 1.0), (y(e, f), -1.0)], 1.0),
            CutKind::Tri1 => {
                let g = self.g.expect("ternary cut");
                (vec![(y(e, g), 1.0), (y(f, g), 1.0), (x[g], -1.0), (y(e, f), -1.0)], 0.0)
            }
            CutKind::Tri2 => {
                let g = self.g.expect("ternary cut");
                let row = vec![(x[e], 1.0), (x[f], 1.0), (x[g], 1.0), (y(e, f), -1.0), (y(e, g), -1.0), (y(f, g), -1.0)];
                (row, 1.0)
            }
        }
    }
}

/// Ranking used for batches: larger violation first, then smaller key.
#[derive(Debug, Clone, Copy)]
struct Ranked(Cut);

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Ranked {}

impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ranked {
    /// `a < b` when `a` ranks ahead of `b`; the max-heap top is the weakest.
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.violation.total_cmp(&self.0.violation).then_with(|| self.0.key().cmp(&other.0.key()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    /// Pairwise cuts only.
    Vs1,
    /// Pairwise and triangle cuts.
    Vs2,
}

struct TopK {
    cap: usize,
    heap: BinaryHeap<Ranked>,
}

impl TopK {
    fn new(cap: usize) -> Self {
        TopK { cap, heap: BinaryHeap::new() }
    }

    fn offer(&mut self, cut: Cut) {
        if self.cap == 0 {
            return;
        }
        if self.heap.len() == self.cap {
            let worst = self.heap.peek().expect("nonempty");
            if Ranked(cut) >= *worst {
                return;
            }
            self.heap.pop();
        }
        self.heap.push(Ranked(cut));
    }

    fn merge(mut self, other: TopK) -> TopK {
        for c in other.heap {
            self.offer(c.0);
        }
        self
    }
}

/// Up to `batch` cuts with violation above `tol`, most violated first and
/// ties in key order. Rows are scanned in parallel and only the running top
/// `batch` is kept in memory.
pub fn separate(pt: &RelaxationPoint, level: Level, batch: usize, tol: f64) -> Vec<Cut> {
    let m = pt.m;
    let top = (0..m)
        .into_par_iter()
        .fold(
            || TopK::new(batch),
            |mut top, e| {
                let mut consider = |kind, a, b, c: Option<usize>| {
                    let mut cut = Cut::new(kind, a, b, c);
                    let v = cut.violation_at(pt);
                    if v > tol {
                        cut.violation = v;
                        top.offer(cut);
                    }
                };
                for f in 0..m {
                    if f == e {
                        continue;
                    }
                    consider(CutKind::Ub, e, f, None);
                    if e < f {
                        consider(CutKind::Lift, e, f, None);
                    }
                    if level == Level::Vs2 && e < f {
                        for g in 0..m {
                            if g == e || g == f {
                                continue;
                            }
                            consider(CutKind::Tri1, e, f, Some(g));
                            if f < g {
                                consider(CutKind::Tri2, e, f, Some(g));
                            }
                        }
                    }
                }
                top
            },
        )
        .reduce(|| TopK::new(batch), TopK::merge);
    let mut cuts: Vec<Cut> = top.heap.into_iter().map(|r| r.0).collect();
    cuts.sort_by(|a, b| Ranked(*a).cmp(&Ranked(*b)));
    cuts
}

/// Cuts added to a model, with duplicate detection.
#[derive(Debug, Clone, Default)]
pub struct CutPool {
    keys: HashSet<CutKey>,
    cuts: Vec<Cut>,
    /// Attempts to insert a cut that was already present.
    pub duplicate_attempts: usize,
}

impl CutPool {
    pub fn new() -> Self {
        CutPool::default()
    }

    /// Returns false (and counts the attempt) for a duplicate.
    pub fn insert(&mut self, cut: Cut) -> bool {
        if self.keys.insert(cut.key()) {
            self.cuts.push(cut);
            true
        } else {
            self.duplicate_attempts += 1;
            false
        }
    }

    pub fn len(&self) -> usize {
        self.cuts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }

    pub fn cuts(&self) -> &[Cut] {
        &self.cuts
    }

    pub fn count(&self, kind: CutKind) -> usize {
        self.cuts.iter().filter(|c| c.kind == kind).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutOptions {
    pub time_limit: Option<Duration>,
    /// Cuts per round; defaults to n·m.
    pub batch: Option<usize>,
    pub cut_tol: f64,
}

impl Default for CutOptions {
    fn default() -> Self {
        CutOptions { time_limit: Some(Duration::from_secs(7200)), batch: None, cut_tol: 1e-6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    pub bound: f64,
    /// Cuts added right before this solve.
    pub cuts_added: usize,
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct CutRun {
    pub pool: CutPool,
    pub trace: Vec<TraceRow>,
    /// Bound when the pairwise cuts were exhausted (VS1), if reached.
    pub vs1_value: Option<f64>,
}

pub fn write_trace_csv(trace: &[TraceRow], out: impl Write) -> Result<(), Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["iteration", "bound", "cuts_added", "elapsed"]).map_err(csv_err)?;
    for r in trace {
        w.write_record([
            r.iteration.to_string(),
            r.bound.to_string(),
            r.cuts_added.to_string(),
            format!("{:.6}", r.elapsed.as_secs_f64()),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Cutting-plane loop from VS0 (with `y ≤ 1`): pairwise cuts until none is violated (VS1),
/// then for [`Level::Vs2`] all four kinds. Every solved LP gives a valid
/// lower bound, so a time limit returns the last completed one.
pub fn vs_bound(inst: &Instance, level: Level, opts: &CutOptions) -> Result<(BoundResult, CutRun), Error> {
    let start = Instant::now();
    let deadline = opts.time_limit.map(|t| start + t);
    let batch = opts.batch.unwrap_or(inst.n() * inst.m()).max(1);
    // y ≤ 1 is implied by the UB cuts and x ≤ 1; as variable bounds it saves
    // many rounds.
    let mut model = QuadraticModel::new(inst, PairLayout::Symmetric, 1.0)?;
    let mut pool = CutPool::new();
    let mut trace: Vec<TraceRow> = Vec::new();
    let mut phase = Level::Vs1;
    let mut vs1_value = None;
    let mut iterations = 0;
    let mut pending = 0;
    let status = loop {
        if let Some(dl) = deadline {
            let left = dl.saturating_duration_since(Instant::now());
            if left.is_zero() {
                break BoundStatus::TimeLimit;
            }
            model.solver_mut().limits.time_limit = Some(left);
        }
        let sol = model.solve();
        iterations += sol.iterations;
        match sol.status {
            Status::Optimal => {}
            Status::TimeLimit => break BoundStatus::TimeLimit,
            other => return Err(Error::Lp(format!("cutting-plane LP ended with status {other}"))),
        }
        trace.push(TraceRow { iteration: trace.len(), bound: sol.objective, cuts_added: pending, elapsed: start.elapsed() });
        let pt = model.point(&sol);
        let mut cuts = separate(&pt, phase, batch, opts.cut_tol);
        if cuts.is_empty() && phase == Level::Vs1 {
            vs1_value = Some(sol.objective);
            if level == Level::Vs2 {
                phase = Level::Vs2;
                cuts = separate(&pt, phase, batch, opts.cut_tol);
            }
        }
        if cuts.is_empty() {
            break BoundStatus::Converged;
        }
        pending = 0;
        for cut in cuts {
            if pool.insert(cut) {
                let (row, rhs) = cut.row(&model);
                let name = format!("cut{}", pool.len());
                model.add_row(name, row, Sense::Le, rhs)?;
                pending += 1;
            }
        }
        if pending == 0 {
            // Every candidate was already in the model: the LP point did not
            // move, so nothing more can be gained.
            break BoundStatus::Converged;
        }
    };
    let value = trace.last().map(|r| r.bound).ok_or_else(|| Error::Lp("no LP solved within the time limit".into()))?;
    let result = BoundResult {
        method: if level == Level::Vs1 { Method::Vs1 } else { Method::Vs2 },
        value,
        status,
        iterations,
        elapsed: start.elapsed(),
        trace: trace.iter().map(|r| r.bound).collect(),
        certificate: Certificate::None,
    };
    Ok((result, CutRun { pool, trace, vs1_value }))
}
