//! Bounded-variable revised simplex.
//!
//! Every row `a·x (<=|=|>=) b` becomes `a·x + s = b` with a slack `s` whose
//! bounds encode the sense. The engine runs a composite primal simplex
//! (sum-of-infeasibilities phase one, then the true objective) and a dual
//! simplex that is used whenever the current basis is dual feasible, which is
//! the common case after appending rows to a solved model.

use std::time::Instant;

use crate::factor::BasisFactor;
use crate::model::{LinearProgram, ObjectiveSense, Sense};

const FEAS_TOL: f64 = 1e-9;
const DUAL_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const REFACTOR_EVERY: usize = 64;
const DEGENERATE_STREAK: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic(usize),
    Lower,
    Upper,
    /// Free nonbasic variable parked at zero.
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Outcome {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
    TimeLimit,
}

enum DualOutcome {
    Finished(Outcome),
    NotDualFeasible,
}

pub(crate) struct RunLimits {
    pub max_iterations: usize,
    pub deadline: Option<Instant>,
}

pub(crate) struct Engine {
    nstruct: usize,
    nrows: usize,
    cols: Vec<Vec<(usize, f64)>>,
    rows: Vec<Vec<(usize, f64)>>,
    rhs: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    cost: Vec<f64>,
    x: Vec<f64>,
    state: Vec<VarState>,
    basis: Vec<usize>,
    factor: BasisFactor,
    dirty: bool,
    pub iterations: usize,
}

fn slack_bounds(sense: Sense) -> (f64, f64) {
    match sense {
        Sense::Le => (0.0, f64::INFINITY),
        Sense::Ge => (f64::NEG_INFINITY, 0.0),
        Sense::Eq => (0.0, 0.0),
    }
}

fn resting_value(lo: f64, hi: f64) -> (f64, VarState) {
    if lo.is_finite() {
        (lo, VarState::Lower)
    } else if hi.is_finite() {
        (hi, VarState::Upper)
    } else {
        (0.0, VarState::Zero)
    }
}

impl Engine {
    pub fn new(lp: &LinearProgram) -> Self {
        let nstruct = lp.num_vars();
        let sign = match lp.sense {
            ObjectiveSense::Minimize => 1.0,
            ObjectiveSense::Maximize => -1.0,
        };
        let mut eng = Engine {
            nstruct,
            nrows: 0,
            cols: vec![Vec::new(); nstruct],
            rows: Vec::new(),
            rhs: Vec::new(),
            lo: Vec::with_capacity(nstruct),
            hi: Vec::with_capacity(nstruct),
            cost: Vec::with_capacity(nstruct),
            x: Vec::with_capacity(nstruct),
            state: Vec::with_capacity(nstruct),
            basis: Vec::new(),
            factor: BasisFactor::empty(),
            dirty: true,
            iterations: 0,
        };
        for v in &lp.variables {
            let (val, st) = resting_value(v.lower, v.upper);
            eng.lo.push(v.lower);
            eng.hi.push(v.upper);
            eng.cost.push(sign * v.objective);
            eng.x.push(val);
            eng.state.push(st);
        }
        for c in &lp.constraints {
            eng.push_row(c.coeffs.iter().map(|&(v, a)| (v.0, a)).collect(), c.sense, c.rhs);
        }
        eng
    }

    /// Appends a row whose slack enters the basis. The current basis stays
    /// dual feasible, so the next solve can continue with the dual simplex.
    pub fn push_row(&mut self, coeffs: Vec<(usize, f64)>, sense: Sense, rhs: f64) {
        let r = self.nrows;
        for &(j, a) in &coeffs {
            self.cols[j].push((r, a));
        }
        let activity: f64 = coeffs.iter().map(|&(j, a)| a * self.x[j]).sum();
        self.rows.push(coeffs);
        self.rhs.push(rhs);
        self.nrows += 1;

        // Slack variables live after the structurals; shift is avoided by
        // keeping them in row order at index nstruct + r.
        let (slo, shi) = slack_bounds(sense);
        self.lo.push(slo);
        self.hi.push(shi);
        self.cost.push(0.0);
        self.x.push(rhs - activity);
        self.state.push(VarState::Basic(self.basis.len()));
        self.basis.push(self.nstruct + r);
        self.dirty = true;
    }

    fn column(&self, j: usize) -> ColumnRef<'_> {
        if j < self.nstruct {
            ColumnRef::Structural(&self.cols[j])
        } else {
            ColumnRef::Slack(j - self.nstruct)
        }
    }

    fn dense_column(&self, j: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.nrows];
        match self.column(j) {
            ColumnRef::Structural(c) => {
                for &(r, a) in c {
                    v[r] = a;
                }
            }
            ColumnRef::Slack(r) => v[r] = 1.0,
        }
        v
    }

    fn dot_column(&self, y: &[f64], j: usize) -> f64 {
        match self.column(j) {
            ColumnRef::Structural(c) => c.iter().map(|&(r, a)| a * y[r]).sum(),
            ColumnRef::Slack(r) => y[r],
        }
    }

    fn nvars(&self) -> usize {
        self.nstruct + self.nrows
    }

    fn is_fixed(&self, j: usize) -> bool {
        self.lo[j] == self.hi[j]
    }

    fn refactor(&mut self) {
        loop {
            match self.factor.factorize(self.nstruct, self.nrows, &self.cols, &self.basis) {
                Ok(()) => break,
                Err(sing) => {
                    for (&pos, &row) in sing.positions.iter().zip(&sing.free_rows) {
                        let out = self.basis[pos];
                        let (val, st) = self.park(out);
                        self.x[out] = val;
                        self.state[out] = st;
                        let slack = self.nstruct + row;
                        self.basis[pos] = slack;
                        self.state[slack] = VarState::Basic(pos);
                    }
                }
            }
        }
        self.dirty = false;
        self.recompute_basics();
    }

    /// Nonbasic position for a variable leaving the basis without a ratio
    /// test: the bound closest to its current value.
    fn park(&self, j: usize) -> (f64, VarState) {
        let (lo, hi, v) = (self.lo[j], self.hi[j], self.x[j]);
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) => {
                if (v - lo).abs() <= (hi - v).abs() {
                    (lo, VarState::Lower)
                } else {
                    (hi, VarState::Upper)
                }
            }
            (true, false) => (lo, VarState::Lower),
            (false, true) => (hi, VarState::Upper),
            (false, false) => (0.0, VarState::Zero),
        }
    }

    fn recompute_basics(&mut self) {
        let mut b = self.rhs.clone();
        for j in 0..self.nvars() {
            if matches!(self.state[j], VarState::Basic(_)) {
                continue;
            }
            let xj = self.x[j];
            if xj == 0.0 {
                continue;
            }
            match self.column(j) {
                ColumnRef::Structural(c) => {
                    for &(r, a) in c {
                        b[r] -= a * xj;
                    }
                }
                ColumnRef::Slack(r) => b[r] -= xj,
            }
        }
        let xb = self.factor.ftran(&self.cols, &b);
        for (pos, &var) in self.basis.iter().enumerate() {
            self.x[var] = xb[pos];
        }
    }

    fn basic_costs(&self, phase_one: bool) -> Vec<f64> {
        self.basis
            .iter()
            .map(|&v| {
                if phase_one {
                    if self.x[v] < self.lo[v] - FEAS_TOL {
                        -1.0
                    } else if self.x[v] > self.hi[v] + FEAS_TOL {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    self.cost[v]
                }
            })
            .collect()
    }

    fn primal_infeasibility(&self) -> f64 {
        self.basis
            .iter()
            .map(|&v| (self.lo[v] - self.x[v]).max(self.x[v] - self.hi[v]).max(0.0))
            .sum()
    }

    fn max_primal_infeasibility(&self) -> f64 {
        self.basis
            .iter()
            .map(|&v| (self.lo[v] - self.x[v]).max(self.x[v] - self.hi[v]).max(0.0))
            .fold(0.0, f64::max)
    }

    fn reduced_costs(&self, y: &[f64], phase_one: bool) -> Vec<f64> {
        (0..self.nvars())
            .map(|j| {
                if matches!(self.state[j], VarState::Basic(_)) {
                    0.0
                } else {
                    let c = if phase_one { 0.0 } else { self.cost[j] };
                    c - self.dot_column(y, j)
                }
            })
            .collect()
    }

    fn limit_hit(&self, limits: &RunLimits) -> Option<Outcome> {
        if self.iterations >= limits.max_iterations {
            return Some(Outcome::IterationLimit);
        }
        if let Some(dl) = limits.deadline {
            if self.iterations % 16 == 0 && Instant::now() >= dl {
                return Some(Outcome::TimeLimit);
            }
        }
        None
    }

    /// Returns true if the basis was refactored.
    fn maybe_refactor(&mut self) -> bool {
        if self.dirty || self.factor.num_etas() >= REFACTOR_EVERY || self.factor.eta_nnz() > 8 * self.nrows + 1024 {
            self.refactor();
            true
        } else {
            false
        }
    }

    /// Records the pivot of `entering` into basis position `pos`.
    fn pivot(&mut self, pos: usize, entering: usize, alpha: &[f64], leaving_value: f64, leaving_state: VarState) {
        let leaving = self.basis[pos];
        self.x[leaving] = leaving_value;
        self.state[leaving] = leaving_state;
        self.basis[pos] = entering;
        self.state[entering] = VarState::Basic(pos);
        self.factor.push_eta(pos, alpha);
    }

    pub fn solve(&mut self, limits: &RunLimits) -> Outcome {
        if self.dirty {
            self.refactor();
        }
        let mut outcome = match self.dual(limits) {
            DualOutcome::Finished(Outcome::Optimal) | DualOutcome::NotDualFeasible => self.primal(limits),
            DualOutcome::Finished(other) => other,
        };
        // A fresh factorization can expose drift accumulated in the eta
        // file; polish until the refreshed basis is still optimal.
        for _ in 0..3 {
            if outcome != Outcome::Optimal {
                break;
            }
            self.refactor();
            if self.max_primal_infeasibility() <= FEAS_TOL * 10.0 && self.is_dual_feasible() {
                break;
            }
            outcome = self.primal(limits);
        }
        outcome
    }

    fn is_dual_feasible(&self) -> bool {
        let cb = self.basic_costs(false);
        let y = self.factor.btran(&self.cols, &cb);
        let d = self.reduced_costs(&y, false);
        (0..self.nvars()).all(|j| self.entering_direction(j, d[j], DUAL_TOL * 10.0).is_none())
    }

    /// Direction in which nonbasic `j` can improve the objective, if any.
    fn entering_direction(&self, j: usize, d: f64, tol: f64) -> Option<f64> {
        if self.is_fixed(j) {
            return None;
        }
        match self.state[j] {
            VarState::Basic(_) => None,
            VarState::Lower if d < -tol => Some(1.0),
            VarState::Upper if d > tol => Some(-1.0),
            VarState::Zero if d.abs() > tol => Some(if d < 0.0 { 1.0 } else { -1.0 }),
            _ => None,
        }
    }

    fn primal(&mut self, limits: &RunLimits) -> Outcome {
        let mut degenerate = 0usize;
        let mut bland = false;
        loop {
            if let Some(out) = self.limit_hit(limits) {
                return out;
            }
            self.maybe_refactor();
            let phase_one = self.primal_infeasibility() > FEAS_TOL;
            let cb = self.basic_costs(phase_one);
            let y = self.factor.btran(&self.cols, &cb);
            let d = self.reduced_costs(&y, phase_one);

            let mut entering = None;
            let mut best = 0.0;
            for j in 0..self.nvars() {
                if let Some(dir) = self.entering_direction(j, d[j], DUAL_TOL) {
                    if bland {
                        entering = Some((j, dir));
                        break;
                    }
                    let score = d[j].abs();
                    if score > best {
                        best = score;
                        entering = Some((j, dir));
                    }
                }
            }
            let Some((q, dir)) = entering else {
                if phase_one {
                    // Confirm on a fresh factorization before declaring.
                    if self.factor.num_etas() > 0 {
                        self.refactor();
                        continue;
                    }
                    return Outcome::Infeasible;
                }
                return Outcome::Optimal;
            };

            let alpha = self.factor.ftran(&self.cols, &self.dense_column(q));
            let step = self.primal_ratio(&alpha, dir, phase_one, bland);

            let flip_range = self.hi[q] - self.lo[q];
            let (t, leave) = match step {
                Some((t, pos, bound, st)) if t < flip_range => (t, Some((pos, bound, st))),
                _ if flip_range.is_finite() => (flip_range, None),
                _ => {
                    if phase_one {
                        // No breakpoint although the direction improves the
                        // infeasibility: numerical trouble, start afresh.
                        self.refactor();
                        continue;
                    }
                    return Outcome::Unbounded;
                }
            };

            if t > 1e-12 {
                degenerate = 0;
                bland = false;
            } else {
                degenerate += 1;
                if degenerate > DEGENERATE_STREAK {
                    bland = true;
                }
            }

            if t != 0.0 {
                self.x[q] += dir * t;
                for (pos, &var) in self.basis.iter().enumerate() {
                    let a = alpha[pos];
                    if a != 0.0 {
                        self.x[var] -= dir * t * a;
                    }
                }
            }
            match leave {
                Some((pos, bound, st)) => self.pivot(pos, q, &alpha, bound, st),
                None => {
                    if dir > 0.0 {
                        self.x[q] = self.hi[q];
                        self.state[q] = VarState::Upper;
                    } else {
                        self.x[q] = self.lo[q];
                        self.state[q] = VarState::Lower;
                    }
                }
            }
            self.iterations += 1;
        }
    }

    /// Ratio test for moving the entering variable in direction `dir`.
    /// Returns the step, the leaving basis position, the bound value it
    /// leaves at and its resulting state.
    fn primal_ratio(&self, alpha: &[f64], dir: f64, phase_one: bool, bland: bool) -> Option<(f64, usize, f64, VarState)> {
        // (pos, exact ratio, relaxed ratio, |alpha|, bound, state)
        let mut cands: Vec<(usize, f64, f64, f64, f64, VarState)> = Vec::new();
        for (pos, &var) in self.basis.iter().enumerate() {
            let a = alpha[pos];
            if a.abs() <= PIVOT_TOL {
                continue;
            }
            let rate = -dir * a;
            let (lo, hi, v) = (self.lo[var], self.hi[var], self.x[var]);
            let below = v < lo - FEAS_TOL;
            let above = v > hi + FEAS_TOL;
            let target = if rate < 0.0 {
                if phase_one && below {
                    None
                } else if phase_one && above {
                    Some((hi, VarState::Upper, true))
                } else if lo.is_finite() {
                    Some((lo, VarState::Lower, false))
                } else {
                    None
                }
            } else if phase_one && above {
                None
            } else if phase_one && below {
                Some((lo, VarState::Lower, true))
            } else if hi.is_finite() {
                Some((hi, VarState::Upper, false))
            } else {
                None
            };
            if let Some((bound, st, toward)) = target {
                let dist = (v - bound).abs();
                let exact = if toward { dist } else { (v - bound) * rate.signum() * -1.0 };
                let exact = exact.max(0.0) / rate.abs();
                let relaxed = if toward { exact } else { (exact * rate.abs() + FEAS_TOL) / rate.abs() };
                let st = if lo == hi { VarState::Lower } else { st };
                cands.push((pos, exact, relaxed, a.abs(), bound, st));
            }
        }
        if cands.is_empty() {
            return None;
        }
        if bland {
            let min = cands.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
            let pick = cands
                .iter()
                .filter(|c| c.1 <= min + 1e-12)
                .min_by_key(|c| self.basis[c.0])
                .expect("nonempty");
            return Some((pick.1, pick.0, pick.4, pick.5));
        }
        let limit = cands.iter().map(|c| c.2).fold(f64::INFINITY, f64::min);
        let pick = cands
            .iter()
            .filter(|c| c.1 <= limit)
            .max_by(|a, b| a.3.total_cmp(&b.3).then_with(|| b.0.cmp(&a.0)))
            .expect("nonempty");
        Some((pick.1, pick.0, pick.4, pick.5))
    }

    /// Makes the basis dual feasible by moving boxed nonbasics to the bound
    /// matching their reduced-cost sign. Fails if an unboxed variable has the
    /// wrong sign.
    fn restore_dual_feasibility(&mut self, d: &[f64]) -> bool {
        let mut flips = Vec::new();
        for j in 0..self.nvars() {
            if let Some(dir) = self.entering_direction(j, d[j], DUAL_TOL) {
                let target = if dir > 0.0 { self.hi[j] } else { self.lo[j] };
                if !target.is_finite() || self.state[j] == VarState::Zero {
                    return false;
                }
                flips.push((j, target, if dir > 0.0 { VarState::Upper } else { VarState::Lower }));
            }
        }
        if !flips.is_empty() {
            for (j, target, st) in flips {
                self.x[j] = target;
                self.state[j] = st;
            }
            self.recompute_basics();
        }
        true
    }

    fn dual(&mut self, limits: &RunLimits) -> DualOutcome {
        let mut d = self.fresh_reduced_costs();
        if !self.restore_dual_feasibility(&d) {
            return DualOutcome::NotDualFeasible;
        }
        let mut fresh = true;
        loop {
            if let Some(out) = self.limit_hit(limits) {
                return DualOutcome::Finished(out);
            }
            if self.maybe_refactor() || !fresh && self.factor.num_etas() == 0 {
                d = self.fresh_reduced_costs();
                fresh = true;
            }
            if fresh {
                if (0..self.nvars()).any(|j| self.entering_direction(j, d[j], 1e-7).is_some()) {
                    // Lost dual feasibility numerically; the primal simplex
                    // takes over from here.
                    return DualOutcome::NotDualFeasible;
                }
                fresh = false;
            }

            // Leaving row: largest bound violation.
            let mut leave = None;
            let mut worst = FEAS_TOL;
            for (pos, &var) in self.basis.iter().enumerate() {
                let v = self.x[var];
                let viol_lo = self.lo[var] - v;
                let viol_hi = v - self.hi[var];
                if viol_lo > worst {
                    worst = viol_lo;
                    leave = Some((pos, true));
                } else if viol_hi > worst {
                    worst = viol_hi;
                    leave = Some((pos, false));
                }
            }
            let Some((p, to_lower)) = leave else {
                return DualOutcome::Finished(Outcome::Optimal);
            };

            let mut unit = vec![0.0; self.nrows];
            unit[p] = 1.0;
            let rho = self.factor.btran(&self.cols, &unit);
            let mut row_alpha = vec![0.0; self.nvars()];
            for (r, &rv) in rho.iter().enumerate() {
                if rv == 0.0 {
                    continue;
                }
                for &(j, a) in &self.rows[r] {
                    row_alpha[j] += rv * a;
                }
                row_alpha[self.nstruct + r] = rv;
            }

            // (var, ratio, relaxed ratio, |alpha|)
            let mut cands: Vec<(usize, f64, f64, f64)> = Vec::new();
            for j in 0..self.nvars() {
                if self.is_fixed(j) {
                    continue;
                }
                let a = if to_lower { -row_alpha[j] } else { row_alpha[j] };
                if a.abs() <= PIVOT_TOL {
                    continue;
                }
                let dj = d[j];
                let slack = match self.state[j] {
                    VarState::Basic(_) => continue,
                    VarState::Lower if a > 0.0 => dj.max(0.0),
                    VarState::Upper if a < 0.0 => (-dj).max(0.0),
                    VarState::Zero => 0.0,
                    _ => continue,
                };
                cands.push((j, slack / a.abs(), (slack + DUAL_TOL) / a.abs(), a.abs()));
            }
            if cands.is_empty() {
                if self.factor.num_etas() > 0 {
                    self.refactor();
                    d = self.fresh_reduced_costs();
                    fresh = true;
                    continue;
                }
                return DualOutcome::Finished(Outcome::Infeasible);
            }
            let limit = cands.iter().map(|c| c.2).fold(f64::INFINITY, f64::min);
            let &(q, _, _, _) = cands
                .iter()
                .filter(|c| c.1 <= limit)
                .max_by(|a, b| a.3.total_cmp(&b.3).then_with(|| b.0.cmp(&a.0)))
                .expect("nonempty");

            let alpha = self.factor.ftran(&self.cols, &self.dense_column(q));
            if alpha[p].abs() <= PIVOT_TOL || (alpha[p] - row_alpha[q]).abs() > 1e-6 * (1.0 + alpha[p].abs()) {
                // Row and column views of the pivot disagree: refresh.
                self.refactor();
                d = self.fresh_reduced_costs();
                fresh = true;
                continue;
            }
            let leaving = self.basis[p];
            let (bound, st) = if to_lower {
                (self.lo[leaving], VarState::Lower)
            } else {
                (self.hi[leaving], VarState::Upper)
            };
            let delta = (self.x[leaving] - bound) / alpha[p];
            self.x[q] += delta;
            for (pos, &var) in self.basis.iter().enumerate() {
                let a = alpha[pos];
                if a != 0.0 {
                    self.x[var] -= delta * a;
                }
            }
            let theta = d[q] / row_alpha[q];
            if theta != 0.0 {
                for (dj, &a) in d.iter_mut().zip(&row_alpha) {
                    if a != 0.0 {
                        *dj -= theta * a;
                    }
                }
            }
            d[q] = 0.0;
            let st = if self.lo[leaving] == self.hi[leaving] { VarState::Lower } else { st };
            self.pivot(p, q, &alpha, bound, st);
            self.iterations += 1;
        }
    }

    fn fresh_reduced_costs(&self) -> Vec<f64> {
        let cb = self.basic_costs(false);
        let y = self.factor.btran(&self.cols, &cb);
        self.reduced_costs(&y, false)
    }

    /// Structural values, row duals and structural reduced costs, all in the
    /// internal minimization sense.
    pub fn extract(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let cb = self.basic_costs(false);
        let y = self.factor.btran(&self.cols, &cb);
        let d: Vec<f64> = (0..self.nstruct)
            .map(|j| if matches!(self.state[j], VarState::Basic(_)) { 0.0 } else { self.cost[j] - self.dot_column(&y, j) })
            .collect();
        (self.x[..self.nstruct].to_vec(), y, d)
    }

    pub fn core_dim(&self) -> usize {
        self.factor.core_dim()
    }
}

enum ColumnRef<'a> {
    Structural(&'a [(usize, f64)]),
    Slack(usize),
}
