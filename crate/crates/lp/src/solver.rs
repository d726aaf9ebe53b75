use std::time::{Duration, Instant};

use crate::audit;
use crate::model::{normalize_row, LinearProgram, ObjectiveSense, RowId, Sense, VarId};
use crate::simplex::{Engine, Outcome, RunLimits};
use crate::solution::{LpSolution, Status};
use crate::LpError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Limits {
    pub max_iterations: usize,
    pub time_limit: Option<Duration>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_iterations: 10_000_000, time_limit: None }
    }
}

/// Solves `lp` from scratch.
pub fn solve(lp: &LinearProgram, limits: &Limits) -> Result<LpSolution, LpError> {
    let mut s = Solver::new(lp.clone())?;
    s.limits = *limits;
    Ok(s.solve())
}

/// A model together with its simplex state. Rows added after a solve are
/// handled by warm-starting from the previous basis.
pub struct Solver {
    lp: LinearProgram,
    engine: Engine,
    pub limits: Limits,
}

impl Solver {
    pub fn new(lp: LinearProgram) -> Result<Self, LpError> {
        lp.validate()?;
        let engine = Engine::new(&lp);
        Ok(Solver { lp, engine, limits: Limits::default() })
    }

    pub fn lp(&self) -> &LinearProgram {
        &self.lp
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        coeffs: impl IntoIterator<Item = (VarId, f64)>,
        sense: Sense,
        rhs: f64,
    ) -> Result<RowId, LpError> {
        let name = name.into();
        let row = normalize_row(coeffs);
        if !rhs.is_finite() {
            return Err(LpError::NotFinite(format!("rhs of row {name}")));
        }
        for &(v, a) in &row {
            if v.0 >= self.lp.num_vars() {
                return Err(LpError::DimensionMismatch(format!(
                    "row {name} references variable {} but the model has {}",
                    v.0,
                    self.lp.num_vars()
                )));
            }
            if !a.is_finite() {
                return Err(LpError::NotFinite(format!("coefficient of var {} in row {name}", v.0)));
            }
        }
        self.engine.push_row(row.iter().map(|&(v, a)| (v.0, a)).collect(), sense, rhs);
        Ok(self.lp.add_constraint(name, row, sense, rhs))
    }

    /// Runs the simplex from the current basis. Iteration counts in the
    /// returned solution are per call.
    pub fn solve(&mut self) -> LpSolution {
        let start = self.engine.iterations;
        let run = RunLimits {
            max_iterations: start.saturating_add(self.limits.max_iterations),
            deadline: self.limits.time_limit.map(|t| Instant::now() + t),
        };
        let status = match self.engine.solve(&run) {
            Outcome::Optimal => Status::Optimal,
            Outcome::Infeasible => Status::Infeasible,
            Outcome::Unbounded => Status::Unbounded,
            Outcome::IterationLimit => Status::IterationLimit,
            Outcome::TimeLimit => Status::TimeLimit,
        };
        let (primal, y, d) = self.engine.extract();
        let sign = match self.lp.sense {
            ObjectiveSense::Minimize => 1.0,
            ObjectiveSense::Maximize => -1.0,
        };
        let sol = LpSolution {
            status,
            objective: self.lp.objective_value(&primal),
            primal,
            dual: y.into_iter().map(|v| sign * v).collect(),
            reduced_costs: d.into_iter().map(|v| sign * v).collect(),
            iterations: self.engine.iterations - start,
        };
        if status == Status::Optimal && audit::is_enabled() {
            audit::record(&sol.certificate(&self.lp));
        }
        sol
    }

    /// Size of the dense block in the current basis factorization.
    pub fn basis_core_dim(&self) -> usize {
        self.engine.core_dim()
    }
}
