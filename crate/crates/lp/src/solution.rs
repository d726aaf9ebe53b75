use std::fmt;
use std::str::FromStr;

use crate::model::{LinearProgram, ObjectiveSense, Sense};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
    TimeLimit,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Optimal => "Optimal",
            Status::Infeasible => "Infeasible",
            Status::Unbounded => "Unbounded",
            Status::IterationLimit => "IterationLimit",
            Status::TimeLimit => "TimeLimit",
        })
    }
}

impl FromStr for Status {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "optimal" => Ok(Status::Optimal),
            "infeasible" => Ok(Status::Infeasible),
            "unbounded" => Ok(Status::Unbounded),
            "iterationlimit" => Ok(Status::IterationLimit),
            "timelimit" => Ok(Status::TimeLimit),
            other => Err(format!("unknown status '{other}'")),
        }
    }
}

/// Tolerances used when checking optimality certificates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Bound on primal residuals and complementarity.
    pub feasibility: f64,
    /// Relative bound on the primal-dual objective gap.
    pub optimality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { feasibility: 1e-7, optimality: 1e-6 }
    }
}

impl Tolerances {
    /// Defaults, overridden by `QMSTP_FEAS_TOL` / `QMSTP_OPT_TOL` when set.
    pub fn from_env() -> Self {
        let mut t = Tolerances::default();
        let read = |key: &str| std::env::var(key).ok().and_then(|v| v.parse::<f64>().ok()).filter(|v| *v > 0.0);
        if let Some(v) = read("QMSTP_FEAS_TOL") {
            t.feasibility = v;
        }
        if let Some(v) = read("QMSTP_OPT_TOL") {
            t.optimality = v;
        }
        t
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: Status,
    /// Objective in the model's own sense.
    pub objective: f64,
    pub primal: Vec<f64>,
    /// Row duals: sensitivity of the objective to each right-hand side.
    /// Empty when the solution was read from a file.
    pub dual: Vec<f64>,
    pub reduced_costs: Vec<f64>,
    pub iterations: usize,
}

/// Residuals of an (x, y) pair against the LP optimality conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub complementarity: f64,
    pub primal_objective: f64,
    pub dual_objective: f64,
}

impl Certificate {
    pub fn gap(&self) -> f64 {
        (self.primal_objective - self.dual_objective).abs()
    }

    pub fn holds(&self, tol: &Tolerances) -> bool {
        self.primal_residual <= tol.feasibility
            && self.dual_residual <= tol.optimality
            && self.complementarity <= tol.feasibility
            && self.gap() <= tol.optimality * (1.0 + self.primal_objective.abs())
    }
}

impl LpSolution {
    /// Recomputes every residual from the model data; nothing computed by the
    /// simplex besides `primal` and `dual` is trusted.
    pub fn certificate(&self, lp: &LinearProgram) -> Certificate {
        let sign = match lp.sense {
            ObjectiveSense::Minimize => 1.0,
            ObjectiveSense::Maximize => -1.0,
        };
        let x = &self.primal;
        let primal_residual = lp.max_violation(x);
        let primal_objective = lp.objective_value(x);
        if self.dual.len() != lp.num_constraints() {
            return Certificate {
                primal_residual,
                dual_residual: f64::INFINITY,
                complementarity: f64::INFINITY,
                primal_objective,
                dual_objective: f64::NAN,
            };
        }

        // Work in the minimization form: c' = sign*c, y' = sign*y.
        let y: Vec<f64> = self.dual.iter().map(|v| sign * v).collect();
        let mut d: Vec<f64> = lp.variables.iter().map(|v| sign * v.objective).collect();
        let mut dual_obj = 0.0;
        let mut dual_residual: f64 = 0.0;
        let mut complementarity: f64 = 0.0;
        for (c, &yi) in lp.constraints.iter().zip(&y) {
            for &(v, a) in &c.coeffs {
                d[v.0] -= a * yi;
            }
            dual_obj += c.rhs * yi;
            let wrong = match c.sense {
                Sense::Le => yi.max(0.0),
                Sense::Ge => (-yi).max(0.0),
                Sense::Eq => 0.0,
            };
            dual_residual = dual_residual.max(wrong);
            if c.sense != Sense::Eq {
                let slack = (c.rhs - c.activity(x)).abs();
                complementarity = complementarity.max(yi.abs() * slack / (1.0 + yi.abs()));
            }
        }
        for ((v, &dj), &xj) in lp.variables.iter().zip(&d).zip(x) {
            let bound = if dj > 0.0 { v.lower } else { v.upper };
            if bound.is_finite() {
                dual_obj += bound * dj;
                let dist = (xj - bound).abs();
                complementarity = complementarity.max(dj.abs() * dist / (1.0 + dj.abs()));
            } else {
                dual_residual = dual_residual.max(dj.abs());
                dual_obj += xj * dj;
            }
        }
        Certificate {
            primal_residual,
            dual_residual,
            complementarity,
            primal_objective,
            dual_objective: sign * dual_obj,
        }
    }
}
