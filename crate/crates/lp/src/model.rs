use std::fmt;

use crate::LpError;

/// Index of a variable inside a [`LinearProgram`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub usize);

/// Index of a constraint row inside a [`LinearProgram`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RowId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveSense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    /// Sparse row; indices are unique after [`LinearProgram::add_constraint`].
    pub coeffs: Vec<(VarId, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Constraint {
    /// Row activity `a·x` at the given point.
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(v, a)| a * x[v.0]).sum()
    }

    /// Amount by which `x` violates this row (0 when satisfied).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let act = self.activity(x);
        match self.sense {
            Sense::Le => (act - self.rhs).max(0.0),
            Sense::Ge => (self.rhs - act).max(0.0),
            Sense::Eq => (act - self.rhs).abs(),
        }
    }
}

/// A linear program `min/max c·x` subject to sparse rows and variable bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub name: String,
    pub sense: ObjectiveSense,
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new(sense: ObjectiveSense) -> Self {
        LinearProgram { name: String::from("lp"), sense, variables: Vec::new(), constraints: Vec::new() }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn add_var(&mut self, name: impl Into<String>, lower: f64, upper: f64, objective: f64) -> VarId {
        let id = VarId(self.variables.len());
        self.variables.push(Variable { name: name.into(), lower, upper, objective });
        id
    }

    /// Appends a row. Duplicate variable indices are merged and zero
    /// coefficients dropped.
    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        coeffs: impl IntoIterator<Item = (VarId, f64)>,
        sense: Sense,
        rhs: f64,
    ) -> RowId {
        let id = RowId(self.constraints.len());
        self.constraints.push(Constraint { name: name.into(), coeffs: normalize_row(coeffs), sense, rhs });
        id
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.variables.iter().zip(x).map(|(v, &xi)| v.objective * xi).sum()
    }

    /// Largest bound or row violation of `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let bounds = self
            .variables
            .iter()
            .zip(x)
            .map(|(v, &xi)| (v.lower - xi).max(xi - v.upper).max(0.0))
            .fold(0.0, f64::max);
        self.constraints.iter().map(|c| c.violation(x)).fold(bounds, f64::max)
    }

    /// Checks bounds, indices and finiteness of every coefficient.
    pub fn validate(&self) -> Result<(), LpError> {
        for (j, v) in self.variables.iter().enumerate() {
            if v.lower.is_nan() || v.upper.is_nan() || !v.objective.is_finite() {
                return Err(LpError::NotFinite(format!("variable {j} ({})", v.name)));
            }
            if v.lower > v.upper || v.lower == f64::INFINITY || v.upper == f64::NEG_INFINITY {
                return Err(LpError::InvalidBounds { var: j, lower: v.lower, upper: v.upper });
            }
        }
        let n = self.variables.len();
        for (i, c) in self.constraints.iter().enumerate() {
            if !c.rhs.is_finite() {
                return Err(LpError::NotFinite(format!("rhs of row {i} ({})", c.name)));
            }
            for &(v, a) in &c.coeffs {
                if v.0 >= n {
                    return Err(LpError::DimensionMismatch(format!(
                        "row {i} references variable {} but the model has {n}",
                        v.0
                    )));
                }
                if !a.is_finite() {
                    return Err(LpError::NotFinite(format!("coefficient of var {} in row {i}", v.0)));
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn normalize_row(coeffs: impl IntoIterator<Item = (VarId, f64)>) -> Vec<(VarId, f64)> {
    let mut row: Vec<(VarId, f64)> = coeffs.into_iter().collect();
    row.sort_by_key(|&(v, _)| v);
    let mut out: Vec<(VarId, f64)> = Vec::with_capacity(row.len());
    for (v, a) in row {
        match out.last_mut() {
            Some(last) if last.0 == v => last.1 += a,
            _ => out.push((v, a)),
        }
    }
    out.retain(|&(_, a)| a != 0.0);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_are_merged_and_sorted() {
        let mut lp = LinearProgram::new(ObjectiveSense::Minimize);
        let x = lp.add_var("x", 0.0, 1.0, 1.0);
        let y = lp.add_var("y", 0.0, 1.0, 1.0);
        lp.add_constraint("c", [(y, 1.0), (x, 2.0), (y, -1.0), (x, 1.0)], Sense::Le, 3.0);
        assert_eq!(lp.constraints[0].coeffs, vec![(x, 3.0)]);
    }

    #[test]
    fn validation_catches_bad_models() {
        let mut lp = LinearProgram::new(ObjectiveSense::Minimize);
        lp.add_var("x", 2.0, 1.0, 0.0);
        assert!(matches!(lp.validate(), Err(LpError::InvalidBounds { .. })));

        let mut lp = LinearProgram::new(ObjectiveSense::Minimize);
        lp.add_var("x", 0.0, 1.0, f64::NAN);
        assert!(matches!(lp.validate(), Err(LpError::NotFinite(_))));

        let mut lp = LinearProgram::new(ObjectiveSense::Minimize);
        lp.add_var("x", 0.0, 1.0, 0.0);
        lp.constraints.push(Constraint { name: "bad".into(), coeffs: vec![(VarId(4), 1.0)], sense: Sense::Le, rhs: 0.0 });
        assert!(matches!(lp.validate(), Err(LpError::DimensionMismatch(_))));
    }
}
