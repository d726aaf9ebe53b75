//! Common result type for every bounding method.

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Gl,
    Ax,
    Op,
    Lbb,
    Vs0,
    Vs1,
    Vs2,
    Rlt1,
    Exact,
}

impl Method {
    pub const LOWER_BOUNDS: [Method; 8] =
        [Method::Gl, Method::Ax, Method::Op, Method::Lbb, Method::Vs0, Method::Vs1, Method::Vs2, Method::Rlt1];
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Gl => "gl",
            Method::Ax => "ax",
            Method::Op => "op",
            Method::Lbb => "lbb",
            Method::Vs0 => "vs0",
            Method::Vs1 => "vs1",
            Method::Vs2 => "vs2",
            Method::Rlt1 => "rlt1",
            Method::Exact => "exact",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Method::LOWER_BOUNDS
            .into_iter()
            .chain([Method::Exact])
            .find(|m| m.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Unsupported(format!("unknown method '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundStatus {
    /// The method ran to its own stopping rule.
    Converged,
    IterationLimit,
    /// Stopped by the wall-clock limit; the value is still a valid bound.
    TimeLimit,
}

impl fmt::Display for BoundStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundStatus::Converged => "ok",
            BoundStatus::IterationLimit => "iteration_limit",
            BoundStatus::TimeLimit => "time_limit",
        })
    }
}

/// Data that lets a caller re-check a bound.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Certificate {
    #[default]
    None,
    /// Leveling parameters γ of the Assad-Xu procedure.
    Gamma(Vec<f64>),
    /// Lagrange multipliers λ, indexed `i * m + f`.
    Lambda(Vec<f64>),
    /// Row duals of the final LP.
    LpDuals(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundResult {
    pub method: Method,
    pub value: f64,
    pub status: BoundStatus,
    pub iterations: usize,
    pub elapsed: Duration,
    /// Bound after each iteration (methods without iterations log one entry).
    pub trace: Vec<f64>,
    pub certificate: Certificate,
}

/// Settings shared by every method in [`compute_bound`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundConfig {
    /// Wall-clock limit for the LP-based methods.
    pub time_limit: Option<Duration>,
    pub seed: u64,
    /// Upper bound for the subgradient step of `op`; computed by tabu search
    /// when absent.
    pub upper_bound: Option<f64>,
    /// Largest n accepted by `exact`.
    pub exact_limit_n: usize,
}

impl Default for BoundConfig {
    fn default() -> Self {
        BoundConfig {
            time_limit: Some(Duration::from_secs(7200)),
            seed: 0,
            upper_bound: None,
            exact_limit_n: crate::oracle::DEFAULT_LIMIT_N,
        }
    }
}

/// Runs one method with default parameters.
pub fn compute_bound(inst: &crate::Instance, method: Method, cfg: &BoundConfig) -> Result<BoundResult, Error> {
    use crate::{cuts, extbounds, glbounds, oracle};
    Ok(match method {
        Method::Gl => glbounds::gl_bound(inst),
        Method::Ax => glbounds::assad_xu(inst, &glbounds::LevelingOptions::default()).0,
        Method::Op => {
            let opts = glbounds::SubgradientOptions { upper_bound: cfg.upper_bound, seed: cfg.seed, ..Default::default() };
            glbounds::oncan_punnen(inst, &opts).0
        }
        Method::Lbb => extbounds::lbb_bound(inst)?.0,
        Method::Vs0 => extbounds::vs0_bound(inst)?.0,
        Method::Vs1 | Method::Vs2 => {
            let level = if method == Method::Vs1 { cuts::Level::Vs1 } else { cuts::Level::Vs2 };
            let opts = cuts::CutOptions { time_limit: cfg.time_limit, ..Default::default() };
            cuts::vs_bound(inst, level, &opts)?.0
        }
        Method::Rlt1 => extbounds::rlt1_incomplete_bound(inst, cfg.time_limit)?,
        Method::Exact => {
            let start = std::time::Instant::now();
            let report = oracle::exact_qmstp(inst, cfg.exact_limit_n)?;
            BoundResult {
                method,
                value: report.optimal_cost,
                status: BoundStatus::Converged,
                iterations: report.tree_count as usize,
                elapsed: start.elapsed(),
                trace: vec![report.optimal_cost],
                certificate: Certificate::None,
            }
        }
    })
}
