//! Process-wide record of optimality certificates, off by default.
//!
//! When enabled, every solve that ends `Optimal` recomputes its certificate
//! from the model data and folds it into a global summary. Meant for test
//! suites that want to vouch for solves happening deep inside other code.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Mutex;

use crate::solution::{Certificate, Tolerances};

static ENABLED: AtomicBool = AtomicBool::new(false);
static SUMMARY: Mutex<AuditSummary> = Mutex::new(AuditSummary::new());

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditSummary {
    pub optimal_solves: usize,
    /// Solves whose primal residual or relative gap exceeded the tolerances.
    pub failures: usize,
    pub worst_primal_residual: f64,
    /// Largest `|primal − dual| / (1 + |primal|)`.
    pub worst_relative_gap: f64,
    pub tolerances: Tolerances,
}

impl AuditSummary {
    const fn new() -> Self {
        AuditSummary {
            optimal_solves: 0,
            failures: 0,
            worst_primal_residual: 0.0,
            worst_relative_gap: 0.0,
            tolerances: Tolerances { feasibility: 1e-7, optimality: 1e-6 },
        }
    }
}

impl Default for AuditSummary {
    fn default() -> Self {
        AuditSummary::new()
    }
}

/// Starts recording with the given tolerances and clears earlier records.
pub fn enable(tolerances: Tolerances) {
    *SUMMARY.lock().expect("audit lock") = AuditSummary { tolerances, ..AuditSummary::new() };
    ENABLED.store(true, Ordering::SeqCst);
}

pub fn disable() {
    ENABLED.store(false, Ordering::SeqCst);
}

pub fn is_enabled() -> bool {
    ENABLED.load(Ordering::Relaxed)
}

pub fn summary() -> AuditSummary {
    *SUMMARY.lock().expect("audit lock")
}

pub(crate) fn record(cert: &Certificate) {
    let mut s = SUMMARY.lock().expect("audit lock");
    let rel_gap = cert.gap() / (1.0 + cert.primal_objective.abs());
    s.optimal_solves += 1;
    if !(cert.primal_residual <= s.tolerances.feasibility && rel_gap <= s.tolerances.optimality) {
        s.failures += 1;
    }
    s.worst_primal_residual = s.worst_primal_residual.max(cert.primal_residual);
    s.worst_relative_gap = s.worst_relative_gap.max(rel_gap);
}
