//! Cross-module consistency checks on a single instance.

use std::fmt;
use std::time::Duration;

use qmstp_lp::{Status, Tolerances};

use crate::bound::BoundResult;
use crate::cuts::{vs_bound, CutOptions, Level};
use crate::extbounds::{lbb_bound, lbb_lp, rlt1_incomplete_bound, vs0_bound, PairLayout, QuadraticModel};
use crate::glbounds::{assad_xu, gl_bound, oncan_punnen, LevelingOptions, SubgradientOptions};
use crate::heuristics::{tabu_search, TabuOptions};
use crate::instance::Instance;
use crate::mst::mst;
use crate::oracle::{exact_qmstp, linearization_vector, weak_sum_decompose};
use crate::Error;

/// Absolute slack (scaled by `1 + |value|`) used when comparing bounds.
pub const BOUND_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerifyReport {
    pub instance: String,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.to_string(), passed, detail: detail.into() });
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "instance {}", self.instance)?;
        for c in &self.checks {
            writeln!(f, "  {:<4} {:<24} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    /// Oracle-backed checks run only up to this many vertices.
    pub oracle_limit_n: usize,
    pub time_limit: Option<Duration>,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { oracle_limit_n: 8, time_limit: Some(Duration::from_secs(600)), seed: 0 }
    }
}

fn le(a: f64, b: f64) -> bool {
    a <= b + BOUND_TOL * (1.0 + b.abs())
}

fn describe(c: &qmstp_lp::Certificate) -> String {
    format!("primal residual {:.1e}, dual residual {:.1e}, gap {:.1e}", c.primal_residual, c.dual_residual, c.gap())
}

fn monotone(trace: &[f64]) -> bool {
    trace.windows(2).all(|w| w[1] >= w[0] - 1e-9)
}

/// Runs every applicable check. Errors from the methods themselves are
/// reported as failed checks, not returned.
pub fn verify_instance(inst: &Instance, opts: &VerifyOptions) -> VerifyReport {
    let mut report = VerifyReport { instance: inst.name().to_string(), ..Default::default() };
    if let Err(e) = run_checks(inst, opts, &mut report) {
        report.push("method error", false, e.to_string());
    }
    report
}

fn run_checks(inst: &Instance, opts: &VerifyOptions, report: &mut VerifyReport) -> Result<(), Error> {
    let (tree, ub) = tabu_search(inst, &TabuOptions { seed: opts.seed, ..TabuOptions::default() });
    let gl = gl_bound(inst);
    let (ax, ax_state) = assad_xu(inst, &LevelingOptions::default());
    let op = oncan_punnen(inst, &SubgradientOptions { upper_bound: Some(ub), seed: opts.seed, ..Default::default() }).0;
    let vs0 = vs0_bound(inst)?.0;
    let cut_opts = CutOptions { time_limit: opts.time_limit, ..CutOptions::default() };
    let (vs1, run1) = vs_bound(inst, Level::Vs1, &cut_opts)?;
    let (vs2, run2) = vs_bound(inst, Level::Vs2, &cut_opts)?;
    let rlt1 = rlt1_incomplete_bound(inst, opts.time_limit)?;

    report.push(
        "ax starts at gl",
        ax.trace[0] == gl.value,
        format!("first leveling bound {} vs gl {}; {} decrease(s) logged", ax.trace[0], gl.value, ax_state.decreases.len()),
    );
    report.push("op at least gl", le(gl.value, op.value), format!("gl {} op {}", gl.value, op.value));
    report.push("gl below rlt1", le(gl.value, rlt1.value), format!("gl {} rlt1 {}", gl.value, rlt1.value));
    report.push(
        "vs ladder",
        le(vs0.value, vs1.value) && le(vs1.value, vs2.value),
        format!("vs0 {} vs1 {} vs2 {}", vs0.value, vs1.value, vs2.value),
    );
    report.push(
        "cut traces",
        monotone(&vs1.trace) && monotone(&vs2.trace) && run1.pool.duplicate_attempts == 0 && run2.pool.duplicate_attempts == 0,
        format!("{} + {} cuts, {} duplicate attempts", run1.pool.len(), run2.pool.len(), run1.pool.duplicate_attempts + run2.pool.duplicate_attempts),
    );

    let bounds: Vec<&BoundResult> = vec![&gl, &ax, &op, &vs0, &vs1, &vs2, &rlt1];
    let best = bounds.iter().map(|b| b.value).fold(f64::NEG_INFINITY, f64::max);
    report.push("bounds below heuristic", le(best, ub), format!("best bound {best} tabu {ub}"));

    if inst.is_complete() {
        let (lbb, cert) = lbb_bound(inst)?;
        let rel = (lbb.value - vs0.value).abs() / (1.0 + vs0.value.abs());
        report.push("lbb equals vs0", rel <= BOUND_TOL, format!("lbb {} vs0 {}", lbb.value, vs0.value));
        // LBB is the MST value under the linearized costs p of its weak-sum
        // under-estimator, which in turn is below every tree cost.
        let lin = mst(inst, &cert.p)?.linear_cost(&cert.p);
        let rel = (lbb.value - lin).abs() / (1.0 + lin.abs());
        report.push("lbb certificate", rel <= BOUND_TOL && le(lin, ub), format!("mst under p {lin}"));
        let (lp, _) = lbb_lp(inst)?;
        let sol = qmstp_lp::solve(&lp, &qmstp_lp::Limits::default())?;
        let tol = Tolerances::from_env();
        let ok = sol.status == Status::Optimal && sol.certificate(&lp).holds(&tol);
        report.push("lbb duality", ok, describe(&sol.certificate(&lp)));
    }

    // The heuristic tree with y = x xᵀ is a feasible point of the VS0 model
    // and its objective is the tree cost.
    let model = QuadraticModel::new(inst, PairLayout::Symmetric, 1.0)?;
    let point = model.tree_point(inst, &tree);
    let viol = model.lp().max_violation(&point);
    let obj = model.lp().objective_value(&point);
    report.push(
        "tree point feasible",
        viol <= 1e-9 && (obj - ub).abs() <= 1e-9 * (1.0 + ub.abs()),
        format!("violation {viol:e}, objective {obj} vs tree cost {ub}"),
    );
    let mut model = QuadraticModel::new(inst, PairLayout::Symmetric, f64::INFINITY)?;
    let sol = model.solve();
    let tol = Tolerances::from_env();
    report.push(
        "vs0 duality",
        sol.status == Status::Optimal && sol.certificate(model.lp()).holds(&tol),
        describe(&sol.certificate(model.lp())),
    );

    if inst.n() <= opts.oracle_limit_n {
        let exact = exact_qmstp(inst, opts.oracle_limit_n)?;
        let opt = exact.optimal_cost;
        let worst = bounds.iter().max_by(|a, b| a.value.total_cmp(&b.value)).expect("nonempty");
        report.push(
            "bounds below optimum",
            bounds.iter().all(|b| le(b.value, opt)) && ax.trace.iter().all(|&v| le(v, opt)),
            format!("optimum {opt}, largest bound {} ({})", worst.value, worst.method),
        );
        report.push("heuristic above optimum", ub >= opt - 1e-9, format!("tabu {ub} optimum {opt}"));
        if inst.is_complete() {
            if let Some(a) = weak_sum_decompose(inst) {
                let p = linearization_vector(inst, &a);
                let lin = mst(inst, &p)?.linear_cost(&p);
                let lbb = lbb_bound(inst)?.0.value;
                report.push(
                    "lbb tight",
                    (lbb - opt).abs() <= BOUND_TOL * (1.0 + opt.abs()) && (lin - opt).abs() <= 1e-9 * (1.0 + opt.abs()),
                    format!("lbb {lbb} mst under p {lin} optimum {opt}"),
                );
            }
        }
    }
    Ok(())
}
