//! Gap tables: every requested bound on a set of instances, next to a
//! heuristic (or supplied) upper bound.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::Write;

use rayon::prelude::*;

use crate::bound::{compute_bound, BoundConfig, Method};
use crate::cuts::csv_err;
use crate::heuristics::{tabu_search, vns_polish, TabuOptions, VnsOptions};
use crate::instance::Instance;
use crate::Error;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRow {
    pub instance: String,
    pub n: usize,
    /// Edge density in percent of the complete graph, rounded.
    pub density: u32,
    pub method: Method,
    pub upper_bound: f64,
    pub bound: Option<f64>,
    pub time_s: f64,
    pub gap_pct: Option<f64>,
    /// `ok`, `time_limit`, `iteration_limit` or `error: ...`.
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BenchmarkOptions {
    pub methods: Vec<Method>,
    pub config: BoundConfig,
    pub tabu: TabuOptions,
    /// Known upper bounds by instance name; others come from tabu + VNS.
    pub known_upper_bounds: HashMap<String, f64>,
    /// Instances processed at once; 0 uses the rayon default.
    pub workers: usize,
}

/// Gap in percent, `100 (UB − LB) / UB`.
pub fn gap_pct(ub: f64, lb: f64) -> f64 {
    100.0 * (ub - lb) / ub
}

pub fn density_pct(inst: &Instance) -> u32 {
    let n = inst.n() as f64;
    (100.0 * inst.m() as f64 / (n * (n - 1.0) / 2.0)).round() as u32
}

/// Upper bound by tabu search followed by a VNS polish.
pub fn heuristic_upper_bound(inst: &Instance, tabu: &TabuOptions) -> f64 {
    let (tree, _) = tabu_search(inst, tabu);
    vns_polish(inst, &tree, &VnsOptions { seed: tabu.seed, ..VnsOptions::default() }).1
}

fn run_instance(inst: &Instance, opts: &BenchmarkOptions) -> Vec<BenchmarkRow> {
    let ub = opts
        .known_upper_bounds
        .get(inst.name())
        .copied()
        .unwrap_or_else(|| heuristic_upper_bound(inst, &opts.tabu));
    let cfg = BoundConfig { upper_bound: Some(ub), ..opts.config };
    opts.methods
        .iter()
        .map(|&method| {
            let base = BenchmarkRow {
                instance: inst.name().to_string(),
                n: inst.n(),
                density: density_pct(inst),
                method,
                upper_bound: ub,
                bound: None,
                time_s: 0.0,
                gap_pct: None,
                status: String::new(),
            };
            match compute_bound(inst, method, &cfg) {
                Ok(r) => BenchmarkRow {
                    bound: Some(r.value),
                    time_s: r.elapsed.as_secs_f64(),
                    gap_pct: Some(gap_pct(ub, r.value)),
                    status: r.status.to_string(),
                    ..base
                },
                Err(e) => BenchmarkRow { status: format!("error: {e}"), ..base },
            }
        })
        .collect()
}

/// One row per (instance, method), in input order. Failures end up in the
/// status column and do not stop the run.
pub fn run_benchmark(instances: &[Instance], opts: &BenchmarkOptions) -> Result<Vec<BenchmarkRow>, Error> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| Error::InvalidInstance(format!("worker pool: {e}")))?;
    let per_instance: Vec<Vec<BenchmarkRow>> =
        pool.install(|| instances.par_iter().map(|inst| run_instance(inst, opts)).collect());
    Ok(per_instance.into_iter().flatten().collect())
}

fn fmt_opt(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(String::new, |v| format!("{v:.digits$}"))
}

pub fn write_csv(rows: &[BenchmarkRow], out: impl Write) -> Result<(), Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["instance", "n", "density", "method", "bound", "time_s", "gap_pct", "status"]).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.instance.clone(),
            r.n.to_string(),
            r.density.to_string(),
            r.method.to_string(),
            fmt_opt(r.bound, 6),
            format!("{:.3}", r.time_s),
            fmt_opt(r.gap_pct, 2),
            r.status.clone(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Table with one line per instance: UB, the bound of each method, then the
/// gap of each method.
pub fn render_markdown(rows: &[BenchmarkRow]) -> String {
    let mut methods: Vec<Method> = Vec::new();
    let mut order: Vec<&str> = Vec::new();
    for r in rows {
        if !methods.contains(&r.method) {
            methods.push(r.method);
        }
        if !order.contains(&r.instance.as_str()) {
            order.push(&r.instance);
        }
    }
    let mut out = String::from("| instance | n | d | UB |");
    for m in &methods {
        let _ = write!(out, " {m} |");
    }
    for m in &methods {
        let _ = write!(out, " gap {m} |");
    }
    out.push_str("\n|---|---:|---:|---:|");
    out.push_str(&"---:|".repeat(2 * methods.len()));
    out.push('\n');
    for name in order {
        let inst_rows: Vec<&BenchmarkRow> = rows.iter().filter(|r| r.instance == name).collect();
        let first = inst_rows[0];
        let _ = write!(out, "| {} | {} | {} | {} |", name, first.n, first.density, first.upper_bound);
        let cell = |m: &Method, gap: bool| {
            inst_rows.iter().find(|r| r.method == *m).map_or_else(String::new, |r| {
                let v = if gap { r.gap_pct } else { r.bound };
                let mark = if r.status == "time_limit" { "*" } else { "" };
                match v {
                    Some(v) => format!("{}{mark}", fmt_opt(Some(v), 1)),
                    None => "err".into(),
                }
            })
        };
        for m in &methods {
            let _ = write!(out, " {} |", cell(m, false));
        }
        for m in &methods {
            let _ = write!(out, " {} |", cell(m, true));
        }
        out.push('\n');
    }
    out
}
