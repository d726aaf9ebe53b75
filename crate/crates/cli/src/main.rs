use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use qmstp::bench::{render_markdown, run_benchmark, write_csv, BenchmarkOptions};
use qmstp::bound::{compute_bound, BoundConfig, Method};
use qmstp::cuts::{vs_bound, write_trace_csv, CutOptions, Level};
use qmstp::heuristics::{tabu_search, vns_polish, TabuOptions, VnsOptions};
use qmstp::instance::instance_to_string;
use qmstp::oracle::exact_qmstp;
use qmstp::verify::{verify_instance, VerifyOptions};
use qmstp::{generate, read_instance, Error, Family, GeneratorSpec, Instance};

/// Bounds for the quadratic minimum spanning tree problem.
///
/// LP tolerances can be overridden with QMSTP_FEAS_TOL and QMSTP_OPT_TOL.
#[derive(Parser)]
#[command(name = "qmstp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance from one of the benchmark families.
    Generate {
        /// CP1..CP4, OPsym, OPvsym, OPesym or VS.
        #[arg(long)]
        family: Family,
        #[arg(long)]
        n: usize,
        /// Edge density in percent.
        #[arg(long, default_value_t = 100)]
        density: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100.0)]
        vs_max_diag: f64,
        #[arg(long, default_value_t = 100.0)]
        vs_max_offdiag: f64,
        /// Output file; stdout when absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compute one lower bound.
    Bound {
        instance: PathBuf,
        #[arg(long)]
        method: Method,
        /// Seconds; applies to the LP-based methods.
        #[arg(long, default_value_t = 7200.0)]
        time_limit: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the cutting-plane trace (vs1, vs2) as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Upper bound by tabu search, optionally polished by VNS.
    Heuristic {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = HeuristicKind::Tabu)]
        method: HeuristicKind,
        #[arg(long, default_value_t = 5000)]
        iters: usize,
        #[arg(long, default_value_t = 5)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Exact optimum by enumerating all spanning trees (small n only).
    Exact {
        instance: PathBuf,
        #[arg(long, default_value_t = qmstp::oracle::DEFAULT_LIMIT_N)]
        limit_n: usize,
    },
    /// Cross-check all methods on the given instances.
    Verify {
        #[arg(required = true)]
        instances: Vec<PathBuf>,
        #[arg(long, default_value_t = 8)]
        oracle_limit_n: usize,
        #[arg(long, default_value_t = 600.0)]
        time_limit: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Gap table for several methods over several instances.
    Benchmark {
        /// Instance files.
        instances: Vec<PathBuf>,
        /// Directory whose files are all read as instances.
        #[arg(long)]
        dir: Option<PathBuf>,
        /// Generated instance as FAMILY:N:DENSITY:SEED; repeatable.
        #[arg(long = "generate", value_name = "SPEC")]
        generated: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "gl,ax,op,vs0,vs1,vs2,rlt1")]
        methods: Vec<Method>,
        /// Known upper bound as NAME=VALUE; repeatable.
        #[arg(long = "ub", value_name = "NAME=VALUE")]
        upper_bounds: Vec<String>,
        #[arg(long, default_value_t = 7200.0)]
        time_limit: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Instances processed at once (0 = one per core).
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Print a markdown table instead of CSV.
        #[arg(long)]
        markdown: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum HeuristicKind {
    Tabu,
    /// Tabu search followed by the VNS polish.
    Vns,
}

enum Failure {
    /// Verification found a violated check (exit 1).
    Check,
    Error(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Error(Error::Io(e))
    }
}

fn seconds(s: f64) -> Result<Duration, Failure> {
    Duration::try_from_secs_f64(s).map_err(|_| Failure::Error(Error::Unsupported(format!("invalid time limit {s}"))))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn parse_spec(spec: &str) -> Result<GeneratorSpec, Error> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Error::Unsupported(format!("expected FAMILY:N:DENSITY:SEED, got '{spec}'"));
    let [family, n, density, seed] = parts[..] else { return Err(bad()) };
    Ok(GeneratorSpec::new(
        family.parse()?,
        n.parse().map_err(|_| bad())?,
        density.parse().map_err(|_| bad())?,
        seed.parse().map_err(|_| bad())?,
    ))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Generate { family, n, density, seed, vs_max_diag, vs_max_offdiag, output: out } => {
            let spec = GeneratorSpec { vs_max_diag, vs_max_offdiag, ..GeneratorSpec::new(family, n, density, seed) };
            let inst = generate(&spec)?;
            output(out.as_deref())?.write_all(instance_to_string(&inst).as_bytes())?;
        }
        Command::Bound { instance, method, time_limit, seed, trace } => {
            let inst = read_instance(&instance)?;
            let time_limit = Some(seconds(time_limit)?);
            let result = match (method, trace) {
                (Method::Vs1 | Method::Vs2, Some(path)) => {
                    let level = if method == Method::Vs1 { Level::Vs1 } else { Level::Vs2 };
                    let (result, run) = vs_bound(&inst, level, &CutOptions { time_limit, ..CutOptions::default() })?;
                    write_trace_csv(&run.trace, File::create(path)?)?;
                    result
                }
                (_, Some(_)) => {
                    return Err(Error::Unsupported("--trace is only available for vs1 and vs2".into()).into());
                }
                (_, None) => compute_bound(&inst, method, &BoundConfig { time_limit, seed, ..BoundConfig::default() })?,
            };
            println!(
                "{} {} {} status={} time_s={:.3} iterations={}",
                inst.name(),
                result.method,
                result.value,
                result.status,
                result.elapsed.as_secs_f64(),
                result.iterations
            );
        }
        Command::Heuristic { instance, method, iters, restarts, seed } => {
            let inst = read_instance(&instance)?;
            let (mut tree, mut cost) = tabu_search(&inst, &TabuOptions { iters, restarts, seed, tenure: None });
            if let HeuristicKind::Vns = method {
                (tree, cost) = vns_polish(&inst, &tree, &VnsOptions { seed, ..VnsOptions::default() });
            }
            println!("{} cost {}", inst.name(), cost);
            print_tree(&inst, tree.edges());
        }
        Command::Exact { instance, limit_n } => {
            let inst = read_instance(&instance)?;
            let report = exact_qmstp(&inst, limit_n)?;
            println!("{} optimum {} over {} trees", inst.name(), report.optimal_cost, report.tree_count);
            print_tree(&inst, report.optimal_tree.edges());
        }
        Command::Verify { instances, oracle_limit_n, time_limit, seed } => {
            let opts = VerifyOptions { oracle_limit_n, time_limit: Some(seconds(time_limit)?), seed };
            let mut all_passed = true;
            for path in instances {
                let report = verify_instance(&read_instance(&path)?, &opts);
                print!("{report}");
                all_passed &= report.passed();
            }
            if !all_passed {
                return Err(Failure::Check);
            }
        }
        Command::Benchmark {
            instances,
            dir,
            generated,
            methods,
            upper_bounds,
            time_limit,
            seed,
            workers,
            markdown,
            output: out,
        } => {
            let mut paths = instances;
            if let Some(dir) = dir {
                let mut found: Vec<PathBuf> = std::fs::read_dir(dir)?
                    .map(|e| e.map(|e| e.path()))
                    .collect::<Result<_, _>>()?;
                found.retain(|p| p.is_file());
                found.sort();
                paths.extend(found);
            }
            let mut insts: Vec<Instance> = paths.iter().map(read_instance).collect::<Result<_, _>>()?;
            for spec in &generated {
                insts.push(generate(&parse_spec(spec)?)?);
            }
            if insts.is_empty() {
                return Err(Error::Unsupported("no instances given".into()).into());
            }
            let mut known = HashMap::new();
            for ub in &upper_bounds {
                let (name, value) = ub
                    .split_once('=')
                    .and_then(|(k, v)| Some((k.to_string(), v.parse::<f64>().ok()?)))
                    .ok_or_else(|| Error::Unsupported(format!("expected NAME=VALUE, got '{ub}'")))?;
                known.insert(name, value);
            }
            let opts = BenchmarkOptions {
                methods,
                config: BoundConfig { time_limit: Some(seconds(time_limit)?), seed, ..BoundConfig::default() },
                tabu: TabuOptions { seed, ..TabuOptions::default() },
                known_upper_bounds: known,
                workers,
            };
            let rows = run_benchmark(&insts, &opts)?;
            let mut out = output(out.as_deref())?;
            if markdown {
                out.write_all(render_markdown(&rows).as_bytes())?;
            } else {
                write_csv(&rows, &mut out)?;
            }
            out.flush()?;
        }
    }
    Ok(())
}

fn print_tree(inst: &Instance, edges: &[usize]) {
    let list: Vec<String> = edges.iter().map(|&e| format!("{}-{}", inst.edge(e).0, inst.edge(e).1)).collect();
    println!("tree {}", list.join(" "));
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            match e {
                Error::Io(_)
                | Error::Parse { .. }
                | Error::Asymmetric { .. }
                | Error::Disconnected
                | Error::InvalidInstance(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
