//! Every lower bound on one generated instance, next to a tabu upper bound.
//!
//! ```text
//! cargo run --release -p qmstp --example bounds_ladder -- CP1 10 33 1
//! ```

use std::time::Duration;

use qmstp::cuts::{vs_bound, CutOptions, Level};
use qmstp::extbounds::{lbb_bound, rlt1_incomplete_bound, vs0_bound};
use qmstp::glbounds::{assad_xu, gl_bound, oncan_punnen, LevelingOptions, SubgradientOptions};
use qmstp::heuristics::{tabu_search, TabuOptions};
use qmstp::{generate, Family, GeneratorSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let family: Family = args.first().map_or("CP1", String::as_str).parse()?;
    let n: usize = args.get(1).map_or(Ok(10), |s| s.parse())?;
    let density: u32 = args.get(2).map_or(Ok(33), |s| s.parse())?;
    let seed: u64 = args.get(3).map_or(Ok(1), |s| s.parse())?;

    let inst = generate(&GeneratorSpec::new(family, n, density, seed))?;
    println!("{}: n = {}, m = {}", inst.name(), inst.n(), inst.m());

    let (_, ub) = tabu_search(&inst, &TabuOptions { seed, ..TabuOptions::default() });
    println!("{:>6} {:>12.3}", "tabu", ub);

    let limit = Some(Duration::from_secs(600));
    let mut rows = vec![gl_bound(&inst)];
    rows.push(assad_xu(&inst, &LevelingOptions::default()).0);
    rows.push(oncan_punnen(&inst, &SubgradientOptions { upper_bound: Some(ub), seed, ..Default::default() }).0);
    if inst.is_complete() {
        rows.push(lbb_bound(&inst)?.0);
    }
    rows.push(vs0_bound(&inst)?.0);
    let cut_opts = CutOptions { time_limit: limit, ..CutOptions::default() };
    rows.push(vs_bound(&inst, Level::Vs1, &cut_opts)?.0);
    rows.push(vs_bound(&inst, Level::Vs2, &cut_opts)?.0);
    rows.push(rlt1_incomplete_bound(&inst, limit)?);
    for r in rows {
        println!(
            "{:>6} {:>12.3}  {:>8.2}s  {:>5} iters  {}",
            r.method.to_string(),
            r.value,
            r.elapsed.as_secs_f64(),
            r.iterations,
            r.status
        );
    }
    Ok(())
}
