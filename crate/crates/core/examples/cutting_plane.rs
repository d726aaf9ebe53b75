//! Cutting-plane bounds with their per-iteration trace written as CSV.
//!
//! ```text
//! cargo run --release -p qmstp --example cutting_plane -- CP1 12 67 1 trace.csv
//! ```

use std::fs::File;
use std::time::Duration;

use qmstp::cuts::{vs_bound, write_trace_csv, CutKind, CutOptions, Level};
use qmstp::extbounds::vs0_bound;
use qmstp::{generate, Family, GeneratorSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let family: Family = args.first().map_or("CP1", String::as_str).parse()?;
    let n: usize = args.get(1).map_or(Ok(12), |s| s.parse())?;
    let density: u32 = args.get(2).map_or(Ok(67), |s| s.parse())?;
    let seed: u64 = args.get(3).map_or(Ok(1), |s| s.parse())?;
    let out = args.get(4).cloned();

    let inst = generate(&GeneratorSpec::new(family, n, density, seed))?;
    println!("{}: vs0 = {:.3}", inst.name(), vs0_bound(&inst)?.0.value);

    let opts = CutOptions { time_limit: Some(Duration::from_secs(300)), ..CutOptions::default() };
    for level in [Level::Vs1, Level::Vs2] {
        let (res, run) = vs_bound(&inst, level, &opts)?;
        let counts: Vec<String> = [CutKind::Ub, CutKind::Lift, CutKind::Tri1, CutKind::Tri2]
            .iter()
            .map(|&k| format!("{k:?} {}", run.pool.count(k)))
            .collect();
        println!(
            "{:?}: {:.3} after {} LP solves in {:.2}s, {}; cuts: {}",
            level,
            res.value,
            run.trace.len(),
            res.elapsed.as_secs_f64(),
            res.status,
            counts.join(", ")
        );
        match &out {
            Some(path) if level == Level::Vs2 => write_trace_csv(&run.trace, File::create(path)?)?,
            _ => {}
        }
    }
    if out.is_none() {
        println!("(pass a fifth argument to save the VS2 trace as CSV)");
    }
    Ok(())
}
