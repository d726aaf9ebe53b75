//! Bound comparison over a small grid, as CSV and a markdown gap table.
//!
//! ```text
//! cargo run --release -p qmstp --example benchmark_table -- bench.csv
//! ```

use std::fs::File;
use std::time::Duration;

use qmstp::bench::{render_markdown, run_benchmark, write_csv, BenchmarkOptions};
use qmstp::bound::{BoundConfig, Method};
use qmstp::{generate, Family, GeneratorSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1);
    let mut instances = Vec::new();
    for family in [Family::Cp1, Family::Cp3, Family::Vs] {
        for density in [33, 67, 100] {
            instances.push(generate(&GeneratorSpec::new(family, 10, density, 1))?);
        }
    }
    let opts = BenchmarkOptions {
        methods: vec![Method::Gl, Method::Ax, Method::Op, Method::Vs0, Method::Vs1, Method::Rlt1],
        config: BoundConfig { time_limit: Some(Duration::from_secs(120)), ..BoundConfig::default() },
        ..BenchmarkOptions::default()
    };
    let rows = run_benchmark(&instances, &opts)?;
    if let Some(path) = out {
        write_csv(&rows, File::create(&path)?)?;
        println!("wrote {} rows to {path}", rows.len());
    }
    print!("{}", render_markdown(&rows));
    Ok(())
}
