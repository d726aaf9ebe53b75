//! Upper bounds from tabu search, then a variable neighborhood polish.
//!
//! ```text
//! cargo run --release -p qmstp --example local_search -- VS 20 67 7
//! ```

use std::time::Instant;

use qmstp::heuristics::{random_tree_seeded, tabu_search, vns_polish, TabuOptions, VnsOptions};
use qmstp::{generate, Family, GeneratorSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let family: Family = args.first().map_or("VS", String::as_str).parse()?;
    let n: usize = args.get(1).map_or(Ok(20), |s| s.parse())?;
    let density: u32 = args.get(2).map_or(Ok(67), |s| s.parse())?;
    let seed: u64 = args.get(3).map_or(Ok(7), |s| s.parse())?;

    let inst = generate(&GeneratorSpec::new(family, n, density, seed))?;
    let start = random_tree_seeded(&inst, seed);
    println!("{}: random tree {}", inst.name(), start.quadratic_cost(&inst));

    let t = Instant::now();
    let (tree, tabu) = tabu_search(&inst, &TabuOptions { seed, ..TabuOptions::default() });
    println!("tabu   {tabu:>12} ({:.2}s)", t.elapsed().as_secs_f64());
    let t = Instant::now();
    let (best, vns) = vns_polish(&inst, &tree, &VnsOptions { seed, ..VnsOptions::default() });
    println!("vns    {vns:>12} ({:.2}s)", t.elapsed().as_secs_f64());
    let edges: Vec<String> = best.edges().iter().map(|&e| format!("{:?}", inst.edge(e))).collect();
    println!("tree: {}", edges.join(" "));
    Ok(())
}
