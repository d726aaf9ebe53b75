//! Gilmore-Lawler bound, its leveling refinement, and the Lagrangian
//! subgradient bound, with the leveling trace.
//!
//! ```text
//! cargo run --release -p qmstp --example leveling -- CP2 12 100 3
//! ```

use qmstp::glbounds::{assad_xu, gl_bound, oncan_punnen, LevelingOptions, SubgradientOptions};
use qmstp::heuristics::{tabu_search, TabuOptions};
use qmstp::{generate, Family, GeneratorSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let family: Family = args.first().map_or("CP2", String::as_str).parse()?;
    let n: usize = args.get(1).map_or(Ok(12), |s| s.parse())?;
    let density: u32 = args.get(2).map_or(Ok(100), |s| s.parse())?;
    let seed: u64 = args.get(3).map_or(Ok(3), |s| s.parse())?;

    let inst = generate(&GeneratorSpec::new(family, n, density, seed))?;
    let gl = gl_bound(&inst);
    let (ax, state) = assad_xu(&inst, &LevelingOptions::default());
    println!("{}: gl {:.3}", inst.name(), gl.value);
    println!("leveling: {:.3} after {} iterations, {}", ax.value, ax.iterations, ax.status);
    let shown: Vec<String> = state.bound_trace.iter().take(10).map(|v| format!("{v:.2}")).collect();
    println!("  first iterates: {}", shown.join(" "));
    if !state.decreases.is_empty() {
        println!("  bound went down at {} iteration(s), first at {}", state.decreases.len(), state.decreases[0]);
    }

    let (_, ub) = tabu_search(&inst, &TabuOptions { seed, ..TabuOptions::default() });
    let opts = SubgradientOptions { upper_bound: Some(ub), seed, ..SubgradientOptions::default() };
    let (op, _) = oncan_punnen(&inst, &opts);
    println!("subgradient: {:.3} after {} iterations (upper bound {ub})", op.value, op.iterations);
    Ok(())
}
