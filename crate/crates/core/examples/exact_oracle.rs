//! Exhaustive optimum for small instances, and the weak-sum case where the
//! quadratic problem collapses to a minimum spanning tree.
//!
//! ```text
//! cargo run --release -p qmstp --example exact_oracle -- 8 4
//! ```

use qmstp::extbounds::lbb_bound;
use qmstp::oracle::{exact_qmstp, linearization_vector, weak_sum_decompose, DEFAULT_LIMIT_N};
use qmstp::{generate, mst, Family, GeneratorSpec, Instance};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map_or(Ok(8), |s| s.parse())?;
    let seed: u64 = args.get(1).map_or(Ok(4), |s| s.parse())?;

    let inst = generate(&GeneratorSpec::new(Family::Cp1, n, 100, seed))?;
    let report = exact_qmstp(&inst, DEFAULT_LIMIT_N)?;
    println!(
        "{}: {} spanning trees, optimum {} (lbb {:.3})",
        inst.name(),
        report.tree_count,
        report.optimal_cost,
        lbb_bound(&inst)?.0.value
    );

    // q_ef = a_e + a_f off the diagonal, arbitrary diagonal.
    let m = inst.m();
    let a: Vec<f64> = (0..m).map(|e| ((e * 7 + seed as usize) % 10 + 1) as f64).collect();
    let mut q = vec![0.0; m * m];
    for e in 0..m {
        for f in 0..m {
            q[e * m + f] = if e == f { ((e * 3) % 5 + 1) as f64 } else { a[e] + a[f] };
        }
    }
    let ws = Instance::new("weak-sum", n, inst.edges().to_vec(), q)?;
    let found = weak_sum_decompose(&ws).ok_or("matrix should decompose")?;
    let p = linearization_vector(&ws, &found);
    let linear = mst(&ws, &p)?.linear_cost(&p);
    let opt = exact_qmstp(&ws, DEFAULT_LIMIT_N)?.optimal_cost;
    println!("weak-sum: optimum {opt}, mst under linearized costs {linear}, lbb {:.3}", lbb_bound(&ws)?.0.value);
    Ok(())
}
