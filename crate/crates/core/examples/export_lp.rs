//! Writes the VS0 relaxation as a CPLEX LP file, solves it, and saves the
//! solution next to it, so the model can be cross-checked with an outside
//! solver.
//!
//! ```text
//! cargo run --release -p qmstp --example export_lp -- CP1 6 100 1 vs0.lp
//! ```

use qmstp::extbounds::{PairLayout, QuadraticModel};
use qmstp::{generate, Family, GeneratorSpec};
use qmstp_lp::lpfile::{read_model, write_model, write_solution};
use qmstp_lp::{solve, Limits, Tolerances};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let family: Family = args.first().map_or("CP1", String::as_str).parse()?;
    let n: usize = args.get(1).map_or(Ok(6), |s| s.parse())?;
    let density: u32 = args.get(2).map_or(Ok(100), |s| s.parse())?;
    let seed: u64 = args.get(3).map_or(Ok(1), |s| s.parse())?;
    let path = args.get(4).map_or("vs0.lp", String::as_str);

    let inst = generate(&GeneratorSpec::new(family, n, density, seed))?;
    let model = QuadraticModel::new(&inst, PairLayout::Asymmetric, f64::INFINITY)?;
    write_model(model.lp(), path)?;
    let lp = read_model(path)?;
    println!("{}: {} variables, {} rows -> {path}", inst.name(), lp.num_vars(), lp.num_constraints());

    let sol = solve(&lp, &Limits::default())?;
    let cert = sol.certificate(&lp);
    println!(
        "{:?}: objective {:.6}, primal residual {:.1e}, gap {:.1e}, certified {}",
        sol.status,
        sol.objective,
        cert.primal_residual,
        cert.gap(),
        cert.holds(&Tolerances::default())
    );
    let sol_path = format!("{path}.sol");
    write_solution(&lp, &sol, &sol_path)?;
    println!("solution -> {sol_path}");
    Ok(())
}
