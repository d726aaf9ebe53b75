//! Generates one instance per family into a directory and reads them back.
//!
//! ```text
//! cargo run --release -p qmstp --example generate_instances -- out/ 10 67 1
//! ```

use std::path::PathBuf;

use qmstp::{generate, read_instance, write_instance, Family, GeneratorSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let dir = PathBuf::from(args.first().map_or("instances", String::as_str));
    let n: usize = args.get(1).map_or(Ok(10), |s| s.parse())?;
    let density: u32 = args.get(2).map_or(Ok(67), |s| s.parse())?;
    let seed: u64 = args.get(3).map_or(Ok(1), |s| s.parse())?;
    std::fs::create_dir_all(&dir)?;

    for family in Family::ALL {
        // The OP families are defined on complete graphs only.
        let d = if family.is_op() { 100 } else { density };
        let inst = generate(&GeneratorSpec::new(family, n, d, seed))?;
        let path = dir.join(format!("{}.txt", inst.name()));
        write_instance(&inst, &path)?;
        let back = read_instance(&path)?;
        assert_eq!(back.q_matrix(), inst.q_matrix());
        let q = inst.q_matrix();
        let lo = q.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        println!("{:<20} m = {:>3}  q in [{lo}, {hi}]  -> {}", inst.name(), inst.m(), path.display());
    }
    Ok(())
}
