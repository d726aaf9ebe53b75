//! Runs the self-check suite (bound ordering, LP certificates, oracle
//! comparisons) on a generated instance; exits 1 if any check fails.
//!
//! ```text
//! cargo run --release -p qmstp --example verify_bounds -- CP4 8 100 2
//! ```

use std::process::ExitCode;

use qmstp::verify::{verify_instance, VerifyOptions};
use qmstp::{generate, Family, GeneratorSpec};

fn main() -> Result<ExitCode, Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let family: Family = args.first().map_or("CP4", String::as_str).parse()?;
    let n: usize = args.get(1).map_or(Ok(8), |s| s.parse())?;
    let density: u32 = args.get(2).map_or(Ok(100), |s| s.parse())?;
    let seed: u64 = args.get(3).map_or(Ok(2), |s| s.parse())?;

    let inst = generate(&GeneratorSpec::new(family, n, density, seed))?;
    let report = verify_instance(&inst, &VerifyOptions { seed, ..VerifyOptions::default() });
    print!("{report}");
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}
