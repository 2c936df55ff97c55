//! Convergence of the dual H(curl) scheme on the unit cube with an
//! inhomogeneous tangential trace. Usage: `cargo run --release --example curl3d_convergence -- [alpha] [max_n]`

use safe_fem::verify::{builtin_case, run_convergence, CaseParams};

fn main() -> safe_fem::Result<()> {
    let mut args = std::env::args().skip(1);
    let alpha: f64 = args.next().map(|a| a.parse().expect("alpha")).unwrap_or(1.0);
    let max_n: usize = args.next().map(|a| a.parse().expect("max_n")).unwrap_or(16);
    let params = CaseParams {
        alpha: Some(alpha),
        ..Default::default()
    };
    let case = builtin_case("curl3d", &params)?;
    let ns: Vec<usize> = [2, 4, 8, 16, 32].into_iter().filter(|&n| n <= max_n).collect();
    let report = run_convergence(&case, &ns)?;
    print!("{}", report.to_table());
    Ok(())
}
