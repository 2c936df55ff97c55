//! Convergence of the H(div) scheme on the unit square for a chosen diffusion
//! coefficient. Usage: `cargo run --release --example div2d_convergence -- [alpha] [ll-ur|ul-lr]`

use safe_fem::verify::{builtin_case, run_convergence, CaseParams};

fn main() -> safe_fem::Result<()> {
    let mut args = std::env::args().skip(1);
    let alpha: f64 = args.next().map(|a| a.parse().expect("alpha")).unwrap_or(1.0);
    let diagonal = args.next().map(|d| d.parse().expect("diagonal")).unwrap_or_default();
    let params = CaseParams {
        alpha: Some(alpha),
        gamma: Some(1.0),
        diagonal,
    };
    let case = builtin_case("div2d", &params)?;
    let report = run_convergence(&case, &[4, 8, 16, 32, 64, 128])?;
    print!("{}", report.to_table());
    Ok(())
}
