//! Vertex-based scheme (k = 0) on the unit square and cube.
//! Usage: `cargo run --release --example grad_convergence -- [alpha]`

use safe_fem::verify::{builtin_case, run_convergence, CaseParams};

fn main() -> safe_fem::Result<()> {
    let alpha = std::env::args().nth(1).map(|a| a.parse().expect("alpha")).unwrap_or(1.0);
    let params = CaseParams {
        alpha: Some(alpha),
        ..Default::default()
    };
    let case = builtin_case("grad2d", &params)?;
    print!("{}", run_convergence(&case, &[4, 8, 16, 32, 64])?.to_table());
    let case = builtin_case("grad3d", &params)?;
    print!("{}", run_convergence(&case, &[2, 4, 8, 16])?.to_table());
    Ok(())
}
