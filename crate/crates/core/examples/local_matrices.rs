//! SAFE element matrices on one tetrahedron: Bernoulli route, operator route
//! and the upwind limit.
//! Usage: `cargo run --example local_matrices -- [alpha]`

use nalgebra::Vector3;
use safe_fem::assembly::{local_safe_matrix, local_safe_oracle};
use safe_fem::exponential::CellCoefficients;
use safe_fem::field::Field;
use safe_fem::{CellGeometry, Point};

fn main() -> safe_fem::Result<()> {
    let alpha: f64 = std::env::args().nth(1).map(|a| a.parse().expect("alpha")).unwrap_or(0.1);
    let tet = CellGeometry::new(
        0,
        3,
        &[
            Point::new(0.0, 0.0, 0.0),
            Point::new(1.0, 0.1, 0.0),
            Point::new(0.2, 0.9, 0.1),
            Point::new(0.1, 0.3, 0.8),
        ],
    )?;
    let beta = Vector3::new(1.0, -0.5, 2.0);
    let coeffs = CellCoefficients::from_beta(alpha, beta)?;
    for k in 0..3 {
        let a = local_safe_matrix(&tet, k, &coeffs)?;
        let b = local_safe_oracle(&tet, k, &coeffs, &Field::constant_scalar(alpha))?;
        let rel = (&a.matrix - &b.matrix).abs().max() / b.matrix.abs().max();
        println!("k = {k} ({}), relative difference between routes {rel:.2e}", a.space.name());
        print!("{:.5}", a.matrix);
        let lim = local_safe_matrix(&tet, k, &CellCoefficients::upwind_limit(beta))?;
        println!("upwind limit:");
        print!("{:.5}", lim.matrix);
    }
    Ok(())
}
