//! Simplex-averaged operator and fitted flux on a triangle for growing |theta|.
//! Usage: `cargo run --example exponential_operators`

use nalgebra::Vector3;
use safe_fem::exponential::{exp_average, local_exp_operators};
use safe_fem::{CellGeometry, Point};

fn main() -> safe_fem::Result<()> {
    let tri = CellGeometry::new(0, 2, &[Point::new(0.0, 0.0, 0.0), Point::new(1.0, 0.0, 0.0), Point::new(0.3, 0.8, 0.0)])?;
    for scale in [0.0, 1.0, 10.0, 100.0, 1000.0] {
        let theta = Vector3::new(1.0, 0.5, 0.0) * scale;
        let avg = exp_average(&tri.vertices, &theta);
        let j0 = local_exp_operators(&tri, 0, &theta)?.j;
        let j1 = local_exp_operators(&tri, 1, &theta)?.j;
        let jj = (&j1 * &j0).abs().max() / (j1.abs().max() * j0.abs().max());
        println!("|theta| = {:>8.2}  ln avg_T exp = {:>10.4}  |J1 J0| = {jj:.1e}", theta.norm(), avg.ln());
        print!("J0 ={:.4}", j0);
    }
    Ok(())
}
