//! Writes a mesh and an interpolated field as legacy VTK.
//! Usage: `cargo run --example mesh_dump -- [outdir]`

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use nalgebra::Vector3;
use safe_fem::field::Field;
use safe_fem::vtk::{write_mesh_vtk, write_solution_vtk};
use safe_fem::whitney::{canonical_interpolate, Space};
use safe_fem::{build_unit_cube_mesh, build_unit_square_mesh, Diagonal};

fn main() -> safe_fem::Result<()> {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("safe_mesh_dump"));
    std::fs::create_dir_all(&dir)?;

    let square = build_unit_square_mesh(8, Diagonal::UpperLeftToLowerRight);
    println!(
        "square: {} vertices, {} edges, {} triangles, euler characteristic {}",
        square.num_simplices(0),
        square.num_simplices(1),
        square.num_cells(),
        square.euler_characteristic()
    );
    write_mesh_vtk(&square, &mut BufWriter::new(File::create(dir.join("square.vtk"))?))?;

    let cube = build_unit_cube_mesh(4);
    println!(
        "cube: {} vertices, {} edges, {} faces, {} tets, {} boundary faces",
        cube.num_simplices(0),
        cube.num_simplices(1),
        cube.num_simplices(2),
        cube.num_cells(),
        cube.boundary_count(2)
    );
    let swirl = Field::vector(|x| Vector3::new(-x.y, x.x, x.z * x.z));
    let u_h = canonical_interpolate(&cube, Space::Nedelec, &swirl);
    write_solution_vtk(&cube, Space::Nedelec, &u_h, "swirl", &mut BufWriter::new(File::create(dir.join("cube_swirl.vtk"))?))?;
    println!("wrote {}", dir.display());
    Ok(())
}
