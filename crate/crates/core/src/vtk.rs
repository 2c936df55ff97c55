//! Legacy ASCII VTK (v3.0) unstructured-grid output.

use std::io::{self, Write};

use crate::error::Result;
use crate::mesh::MeshComplex;
use crate::whitney::{eval_local_function, DofMap, Space};

fn write_grid<W: Write>(mesh: &MeshComplex, title: &str, w: &mut W) -> io::Result<()> {
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "{title}")?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(w, "POINTS {} double", mesh.vertices().len())?;
    for p in mesh.vertices() {
        writeln!(w, "{} {} {}", p.x, p.y, p.z)?;
    }
    let nv = mesh.dim() + 1;
    writeln!(w, "CELLS {} {}", mesh.num_cells(), mesh.num_cells() * (nv + 1))?;
    for c in 0..mesh.num_cells() {
        let ids: Vec<String> = mesh.cell_vertices(c).iter().map(|v| v.to_string()).collect();
        writeln!(w, "{nv} {}", ids.join(" "))?;
    }
    let cell_type = if mesh.dim() == 2 { 5 } else { 10 };
    writeln!(w, "CELL_TYPES {}", mesh.num_cells())?;
    for _ in 0..mesh.num_cells() {
        writeln!(w, "{cell_type}")?;
    }
    writeln!(w, "CELL_DATA {}", mesh.num_cells())
}

/// Mesh with a per-cell flag marking cells that touch the boundary with a facet.
pub fn write_mesh_vtk<W: Write>(mesh: &MeshComplex, w: &mut W) -> Result<()> {
    write_grid(mesh, "safe-fem mesh", w)?;
    let mut flag = vec![0u8; mesh.num_cells()];
    for (c, _) in mesh.boundary_facets() {
        flag[c] = 1;
    }
    writeln!(w, "SCALARS boundary int 1")?;
    writeln!(w, "LOOKUP_TABLE default")?;
    for f in flag {
        writeln!(w, "{f}")?;
    }
    Ok(())
}

/// Discrete field evaluated at cell barycenters: the value as `name` and its
/// exterior derivative as `d_name`.
pub fn write_solution_vtk<W: Write>(mesh: &MeshComplex, space: Space, u_h: &[f64], name: &str, w: &mut W) -> Result<()> {
    let dofs = DofMap::new(mesh, space);
    let dim = mesh.dim();
    let centre = vec![1.0 / (dim + 1) as f64; dim + 1];
    let mut values = Vec::with_capacity(mesh.num_cells());
    for c in 0..mesh.num_cells() {
        let geom = mesh.cell_geometry(c)?;
        let local: Vec<f64> = dofs.cell_dofs(c).iter().map(|&(g, s)| s * u_h[g]).collect();
        values.push(eval_local_function(&geom, space, &local, &centre));
    }
    write_grid(mesh, &format!("safe-fem {name}"), w)?;
    let blocks = [
        (name.to_string(), space.is_vector_valued(), 0),
        (format!("d_{name}"), space.derivative_is_vector(dim), 1),
    ];
    for (label, vector, which) in blocks {
        if vector {
            writeln!(w, "VECTORS {label} double")?;
        } else {
            writeln!(w, "SCALARS {label} double 1")?;
            writeln!(w, "LOOKUP_TABLE default")?;
        }
        for (v, d) in &values {
            let p = if which == 0 { v } else { d };
            if vector {
                writeln!(w, "{:e} {:e} {:e}", p.x, p.y, p.z)?;
            } else {
                writeln!(w, "{:e}", p.x)?;
            }
        }
    }
    Ok(())
}
