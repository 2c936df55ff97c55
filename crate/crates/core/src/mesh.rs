//! Simplicial complexes on the unit square and unit cube.
//!
//! Every cell stores its vertices sorted by global id, and every sub-simplex
//! is stored as a sorted vertex tuple. The canonical orientation of a
//! sub-simplex is the one induced by that sorted order, so the orientation of
//! a local sub-simplex relative to its global counterpart is always `+1`.
//! The only nontrivial relative orientation is that of a facet with respect
//! to the cell: `facet_sign` is `+1` when the canonical facet normal points
//! out of the cell.

use std::collections::HashMap;

use nalgebra::{Matrix2, Matrix3, Vector3};

use crate::error::{Error, Result};

pub type Point = Vector3<f64>;

/// Direction of the diagonal used to split each grid square into two triangles.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Diagonal {
    /// Split along `(x, y) -> (x + h, y + h)`.
    #[default]
    LowerLeftToUpperRight,
    /// Split along `(x, y + h) -> (x + h, y)`.
    UpperLeftToLowerRight,
}

impl std::str::FromStr for Diagonal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ll-ur" | "lower-left-to-upper-right" => Ok(Self::LowerLeftToUpperRight),
            "ul-lr" | "upper-left-to-lower-right" => Ok(Self::UpperLeftToLowerRight),
            _ => Err(Error::Config(format!("unknown diagonal `{s}` (use ll-ur or ul-lr)"))),
        }
    }
}

impl std::fmt::Display for Diagonal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::LowerLeftToUpperRight => f.write_str("ll-ur"),
            Self::UpperLeftToLowerRight => f.write_str("ul-lr"),
        }
    }
}

const TRI_SUB: [&[&[usize]]; 3] = [
    &[&[0], &[1], &[2]],
    &[&[0, 1], &[0, 2], &[1, 2]],
    &[&[0, 1, 2]],
];

const TET_SUB: [&[&[usize]]; 4] = [
    &[&[0], &[1], &[2], &[3]],
    &[&[0, 1], &[0, 2], &[0, 3], &[1, 2], &[1, 3], &[2, 3]],
    &[&[0, 1, 2], &[0, 1, 3], &[0, 2, 3], &[1, 2, 3]],
    &[&[0, 1, 2, 3]],
];

/// Local `k`-sub-simplices of a `dim`-simplex as sorted tuples of local
/// vertex indices, in lexicographic order.
pub fn local_subsimplices(dim: usize, k: usize) -> &'static [&'static [usize]] {
    match dim {
        2 => TRI_SUB[k],
        3 => TET_SUB[k],
        _ => panic!("only triangles and tetrahedra are supported"),
    }
}

/// Local vertex opposite to local facet `f`.
pub fn opposite_vertex(dim: usize, f: usize) -> usize {
    dim - f
}

/// Measure of the simplex spanned by `points` (1 for a vertex).
pub fn simplex_measure(points: &[Point]) -> f64 {
    match points.len() {
        1 => 1.0,
        2 => (points[1] - points[0]).norm(),
        3 => 0.5 * (points[1] - points[0]).cross(&(points[2] - points[0])).norm(),
        4 => {
            let m = Matrix3::from_columns(&[
                points[1] - points[0],
                points[2] - points[0],
                points[3] - points[0],
            ]);
            m.determinant().abs() / 6.0
        }
        n => panic!("unsupported simplex with {n} vertices"),
    }
}

/// Canonical unit normal of a codimension-one simplex given by its sorted
/// vertices: in 3D `(b - a) x (c - a)`, in 2D the tangent rotated clockwise.
pub fn facet_normal(dim: usize, points: &[Point]) -> Vector3<f64> {
    let n = if dim == 2 {
        let t = points[1] - points[0];
        Vector3::new(t.y, -t.x, 0.0)
    } else {
        (points[1] - points[0]).cross(&(points[2] - points[0]))
    };
    n.normalize()
}

#[derive(Clone, Debug)]
pub struct MeshComplex {
    dim: usize,
    vertices: Vec<Point>,
    simplices: Vec<Vec<Vec<usize>>>,
    cell_simplices: Vec<Vec<Vec<usize>>>,
    facet_signs: Vec<Vec<i8>>,
    boundary: Vec<Vec<bool>>,
}

impl MeshComplex {
    /// Builds the full complex from vertex coordinates and cell connectivity.
    pub fn from_cells(dim: usize, vertices: Vec<Point>, cells: Vec<Vec<usize>>) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(Error::Config(format!("unsupported spatial dimension {dim}")));
        }
        let cells: Vec<Vec<usize>> = cells
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c
            })
            .collect();
        let mut simplices = vec![Vec::new(); dim + 1];
        let mut cell_simplices = vec![Vec::with_capacity(cells.len()); dim + 1];
        simplices[0] = (0..vertices.len()).map(|v| vec![v]).collect();
        for k in 1..dim {
            let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
            for cell in &cells {
                let ids = local_subsimplices(dim, k)
                    .iter()
                    .map(|local| {
                        let key: Vec<usize> = local.iter().map(|&i| cell[i]).collect();
                        let next = index.len();
                        *index.entry(key.clone()).or_insert_with(|| {
                            simplices[k].push(key);
                            next
                        })
                    })
                    .collect();
                cell_simplices[k].push(ids);
            }
        }
        cell_simplices[0] = cells.clone();
        cell_simplices[dim] = (0..cells.len()).map(|c| vec![c]).collect();
        simplices[dim] = cells;

        let mut facet_count = vec![0usize; simplices[dim - 1].len()];
        for ids in &cell_simplices[dim - 1] {
            for &f in ids {
                facet_count[f] += 1;
            }
        }
        let mut boundary: Vec<Vec<bool>> = (0..=dim).map(|k| vec![false; simplices[k].len()]).collect();
        for (f, &count) in facet_count.iter().enumerate() {
            boundary[dim - 1][f] = count == 1;
        }
        // lower-dimensional boundary flags: every sub-simplex of a boundary facet
        for (cell, facets) in cell_simplices[dim - 1].iter().enumerate() {
            for (lf, &f) in facets.iter().enumerate() {
                if !boundary[dim - 1][f] {
                    continue;
                }
                let opp = opposite_vertex(dim, lf);
                for k in 0..dim - 1 {
                    for (ls, local) in local_subsimplices(dim, k).iter().enumerate() {
                        if !local.contains(&opp) {
                            boundary[k][cell_simplices[k][cell][ls]] = true;
                        }
                    }
                }
            }
        }

        let mut mesh = Self {
            dim,
            vertices,
            simplices,
            cell_simplices,
            facet_signs: Vec::new(),
            boundary,
        };
        mesh.facet_signs = (0..mesh.num_cells())
            .map(|c| {
                let pts = mesh.cell_points(c);
                facet_signs(dim, &pts)
            })
            .collect();
        Ok(mesh)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn num_simplices(&self, k: usize) -> usize {
        self.simplices[k].len()
    }

    pub fn num_cells(&self) -> usize {
        self.simplices[self.dim].len()
    }

    /// Sorted vertex ids of the `id`-th `k`-simplex.
    pub fn simplex(&self, k: usize, id: usize) -> &[usize] {
        &self.simplices[k][id]
    }

    pub fn simplex_points(&self, k: usize, id: usize) -> Vec<Point> {
        self.simplices[k][id].iter().map(|&v| self.vertices[v]).collect()
    }

    pub fn cell_vertices(&self, cell: usize) -> &[usize] {
        &self.simplices[self.dim][cell]
    }

    pub fn cell_points(&self, cell: usize) -> Vec<Point> {
        self.simplex_points(self.dim, cell)
    }

    /// Global ids of the local `k`-sub-simplices of `cell`, in the order of
    /// [`local_subsimplices`].
    pub fn cell_simplices(&self, k: usize, cell: usize) -> &[usize] {
        &self.cell_simplices[k][cell]
    }

    /// `+1` if the canonical normal of local facet `f` points out of `cell`.
    pub fn facet_sign(&self, cell: usize, f: usize) -> i8 {
        self.facet_signs[cell][f]
    }

    pub fn is_boundary(&self, k: usize, id: usize) -> bool {
        k < self.dim && self.boundary[k][id]
    }

    pub fn boundary_count(&self, k: usize) -> usize {
        if k >= self.dim {
            return 0;
        }
        self.boundary[k].iter().filter(|&&b| b).count()
    }

    /// Number of cells sharing each facet.
    pub fn facet_cell_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_simplices(self.dim - 1)];
        for facets in &self.cell_simplices[self.dim - 1] {
            for &f in facets {
                counts[f] += 1;
            }
        }
        counts
    }

    /// Alternating sum of simplex counts.
    pub fn euler_characteristic(&self) -> i64 {
        (0..=self.dim)
            .map(|k| {
                let n = self.num_simplices(k) as i64;
                if k % 2 == 0 {
                    n
                } else {
                    -n
                }
            })
            .sum()
    }

    /// Boundary facets as `(cell, local facet)` pairs.
    pub fn boundary_facets(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for cell in 0..self.num_cells() {
            for (lf, &f) in self.cell_simplices(self.dim - 1, cell).iter().enumerate() {
                if self.boundary[self.dim - 1][f] {
                    out.push((cell, lf));
                }
            }
        }
        out
    }

    pub fn cell_geometry(&self, cell: usize) -> Result<CellGeometry> {
        CellGeometry::new(cell, self.dim, &self.cell_points(cell))
    }
}

fn facet_signs(dim: usize, pts: &[Point]) -> Vec<i8> {
    local_subsimplices(dim, dim - 1)
        .iter()
        .enumerate()
        .map(|(f, local)| {
            let fp: Vec<Point> = local.iter().map(|&i| pts[i]).collect();
            let centroid = fp.iter().sum::<Point>() / fp.len() as f64;
            let n = facet_normal(dim, &fp);
            if n.dot(&(centroid - pts[opposite_vertex(dim, f)])) > 0.0 {
                1
            } else {
                -1
            }
        })
        .collect()
}

/// Structured triangulation of `(0,1)^2` with `n` squares per side, each
/// split into two triangles along `diagonal`. Vertex ids run with `x` fastest.
pub fn build_unit_square_mesh(n: usize, diagonal: Diagonal) -> MeshComplex {
    assert!(n >= 1, "need at least one square per side");
    let h = 1.0 / n as f64;
    let id = |i: usize, j: usize| i + (n + 1) * j;
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            vertices.push(Point::new(i as f64 * h, j as f64 * h, 0.0));
        }
    }
    let mut cells = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (v00, v10, v01, v11) = (id(i, j), id(i + 1, j), id(i, j + 1), id(i + 1, j + 1));
            match diagonal {
                Diagonal::LowerLeftToUpperRight => {
                    cells.push(vec![v00, v10, v11]);
                    cells.push(vec![v00, v11, v01]);
                }
                Diagonal::UpperLeftToLowerRight => {
                    cells.push(vec![v00, v10, v01]);
                    cells.push(vec![v10, v11, v01]);
                }
            }
        }
    }
    MeshComplex::from_cells(2, vertices, cells).expect("structured square mesh is valid")
}

/// Kuhn (Freudenthal) triangulation of `(0,1)^3`: each of the `n^3`
/// subcubes is split into six tetrahedra sharing its main diagonal.
pub fn build_unit_cube_mesh(n: usize) -> MeshComplex {
    assert!(n >= 1, "need at least one cube per side");
    let h = 1.0 / n as f64;
    let id = |i: usize, j: usize, k: usize| i + (n + 1) * (j + (n + 1) * k);
    let mut vertices = Vec::with_capacity((n + 1).pow(3));
    for k in 0..=n {
        for j in 0..=n {
            for i in 0..=n {
                vertices.push(Point::new(i as f64 * h, j as f64 * h, k as f64 * h));
            }
        }
    }
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut cells = Vec::with_capacity(6 * n * n * n);
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                for perm in PERMS {
                    let mut c = [i, j, k];
                    let mut tet = vec![id(c[0], c[1], c[2])];
                    for axis in perm {
                        c[axis] += 1;
                        tet.push(id(c[0], c[1], c[2]));
                    }
                    cells.push(tet);
                }
            }
        }
    }
    MeshComplex::from_cells(3, vertices, cells).expect("Kuhn cube mesh is valid")
}

/// Geometric data of one cell. Local edges and facets follow
/// [`local_subsimplices`]; facet normals use the canonical (sorted-vertex)
/// orientation, with `facet_signs` recording which of them point outward.
#[derive(Clone, Debug)]
pub struct CellGeometry {
    pub cell: usize,
    pub dim: usize,
    pub vertices: Vec<Point>,
    pub volume: f64,
    pub barycenter: Point,
    pub grad_lambda: Vec<Vector3<f64>>,
    pub edge_lengths: Vec<f64>,
    pub edge_tangents: Vec<Vector3<f64>>,
    pub facet_areas: Vec<f64>,
    pub facet_normals: Vec<Vector3<f64>>,
    pub facet_signs: Vec<f64>,
}

impl CellGeometry {
    /// Geometry of the simplex with the given (sorted-id order) vertices.
    pub fn new(cell: usize, dim: usize, vertices: &[Point]) -> Result<Self> {
        if vertices.len() != dim + 1 {
            return Err(Error::DimensionMismatch {
                expected: dim + 1,
                found: vertices.len(),
            });
        }
        let scale = (1..=dim)
            .map(|i| (vertices[i] - vertices[0]).norm())
            .fold(0.0, f64::max);
        let (volume, grads) = if dim == 2 {
            let m = Matrix2::new(
                vertices[1].x - vertices[0].x,
                vertices[2].x - vertices[0].x,
                vertices[1].y - vertices[0].y,
                vertices[2].y - vertices[0].y,
            );
            let det = m.determinant();
            let vol = det.abs() / 2.0;
            if !(vol > 1e-14 * scale * scale) {
                return Err(Error::DegenerateCell { cell, measure: vol });
            }
            let inv = m.try_inverse().ok_or(Error::DegenerateCell { cell, measure: vol })?;
            let g1 = Vector3::new(inv[(0, 0)], inv[(0, 1)], 0.0);
            let g2 = Vector3::new(inv[(1, 0)], inv[(1, 1)], 0.0);
            (vol, vec![-g1 - g2, g1, g2])
        } else {
            let m = Matrix3::from_columns(&[
                vertices[1] - vertices[0],
                vertices[2] - vertices[0],
                vertices[3] - vertices[0],
            ]);
            let det = m.determinant();
            let vol = det.abs() / 6.0;
            if !(vol > 1e-14 * scale.powi(3)) {
                return Err(Error::DegenerateCell { cell, measure: vol });
            }
            let inv = m.try_inverse().ok_or(Error::DegenerateCell { cell, measure: vol })?;
            let g: Vec<Vector3<f64>> = (0..3).map(|r| inv.row(r).transpose()).collect();
            (vol, vec![-g[0] - g[1] - g[2], g[0], g[1], g[2]])
        };
        let barycenter = vertices.iter().sum::<Point>() / (dim + 1) as f64;
        let (edge_lengths, edge_tangents) = local_subsimplices(dim, 1)
            .iter()
            .map(|e| {
                let t = vertices[e[1]] - vertices[e[0]];
                (t.norm(), t.normalize())
            })
            .unzip();
        let (facet_areas, facet_normals) = local_subsimplices(dim, dim - 1)
            .iter()
            .map(|f| {
                let pts: Vec<Point> = f.iter().map(|&i| vertices[i]).collect();
                (simplex_measure(&pts), facet_normal(dim, &pts))
            })
            .unzip();
        let facet_signs = facet_signs(dim, vertices).into_iter().map(f64::from).collect();
        Ok(Self {
            cell,
            dim,
            vertices: vertices.to_vec(),
            volume,
            barycenter,
            grad_lambda: grads,
            edge_lengths,
            edge_tangents,
            facet_areas,
            facet_normals,
            facet_signs,
        })
    }

    /// `t_ij = a_j - a_i`.
    pub fn edge_vector(&self, i: usize, j: usize) -> Vector3<f64> {
        self.vertices[j] - self.vertices[i]
    }

    /// Barycentric coordinates of `x`.
    pub fn barycentric(&self, x: &Point) -> Vec<f64> {
        let d = x - self.vertices[0];
        let mut l: Vec<f64> = Vec::with_capacity(self.dim + 1);
        l.push(0.0);
        for i in 1..=self.dim {
            l.push(self.grad_lambda[i].dot(&d));
        }
        l[0] = 1.0 - l[1..].iter().sum::<f64>();
        l
    }

    /// Vertices of the local `k`-sub-simplex with index `s`.
    pub fn subsimplex_points(&self, k: usize, s: usize) -> Vec<Point> {
        local_subsimplices(self.dim, k)[s].iter().map(|&i| self.vertices[i]).collect()
    }

    /// Measure of the local `k`-sub-simplex `s`.
    pub fn subsimplex_measure(&self, k: usize, s: usize) -> f64 {
        if k == self.dim {
            self.volume
        } else {
            simplex_measure(&self.subsimplex_points(k, s))
        }
    }

    /// Diameter of the cell.
    pub fn diameter(&self) -> f64 {
        self.edge_lengths.iter().copied().fold(0.0, f64::max)
    }
}
