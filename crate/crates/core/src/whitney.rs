//! Lowest-order Whitney spaces `P1^- Lambda^k` in vector-proxy form.
//!
//! | space            | simplices | dof                | d     |
//! |------------------|-----------|--------------------|-------|
//! | `Lagrange`       | vertices  | point value        | grad  |
//! | `Nedelec`        | edges     | `int_E v . tau_E`  | curl (3D), rot (2D) |
//! | `RaviartThomas`  | facets    | `int_F v . n_F`    | div   |
//! | `Constant`       | cells     | `int_T v`          | 0     |
//!
//! Tangents and normals use the canonical orientation of the mesh (sorted
//! vertex order). In 2D the Raviart-Thomas space is the Nedelec space rotated
//! clockwise, so `curl` on `Lagrange` and `grad` on `Lagrange` have the same
//! incidence matrix.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, Vector3};

use crate::error::{Error, Result};
use crate::field::{Field, Proxy};
use crate::mesh::{facet_normal, local_subsimplices, simplex_measure, CellGeometry, MeshComplex, Point};
use crate::quadrature::SimplexRule;

/// Quadrature degree used for all degree-of-freedom functionals.
pub const DOF_QUADRATURE_DEGREE: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Space {
    Lagrange,
    Nedelec,
    RaviartThomas,
    Constant,
}

impl Space {
    /// Space carrying `k`-forms in dimension `dim`. In 2D, `k = 1` is the
    /// normal-flux (Raviart-Thomas) space.
    pub fn for_degree(dim: usize, k: usize) -> Result<Self> {
        match (dim, k) {
            (2 | 3, 0) => Ok(Self::Lagrange),
            (3, 1) => Ok(Self::Nedelec),
            (2, 1) | (3, 2) => Ok(Self::RaviartThomas),
            (2, 2) | (3, 3) => Ok(Self::Constant),
            _ => Err(Error::UnsupportedDegree { dim, k }),
        }
    }

    /// Dimension of the simplices carrying the degrees of freedom.
    pub fn simplex_dim(self, dim: usize) -> usize {
        match self {
            Self::Lagrange => 0,
            Self::Nedelec => 1,
            Self::RaviartThomas => dim - 1,
            Self::Constant => dim,
        }
    }

    /// Target space of the exterior derivative.
    pub fn derivative_space(self, dim: usize) -> Option<Self> {
        match (self, dim) {
            (Self::Lagrange, _) => Some(Self::Nedelec),
            (Self::Nedelec, 3) => Some(Self::RaviartThomas),
            (Self::Nedelec, _) => Some(Self::Constant),
            (Self::RaviartThomas, _) => Some(Self::Constant),
            (Self::Constant, _) => None,
        }
    }

    pub fn is_vector_valued(self) -> bool {
        matches!(self, Self::Nedelec | Self::RaviartThomas)
    }

    /// Whether `d` of this space is vector valued in dimension `dim`.
    pub fn derivative_is_vector(self, dim: usize) -> bool {
        match self {
            Self::Lagrange => true,
            Self::Nedelec => dim == 3,
            _ => false,
        }
    }

    pub fn local_dim(self, dim: usize) -> usize {
        local_subsimplices(dim, self.simplex_dim(dim)).len()
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Lagrange => "lagrange",
            Self::Nedelec => "nedelec",
            Self::RaviartThomas => "raviart-thomas",
            Self::Constant => "constant",
        }
    }
}

/// Global numbering of the degrees of freedom of a space: one per simplex
/// of the space's dimension, numbered like the simplices themselves.
#[derive(Clone, Debug)]
pub struct DofMap {
    pub space: Space,
    pub dim: usize,
    num_dofs: usize,
    boundary: Vec<bool>,
    cell_dofs: Vec<Vec<(usize, f64)>>,
}

impl DofMap {
    pub fn new(mesh: &MeshComplex, space: Space) -> Self {
        let k = space.simplex_dim(mesh.dim());
        let num_dofs = mesh.num_simplices(k);
        let boundary = (0..num_dofs).map(|s| mesh.is_boundary(k, s)).collect();
        let cell_dofs = (0..mesh.num_cells())
            .map(|c| mesh.cell_simplices(k, c).iter().map(|&g| (g, 1.0)).collect())
            .collect();
        Self {
            space,
            dim: mesh.dim(),
            num_dofs,
            boundary,
            cell_dofs,
        }
    }

    pub fn num_dofs(&self) -> usize {
        self.num_dofs
    }

    pub fn is_boundary(&self, dof: usize) -> bool {
        self.boundary[dof]
    }

    /// `(global dof, orientation sign)` for each local dof of `cell`.
    pub fn cell_dofs(&self, cell: usize) -> &[(usize, f64)] {
        &self.cell_dofs[cell]
    }
}

/// Signed incidence matrix realising `v -> (delta_S(v))_S` on dof vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct IncidenceMatrix {
    pub from: Space,
    pub to: Space,
    pub rows: usize,
    pub cols: usize,
    entries: Vec<Vec<(usize, i32)>>,
}

impl IncidenceMatrix {
    pub fn row(&self, r: usize) -> &[(usize, i32)] {
        &self.entries[r]
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        self.entries
            .iter()
            .map(|row| row.iter().map(|&(c, v)| f64::from(v) * x[c]).sum())
            .collect()
    }

    /// Exact integer product `self * rhs`.
    pub fn compose(&self, rhs: &IncidenceMatrix) -> Vec<Vec<(usize, i32)>> {
        assert_eq!(self.cols, rhs.rows);
        self.entries
            .iter()
            .map(|row| {
                let mut acc: BTreeMap<usize, i32> = BTreeMap::new();
                for &(k, a) in row {
                    for &(c, b) in &rhs.entries[k] {
                        *acc.entry(c).or_default() += a * b;
                    }
                }
                acc.into_iter().filter(|&(_, v)| v != 0).collect()
            })
            .collect()
    }
}

/// Local incidence matrix (rows: local dofs of `to`, columns: local dofs of `from`).
pub fn local_incidence(geom: &CellGeometry, from: Space, to: Space) -> Result<DMatrix<f64>> {
    let dim = geom.dim;
    let unsupported = || Error::UnsupportedDegree {
        dim,
        k: from.simplex_dim(dim),
    };
    let mut d = DMatrix::zeros(to.local_dim(dim), from.local_dim(dim));
    let edges = local_subsimplices(dim, 1);
    let edge_index = |a: usize, b: usize| edges.iter().position(|e| e[0] == a && e[1] == b).unwrap();
    match (from, to) {
        (Space::Lagrange, Space::Nedelec) | (Space::Lagrange, Space::RaviartThomas) => {
            if to == Space::RaviartThomas && dim != 2 {
                return Err(unsupported());
            }
            for (e, ij) in edges.iter().enumerate() {
                d[(e, ij[0])] = -1.0;
                d[(e, ij[1])] = 1.0;
            }
        }
        (Space::Nedelec, Space::RaviartThomas) if dim == 3 => {
            for (f, ijk) in local_subsimplices(3, 2).iter().enumerate() {
                let (i, j, k) = (ijk[0], ijk[1], ijk[2]);
                d[(f, edge_index(i, j))] = 1.0;
                d[(f, edge_index(j, k))] = 1.0;
                d[(f, edge_index(i, k))] = -1.0;
            }
        }
        (Space::Nedelec, Space::Constant) if dim == 2 => {
            let t1 = geom.edge_vector(0, 1);
            let t2 = geom.edge_vector(0, 2);
            let orient = (t1.x * t2.y - t1.y * t2.x).signum();
            d[(0, edge_index(0, 1))] = orient;
            d[(0, edge_index(1, 2))] = orient;
            d[(0, edge_index(0, 2))] = -orient;
        }
        (Space::RaviartThomas, Space::Constant) => {
            for f in 0..=dim {
                d[(0, f)] = geom.facet_signs[f];
            }
        }
        _ => return Err(unsupported()),
    }
    Ok(d)
}

/// Global incidence matrix from the `k`-form space to the `(k+1)`-form space.
pub fn incidence(mesh: &MeshComplex, k: usize) -> Result<IncidenceMatrix> {
    let dim = mesh.dim();
    let from = Space::for_degree(dim, k)?;
    let to = Space::for_degree(dim, k + 1)?;
    incidence_between(mesh, from, to)
}

pub fn incidence_between(mesh: &MeshComplex, from: Space, to: Space) -> Result<IncidenceMatrix> {
    let dim = mesh.dim();
    let (kf, kt) = (from.simplex_dim(dim), to.simplex_dim(dim));
    let rows = mesh.num_simplices(kt);
    let cols = mesh.num_simplices(kf);
    let mut maps: Vec<BTreeMap<usize, i32>> = vec![BTreeMap::new(); rows];
    for c in 0..mesh.num_cells() {
        let geom = mesh.cell_geometry(c)?;
        let local = local_incidence(&geom, from, to)?;
        let gt = mesh.cell_simplices(kt, c);
        let gf = mesh.cell_simplices(kf, c);
        for r in 0..local.nrows() {
            for q in 0..local.ncols() {
                let v = local[(r, q)];
                if v != 0.0 {
                    maps[gt[r]].insert(gf[q], v as i32);
                }
            }
        }
    }
    Ok(IncidenceMatrix {
        from,
        to,
        rows,
        cols,
        entries: maps.into_iter().map(|m| m.into_iter().collect()).collect(),
    })
}

/// Values and exterior derivatives of all local basis functions at a point.
#[derive(Clone, Debug)]
pub struct WhitneyBasisEval {
    pub space: Space,
    pub values: Vec<Proxy>,
    pub derivatives: Vec<Proxy>,
}

fn scalar(v: f64) -> Proxy {
    Vector3::new(v, 0.0, 0.0)
}

/// Basis evaluation from barycentric coordinates (no inside check).
pub fn basis_at(geom: &CellGeometry, space: Space, lambda: &[f64]) -> WhitneyBasisEval {
    let g = &geom.grad_lambda;
    let dim = geom.dim;
    let (values, derivatives) = match space {
        Space::Lagrange => (lambda.iter().map(|&l| scalar(l)).collect(), g.clone()),
        Space::Nedelec => local_subsimplices(dim, 1)
            .iter()
            .map(|e| {
                let (i, j) = (e[0], e[1]);
                let w = g[j] * lambda[i] - g[i] * lambda[j];
                let c = g[i].cross(&g[j]) * 2.0;
                if dim == 3 {
                    (w, c)
                } else {
                    (w, scalar(c.z))
                }
            })
            .unzip(),
        Space::RaviartThomas if dim == 2 => local_subsimplices(2, 1)
            .iter()
            .map(|e| {
                let (i, j) = (e[0], e[1]);
                let w = g[j] * lambda[i] - g[i] * lambda[j];
                let div = 2.0 * g[i].cross(&g[j]).z;
                (Vector3::new(w.y, -w.x, 0.0), scalar(div))
            })
            .unzip(),
        Space::RaviartThomas => local_subsimplices(3, 2)
            .iter()
            .map(|f| {
                let (i, j, k) = (f[0], f[1], f[2]);
                let v = (g[j].cross(&g[k]) * lambda[i]
                    + g[k].cross(&g[i]) * lambda[j]
                    + g[i].cross(&g[j]) * lambda[k])
                    * 2.0;
                let div = 6.0 * g[i].dot(&g[j].cross(&g[k]));
                (v, scalar(div))
            })
            .unzip(),
        Space::Constant => (vec![scalar(1.0 / geom.volume)], vec![scalar(0.0)]),
    };
    WhitneyBasisEval {
        space,
        values,
        derivatives,
    }
}

/// Evaluates all local basis functions of `space` at the physical point `x`.
pub fn eval_basis(geom: &CellGeometry, space: Space, x: &Point) -> Result<WhitneyBasisEval> {
    let lambda = geom.barycentric(x);
    if let Some(&l) = lambda.iter().find(|&&l| l < -1e-12) {
        return Err(Error::PointOutsideCell {
            cell: geom.cell,
            lambda: l,
        });
    }
    Ok(basis_at(geom, space, &lambda))
}

/// Degree-of-freedom functional of `space` on the simplex with the given
/// sorted vertices, applied to a pointwise field `f`.
pub fn dof_functional<F>(dim: usize, space: Space, points: &[Point], rule: &SimplexRule, f: F) -> f64
where
    F: Fn(&Point) -> Proxy,
{
    match space {
        Space::Lagrange => f(&points[0]).x,
        Space::Nedelec => {
            let t = points[1] - points[0];
            let len = t.norm();
            let tau = t / len;
            rule.integrate(points, len, |x| f(x).dot(&tau))
        }
        Space::RaviartThomas => {
            let n = facet_normal(dim, points);
            rule.integrate(points, simplex_measure(points), |x| f(x).dot(&n))
        }
        Space::Constant => rule.integrate(points, simplex_measure(points), |x| f(x).x),
    }
}

/// Local dofs of `f` on the cell (in local sub-simplex order).
pub fn local_interpolate<F>(geom: &CellGeometry, space: Space, f: F) -> Vec<f64>
where
    F: Fn(&Point) -> Proxy,
{
    let k = space.simplex_dim(geom.dim);
    let rule = SimplexRule::new(k, DOF_QUADRATURE_DEGREE);
    (0..space.local_dim(geom.dim))
        .map(|s| dof_functional(geom.dim, space, &geom.subsimplex_points(k, s), &rule, &f))
        .collect()
}

/// Canonical interpolation of `field` onto `space` (global dof vector).
pub fn canonical_interpolate(mesh: &MeshComplex, space: Space, field: &Field) -> Vec<f64> {
    let dim = mesh.dim();
    let k = space.simplex_dim(dim);
    let rule = SimplexRule::new(k, DOF_QUADRATURE_DEGREE);
    (0..mesh.num_simplices(k))
        .map(|s| dof_functional(dim, space, &mesh.simplex_points(k, s), &rule, |x| field.eval(x)))
        .collect()
}

/// Value of the discrete function with local dofs `dofs` at barycentric `lambda`.
pub fn eval_local_function(geom: &CellGeometry, space: Space, dofs: &[f64], lambda: &[f64]) -> (Proxy, Proxy) {
    let b = basis_at(geom, space, lambda);
    let v = b.values.iter().zip(dofs).map(|(p, c)| p * *c).sum();
    let d = b.derivatives.iter().zip(dofs).map(|(p, c)| p * *c).sum();
    (v, d)
}

/// Which bilinear form a local matrix represents.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormKind {
    Stiffness,
    Mass,
    Safe,
    SafeOracle,
}

/// Dense element matrix with `matrix[(i, j)] = a(phi_j, phi_i)`: rows index
/// test functions, columns trial functions.
#[derive(Clone, Debug)]
pub struct LocalFormMatrix {
    pub cell: usize,
    pub space: Space,
    pub kind: FormKind,
    pub matrix: DMatrix<f64>,
}

/// `(d phi_j, d phi_i)_T`; the derivative of a lowest-order function is
/// constant on the cell, so a single evaluation is exact.
pub fn local_stiffness(geom: &CellGeometry, space: Space) -> LocalFormMatrix {
    let lambda = vec![1.0 / (geom.dim + 1) as f64; geom.dim + 1];
    let b = basis_at(geom, space, &lambda);
    let n = b.derivatives.len();
    let matrix = DMatrix::from_fn(n, n, |i, j| geom.volume * b.derivatives[i].dot(&b.derivatives[j]));
    LocalFormMatrix {
        cell: geom.cell,
        space,
        kind: FormKind::Stiffness,
        matrix,
    }
}

/// `(w phi_j, phi_i)_T` with a pointwise weight (use `|_| 1.0` for the plain
/// mass matrix).
pub fn local_weighted_mass<W>(geom: &CellGeometry, space: Space, weight: W, degree: usize) -> LocalFormMatrix
where
    W: Fn(&Point) -> f64,
{
    let rule = SimplexRule::new(geom.dim, degree);
    let n = space.local_dim(geom.dim);
    let mut matrix = DMatrix::zeros(n, n);
    for (p, w) in rule.points.iter().zip(&rule.weights) {
        let lambda = &p[..=geom.dim];
        let x: Point = geom.vertices.iter().zip(lambda).map(|(v, l)| v * *l).sum();
        let b = basis_at(geom, space, lambda);
        let scale = w * geom.volume * weight(&x);
        for i in 0..n {
            for j in 0..n {
                matrix[(i, j)] += scale * b.values[i].dot(&b.values[j]);
            }
        }
    }
    LocalFormMatrix {
        cell: geom.cell,
        space,
        kind: FormKind::Mass,
        matrix,
    }
}

/// `(phi_j, phi_i)_T`, exact (integrand of degree at most 2).
pub fn local_mass(geom: &CellGeometry, space: Space) -> LocalFormMatrix {
    local_weighted_mass(geom, space, |_| 1.0, 2)
}
