//! SAFE element matrices, their operator-route oracle, and global assembly of
//! primal and dual systems with essential and natural boundary conditions.
//!
//! Every SAFE element form has the shape
//!
//! ```text
//! a_T(w, v) = sum_{S, S''} W_{S S''} [ sum_{S' < S} o_{S S'} R(S', S) l_{S'}(w) ] delta_{S''}(v)
//! ```
//!
//! where `S, S''` run over the local `(k+1)`-simplices, `S'` over the facets of
//! `S`, `o` is the local incidence, `W` the graph-Laplacian coupling and
//! `R(S', S) = alpha avg_{S'} e^{theta.x} / avg_S e^{theta.x}` a Bernoulli
//! kernel evaluated at `beta . (p - b)` for the vertices `p` of `S` other than
//! a base vertex `b` of `S'` (the vertex opposite `S'` last).

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::{DMatrix, Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::exponential::{bernoulli, cell_coefficients, local_exp_operators, CellCoefficients};
use crate::field::Field;
use crate::mesh::{local_subsimplices, opposite_vertex, CellGeometry, MeshComplex, Point};
use crate::quadrature::SimplexRule;
use crate::sparse::CsrMatrix;
use crate::whitney::{
    basis_at, canonical_interpolate, local_incidence, local_stiffness, local_weighted_mass, DofMap, FormKind,
    LocalFormMatrix, Space,
};

/// Quadrature degree for loads, `gamma`-mass and Neumann terms.
pub const LOAD_QUADRATURE_DEGREE: usize = 4;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Scheme {
    #[default]
    Primal,
    Dual,
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "primal" => Ok(Self::Primal),
            "dual" => Ok(Self::Dual),
            other => Err(Error::Config(format!("unknown scheme '{other}' (expected primal or dual)"))),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Primal => "primal",
            Self::Dual => "dual",
        })
    }
}

/// Graph-Laplacian weights of one cell.
#[derive(Clone, Debug, PartialEq)]
pub enum GraphWeights {
    /// `omega_E = -(grad lambda_i, grad lambda_j)_T` per local edge.
    Edge(Vec<f64>),
    /// `omega_{FF'} = -1/2 |curl phi_E|^2_T`, `E` the edge shared by `F != F'`;
    /// zero diagonal. Refers to outward-oriented faces.
    FacePair(DMatrix<f64>),
    /// `omega_T = 1 / |T|`.
    Top(f64),
}

pub fn graph_weights(geom: &CellGeometry, k: usize) -> Result<GraphWeights> {
    let g = &geom.grad_lambda;
    match (geom.dim, k) {
        (_, 0) => Ok(GraphWeights::Edge(
            local_subsimplices(geom.dim, 1)
                .iter()
                .map(|e| -geom.volume * g[e[0]].dot(&g[e[1]]))
                .collect(),
        )),
        (3, 1) => {
            let faces = local_subsimplices(3, 2);
            let w = DMatrix::from_fn(4, 4, |f, h| {
                if f == h {
                    return 0.0;
                }
                let shared: Vec<usize> = faces[f].iter().copied().filter(|v| faces[h].contains(v)).collect();
                -2.0 * g[shared[0]].cross(&g[shared[1]]).norm_squared() * geom.volume
            });
            Ok(GraphWeights::FacePair(w))
        }
        (d, k) if k + 1 == d => Ok(GraphWeights::Top(1.0 / geom.volume)),
        (dim, k) => Err(Error::UnsupportedDegree { dim, k }),
    }
}

impl GraphWeights {
    /// Coupling `W` between local `(k+1)`-dofs in canonical orientation.
    pub fn coupling(&self, geom: &CellGeometry) -> DMatrix<f64> {
        match self {
            Self::Edge(w) => DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(w)),
            Self::FacePair(w) => {
                let o = &geom.facet_signs;
                DMatrix::from_fn(4, 4, |f, h| o[f] * o[h] * w[(f, h)])
            }
            Self::Top(w) => DMatrix::from_element(1, 1, *w),
        }
    }

    /// `sum omega |S| |S'| / |T| n_S n_S'^T`, the identity matrix when the
    /// weights are correct (edges use tangents, faces outward normals).
    pub fn reconstruction(&self, geom: &CellGeometry) -> Matrix3<f64> {
        let mut m = Matrix3::zeros();
        match self {
            Self::Edge(w) => {
                for (e, we) in w.iter().enumerate() {
                    let t = geom.edge_tangents[e] * geom.edge_lengths[e];
                    m += t * t.transpose() * (we / geom.volume);
                }
            }
            Self::FacePair(w) => {
                let n: Vec<Vector3<f64>> = (0..4)
                    .map(|f| geom.facet_normals[f] * geom.facet_signs[f] * geom.facet_areas[f])
                    .collect();
                for f in 0..4 {
                    for h in 0..4 {
                        m += n[f] * n[h].transpose() * (w[(f, h)] / geom.volume);
                    }
                }
            }
            Self::Top(_) => {
                let d = geom.dim;
                for i in 0..d {
                    m[(i, i)] = 1.0;
                }
            }
        }
        m
    }
}

fn form_spaces(dim: usize, k: usize) -> Result<(Space, Space)> {
    Ok((Space::for_degree(dim, k)?, Space::for_degree(dim, k + 1)?))
}

/// `R(S', S)` for every nonzero entry of the local incidence.
fn kernel_matrix(geom: &CellGeometry, k: usize, coeffs: &CellCoefficients, d: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let lo = local_subsimplices(geom.dim, k);
    let hi = local_subsimplices(geom.dim, k + 1);
    let beta = coeffs.beta_bar;
    let mut c = DMatrix::zeros(d.nrows(), d.ncols());
    let mut args = Vec::with_capacity(3);
    for (r, s) in hi.iter().enumerate() {
        for (q, facet) in lo.iter().enumerate() {
            if d[(r, q)] == 0.0 {
                continue;
            }
            let opp = *s.iter().find(|v| !facet.contains(v)).expect("facet of a simplex");
            let base = geom.vertices[facet[0]];
            args.clear();
            args.extend(facet[1..].iter().map(|&p| beta.dot(&(geom.vertices[p] - base))));
            args.push(beta.dot(&(geom.vertices[opp] - base)));
            c[(r, q)] = d[(r, q)] * bernoulli(coeffs.alpha_bar, &args)?;
        }
    }
    Ok(c)
}

/// SAFE element matrix through the Bernoulli kernels; `alpha_bar = 0` gives
/// the upwind limit.
pub fn local_safe_matrix(geom: &CellGeometry, k: usize, coeffs: &CellCoefficients) -> Result<LocalFormMatrix> {
    let (from, to) = form_spaces(geom.dim, k)?;
    let weights = graph_weights(geom, k)?;
    let d = local_incidence(geom, from, to)?;
    let c = kernel_matrix(geom, k, coeffs, &d)?;
    let matrix = d.transpose() * weights.coupling(geom) * c;
    Ok(LocalFormMatrix {
        cell: geom.cell,
        space: from,
        kind: FormKind::Safe,
        matrix,
    })
}

/// Constant reconstruction `bar Pi^{k+1}` applied to local `(k+1)`-dofs.
pub fn constant_reconstruction(geom: &CellGeometry, weights: &GraphWeights, dofs: &[f64]) -> Vector3<f64> {
    match weights {
        GraphWeights::Edge(w) => (0..w.len())
            .map(|e| geom.edge_tangents[e] * (w[e] * geom.edge_lengths[e] / geom.volume * dofs[e]))
            .sum(),
        GraphWeights::FacePair(w) => {
            let mut v = Vector3::zeros();
            for f in 0..4 {
                let out_f = geom.facet_signs[f] * dofs[f];
                for h in 0..4 {
                    let n = geom.facet_normals[h] * geom.facet_signs[h];
                    v += n * (w[(f, h)] * geom.facet_areas[h] / geom.volume * out_f);
                }
            }
            v
        }
        GraphWeights::Top(_) => Vector3::new(dofs[0] / geom.volume, 0.0, 0.0),
    }
}

/// SAFE element matrix through `(alpha bar Pi^{k+1} J^k w, d v)_T` with `alpha`
/// integrated pointwise. Independent of the Bernoulli kernels.
pub fn local_safe_oracle(geom: &CellGeometry, k: usize, coeffs: &CellCoefficients, alpha: &Field) -> Result<LocalFormMatrix> {
    let theta = match coeffs.theta_bar {
        Some(t) if coeffs.alpha_bar > 0.0 => t,
        _ => {
            return Err(Error::NonPositiveDiffusion {
                cell: Some(geom.cell),
                value: coeffs.alpha_bar,
            })
        }
    };
    let (from, _) = form_spaces(geom.dim, k)?;
    let weights = graph_weights(geom, k)?;
    let j = local_exp_operators(geom, k, &theta)?.j;
    let rule = SimplexRule::new(geom.dim, 8);
    let alpha_integral = rule.integrate(&geom.vertices, geom.volume, |x| alpha.eval(x).x);
    let centre = vec![1.0 / (geom.dim + 1) as f64; geom.dim + 1];
    let dv = basis_at(geom, from, &centre).derivatives;
    let n = j.ncols();
    let mut matrix = DMatrix::zeros(n, n);
    for col in 0..n {
        let y: Vec<f64> = j.column(col).iter().copied().collect();
        let flux = constant_reconstruction(geom, &weights, &y);
        for row in 0..n {
            matrix[(row, col)] = alpha_integral * flux.dot(&dv[row]);
        }
    }
    Ok(LocalFormMatrix {
        cell: geom.cell,
        space: from,
        kind: FormKind::SafeOracle,
        matrix,
    })
}

/// Coefficient fields of `L u = d*(alpha du + i*_beta u) + gamma u` (primal) or
/// its formal adjoint (dual).
#[derive(Clone, Debug)]
pub struct Coefficients {
    pub alpha: Field,
    pub beta: Field,
    pub gamma: Field,
}

/// Part of the boundary, selected by facet barycenter.
#[derive(Clone, Default)]
pub enum BoundaryRegion {
    #[default]
    Empty,
    Whole,
    Where(Arc<dyn Fn(&Point) -> bool + Send + Sync>),
}

impl BoundaryRegion {
    pub fn contains(&self, facet_barycenter: &Point) -> bool {
        match self {
            Self::Empty => false,
            Self::Whole => true,
            Self::Where(p) => p(facet_barycenter),
        }
    }
}

impl fmt::Debug for BoundaryRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Empty => f.write_str("Empty"),
            Self::Whole => f.write_str("Whole"),
            Self::Where(_) => f.write_str("Where(..)"),
        }
    }
}

/// Global matrix and load vector with boundary-condition bookkeeping.
#[derive(Clone, Debug)]
pub struct SparseSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub dofs: DofMap,
    pub scheme: Scheme,
    /// Dofs on the essential boundary.
    pub essential: Vec<usize>,
    /// Prescribed values, filled by [`apply_essential_bc`].
    pub constrained: Vec<(usize, f64)>,
}

/// Global SAFE matrix with per-cell coefficients supplied by `coeffs`.
pub fn assemble_with<C>(mesh: &MeshComplex, k: usize, gamma: &Field, scheme: Scheme, mut coeffs: C) -> Result<CsrMatrix>
where
    C: FnMut(&CellGeometry) -> Result<CellCoefficients>,
{
    let space = Space::for_degree(mesh.dim(), k)?;
    let dofs = DofMap::new(mesh, space);
    let n = dofs.num_dofs();
    let local_n = space.local_dim(mesh.dim());
    let mut triplets = Vec::with_capacity(mesh.num_cells() * local_n * local_n * 2);
    for c in 0..mesh.num_cells() {
        let geom = mesh.cell_geometry(c)?;
        let a = local_safe_matrix(&geom, k, &coeffs(&geom)?)?.matrix;
        let m = local_weighted_mass(&geom, space, |x| gamma.eval(x).x, LOAD_QUADRATURE_DEGREE).matrix;
        let map = dofs.cell_dofs(c);
        for (i, &(gi, si)) in map.iter().enumerate() {
            for (j, &(gj, sj)) in map.iter().enumerate() {
                triplets.push((gi, gj, si * sj * (a[(i, j)] + m[(i, j)])));
            }
        }
    }
    let primal = CsrMatrix::from_triplets(n, n, &triplets);
    Ok(match scheme {
        Scheme::Primal => primal,
        Scheme::Dual => primal.transpose(),
    })
}

/// Global SAFE matrix with `alpha_bar`, `theta_bar` from [`cell_coefficients`].
pub fn assemble(mesh: &MeshComplex, k: usize, data: &Coefficients, scheme: Scheme) -> Result<CsrMatrix> {
    assemble_with(mesh, k, &data.gamma, scheme, |geom| cell_coefficients(geom, &data.alpha, &data.beta))
}

/// Same mesh and data in the vanishing-diffusion limit: `beta_bar = beta(x_c)`.
pub fn assemble_upwind_limit(mesh: &MeshComplex, k: usize, beta: &Field, gamma: &Field, scheme: Scheme) -> Result<CsrMatrix> {
    assemble_with(mesh, k, gamma, scheme, |geom| {
        Ok(CellCoefficients::upwind_limit(beta.eval(&geom.barycenter)))
    })
}

/// `sum_T alpha_bar_T (d phi_j, d phi_i)_T + (gamma phi_j, phi_i)`, the
/// diffusion-only reference matrix.
pub fn assemble_stiffness_mass(mesh: &MeshComplex, k: usize, alpha: &Field, gamma: &Field) -> Result<CsrMatrix> {
    let space = Space::for_degree(mesh.dim(), k)?;
    let dofs = DofMap::new(mesh, space);
    let mut triplets = Vec::new();
    for c in 0..mesh.num_cells() {
        let geom = mesh.cell_geometry(c)?;
        let coeffs = cell_coefficients(&geom, alpha, &Field::zero(true))?;
        let s = local_stiffness(&geom, space).matrix * coeffs.alpha_bar;
        let m = local_weighted_mass(&geom, space, |x| gamma.eval(x).x, LOAD_QUADRATURE_DEGREE).matrix;
        let map = dofs.cell_dofs(c);
        for (i, &(gi, si)) in map.iter().enumerate() {
            for (j, &(gj, sj)) in map.iter().enumerate() {
                triplets.push((gi, gj, si * sj * (s[(i, j)] + m[(i, j)])));
            }
        }
    }
    Ok(CsrMatrix::from_triplets(dofs.num_dofs(), dofs.num_dofs(), &triplets))
}

/// Local vertex indices of facet `f`.
fn facet_vertices(dim: usize, f: usize) -> Vec<usize> {
    let skip = opposite_vertex(dim, f);
    (0..=dim).filter(|&v| v != skip).collect()
}

/// `(f, phi_S) + <g, tr phi_S>_{Gamma_N}`.
///
/// Traces: `v` for 0-forms, `v . n` for `(n-1)`-forms (with scalar `g`) and
/// `n x v` for 3D 1-forms (with vector `g`), `n` the outward normal.
pub fn assemble_load(mesh: &MeshComplex, k: usize, f: &Field, neumann: Option<(&Field, &BoundaryRegion)>) -> Result<Vec<f64>> {
    let dim = mesh.dim();
    let space = Space::for_degree(dim, k)?;
    let dofs = DofMap::new(mesh, space);
    let mut load = vec![0.0; dofs.num_dofs()];
    let cell_rule = SimplexRule::new(dim, LOAD_QUADRATURE_DEGREE);
    let facet_rule = SimplexRule::new(dim - 1, LOAD_QUADRATURE_DEGREE);
    for c in 0..mesh.num_cells() {
        let geom = mesh.cell_geometry(c)?;
        let map = dofs.cell_dofs(c);
        for (p, w) in cell_rule.points.iter().zip(&cell_rule.weights) {
            let lambda = &p[..=dim];
            let x: Point = geom.vertices.iter().zip(lambda).map(|(v, l)| v * *l).sum();
            let fx = f.eval(&x);
            let b = basis_at(&geom, space, lambda);
            for (i, &(gi, si)) in map.iter().enumerate() {
                load[gi] += si * w * geom.volume * fx.dot(&b.values[i]);
            }
        }
    }
    if let Some((g, region)) = neumann {
        for (c, facet) in mesh.boundary_facets() {
            let geom = mesh.cell_geometry(c)?;
            let verts = facet_vertices(dim, facet);
            let pts: Vec<Point> = verts.iter().map(|&v| geom.vertices[v]).collect();
            let centre: Point = pts.iter().sum::<Point>() / pts.len() as f64;
            if !region.contains(&centre) {
                continue;
            }
            let normal = geom.facet_normals[facet] * geom.facet_signs[facet];
            let area = geom.facet_areas[facet];
            let map = dofs.cell_dofs(c);
            for (p, w) in facet_rule.points.iter().zip(&facet_rule.weights) {
                let mut lambda = vec![0.0; dim + 1];
                for (slot, &v) in verts.iter().enumerate() {
                    lambda[v] = p[slot];
                }
                let x: Point = geom.vertices.iter().zip(&lambda).map(|(v, l)| v * *l).sum();
                let gx = g.eval(&x);
                let b = basis_at(&geom, space, &lambda);
                for (i, &(gi, si)) in map.iter().enumerate() {
                    let v = b.values[i];
                    let pairing = match space {
                        Space::Lagrange => gx.x * v.x,
                        Space::Nedelec if dim == 3 => gx.dot(&normal.cross(&v)),
                        Space::RaviartThomas => gx.x * v.dot(&normal),
                        _ => 0.0,
                    };
                    load[gi] += si * w * area * pairing;
                }
            }
        }
    }
    Ok(load)
}

/// Dofs whose simplex lies on a boundary facet inside `region`.
pub fn essential_dofs(mesh: &MeshComplex, k: usize, region: &BoundaryRegion) -> Result<Vec<usize>> {
    let dim = mesh.dim();
    let space = Space::for_degree(dim, k)?;
    let kd = space.simplex_dim(dim);
    let mut flagged = vec![false; mesh.num_simplices(kd)];
    for (c, facet) in mesh.boundary_facets() {
        let verts = facet_vertices(dim, facet);
        let pts: Vec<Point> = verts.iter().map(|&v| mesh.vertices()[mesh.cell_vertices(c)[v]]).collect();
        let centre: Point = pts.iter().sum::<Point>() / pts.len() as f64;
        if !region.contains(&centre) {
            continue;
        }
        for (s, local) in local_subsimplices(dim, kd).iter().enumerate() {
            if local.iter().all(|v| verts.contains(v)) {
                flagged[mesh.cell_simplices(kd, c)[s]] = true;
            }
        }
    }
    Ok(flagged.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect())
}

/// Dof values of `trace` on the given dofs (canonical interpolation).
pub fn boundary_values(mesh: &MeshComplex, k: usize, dofs: &[usize], trace: &Field) -> Result<Vec<(usize, f64)>> {
    let space = Space::for_degree(mesh.dim(), k)?;
    if dofs.is_empty() {
        return Ok(Vec::new());
    }
    let all = canonical_interpolate(mesh, space, trace);
    Ok(dofs.iter().map(|&d| (d, all[d])).collect())
}

/// Full system: matrix, load and essential-boundary dof list (no values applied yet).
pub fn build_system(
    mesh: &MeshComplex,
    k: usize,
    data: &Coefficients,
    scheme: Scheme,
    f: &Field,
    gamma_0: &BoundaryRegion,
    neumann: Option<(&Field, &BoundaryRegion)>,
) -> Result<SparseSystem> {
    let space = Space::for_degree(mesh.dim(), k)?;
    Ok(SparseSystem {
        matrix: assemble(mesh, k, data, scheme)?,
        rhs: assemble_load(mesh, k, f, neumann)?,
        dofs: DofMap::new(mesh, space),
        scheme,
        essential: essential_dofs(mesh, k, gamma_0)?,
        constrained: Vec::new(),
    })
}

/// Row replacement with column elimination: constrained rows become identity
/// rows, their columns are moved to the right-hand side.
pub fn apply_essential_bc(system: &mut SparseSystem, values: &[(usize, f64)]) -> Result<()> {
    let n = system.matrix.nrows();
    let mut prescribed: Vec<Option<f64>> = vec![None; n];
    for &(d, v) in values {
        if d >= n {
            return Err(Error::DimensionMismatch { expected: n, found: d });
        }
        prescribed[d] = Some(v);
    }
    if let Some(&d) = system.essential.iter().find(|&&d| prescribed[d].is_none()) {
        return Err(Error::MissingBoundaryValue(d));
    }
    let lifted: Vec<f64> = prescribed.iter().map(|v| v.unwrap_or(0.0)).collect();
    let correction = system.matrix.matvec(&lifted);
    for r in 0..n {
        let (cols, vals) = system.matrix.row_values_mut(r);
        match prescribed[r] {
            Some(v) => {
                for (c, a) in cols.iter().zip(vals.iter_mut()) {
                    *a = if *c == r { 1.0 } else { 0.0 };
                }
                if !cols.contains(&r) {
                    return Err(Error::Singular(format!("constrained dof {r} has no diagonal entry")));
                }
                system.rhs[r] = v;
            }
            None => {
                system.rhs[r] -= correction[r];
                for (c, a) in cols.iter().zip(vals.iter_mut()) {
                    if prescribed[*c].is_some() {
                        *a = 0.0;
                    }
                }
            }
        }
    }
    let mut constrained: Vec<(usize, f64)> = prescribed
        .iter()
        .enumerate()
        .filter_map(|(d, v)| v.map(|v| (d, v)))
        .collect();
    constrained.sort_by_key(|&(d, _)| d);
    system.constrained = constrained;
    Ok(())
}
