//! Exponential averages, harmonic averages, per-cell coefficient data and the
//! element-local simplex-averaged operator `H` and fitted flux `J`.

mod bernoulli;
mod divdiff;

pub use bernoulli::{bernoulli, bernoulli1, bernoulli2, bernoulli3, bernoulli_limit, BernoulliValue, SINGULAR_TOLERANCE};
pub use divdiff::{exp_divided_difference, exp_simplex_average, ScaledExp};

use nalgebra::{DMatrix, Vector3};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::mesh::{CellGeometry, Point};
use crate::quadrature::SimplexRule;
use crate::whitney::{local_incidence, Space};

/// Quadrature degree of the cell mean of `alpha`.
pub const ALPHA_MEAN_DEGREE: usize = 4;

/// `avg_S exp(theta . x)` over the simplex with the given vertices.
pub fn exp_average(points: &[Point], theta: &Vector3<f64>) -> ScaledExp {
    let z: Vec<f64> = points.iter().map(|p| theta.dot(p)).collect();
    exp_simplex_average(&z)
}

/// `H_S(alpha, theta) = alpha / avg_S exp(theta . x)`.
pub fn harmonic_average(points: &[Point], alpha_bar: f64, theta: &Vector3<f64>) -> f64 {
    let avg = exp_average(points, theta);
    alpha_bar / avg.mantissa * (-avg.shift).exp()
}

/// Piecewise-constant coefficient data of one cell.
///
/// `theta_bar` is `None` in the vanishing-diffusion limit `alpha_bar = 0`,
/// where only `beta_bar` is meaningful.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellCoefficients {
    pub alpha_bar: f64,
    pub theta_bar: Option<Vector3<f64>>,
    pub beta_bar: Vector3<f64>,
}

impl CellCoefficients {
    pub fn new(alpha_bar: f64, theta_bar: Vector3<f64>) -> Result<Self> {
        if !(alpha_bar > 0.0) {
            return Err(Error::NonPositiveDiffusion {
                cell: None,
                value: alpha_bar,
            });
        }
        Ok(Self {
            alpha_bar,
            theta_bar: Some(theta_bar),
            beta_bar: theta_bar * alpha_bar,
        })
    }

    /// From `alpha_bar >= 0` and `beta_bar`; `alpha_bar = 0` gives the upwind limit.
    pub fn from_beta(alpha_bar: f64, beta_bar: Vector3<f64>) -> Result<Self> {
        if alpha_bar == 0.0 {
            return Ok(Self::upwind_limit(beta_bar));
        }
        Self::new(alpha_bar, beta_bar / alpha_bar).map(|c| Self { beta_bar, ..c })
    }

    pub fn upwind_limit(beta_bar: Vector3<f64>) -> Self {
        Self {
            alpha_bar: 0.0,
            theta_bar: None,
            beta_bar,
        }
    }

    pub fn is_limit(&self) -> bool {
        self.theta_bar.is_none()
    }
}

/// `alpha_bar` = cell quadrature mean of `alpha`, `theta_bar = beta(x_c) / alpha(x_c)`.
pub fn cell_coefficients(geom: &CellGeometry, alpha: &Field, beta: &Field) -> Result<CellCoefficients> {
    let rule = SimplexRule::new(geom.dim, ALPHA_MEAN_DEGREE);
    let mean = rule.integrate(&geom.vertices, 1.0, |x| alpha.eval(x).x);
    let at_center = alpha.eval(&geom.barycenter).x;
    for value in [at_center, mean] {
        if !(value > 0.0) {
            return Err(Error::NonPositiveDiffusion {
                cell: Some(geom.cell),
                value,
            });
        }
    }
    let theta = beta.eval(&geom.barycenter) / at_center;
    Ok(CellCoefficients {
        alpha_bar: mean,
        theta_bar: Some(theta),
        beta_bar: theta * mean,
    })
}

/// Element matrices of the simplex-averaged operator and the fitted flux.
#[derive(Clone, Debug)]
pub struct LocalExpOperators {
    pub k: usize,
    /// `1 / avg_S exp(theta . x)` over the local `k`-simplices.
    pub h_k: Vec<f64>,
    /// Same over the local `(k+1)`-simplices.
    pub h_k1: Vec<f64>,
    /// `J^k = H^{k+1} D^k diag(avg exp)`, rows `(k+1)`-dofs, columns `k`-dofs.
    pub j: DMatrix<f64>,
}

/// Exponential averages of all local `k`-simplices of the cell.
pub fn local_exp_averages(geom: &CellGeometry, k: usize, theta: &Vector3<f64>) -> Vec<ScaledExp> {
    let count = crate::mesh::local_subsimplices(geom.dim, k).len();
    (0..count)
        .map(|s| exp_average(&geom.subsimplex_points(k, s), theta))
        .collect()
}

pub fn local_exp_operators(geom: &CellGeometry, k: usize, theta: &Vector3<f64>) -> Result<LocalExpOperators> {
    let from = Space::for_degree(geom.dim, k)?;
    let to = Space::for_degree(geom.dim, k + 1)?;
    let d = local_incidence(geom, from, to)?;
    let lo = local_exp_averages(geom, k, theta);
    let hi = local_exp_averages(geom, k + 1, theta);
    let j = DMatrix::from_fn(d.nrows(), d.ncols(), |r, c| {
        if d[(r, c)] == 0.0 {
            0.0
        } else {
            d[(r, c)] * lo[c].ratio(hi[r])
        }
    });
    Ok(LocalExpOperators {
        k,
        h_k: lo.iter().map(|a| 1.0 / a.value()).collect(),
        h_k1: hi.iter().map(|a| 1.0 / a.value()).collect(),
        j,
    })
}
