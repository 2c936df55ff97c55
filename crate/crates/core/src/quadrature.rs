//! Gauss rules on reference intervals and simplices.
//!
//! Simplex rules are collapsed (Duffy) tensor products of Gauss-Legendre
//! rules, so any degree of exactness is available. Points are returned in
//! barycentric coordinates, which makes mapping onto physical sub-simplices
//! of a cell a convex combination of vertices.

use nalgebra::Vector3;

/// Gauss-Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(points: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(points > 0);
    let m = points;
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        // Chebyshev-like initial guess, refined by Newton on P_m
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=m {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = 0.5 * (1.0 - x);
        nodes[m - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[m - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

/// A quadrature rule on the reference `dim`-simplex, points in barycentric
/// coordinates (length `dim + 1`), weights summing to 1 so that the rule
/// computes averages. Multiply by the measure to get integrals.
#[derive(Clone, Debug)]
pub struct SimplexRule {
    pub dim: usize,
    pub points: Vec<[f64; 4]>,
    pub weights: Vec<f64>,
}

impl SimplexRule {
    /// Rule exact for polynomials of total degree `degree`.
    pub fn new(dim: usize, degree: usize) -> Self {
        assert!(dim <= 3);
        if dim == 0 {
            return Self {
                dim,
                points: vec![[1.0, 0.0, 0.0, 0.0]],
                weights: vec![1.0],
            };
        }
        // the collapse adds at most dim-1 to the degree in the outer variables
        let m = (degree + dim) / 2 + 1;
        let (x, w) = gauss_legendre(m);
        let mut points = Vec::new();
        let mut weights = Vec::new();
        let factorial = [1.0, 1.0, 2.0, 6.0][dim];
        match dim {
            1 => {
                for (xi, wi) in x.iter().zip(&w) {
                    points.push([1.0 - xi, *xi, 0.0, 0.0]);
                    weights.push(*wi);
                }
            }
            2 => {
                for (u, wu) in x.iter().zip(&w) {
                    for (v, wv) in x.iter().zip(&w) {
                        let s = u;
                        let t = v * (1.0 - u);
                        points.push([1.0 - s - t, *s, t, 0.0]);
                        weights.push(wu * wv * (1.0 - u) * factorial);
                    }
                }
            }
            _ => {
                for (u, wu) in x.iter().zip(&w) {
                    for (v, wv) in x.iter().zip(&w) {
                        for (q, wq) in x.iter().zip(&w) {
                            let s = u;
                            let t = v * (1.0 - u);
                            let r = q * (1.0 - u) * (1.0 - v);
                            points.push([1.0 - s - t - r, *s, t, r]);
                            weights.push(wu * wv * wq * (1.0 - u).powi(2) * (1.0 - v) * factorial);
                        }
                    }
                }
            }
        }
        Self {
            dim,
            points,
            weights,
        }
    }

    /// Physical quadrature points on the simplex spanned by `vertices`.
    pub fn map(&self, vertices: &[Vector3<f64>]) -> Vec<Vector3<f64>> {
        debug_assert_eq!(vertices.len(), self.dim + 1);
        self.points
            .iter()
            .map(|b| {
                vertices
                    .iter()
                    .enumerate()
                    .fold(Vector3::zeros(), |acc, (i, v)| acc + v * b[i])
            })
            .collect()
    }

    /// Integral of `f` over the simplex spanned by `vertices` with measure `measure`.
    pub fn integrate<F>(&self, vertices: &[Vector3<f64>], measure: f64, mut f: F) -> f64
    where
        F: FnMut(&Vector3<f64>) -> f64,
    {
        let pts = self.map(vertices);
        measure * pts.iter().zip(&self.weights).map(|(p, w)| w * f(p)).sum::<f64>()
    }
}
