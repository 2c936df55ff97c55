//! Linear solves: sparse LU (default) and Jacobi-preconditioned BiCGStab.

use std::fmt;
use std::str::FromStr;

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;

use crate::assembly::SparseSystem;
use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

const REFINEMENT_STEPS: usize = 3;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Method {
    #[default]
    Direct,
    Iterative,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Self::Direct),
            "iterative" => Ok(Self::Iterative),
            other => Err(Error::Config(format!("unknown solver '{other}' (expected direct or iterative)"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Direct => "direct",
            Self::Iterative => "iterative",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveConfig {
    pub method: Method,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            method: Method::Direct,
            tol: 1e-10,
            max_iter: 10_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub solution: Vec<f64>,
    pub relative_residual: f64,
    /// Krylov iterations, or refinement steps for the direct method.
    pub iterations: usize,
    pub method: Method,
}

pub fn solve(system: &SparseSystem, config: &SolveConfig) -> Result<SolveReport> {
    solve_matrix(&system.matrix, &system.rhs, config)
}

pub fn solve_matrix(a: &CsrMatrix, b: &[f64], config: &SolveConfig) -> Result<SolveReport> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    if b.len() != a.nrows() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: b.len(),
        });
    }
    match config.method {
        Method::Direct => direct(a, b, config),
        Method::Iterative => bicgstab(a, b, config),
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn relative_residual(a: &CsrMatrix, x: &[f64], b: &[f64]) -> (Vec<f64>, f64) {
    let ax = a.matvec(x);
    let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    let scale = norm(b);
    let rel = if scale == 0.0 { norm(&r) } else { norm(&r) / scale };
    (r, rel)
}

fn direct(a: &CsrMatrix, b: &[f64], config: &SolveConfig) -> Result<SolveReport> {
    let n = a.nrows();
    if n == 0 {
        return Ok(SolveReport {
            solution: Vec::new(),
            relative_residual: 0.0,
            iterations: 0,
            method: Method::Direct,
        });
    }
    let triplets: Vec<Triplet<usize, usize, f64>> = a
        .triplets()
        .filter(|t| t.2 != 0.0)
        .map(|(r, c, v)| Triplet::new(r, c, v))
        .collect();
    let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| Error::Singular(format!("matrix construction failed: {e:?}")))?;
    let lu = mat
        .sp_lu()
        .map_err(|e| Error::Singular(format!("LU factorization failed: {e:?}")))?;
    let lu_solve = |rhs: &[f64]| -> Vec<f64> {
        let mut m = Mat::<f64>::from_fn(n, 1, |i, _| rhs[i]);
        lu.solve_in_place(m.as_mut());
        (0..n).map(|i| m[(i, 0)]).collect()
    };
    let mut x = lu_solve(b);
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular("zero pivot encountered (non-finite solution)".into()));
    }
    let (mut r, mut rel) = relative_residual(a, &x, b);
    let mut history = vec![rel];
    let mut steps = 0;
    while rel > config.tol && steps < REFINEMENT_STEPS {
        let dx = lu_solve(&r);
        for (xi, di) in x.iter_mut().zip(&dx) {
            *xi += di;
        }
        (r, rel) = relative_residual(a, &x, b);
        history.push(rel);
        steps += 1;
    }
    if !(rel <= config.tol) {
        return Err(Error::NotConverged {
            iterations: steps,
            residual: rel,
            history,
        });
    }
    Ok(SolveReport {
        solution: x,
        relative_residual: rel,
        iterations: steps,
        method: Method::Direct,
    })
}

fn bicgstab(a: &CsrMatrix, b: &[f64], config: &SolveConfig) -> Result<SolveReport> {
    let n = a.nrows();
    let inv_diag: Vec<f64> = a
        .diagonal()
        .iter()
        .map(|&d| if d != 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let precond = |v: &[f64]| -> Vec<f64> { v.iter().zip(&inv_diag).map(|(x, d)| x * d).collect() };
    let b_norm = norm(b);
    let scale = if b_norm == 0.0 { 1.0 } else { b_norm };
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut r_hat = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut history = vec![norm(&r) / scale];
    if history[0] <= config.tol {
        return Ok(SolveReport {
            solution: x,
            relative_residual: history[0],
            iterations: 0,
            method: Method::Iterative,
        });
    }
    for it in 1..=config.max_iter {
        let mut rho_new = dot(&r_hat, &r);
        if rho_new.abs() < 1e-300 {
            r_hat = r.clone();
            rho_new = dot(&r_hat, &r);
            p.iter_mut().for_each(|x| *x = 0.0);
            v.iter_mut().for_each(|x| *x = 0.0);
            (rho, alpha, omega) = (1.0, 1.0, 1.0);
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        let y = precond(&p);
        v = a.matvec(&y);
        alpha = rho / dot(&r_hat, &v);
        let s: Vec<f64> = r.iter().zip(&v).map(|(ri, vi)| ri - alpha * vi).collect();
        for i in 0..n {
            x[i] += alpha * y[i];
        }
        if norm(&s) / scale <= config.tol {
            let (_, rel) = relative_residual(a, &x, b);
            history.push(rel);
            if rel <= config.tol {
                return Ok(SolveReport {
                    solution: x,
                    relative_residual: rel,
                    iterations: it,
                    method: Method::Iterative,
                });
            }
        }
        let z = precond(&s);
        let t = a.matvec(&z);
        let tt = dot(&t, &t);
        omega = if tt > 0.0 { dot(&t, &s) / tt } else { 0.0 };
        for i in 0..n {
            x[i] += omega * z[i];
            r[i] = s[i] - omega * t[i];
        }
        let rel = norm(&r) / scale;
        history.push(rel);
        if !rel.is_finite() {
            break;
        }
        if rel <= config.tol {
            let (_, true_rel) = relative_residual(a, &x, b);
            if true_rel <= config.tol {
                return Ok(SolveReport {
                    solution: x,
                    relative_residual: true_rel,
                    iterations: it,
                    method: Method::Iterative,
                });
            }
            r = b.iter().zip(a.matvec(&x)).map(|(bi, ai)| bi - ai).collect();
        }
        if omega == 0.0 {
            break;
        }
    }
    Err(Error::NotConverged {
        iterations: history.len() - 1,
        residual: *history.last().unwrap(),
        history,
    })
}
