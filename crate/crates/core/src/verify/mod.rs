//! Manufactured-solution studies: error norms, convergence tables and
//! stability metrics.

mod cases;

pub use cases::{builtin_case, builtin_cases, CaseParams, ManufacturedCase, Operator, CASE_NAMES};

use std::fmt::Write as _;

use crate::assembly::{apply_essential_bc, boundary_values, build_system};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::mesh::{MeshComplex, Point};
use crate::quadrature::SimplexRule;
use crate::solver::{solve, SolveConfig, SolveReport};
use crate::whitney::{eval_local_function, DofMap, Space};

/// Cell quadrature degree of the error norms.
pub const NORM_QUADRATURE_DEGREE: usize = 4;

/// `(||u - u_h||_0, ||d(u - u_h)||_0)`; `exact_d` is `du` as a proxy field.
pub fn error_norms(mesh: &MeshComplex, k: usize, u_h: &[f64], exact: &Field, exact_d: &Field) -> Result<(f64, f64)> {
    let space = Space::for_degree(mesh.dim(), k)?;
    let dofs = DofMap::new(mesh, space);
    if u_h.len() != dofs.num_dofs() {
        return Err(Error::DimensionMismatch {
            expected: dofs.num_dofs(),
            found: u_h.len(),
        });
    }
    let rule = SimplexRule::new(mesh.dim(), NORM_QUADRATURE_DEGREE);
    let (mut l2, mut d2) = (0.0, 0.0);
    for c in 0..mesh.num_cells() {
        let geom = mesh.cell_geometry(c)?;
        let local: Vec<f64> = dofs.cell_dofs(c).iter().map(|&(g, s)| s * u_h[g]).collect();
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            let lambda = &p[..=mesh.dim()];
            let x: Point = geom.vertices.iter().zip(lambda).map(|(v, l)| v * *l).sum();
            let (v, dv) = eval_local_function(&geom, space, &local, lambda);
            l2 += w * geom.volume * (exact.eval(&x) - v).norm_squared();
            d2 += w * geom.volume * (exact_d.eval(&x) - dv).norm_squared();
        }
    }
    Ok((l2.sqrt(), d2.sqrt()))
}

/// Discrete solution of a case on one mesh.
#[derive(Clone, Debug)]
pub struct CaseSolution {
    pub n: usize,
    pub mesh: MeshComplex,
    pub space: Space,
    pub report: SolveReport,
}

impl CaseSolution {
    pub fn dofs(&self) -> &[f64] {
        &self.report.solution
    }
}

/// Assemble, constrain and solve `case` on the `n`-per-side mesh.
pub fn solve_case(case: &ManufacturedCase, n: usize, config: &SolveConfig) -> Result<CaseSolution> {
    let mesh = case.mesh(n);
    let neumann = case.neumann.as_ref().map(|(g, r)| (g, r));
    let mut system = build_system(&mesh, case.k, &case.data, case.scheme, &case.rhs, &case.dirichlet, neumann)?;
    let values = boundary_values(&mesh, case.k, &system.essential, &case.dirichlet_trace)?;
    apply_essential_bc(&mut system, &values)?;
    let report = solve(&system, config)?;
    Ok(CaseSolution {
        n,
        space: system.dofs.space,
        mesh,
        report,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub inv_h: usize,
    pub l2_err: f64,
    pub l2_order: Option<f64>,
    pub d_err: f64,
    pub d_order: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub case: String,
    pub scheme: String,
    pub alpha: f64,
    pub gamma: f64,
    pub rows: Vec<ConvergenceRow>,
}

/// Observed order between consecutive refinements.
pub fn observed_order(coarse: (usize, f64), fine: (usize, f64)) -> f64 {
    (coarse.1 / fine.1).ln() / (fine.0 as f64 / coarse.0 as f64).ln()
}

impl ConvergenceReport {
    /// Builds the rows (with orders) from `(1/h, l2, d)` triples.
    pub fn from_errors(case: &str, scheme: &str, alpha: f64, gamma: f64, errors: &[(usize, f64, f64)]) -> Self {
        let rows = errors
            .iter()
            .enumerate()
            .map(|(i, &(n, l2, d))| {
                let prev = i.checked_sub(1).map(|j| errors[j]);
                ConvergenceRow {
                    inv_h: n,
                    l2_err: l2,
                    l2_order: prev.map(|p| observed_order((p.0, p.1), (n, l2))),
                    d_err: d,
                    d_order: prev.map(|p| observed_order((p.0, p.2), (n, d))),
                }
            })
            .collect();
        Self {
            case: case.to_string(),
            scheme: scheme.to_string(),
            alpha,
            gamma,
            rows,
        }
    }

    pub fn row(&self, inv_h: usize) -> Option<&ConvergenceRow> {
        self.rows.iter().find(|r| r.inv_h == inv_h)
    }

    /// CSV with columns `inv_h,l2_err,l2_order,d_err,d_order`, nine significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("inv_h,l2_err,l2_order,d_err,d_order\n");
        let fmt_opt = |v: Option<f64>| v.map(|x| format!("{x:.8e}")).unwrap_or_default();
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{:.8e},{},{:.8e},{}",
                r.inv_h,
                r.l2_err,
                fmt_opt(r.l2_order),
                r.d_err,
                fmt_opt(r.d_order)
            );
        }
        out
    }

    /// Human-readable table.
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "case {} ({} scheme, alpha = {}, gamma = {})\n{:>6} {:>14} {:>6} {:>14} {:>6}\n",
            self.case, self.scheme, self.alpha, self.gamma, "1/h", "L2 error", "order", "d error", "order"
        );
        let o = |v: Option<f64>| v.map(|x| format!("{x:.2}")).unwrap_or_else(|| "-".into());
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:>6} {:>14.6e} {:>6} {:>14.6e} {:>6}",
                r.inv_h,
                r.l2_err,
                o(r.l2_order),
                r.d_err,
                o(r.d_order)
            );
        }
        out
    }
}

pub fn run_convergence(case: &ManufacturedCase, refinements: &[usize]) -> Result<ConvergenceReport> {
    run_convergence_with(case, refinements, &SolveConfig::default())
}

pub fn run_convergence_with(case: &ManufacturedCase, refinements: &[usize], config: &SolveConfig) -> Result<ConvergenceReport> {
    if refinements.is_empty() || refinements.windows(2).any(|w| w[1] <= w[0]) || refinements[0] == 0 {
        return Err(Error::Config("refinement list must be non-empty, positive and increasing".into()));
    }
    let (Some(exact), Some(exact_d)) = (&case.exact, &case.exact_derivative) else {
        return Err(Error::Config(format!("case '{}' has no exact solution", case.name)));
    };
    let mut errors = Vec::with_capacity(refinements.len());
    for &n in refinements {
        let sol = solve_case(case, n, config).map_err(|e| annotate(e, n))?;
        let (l2, d) = error_norms(&sol.mesh, case.k, sol.dofs(), exact, exact_d)?;
        errors.push((n, l2, d));
    }
    Ok(ConvergenceReport::from_errors(
        &case.name,
        &case.scheme.to_string(),
        case.alpha,
        case.gamma,
        &errors,
    ))
}

fn annotate(e: Error, n: usize) -> Error {
    match e {
        Error::Singular(msg) => Error::Singular(format!("{msg} (refinement n = {n})")),
        other => other,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StabilityMetrics {
    pub max_abs: f64,
    /// `max(0, max |u_h| - max |ref|)`.
    pub overshoot: Option<f64>,
    /// `max |u_h - ref|` over dofs.
    pub max_diff: Option<f64>,
}

pub fn stability_metrics(u_h: &[f64], reference: Option<&[f64]>) -> Result<StabilityMetrics> {
    let max_abs = u_h.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let (overshoot, max_diff) = match reference {
        None => (None, None),
        Some(r) => {
            if r.len() != u_h.len() {
                return Err(Error::DimensionMismatch {
                    expected: u_h.len(),
                    found: r.len(),
                });
            }
            let ref_max = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let diff = u_h.iter().zip(r).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            (Some((max_abs - ref_max).max(0.0)), Some(diff))
        }
    };
    Ok(StabilityMetrics {
        max_abs,
        overshoot,
        max_diff,
    })
}
