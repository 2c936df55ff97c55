//! Convection-dominated H(div) problem with `f = (1, 1)` on `h = 1/32` for a
//! sweep of diffusion coefficients, compared with the upwind limit.

use safe_fem::assembly::{
    apply_essential_bc, assemble_load, assemble_upwind_limit, boundary_values, essential_dofs, BoundaryRegion, Scheme,
    SparseSystem,
};
use safe_fem::field::Field;
use safe_fem::solver::{solve, SolveConfig};
use safe_fem::verify::{builtin_case, solve_case, stability_metrics, CaseParams};
use safe_fem::whitney::{DofMap, Space};

fn main() -> safe_fem::Result<()> {
    let n = 32;
    let config = SolveConfig::default();
    let mut reference: Option<Vec<f64>> = None;
    for alpha in [2e-3, 1e-5, 1e-7] {
        let case = builtin_case("div2d-stability", &CaseParams { alpha: Some(alpha), ..Default::default() })?;
        let sol = solve_case(&case, n, &config)?;
        let m = stability_metrics(sol.dofs(), reference.as_deref())?;
        println!(
            "alpha = {alpha:>8.1e}  max |u_h| = {:.6e}  residual = {:.1e}  diff to previous = {}",
            m.max_abs,
            sol.report.relative_residual,
            m.max_diff.map(|d| format!("{d:.3e}")).unwrap_or_else(|| "-".into())
        );
        reference = Some(sol.report.solution);
    }

    // alpha = 0: the upwind limit of the same scheme
    let case = builtin_case("div2d-stability", &CaseParams::default())?;
    let mesh = case.mesh(n);
    let matrix = assemble_upwind_limit(&mesh, 1, &case.data.beta, &case.data.gamma, Scheme::Primal)?;
    let mut system = SparseSystem {
        matrix,
        rhs: assemble_load(&mesh, 1, &case.rhs, None)?,
        dofs: DofMap::new(&mesh, Space::RaviartThomas),
        scheme: Scheme::Primal,
        essential: essential_dofs(&mesh, 1, &BoundaryRegion::Whole)?,
        constrained: Vec::new(),
    };
    let values = boundary_values(&mesh, 1, &system.essential, &Field::zero(true))?;
    apply_essential_bc(&mut system, &values)?;
    let limit = solve(&system, &config)?;
    let m = stability_metrics(&limit.solution, reference.as_deref())?;
    println!(
        "alpha = limit     max |u_h| = {:.6e}  diff to alpha = 1e-7: {:.3e}",
        m.max_abs,
        m.max_diff.unwrap()
    );
    Ok(())
}
