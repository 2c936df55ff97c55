//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use common::*;
use nalgebra::{DMatrix, DVector};
use safe_fem::assembly::{assemble, assemble_stiffness_mass, local_safe_matrix, local_safe_oracle, Coefficients, Scheme};
use safe_fem::exponential::{bernoulli, bernoulli_limit, local_exp_operators, CellCoefficients};
use safe_fem::field::Field;
use safe_fem::solver::SolveConfig;
use safe_fem::verify::{builtin_case, run_convergence, solve_case, stability_metrics, CaseParams, ConvergenceReport};
use safe_fem::whitney::{incidence, local_incidence, Space};
use safe_fem::{build_unit_cube_mesh, build_unit_square_mesh, Diagonal};

type Check = std::result::Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn orders(rep: &ConvergenceReport) -> String {
    rep.rows
        .iter()
        .filter_map(|r| Some(format!("{}:{:.3}/{:.3}", r.inv_h, r.l2_order?, r.d_order?)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn convergence(name: &str, alpha: f64, levels: &[usize]) -> std::result::Result<ConvergenceReport, String> {
    let case = builtin_case(name, &CaseParams { alpha: Some(alpha), gamma: Some(1.0), ..Default::default() }).map_err(|e| e.to_string())?;
    run_convergence(&case, levels).map_err(|e| e.to_string())
}

fn div2d_smooth() -> Check {
    let rep = convergence("div2d", 1.0, &[4, 8, 16, 32, 64, 128])?;
    for r in rep.rows.iter().filter(|r| r.inv_h >= 32) {
        for o in [r.l2_order.unwrap(), r.d_order.unwrap()] {
            ensure((o - 1.0).abs() <= 0.05, format!("order {o:.3} at n = {} ({})", r.inv_h, orders(&rep)))?;
        }
    }
    let e = rep.row(128).unwrap().l2_err;
    ensure((e / 0.004844 - 1.0).abs() <= 0.10, format!("L2 error {e:.6e} at n = 128"))?;
    Ok(format!("L2(128) = {e:.6e}; orders {}", orders(&rep)))
}

fn div2d_convection_dominated() -> Check {
    let rep = convergence("div2d", 0.01, &[4, 8, 16, 32, 64, 128])?;
    for r in rep.rows.iter().filter(|r| r.inv_h >= 32) {
        ensure(r.l2_order.unwrap() >= 0.95, format!("L2 order {:.3} at n = {}", r.l2_order.unwrap(), r.inv_h))?;
    }
    let early = rep.row(16).unwrap().d_order.unwrap();
    let late = rep.row(128).unwrap().d_order.unwrap();
    ensure(early <= 0.3, format!("div order {early:.3} at 8 -> 16"))?;
    ensure(late >= 0.9, format!("div order {late:.3} at 64 -> 128"))?;
    Ok(format!("div orders 8->16 {early:.3}, 64->128 {late:.3}; {}", orders(&rep)))
}

fn curl3d_dual() -> Check {
    let rep = convergence("curl3d", 1.0, &[2, 4, 8, 16])?;
    for n in [8, 16] {
        let r = rep.row(n).unwrap();
        for o in [r.l2_order.unwrap(), r.d_order.unwrap()] {
            ensure((o - 1.0).abs() <= 0.05, format!("order {o:.3} at n = {n} ({})", orders(&rep)))?;
        }
    }
    let e = rep.row(16).unwrap().d_err;
    ensure((e / 0.013083 - 1.0).abs() <= 0.10, format!("curl error {e:.6e} at n = 16"))?;
    Ok(format!("curl error(16) = {e:.6e}; orders {}", orders(&rep)))
}

fn stability_sweep() -> Check {
    let mut sols = Vec::new();
    for alpha in [2e-3, 1e-5, 1e-7] {
        let case = builtin_case("div2d-stability", &CaseParams { alpha: Some(alpha), ..Default::default() }).map_err(|e| e.to_string())?;
        let sol = solve_case(&case, 32, &SolveConfig::default()).map_err(|e| format!("alpha {alpha:e}: {e}"))?;
        ensure(sol.dofs().iter().all(|v| v.is_finite()), format!("non-finite values at alpha {alpha:e}"))?;
        sols.push(sol);
    }
    let m = stability_metrics(sols[2].dofs(), Some(sols[1].dofs())).map_err(|e| e.to_string())?;
    let base = stability_metrics(sols[1].dofs(), None).unwrap().max_abs;
    let diff = m.max_diff.unwrap();
    ensure(diff <= 0.05 * base, format!("max diff {diff:.3e} vs max norm {base:.3e}"))?;
    Ok(format!("max |u(1e-5)| = {base:.4e}, max |u(1e-5) - u(1e-7)| = {diff:.2e}"))
}

fn identity_suite() -> Check {
    let mut r = rng(5);
    let (mut e47, mut e413, mut ejj, mut elemma) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for i in 0..100 {
        let dim = 2 + i % 2;
        let g = random_simplex(&mut r, dim);
        e47 = e47.max((edge_reconstruction(&g) - identity(dim)).abs().max());
        let g3 = random_simplex(&mut r, 3);
        let m = face_reconstruction(&g3);
        e413 = e413.max((m - identity(3)).abs().max()).max((m.transpose() - identity(3)).abs().max());
        let theta = random_vector(&mut r, dim, 5.0 / g.diameter());
        for k in 0..dim - 1 {
            let a = local_exp_operators(&g, k, &theta).unwrap().j;
            let b = local_exp_operators(&g, k + 1, &theta).unwrap().j;
            ejj = ejj.max((&b * &a).abs().max() / (b.abs().max() * a.abs().max()));
        }
        for k in 0..=dim {
            let space = Space::for_degree(dim, k).unwrap();
            let ops = local_exp_operators(&g, k.min(dim - 1), &theta).unwrap();
            let h = if k < dim { ops.h_k } else { ops.h_k1 };
            let hm = DMatrix::from_diagonal(&DVector::from_vec(h)) * interpolated_multiplication(&g, space, &theta);
            let n = space.local_dim(dim);
            elemma = elemma.max((hm - DMatrix::identity(n, n)).abs().max());
        }
        let spaces = [Space::Lagrange, Space::Nedelec, Space::RaviartThomas, Space::Constant];
        for w in spaces.windows(3) {
            let a = local_incidence(&g3, w[0], w[1]).unwrap();
            let b = local_incidence(&g3, w[1], w[2]).unwrap();
            ensure((b * a).iter().all(|&v| v == 0.0), "local D D != 0")?;
        }
    }
    let sq = build_unit_square_mesh(8, Diagonal::default());
    ensure(incidence(&sq, 1).unwrap().compose(&incidence(&sq, 0).unwrap()).iter().all(|r| r.is_empty()), "global D D != 0 (2D)")?;
    let cube = build_unit_cube_mesh(4);
    let d: Vec<_> = (0..3).map(|k| incidence(&cube, k).unwrap()).collect();
    ensure(d[1].compose(&d[0]).iter().chain(d[2].compose(&d[1]).iter()).all(|r| r.is_empty()), "global D D != 0 (3D)")?;
    ensure(e47 <= 1e-12, format!("edge reconstruction {e47:.2e}"))?;
    ensure(e413 <= 1e-12, format!("face reconstruction {e413:.2e}"))?;
    ensure(ejj <= 1e-12, format!("J J = {ejj:.2e}"))?;
    ensure(elemma <= 1e-11, format!("H (Pi E) - I = {elemma:.2e}"))?;
    Ok(format!("edge {e47:.1e}, face {e413:.1e}, DD = 0 exact, JJ {ejj:.1e}, H(PiE) {elemma:.1e}"))
}

fn oracle_equivalence() -> Check {
    let mut r = rng(6);
    let mut worst = 0.0f64;
    for dim in [2, 3] {
        for k in 0..dim {
            for _ in 0..100 {
                let g = random_simplex(&mut r, dim);
                let alpha = log_uniform(&mut r, 1e-2, 1e2);
                let beta = random_vector(&mut r, dim, 10.0);
                let c = CellCoefficients::from_beta(alpha, beta).unwrap();
                let a = local_safe_matrix(&g, k, &c).unwrap().matrix;
                let b = local_safe_oracle(&g, k, &c, &Field::constant_scalar(alpha)).unwrap().matrix;
                let err = rel_diff(&a, &b);
                ensure(err <= 1e-9, format!("dim {dim} k {k} alpha {alpha:.3e}: {err:.2e}"))?;
                worst = worst.max(err);
            }
        }
    }
    Ok(format!("600 samples, worst relative difference {worst:.2e}"))
}

fn degeneration() -> Check {
    let alpha = Field::scalar(|x| 1.0 + x.x * x.y + 0.5 * x.z);
    let gamma = Field::scalar(|x| 2.0 + x.y);
    let mut worst = 0.0f64;
    for (mesh, kmax) in [(build_unit_square_mesh(6, Diagonal::default()), 2), (build_unit_cube_mesh(3), 3)] {
        for k in 0..kmax {
            let data = Coefficients {
                alpha: alpha.clone(),
                beta: Field::zero(true),
                gamma: gamma.clone(),
            };
            let a = assemble(&mesh, k, &data, Scheme::Primal).map_err(|e| e.to_string())?;
            let b = assemble_stiffness_mass(&mesh, k, &alpha, &gamma).map_err(|e| e.to_string())?;
            let err = a.max_abs_diff(&b) / b.max_abs();
            ensure(err <= 1e-13, format!("beta = 0, dim {} k {k}: {err:.2e}", mesh.dim()))?;
            worst = worst.max(err);
        }
    }
    let mut r = rng(7);
    let mut eafe = 0.0f64;
    for dim in [2, 3] {
        for _ in 0..100 {
            let g = random_simplex(&mut r, dim);
            let a = log_uniform(&mut r, 1e-2, 1e2);
            let theta = random_vector(&mut r, dim, 5.0 / g.diameter());
            let m = local_safe_matrix(&g, 0, &CellCoefficients::new(a, theta).unwrap()).unwrap().matrix;
            let err = rel_diff(&m, &eafe_local_matrix(&g.vertices, dim, a, &theta));
            ensure(err <= 1e-12, format!("EAFE dim {dim}: {err:.2e}"))?;
            eafe = eafe.max(err);
        }
    }
    Ok(format!("beta = 0 {worst:.1e}, EAFE {eafe:.1e}"))
}

fn bernoulli_limits() -> Check {
    let grid: Vec<f64> = (0..=40).map(|i| -10.0 + 0.5 * i as f64).collect();
    let mut worst = 0.0f64;
    let mut count = 0;
    let mut check = |args: &[f64]| -> std::result::Result<(), String> {
        let d = (bernoulli(1e-8, args).unwrap() - bernoulli_limit(args)).abs();
        worst = worst.max(d);
        count += 1;
        ensure(d <= 1e-6, format!("B{args:?}: |B^1e-8 - B^0| = {d:.2e}"))
    };
    for &s in &grid {
        check(&[s])?;
        for &t in &grid {
            check(&[s, t])?;
            for &u in &grid {
                check(&[s, t, u])?;
            }
        }
    }
    let mut r = rng(8);
    for _ in 0..20000 {
        let eps = log_uniform(&mut r, 1e-8, 1.0);
        let ratio = log_uniform(&mut r, 1.0, 1e6);
        let j = 1 + count % 3;
        count += 1;
        let args: Vec<f64> = (0..j)
            .map(|i| if i == 0 { ratio * eps } else { eps * log_uniform(&mut r, 1.0, ratio) } * if rand::Rng::gen::<bool>(&mut r) { 1.0 } else { -1.0 })
            .collect();
        let b = bernoulli(eps, &args).map_err(|e| e.to_string())?;
        ensure(b.is_finite() && b >= 0.0, format!("B^{eps:e}{args:?} = {b}"))?;
    }
    Ok(format!("{count} evaluations, worst limit gap {worst:.2e}"))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 8] = [
        ("div2d smooth convergence (alpha = 1)", div2d_smooth),
        ("div2d convection-dominated pattern (alpha = 0.01)", div2d_convection_dominated),
        ("curl3d dual-scheme convergence", curl3d_dual),
        ("div2d stability sweep", stability_sweep),
        ("identity suite", identity_suite),
        ("Bernoulli route vs operator route", oracle_equivalence),
        ("degeneration to stiffness and EAFE", degeneration),
        ("Bernoulli vanishing-diffusion limits", bernoulli_limits),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("PASS {} {name} [{secs:.1}s]: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name} [{secs:.1}s]: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
