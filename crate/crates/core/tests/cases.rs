mod common;

use common::fd_partial;
use nalgebra::Vector3;
use safe_fem::field::Field;
use safe_fem::verify::{builtin_case, builtin_cases, run_convergence, CaseParams, ManufacturedCase, Operator, CASE_NAMES};
use safe_fem::whitney::{canonical_interpolate, Space};
use safe_fem::{Error, Point};

const H: f64 = 1e-4;

fn comp(f: &Field, i: usize) -> impl Fn(&Point) -> f64 + '_ {
    move |x| f.eval(x)[i]
}

fn grad(f: &dyn Fn(&Point) -> f64, x: &Point) -> Vector3<f64> {
    Vector3::from_fn(|i, _| fd_partial(&f, x, i, H))
}

fn curl(u: &dyn Fn(&Point) -> Vector3<f64>, x: &Point) -> Vector3<f64> {
    let d = |i: usize, axis: usize| fd_partial(&|p: &Point| u(p)[i], x, axis, H);
    Vector3::new(d(2, 1) - d(1, 2), d(0, 2) - d(2, 0), d(1, 0) - d(0, 1))
}

fn div(u: &dyn Fn(&Point) -> Vector3<f64>, x: &Point, dim: usize) -> f64 {
    (0..dim).map(|i| fd_partial(&|p: &Point| u(p)[i], x, i, H)).sum()
}

/// Strong operator applied to the exact solution by nested central differences.
fn strong_residual(case: &ManufacturedCase, x: &Point) -> Vector3<f64> {
    let u = case.exact.as_ref().unwrap();
    let a = &case.data.alpha;
    let b = &case.data.beta;
    let gu = case.data.gamma.eval(x).x * u.eval(x);
    let lhs = match case.operator {
        Operator::Grad => {
            let flux = |p: &Point| {
                let g = grad(&comp(u, 0), p);
                g * a.eval(p).x + b.eval(p) * u.eval(p).x
            };
            Vector3::new(-div(&flux, x, case.dim), 0.0, 0.0) + gu
        }
        Operator::Div => {
            let pot = |p: &Point| a.eval(p).x * div(&|q: &Point| u.eval(q), p, case.dim) + b.eval(p).dot(&u.eval(p));
            -grad(&pot, x) + gu
        }
        Operator::CurlDual => {
            let inner = |p: &Point| curl(&|q: &Point| u.eval(q), p) * a.eval(p).x;
            let c = curl(&|q: &Point| u.eval(q), x);
            curl(&inner, x) - b.eval(x).cross(&c) + gu
        }
    };
    let mut r = lhs - case.rhs.eval(x);
    if case.dim == 2 {
        r.z = 0.0;
    }
    r
}

fn sample_points(dim: usize) -> Vec<Point> {
    let mut pts = Vec::new();
    for i in 1..4 {
        for j in 1..4 {
            let z = if dim == 3 { 0.2 + 0.17 * (i + j) as f64 } else { 0.0 };
            pts.push(Point::new(0.23 * i as f64, 0.21 * j as f64 + 0.05, z.min(0.9)));
        }
    }
    pts
}

#[test]
fn right_hand_sides_satisfy_the_strong_equations() {
    for name in ["div2d", "curl3d", "grad2d", "grad3d"] {
        for alpha in [1.0, 0.01] {
            let case = builtin_case(name, &CaseParams { alpha: Some(alpha), gamma: Some(1.5), ..Default::default() }).unwrap();
            for x in sample_points(case.dim) {
                let r = strong_residual(&case, &x);
                let scale = 1.0 + case.rhs.eval(&x).norm();
                assert!(r.norm() <= 1e-4 * scale, "{name} alpha {alpha} at {x:?}: {r:?}");
            }
        }
    }
}

#[test]
fn exact_derivatives_match_finite_differences() {
    for name in ["div2d", "curl3d", "grad2d", "grad3d"] {
        let case = builtin_case(name, &CaseParams::default()).unwrap();
        let u = case.exact.as_ref().unwrap();
        let du = case.exact_derivative.as_ref().unwrap();
        for x in sample_points(case.dim) {
            let fd = match case.operator {
                Operator::Grad => grad(&comp(u, 0), &x),
                Operator::Div => Vector3::new(div(&|q: &Point| u.eval(q), &x, 2), 0.0, 0.0),
                Operator::CurlDual => curl(&|q: &Point| u.eval(q), &x),
            };
            assert!((fd - du.eval(&x)).norm() <= 1e-6, "{name}");
        }
    }
}

#[test]
fn case_catalogue() {
    let all = builtin_cases();
    assert_eq!(all.len(), CASE_NAMES.len());
    let stab = all.iter().find(|c| c.name == "div2d-stability").unwrap();
    assert!(stab.exact.is_none());
    assert_eq!(stab.alpha, 2e-3);
    assert!(matches!(builtin_case("nope", &CaseParams::default()), Err(Error::Config(_))));
    assert!(builtin_case("div2d", &CaseParams { alpha: Some(-1.0), ..Default::default() }).is_err());
}

#[test]
fn interpolation_error_is_first_order() {
    let case = builtin_case("div2d", &CaseParams::default()).unwrap();
    let exact = case.exact.as_ref().unwrap();
    let du = case.exact_derivative.as_ref().unwrap();
    let errs: Vec<f64> = [8, 16, 32]
        .iter()
        .map(|&n| {
            let mesh = case.mesh(n);
            let u_h = canonical_interpolate(&mesh, Space::RaviartThomas, exact);
            safe_fem::verify::error_norms(&mesh, 1, &u_h, exact, du).unwrap().0
        })
        .collect();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((order - 1.0).abs() < 0.1, "{order}");
    }
}

#[test]
fn vertex_scheme_converges() {
    let case = builtin_case("grad2d", &CaseParams::default()).unwrap();
    let rep = run_convergence(&case, &[8, 16, 32]).unwrap();
    let last = rep.rows.last().unwrap();
    assert!(last.l2_order.unwrap() > 1.8, "{:?}", rep.rows);
    assert!((last.d_order.unwrap() - 1.0).abs() < 0.1, "{:?}", rep.rows);

    let case = builtin_case("grad3d", &CaseParams::default()).unwrap();
    let rep = run_convergence(&case, &[2, 4, 8]).unwrap();
    assert!(rep.rows[2].d_order.unwrap() > 0.85, "{:?}", rep.rows);
}

#[test]
fn single_level_has_no_order() {
    let case = builtin_case("div2d", &CaseParams::default()).unwrap();
    let rep = run_convergence(&case, &[4]).unwrap();
    assert_eq!(rep.rows.len(), 1);
    assert!(rep.rows[0].l2_order.is_none());
    assert!(rep.to_csv().lines().nth(1).unwrap().ends_with(','));
    assert!(run_convergence(&case, &[8, 4]).is_err());
}
