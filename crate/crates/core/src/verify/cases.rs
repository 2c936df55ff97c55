//! Built-in manufactured problems. Right-hand sides are obtained by automatic
//! differentiation of the exact solutions.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{Matrix3, Vector3};
use num_dual::{hessian, DualNum};

use crate::assembly::{BoundaryRegion, Coefficients, Scheme};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::mesh::{build_unit_cube_mesh, build_unit_square_mesh, Diagonal, MeshComplex, Point};

pub const CASE_NAMES: [&str; 5] = ["div2d", "div2d-stability", "curl3d", "grad2d", "grad3d"];

/// Strong form of the operator a case discretizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Operator {
    /// `-div(alpha grad u + beta u) + gamma u`
    Grad,
    /// `-grad(alpha div u + beta . u) + gamma u`
    Div,
    /// `curl(alpha curl u) - beta x curl u + gamma u` (dual form)
    CurlDual,
}

/// Per-case parameter overrides; `None` keeps the case default.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CaseParams {
    pub alpha: Option<f64>,
    pub gamma: Option<f64>,
    pub diagonal: Diagonal,
}

#[derive(Clone)]
pub struct ManufacturedCase {
    pub name: String,
    pub dim: usize,
    pub k: usize,
    pub scheme: Scheme,
    pub operator: Operator,
    pub alpha: f64,
    pub gamma: f64,
    pub data: Coefficients,
    pub exact: Option<Field>,
    pub exact_derivative: Option<Field>,
    pub rhs: Field,
    pub dirichlet: BoundaryRegion,
    pub dirichlet_trace: Field,
    pub neumann: Option<(Field, BoundaryRegion)>,
    pub diagonal: Diagonal,
}

impl fmt::Debug for ManufacturedCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ManufacturedCase")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("k", &self.k)
            .field("scheme", &self.scheme)
            .field("alpha", &self.alpha)
            .field("gamma", &self.gamma)
            .finish_non_exhaustive()
    }
}

impl ManufacturedCase {
    pub fn mesh(&self, n: usize) -> MeshComplex {
        match self.dim {
            2 => build_unit_square_mesh(n, self.diagonal),
            _ => build_unit_cube_mesh(n),
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Analytic {
    Div2d,
    Curl3d,
    Grad2d,
    Grad3d,
}

impl Analytic {
    fn solution<T: DualNum<Primitive = f64> + Copy>(self, x: [T; 3]) -> [T; 3] {
        let [x1, x2, x3] = x;
        let zero = T::from(0.0);
        match self {
            Self::Div2d => [
                (x1 - x2).exp() * x1 * x2 * (-x1 + 1.0) * (-x2 + 1.0),
                (x1 * PI).sin() * (x2 * PI).sin(),
                zero,
            ],
            Self::Curl3d => [x3.sin(), x1.sin(), x2.sin()],
            Self::Grad2d => [(x1 * PI).sin() * (x2 * PI).sin() + x1 * x2, zero, zero],
            Self::Grad3d => [(x1 * PI).sin() * (x2 * PI).sin() * (x3 * PI).sin() + x1 * x2 * x3, zero, zero],
        }
    }

    fn beta<T: DualNum<Primitive = f64> + Copy>(self, x: [T; 3]) -> [T; 3] {
        match self {
            Self::Div2d | Self::Grad2d => [-x[1], x[0], T::from(0.0)],
            Self::Curl3d | Self::Grad3d => [x[1], x[2], x[0]],
        }
    }
}

/// Values, gradients and Hessians of the three components of a vector function.
struct Jet {
    value: Vector3<f64>,
    grad: [Vector3<f64>; 3],
    hess: [Matrix3<f64>; 3],
}

fn jet<F>(f: F, x: &Point) -> Jet
where
    F: Fn([num_dual::Dual2Vec<f64, nalgebra::U3>; 3]) -> [num_dual::Dual2Vec<f64, nalgebra::U3>; 3],
{
    let ((v0, g0, h0), (v1, g1, h1), (v2, g2, h2)) = hessian(
        |v| {
            let [a, b, c] = f([v[0], v[1], v[2]]);
            (a, b, c)
        },
        x,
    );
    Jet {
        value: Vector3::new(v0, v1, v2),
        grad: [g0, g1, g2],
        hess: [h0, h1, h2],
    }
}

fn strong_rhs(kind: Analytic, op: Operator, alpha: f64, gamma: f64, x: &Point) -> Vector3<f64> {
    let u = jet(|v| kind.solution(v), x);
    let b = jet(|v| kind.beta(v), x);
    match op {
        Operator::Grad => {
            let lap = u.hess[0].trace();
            let div_bu: f64 = (0..3).map(|i| b.grad[i][i] * u.value[0] + b.value[i] * u.grad[0][i]).sum();
            Vector3::new(-alpha * lap - div_bu + gamma * u.value[0], 0.0, 0.0)
        }
        Operator::Div => Vector3::from_fn(|i, _| {
            let grad_div: f64 = (0..3).map(|j| u.hess[j][(i, j)]).sum();
            let grad_bu: f64 = (0..3).map(|j| b.grad[j][i] * u.value[j] + b.value[j] * u.grad[j][i]).sum();
            -alpha * grad_div - grad_bu + gamma * u.value[i]
        }),
        Operator::CurlDual => {
            let curl = curl_of(&u.grad);
            let curl_curl = Vector3::from_fn(|i, _| {
                let grad_div: f64 = (0..3).map(|j| u.hess[j][(i, j)]).sum();
                grad_div - u.hess[i].trace()
            });
            alpha * curl_curl - b.value.cross(&curl) + u.value * gamma
        }
    }
}

fn curl_of(grad: &[Vector3<f64>; 3]) -> Vector3<f64> {
    Vector3::new(
        grad[2][1] - grad[1][2],
        grad[0][2] - grad[2][0],
        grad[1][0] - grad[0][1],
    )
}

fn exact_derivative(kind: Analytic, op: Operator, x: &Point) -> Vector3<f64> {
    let u = jet(|v| kind.solution(v), x);
    match op {
        Operator::Grad => u.grad[0],
        Operator::Div => Vector3::new(u.grad[0][0] + u.grad[1][1] + u.grad[2][2], 0.0, 0.0),
        Operator::CurlDual => curl_of(&u.grad),
    }
}

fn analytic_case(name: &str, kind: Analytic, op: Operator, scheme: Scheme, dim: usize, k: usize, alpha: f64, gamma: f64, diagonal: Diagonal) -> ManufacturedCase {
    let exact = if k == 0 {
        Field::scalar(move |x| Analytic::solution(kind, [x.x, x.y, x.z])[0])
    } else {
        Field::vector(move |x| Vector3::from(Analytic::solution(kind, [x.x, x.y, x.z])))
    };
    let rhs = if k == 0 {
        Field::scalar(move |x| strong_rhs(kind, op, alpha, gamma, x).x)
    } else {
        Field::vector(move |x| strong_rhs(kind, op, alpha, gamma, x))
    };
    let exact_derivative = if op == Operator::Div {
        Field::scalar(move |x| exact_derivative(kind, op, x).x)
    } else {
        Field::vector(move |x| exact_derivative(kind, op, x))
    };
    ManufacturedCase {
        name: name.to_string(),
        dim,
        k,
        scheme,
        operator: op,
        alpha,
        gamma,
        data: Coefficients {
            alpha: Field::constant_scalar(alpha),
            beta: Field::vector(move |x| Vector3::from(kind.beta([x.x, x.y, x.z]))),
            gamma: Field::constant_scalar(gamma),
        },
        dirichlet_trace: exact.clone(),
        exact: Some(exact),
        exact_derivative: Some(exact_derivative),
        rhs,
        dirichlet: BoundaryRegion::Whole,
        neumann: None,
        diagonal,
    }
}

/// Looks up a case by name: `div2d`, `div2d-stability`, `curl3d`, `grad2d`, `grad3d`.
pub fn builtin_case(name: &str, params: &CaseParams) -> Result<ManufacturedCase> {
    let alpha = |default: f64| params.alpha.unwrap_or(default);
    let gamma = params.gamma.unwrap_or(1.0);
    if let Some(a) = params.alpha {
        if !(a > 0.0) {
            return Err(Error::Config(format!("alpha must be positive, got {a}")));
        }
    }
    let d = params.diagonal;
    let case = match name {
        "div2d" => analytic_case(name, Analytic::Div2d, Operator::Div, Scheme::Primal, 2, 1, alpha(1.0), gamma, d),
        "curl3d" => analytic_case(name, Analytic::Curl3d, Operator::CurlDual, Scheme::Dual, 3, 1, alpha(1.0), gamma, d),
        "grad2d" => analytic_case(name, Analytic::Grad2d, Operator::Grad, Scheme::Primal, 2, 0, alpha(1.0), gamma, d),
        "grad3d" => analytic_case(name, Analytic::Grad3d, Operator::Grad, Scheme::Primal, 3, 0, alpha(1.0), gamma, d),
        "div2d-stability" => {
            let a = alpha(2e-3);
            ManufacturedCase {
                name: name.to_string(),
                dim: 2,
                k: 1,
                scheme: Scheme::Primal,
                operator: Operator::Div,
                alpha: a,
                gamma,
                data: Coefficients {
                    alpha: Field::constant_scalar(a),
                    beta: Field::vector(|x| Vector3::new(-x.y, x.x, 0.0)),
                    gamma: Field::constant_scalar(gamma),
                },
                exact: None,
                exact_derivative: None,
                rhs: Field::constant_vector(Vector3::new(1.0, 1.0, 0.0)),
                dirichlet: BoundaryRegion::Whole,
                dirichlet_trace: Field::zero(true),
                neumann: None,
                diagonal: d,
            }
        }
        other => {
            return Err(Error::Config(format!(
                "unknown case '{other}' (available: {})",
                CASE_NAMES.join(", ")
            )))
        }
    };
    Ok(case)
}

/// All built-in cases with default parameters.
pub fn builtin_cases() -> Vec<ManufacturedCase> {
    CASE_NAMES
        .iter()
        .map(|n| builtin_case(n, &CaseParams::default()).expect("built-in case"))
        .collect()
}
