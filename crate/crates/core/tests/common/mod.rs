//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, Matrix3, Vector3};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use safe_fem::assembly::{graph_weights, GraphWeights};
use safe_fem::quadrature::SimplexRule;
use safe_fem::whitney::{basis_at, dof_functional, Space};
use safe_fem::{CellGeometry, Point};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Random shape-regular simplex with vertices in the unit cube (z = 0 in 2D).
pub fn random_simplex(rng: &mut StdRng, dim: usize) -> CellGeometry {
    loop {
        let pts: Vec<Point> = (0..=dim)
            .map(|_| {
                let z = if dim == 3 { rng.gen::<f64>() } else { 0.0 };
                Point::new(rng.gen(), rng.gen(), z)
            })
            .collect();
        let Ok(g) = CellGeometry::new(0, dim, &pts) else { continue };
        let fact = if dim == 2 { 2.0 } else { 6.0 };
        if g.volume * fact > 0.05 * g.diameter().powi(dim as i32) {
            return g;
        }
    }
}

/// Uniform vector in the ball of the given radius (z = 0 in 2D).
pub fn random_vector(rng: &mut StdRng, dim: usize, radius: f64) -> Vector3<f64> {
    loop {
        let mut v = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if dim == 2 {
            v.z = 0.0;
        }
        if v.norm() <= 1.0 {
            return v * radius;
        }
    }
}

pub fn log_uniform(rng: &mut StdRng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

/// `max |a - b| / max |b|`.
pub fn rel_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).abs().max() / b.abs().max()
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    let scale = a.abs().max(b.abs());
    (a - b).abs() <= rel * scale || scale < 1e-300
}

// 15-point Gauss-Kronrod on [-1, 1]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let (f1, f2) = (f(c - h * XGK[i]), f(c + h * XGK[i]));
        k += WGK[i] * (f1 + f2);
        if i % 2 == 1 {
            g += WG[i / 2] * (f1 + f2);
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Globally adaptive Gauss-Kronrod integration to a relative tolerance.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> f64 {
    let mut parts = vec![(a, b, gk15(&f, a, b))];
    for _ in 0..4000 {
        let total: f64 = parts.iter().map(|p| p.2 .0).sum();
        let err: f64 = parts.iter().map(|p| p.2 .1).sum();
        if err <= rel_tol * total.abs() || err < 1e-300 {
            break;
        }
        let worst = (0..parts.len())
            .max_by(|&i, &j| parts[i].2 .1.total_cmp(&parts[j].2 .1))
            .unwrap();
        let (lo, hi, _) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        parts.push((lo, mid, gk15(&f, lo, mid)));
        parts.push((mid, hi, gk15(&f, mid, hi)));
    }
    parts.iter().map(|p| p.2 .0).sum()
}

/// `int_0^len exp(base + c y) dy` without overflow for `base + max(c len, 0) <= 0`.
fn exp_line(base: f64, c: f64, len: f64) -> f64 {
    if len <= 0.0 {
        return 0.0;
    }
    let u = c * len;
    let phi = if u == 0.0 { 1.0 } else { -(-u.abs()).exp_m1() / u.abs() };
    (base + u.max(0.0)).exp() * len * phi
}

const TOL: f64 = 1e-14;

/// `ln` of the average of `exp(a . x)` over the reference `j`-simplex
/// `{x_i >= 0, sum x_i <= 1}`, `j = a.len()` in `0..=3`.
pub fn ln_reference_average(a: &[f64]) -> f64 {
    let m = a.iter().fold(0.0f64, |m, &v| m.max(v));
    let value = match *a {
        [] => 1.0,
        [s] => exp_line(-m, s, 1.0),
        [s, t] => 2.0 * integrate(|x| exp_line(s * x - m, t, 1.0 - x), 0.0, 1.0, TOL),
        [s, t, r] => {
            6.0 * integrate(
                |x| integrate(|y| exp_line(s * x + t * y - m, r, 1.0 - x - y), 0.0, 1.0 - x, TOL),
                0.0,
                1.0,
                TOL,
            )
        }
        _ => panic!("at most three arguments"),
    };
    value.ln() + m
}

/// `B_j^eps(args)` as `eps` times the ratio of reference averages, by quadrature.
pub fn bernoulli_quadrature(eps: f64, args: &[f64]) -> f64 {
    let a: Vec<f64> = args.iter().map(|s| s / eps).collect();
    let j = a.len();
    eps * (ln_reference_average(&a[..j - 1]) - ln_reference_average(&a)).exp()
}

/// Gradients of the barycentric coordinates and the measure, from the inverse
/// of the edge matrix.
pub fn barycentric_gradients(points: &[Point], dim: usize) -> (Vec<Vector3<f64>>, f64) {
    let e = DMatrix::from_fn(dim, dim, |r, c| (points[c + 1] - points[0])[r]);
    let det = e.determinant();
    let inv = e.try_inverse().expect("non-degenerate simplex");
    let mut grads = vec![Vector3::zeros(); dim + 1];
    for i in 0..dim {
        for r in 0..dim {
            grads[i + 1][r] = inv[(i, r)];
        }
    }
    grads[0] = -grads[1..].iter().sum::<Vector3<f64>>();
    let fact = if dim == 2 { 2.0 } else { 6.0 };
    (grads, det.abs() / fact)
}

/// Edge-averaged (Scharfetter-Gummel type) element matrix for
/// `-div(alpha (grad u + theta u))`, rows test vertices, columns trial vertices.
pub fn eafe_local_matrix(points: &[Point], dim: usize, alpha: f64, theta: &Vector3<f64>) -> DMatrix<f64> {
    let (g, vol) = barycentric_gradients(points, dim);
    let n = dim + 1;
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let omega = -vol * g[i].dot(&g[j]);
            let delta = theta.dot(&(points[j] - points[i]));
            let avg = if delta == 0.0 { 1.0 } else { delta.exp_m1() / delta };
            // flux = alpha (e^delta u_j - u_i) / avg, scaled by e^{-theta . a_i}
            let (cu_i, cu_j) = (-alpha / avg, alpha * delta.exp() / avg);
            for (v, dv) in [(i, -1.0), (j, 1.0)] {
                a[(v, i)] += omega * dv * cu_i;
                a[(v, j)] += omega * dv * cu_j;
            }
        }
    }
    a
}

/// Central finite-difference partial derivative of a scalar function.
pub fn fd_partial<F: Fn(&Point) -> f64>(f: &F, x: &Point, axis: usize, h: f64) -> f64 {
    let mut e = Vector3::zeros();
    e[axis] = h;
    (f(&(x + e)) - f(&(x - e))) / (2.0 * h)
}

pub fn identity(dim: usize) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| if i == j && i < dim { 1.0 } else { 0.0 })
}

/// `sum_E omega_E |E|^2 / |T| tau_E tau_E^T`.
pub fn edge_reconstruction(g: &CellGeometry) -> Matrix3<f64> {
    let GraphWeights::Edge(w) = graph_weights(g, 0).unwrap() else { panic!() };
    let mut m = Matrix3::zeros();
    for (e, we) in w.iter().enumerate() {
        let t = g.edge_tangents[e];
        m += t * t.transpose() * (we * g.edge_lengths[e].powi(2) / g.volume);
    }
    m
}

/// `sum_{F != F'} omega_FF' |F| |F'| / |T| n_F n_F'^T` with outward normals.
pub fn face_reconstruction(g: &CellGeometry) -> Matrix3<f64> {
    let GraphWeights::FacePair(w) = graph_weights(g, 1).unwrap() else { panic!() };
    let n: Vec<Vector3<f64>> = (0..4).map(|f| g.facet_normals[f] * g.facet_signs[f]).collect();
    let mut m = Matrix3::zeros();
    for f in 0..4 {
        for h in 0..4 {
            if f != h {
                m += n[f] * n[h].transpose() * (w[(f, h)] * g.facet_areas[f] * g.facet_areas[h] / g.volume);
            }
        }
    }
    m
}

/// `(Pi^k E_theta)` on the basis: entry `(S', S) = l_S'(exp(theta . x) phi_S)`.
pub fn interpolated_multiplication(g: &CellGeometry, space: Space, theta: &Vector3<f64>) -> DMatrix<f64> {
    let k = space.simplex_dim(g.dim);
    let n = space.local_dim(g.dim);
    let rule = SimplexRule::new(k, 30);
    DMatrix::from_fn(n, n, |r, c| {
        dof_functional(g.dim, space, &g.subsimplex_points(k, r), &rule, |x: &Point| {
            basis_at(g, space, &g.barycentric(x)).values[c] * theta.dot(x).exp()
        })
    })
}
