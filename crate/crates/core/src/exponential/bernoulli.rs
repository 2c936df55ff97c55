//! Bernoulli kernels `B_1^eps`, `B_2^eps`, `B_3^eps`: `eps` times the ratio of
//! the exponential average over a reference `(j-1)`-simplex to the one over
//! the reference `j`-simplex, with exponent `(s x_1 + t x_2 + r x_3) / eps`.
//!
//! The closed forms are evaluated after shifting every exponential by the
//! largest exponent. Close to the removable singularities (coincident or
//! vanishing arguments) they lose accuracy; there the ratio is taken from
//! exponential divided differences instead.

use crate::error::{Error, Result};

use super::divdiff::exp_divided_difference;

/// Relative size of a cancelling sum below which the closed form is abandoned.
pub const SINGULAR_TOLERANCE: f64 = 1e-4;

/// Beyond this `|s| / eps` the kernel equals its `eps = 0` limit to working precision.
const LIMIT_RATIO: f64 = 1e13;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BernoulliValue {
    pub value: f64,
    pub epsilon: f64,
    /// Number of meaningful entries in `args`.
    pub order: usize,
    pub args: [f64; 3],
}

fn wrap(epsilon: f64, args: &[f64], value: f64) -> BernoulliValue {
    let mut a = [0.0; 3];
    a[..args.len()].copy_from_slice(args);
    BernoulliValue {
        value,
        epsilon,
        order: args.len(),
        args: a,
    }
}

pub fn bernoulli1(epsilon: f64, s: f64) -> Result<BernoulliValue> {
    Ok(wrap(epsilon, &[s], bernoulli(epsilon, &[s])?))
}

pub fn bernoulli2(epsilon: f64, s: f64, t: f64) -> Result<BernoulliValue> {
    Ok(wrap(epsilon, &[s, t], bernoulli(epsilon, &[s, t])?))
}

pub fn bernoulli3(epsilon: f64, s: f64, t: f64, r: f64) -> Result<BernoulliValue> {
    Ok(wrap(epsilon, &[s, t, r], bernoulli(epsilon, &[s, t, r])?))
}

/// `B_j^eps(args)` with `j = args.len()` in `1..=3`.
pub fn bernoulli(epsilon: f64, args: &[f64]) -> Result<f64> {
    if !(epsilon >= 0.0) {
        return Err(Error::NegativeEpsilon(epsilon));
    }
    assert!((1..=3).contains(&args.len()));
    if epsilon == 0.0 {
        return Ok(bernoulli_limit(args));
    }
    let mut a = [0.0; 3];
    for (ai, &s) in a.iter_mut().zip(args) {
        *ai = s / epsilon;
    }
    let a = &a[..args.len()];
    if a.iter().any(|v| !(v.abs() < LIMIT_RATIO)) {
        return Ok(bernoulli_limit(args));
    }
    let scaled = match *a {
        [x] => Some(b1_closed(x)),
        [x, y] => b2_closed(x, y),
        [x, y, z] => b3_closed(x, y, z),
        _ => unreachable!(),
    };
    Ok(epsilon * scaled.unwrap_or_else(|| scaled_ratio(a)))
}

/// Vanishing-diffusion limits `B_j^0`.
pub fn bernoulli_limit(args: &[f64]) -> f64 {
    match *args {
        [s] => {
            if s < 0.0 {
                -s
            } else {
                0.0
            }
        }
        [s, t] => {
            if s >= t && s >= 0.0 {
                (s - t) / 2.0
            } else if t >= s && t >= 0.0 {
                0.0
            } else {
                -t / 2.0
            }
        }
        [s, t, r] => {
            let m = s.max(t).max(r);
            if m < 0.0 {
                -r / 3.0
            } else if m == s {
                (s - r) / 3.0
            } else if m == t {
                (t - r) / 3.0
            } else {
                0.0
            }
        }
        _ => panic!("Bernoulli kernels take one to three arguments"),
    }
}

/// `B_j^1(a) = exp[0, a_1..a_{j-1}] / (j exp[0, a_1..a_j])`.
fn scaled_ratio(a: &[f64]) -> f64 {
    let j = a.len();
    let mut nodes = vec![0.0];
    nodes.extend_from_slice(&a[..j - 1]);
    let num = exp_divided_difference(&nodes);
    nodes.push(a[j - 1]);
    let den = exp_divided_difference(&nodes);
    num.ratio(den) / j as f64
}

// e^{-m} (e^a - 1) without overflow, m >= max(a, 0)
fn shifted_expm1(a: f64, m: f64) -> f64 {
    if a > 0.0 {
        (a - m).exp() * -(-a).exp_m1()
    } else {
        (-m).exp() * a.exp_m1()
    }
}

fn cancels(sum: f64, magnitude: f64) -> bool {
    !(sum.abs() >= SINGULAR_TOLERANCE * magnitude) || magnitude == 0.0
}

fn b1_closed(a: f64) -> f64 {
    if a == 0.0 {
        1.0
    } else {
        a / a.exp_m1()
    }
}

// b (b - a)(e^a - 1) / (2 (a e^b - b e^a + b - a))
fn b2_closed(a: f64, b: f64) -> Option<f64> {
    let m = a.max(b).max(0.0);
    let (ea, eb, e0) = ((a - m).exp(), (b - m).exp(), (-m).exp());
    let terms = [a * eb, -b * ea, (b - a) * e0];
    let den: f64 = terms.iter().sum();
    let mag: f64 = terms.iter().map(|v| v.abs()).sum();
    if cancels(den, mag) {
        return None;
    }
    Some(b * (b - a) * shifted_expm1(a, m) / (2.0 * den))
}

// -c (a - c)(c - b) N / (3 D) with
// N = a e^b - b e^a + b - a,
// D = ab(b - a) e^c + ac(a - c) e^b + cb(c - b) e^a + (b - a)(a - c)(c - b)
fn b3_closed(a: f64, b: f64, c: f64) -> Option<f64> {
    let m = a.max(b).max(c).max(0.0);
    let (ea, eb, ec, e0) = ((a - m).exp(), (b - m).exp(), (c - m).exp(), (-m).exp());
    let n_terms = [a * eb, -b * ea, (b - a) * e0];
    let d_terms = [
        a * b * (b - a) * ec,
        a * c * (a - c) * eb,
        c * b * (c - b) * ea,
        (b - a) * (a - c) * (c - b) * e0,
    ];
    let n: f64 = n_terms.iter().sum();
    let d: f64 = d_terms.iter().sum();
    if cancels(n, n_terms.iter().map(|v| v.abs()).sum()) || cancels(d, d_terms.iter().map(|v| v.abs()).sum()) {
        return None;
    }
    Some(-c * (a - c) * (c - b) * n / (3.0 * d))
}
