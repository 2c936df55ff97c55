//! Divided differences of `exp`, the engine behind every exponential average.
//!
//! By the Hermite-Genocchi formula the average of `exp(z(x))` over a
//! `k`-simplex, with `z` affine and vertex values `z_0..z_k`, equals
//! `k! * exp[z_0, ..., z_k]`. Values are returned with a separate exponent so
//! that averages with exponents far beyond the `f64` range can still be
//! divided by one another.

/// Spread below which the Taylor expansion is used instead of the recursion.
const TAYLOR_SPREAD: f64 = 1.0;
const TAYLOR_TERMS: usize = 28;

/// Positive number represented as `mantissa * exp(shift)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledExp {
    pub mantissa: f64,
    pub shift: f64,
}

impl ScaledExp {
    pub fn value(self) -> f64 {
        self.mantissa * self.shift.exp()
    }

    pub fn ln(self) -> f64 {
        self.mantissa.ln() + self.shift
    }

    /// `self / other` without forming either factor.
    pub fn ratio(self, other: ScaledExp) -> f64 {
        (self.mantissa / other.mantissa) * (self.shift - other.shift).exp()
    }

    pub fn scale(self, c: f64) -> ScaledExp {
        ScaledExp {
            mantissa: self.mantissa * c,
            shift: self.shift,
        }
    }
}

/// `exp[z_0, ..., z_k]` for arbitrary (possibly repeated) nodes.
pub fn exp_divided_difference(z: &[f64]) -> ScaledExp {
    assert!(!z.is_empty() && z.len() <= 8);
    let shift = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut w: Vec<f64> = z.iter().map(|v| v - shift).collect();
    w.sort_by(|a, b| a.total_cmp(b));
    ScaledExp {
        mantissa: dd_sorted(&w),
        shift,
    }
}

/// Average of `exp` over the simplex whose vertices carry the exponents `z`.
pub fn exp_simplex_average(z: &[f64]) -> ScaledExp {
    let k = z.len() - 1;
    let fact: f64 = (1..=k).map(|i| i as f64).product();
    exp_divided_difference(z).scale(fact)
}

// nodes sorted ascending and bounded above by 0
fn dd_sorted(w: &[f64]) -> f64 {
    let n = w.len();
    match n {
        1 => w[0].exp(),
        2 => {
            let d = w[1] - w[0];
            if d == 0.0 {
                w[1].exp()
            } else {
                w[1].exp() * (-(-d).exp_m1()) / d
            }
        }
        _ => {
            let spread = w[n - 1] - w[0];
            if spread < TAYLOR_SPREAD {
                dd_taylor(w)
            } else {
                (dd_sorted(&w[1..]) - dd_sorted(&w[..n - 1])) / spread
            }
        }
    }
}

// exp[w] = e^c sum_p h_p(w - c) / (p + k)!, h_p the complete homogeneous
// symmetric polynomials.
fn dd_taylor(w: &[f64]) -> f64 {
    let k = w.len() - 1;
    let c = 0.5 * (w[0] + w[k]);
    let mut h = [0.0; TAYLOR_TERMS];
    h[0] = 1.0;
    for &wi in w {
        let y = wi - c;
        for p in 1..TAYLOR_TERMS {
            h[p] += y * h[p - 1];
        }
    }
    let mut fact: f64 = (1..=k).map(|i| i as f64).product();
    let mut sum = 0.0;
    for (p, hp) in h.iter().enumerate() {
        sum += hp / fact;
        fact *= (p + k + 1) as f64;
    }
    c.exp() * sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn two_nodes() {
        assert_relative_eq!(exp_divided_difference(&[0.0, 1.0]).value(), std::f64::consts::E - 1.0, max_relative = 1e-15);
        assert_relative_eq!(exp_divided_difference(&[2.0, 2.0]).value(), 2f64.exp(), max_relative = 1e-15);
    }

    #[test]
    fn confluent_nodes_give_derivatives() {
        // exp[z, z, z] = e^z / 2, exp[z; 4 times] = e^z / 6
        assert_relative_eq!(exp_divided_difference(&[0.3; 3]).value(), 0.3f64.exp() / 2.0, max_relative = 1e-15);
        assert_relative_eq!(exp_divided_difference(&[-0.7; 4]).value(), (-0.7f64).exp() / 6.0, max_relative = 1e-15);
    }

    #[test]
    fn taylor_and_recursion_agree_across_threshold() {
        for spread in [0.99, 0.999_999, 1.0, 1.000_001, 1.01] {
            let z = [-spread, -0.4 * spread, 0.0];
            let lhs = exp_divided_difference(&z).value();
            // generic closed form with distinct nodes
            let rhs: f64 = (0..3)
                .map(|i| {
                    let den: f64 = (0..3).filter(|&j| j != i).map(|j| z[i] - z[j]).product();
                    z[i].exp() / den
                })
                .sum();
            assert_relative_eq!(lhs, rhs, max_relative = 1e-13);
        }
    }

    #[test]
    fn huge_exponents_do_not_overflow() {
        let a = exp_simplex_average(&[1e6, 0.0, -3.0, 2e5]);
        assert!(a.mantissa.is_finite() && a.mantissa > 0.0);
        assert_eq!(a.shift, 1e6);
        let b = exp_simplex_average(&[1e6, 0.0]);
        assert_relative_eq!(b.ln(), 1e6 - 1e6f64.ln(), max_relative = 1e-14);
    }

    #[test]
    fn permutation_invariant() {
        let a = exp_divided_difference(&[0.2, -3.0, 1.7, 1.7000001]).value();
        let b = exp_divided_difference(&[1.7000001, 1.7, 0.2, -3.0]).value();
        assert_relative_eq!(a, b, max_relative = 1e-15);
    }
}
