//! Truncated derivative jets.
//!
//! A [`Jet`] of order `k` holds `f(r), f'(r), ..., f^(k)(r)` at one point.
//! Arithmetic propagates all derivatives exactly (up to round-off) through
//! the Leibniz rule and the Faà di Bruno style recurrences for `exp`,
//! `ln`, reciprocal and real powers.

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    coeffs: Vec<f64>,
}

/// Binomial coefficient as f64. Orders here are tiny, so the direct product is exact.
fn binom(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

impl Jet {
    pub fn from_derivatives(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a jet needs at least the value");
        Jet { coeffs }
    }

    pub fn constant(value: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = value;
        Jet { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Jet::constant(0.0, order)
    }

    /// Jet of the identity map `r -> r` at `r`.
    pub fn variable(r: f64, order: usize) -> Self {
        let mut j = Jet::constant(r, order);
        if order >= 1 {
            j.coeffs[1] = 1.0;
        }
        j
    }

    /// Jet of `r^alpha` at `r > 0`, computed from the falling factorial directly.
    pub fn power_of_variable(r: f64, alpha: f64, order: usize) -> Self {
        let mut coeffs = Vec::with_capacity(order + 1);
        let mut falling = 1.0;
        for j in 0..=order {
            if falling == 0.0 {
                coeffs.push(0.0);
            } else {
                coeffs.push(falling * r.powf(alpha - j as f64));
            }
            falling *= alpha - j as f64;
        }
        Jet { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// `j`-th derivative; zero beyond the jet order.
    pub fn deriv(&self, j: usize) -> f64 {
        self.coeffs.get(j).copied().unwrap_or(0.0)
    }

    pub fn derivatives(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn truncate(&self, order: usize) -> Jet {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, 0.0);
        Jet { coeffs }
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Jet of `g(s) = f(lambda * s)` given the jet of `f` at `lambda * s`.
    pub fn chain_linear(&self, lambda: f64) -> Jet {
        let mut factor = 1.0;
        Jet {
            coeffs: self
                .coeffs
                .iter()
                .map(|c| {
                    let v = c * factor;
                    factor *= lambda;
                    v
                })
                .collect(),
        }
    }

    pub fn exp(&self) -> Jet {
        let n = self.order();
        let mut h = vec![0.0; n + 1];
        h[0] = self.coeffs[0].exp();
        for m in 1..=n {
            let mut acc = 0.0;
            for k in 0..m {
                acc += binom(m - 1, k) * self.coeffs[k + 1] * h[m - 1 - k];
            }
            h[m] = acc;
        }
        Jet { coeffs: h }
    }

    pub fn ln(&self) -> Jet {
        let n = self.order();
        let f = &self.coeffs;
        let mut h = vec![0.0; n + 1];
        h[0] = f[0].ln();
        for m in 1..=n {
            let mut acc = f[m];
            for k in 1..m {
                acc -= binom(m - 1, k) * f[k] * h[m - k];
            }
            h[m] = acc / f[0];
        }
        Jet { coeffs: h }
    }

    pub fn recip(&self) -> Jet {
        let n = self.order();
        let f = &self.coeffs;
        let mut g = vec![0.0; n + 1];
        g[0] = 1.0 / f[0];
        for m in 1..=n {
            let mut acc = 0.0;
            for k in 1..=m {
                acc += binom(m, k) * f[k] * g[m - k];
            }
            g[m] = -acc / f[0];
        }
        Jet { coeffs: g }
    }

    /// `f^alpha` for `f(r) > 0`.
    pub fn powf(&self, alpha: f64) -> Jet {
        let n = self.order();
        let f = &self.coeffs;
        let mut h = vec![0.0; n + 1];
        h[0] = f[0].powf(alpha);
        for m in 1..=n {
            let mut acc = 0.0;
            for k in 0..m {
                acc += alpha * binom(m - 1, k) * f[k + 1] * h[m - 1 - k];
            }
            for k in 1..m {
                acc -= binom(m - 1, k) * f[k] * h[m - k];
            }
            h[m] = acc / f[0];
        }
        Jet { coeffs: h }
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        let n = self.order().min(rhs.order());
        Jet {
            coeffs: (0..=n).map(|j| self.coeffs[j] + rhs.coeffs[j]).collect(),
        }
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        let n = self.order().min(rhs.order());
        Jet {
            coeffs: (0..=n).map(|j| self.coeffs[j] - rhs.coeffs[j]).collect(),
        }
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        let n = self.order().min(rhs.order());
        let mut out = vec![0.0; n + 1];
        for (m, slot) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in 0..=m {
                acc += binom(m, k) * self.coeffs[k] * rhs.coeffs[m - k];
            }
            *slot = acc;
        }
        Jet { coeffs: out }
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn polynomial_power() {
        let j = Jet::power_of_variable(3.0, 2.0, 3);
        assert_eq!(j.derivatives(), &[9.0, 6.0, 2.0, 0.0]);
    }

    #[test]
    fn exp_of_linear() {
        // exp(2r) at r = 0.5
        let x = Jet::variable(0.5, 4).scale(2.0);
        let e = x.exp();
        for j in 0..=4 {
            assert!(close(e.deriv(j), 2f64.powi(j as i32) * 1f64.exp(), 1e-14));
        }
    }

    #[test]
    fn recip_and_ln() {
        let x = Jet::variable(2.0, 3);
        let g = x.recip();
        assert!(close(g.deriv(0), 0.5, 1e-15));
        assert!(close(g.deriv(1), -0.25, 1e-15));
        assert!(close(g.deriv(2), 0.25, 1e-15));
        assert!(close(g.deriv(3), -6.0 / 16.0, 1e-15));
        let l = x.ln();
        assert!(close(l.deriv(1), 0.5, 1e-15));
        assert!(close(l.deriv(2), -0.25, 1e-15));
        assert!(close(l.deriv(3), 0.25, 1e-15));
    }

    #[test]
    fn powf_matches_direct_power() {
        let x = Jet::variable(1.7, 4);
        let a = x.powf(-0.3);
        let b = Jet::power_of_variable(1.7, -0.3, 4);
        for j in 0..=4 {
            assert!(close(a.deriv(j), b.deriv(j), 1e-13), "order {j}");
        }
    }

    #[test]
    fn constant_has_zero_tail() {
        let c = Jet::constant(3.5, 5);
        assert!(c.derivatives()[1..].iter().all(|&v| v == 0.0));
    }
}
