//! Real polynomials in the monomial and Chebyshev bases.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;

/// Polynomial with ascending monomial coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    /// Product of the given factors, each as ascending coefficients.
    pub fn product(factors: &[&[f64]]) -> Self {
        factors.iter().fold(Self::new(vec![1.0]), |acc, f| acc.mul(&Self::new(f.to_vec())))
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Degree of the zero polynomial is reported as 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::new(Vec::new());
        }
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// `p(a x + b)`.
    pub fn compose_affine(&self, a: f64, b: f64) -> Self {
        let lin = Self::new(vec![b, a]);
        let mut out = Self::new(Vec::new());
        for &c in self.coeffs.iter().rev() {
            out = out.mul(&lin);
            let mut cs = out.coeffs.clone();
            if cs.is_empty() {
                cs.push(0.0);
            }
            cs[0] += c;
            out = Self::new(cs);
        }
        out
    }

    /// Largest coefficientwise difference, padding the shorter with zeros.
    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or(0.0);
                let b = other.coeffs.get(i).copied().unwrap_or(0.0);
                math::abs(a - b)
            })
            .fold(0.0, f64::max)
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0.0) {
            self.coeffs.pop();
        }
    }
}

/// Chebyshev series `Σ c_k T_k(t)` with `t = (2x − a − b)/(b − a)` on `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevSeries {
    pub coeffs: Vec<f64>,
    pub a: f64,
    pub b: f64,
}

/// The `n` Chebyshev points of the first kind mapped to `[a, b]`, ascending.
pub fn chebyshev_nodes(n: usize, a: f64, b: f64) -> Vec<f64> {
    (0..n)
        .map(|j| {
            let t = -math::cos((2 * j + 1) as f64 * math::PI / (2 * n) as f64);
            0.5 * (a + b) + 0.5 * (b - a) * t
        })
        .collect()
}

impl ChebyshevSeries {
    /// Interpolates values taken at `chebyshev_nodes(values.len(), a, b)`.
    pub fn interpolate(values: &[f64], a: f64, b: f64) -> Self {
        let n = values.len();
        let coeffs = (0..n)
            .map(|k| {
                let s: f64 = values
                    .iter()
                    .enumerate()
                    .map(|(j, &f)| {
                        // Node j sits at angle (2j+1)π/2n measured from t = −1.
                        let theta = (2 * j + 1) as f64 * math::PI / (2 * n) as f64;
                        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                        f * sign * math::cos(k as f64 * theta)
                    })
                    .sum();
                let w = if k == 0 { 1.0 } else { 2.0 };
                w * s / n as f64
            })
            .collect();
        Self { coeffs, a, b }
    }

    /// Index of the highest coefficient above `rel_tol` times the largest.
    pub fn effective_degree(&self, rel_tol: f64) -> usize {
        let big = self.coeffs.iter().map(|c| math::abs(*c)).fold(0.0, f64::max);
        self.coeffs.iter().rposition(|c| math::abs(*c) > rel_tol * big).unwrap_or(0)
    }

    pub fn truncate(&self, degree: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.truncate(degree + 1);
        Self { coeffs, a: self.a, b: self.b }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let t = (2.0 * x - self.a - self.b) / (self.b - self.a);
        // Clenshaw recurrence.
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * t * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        t * b1 - b2 + self.coeffs.first().copied().unwrap_or(0.0)
    }

    /// Converts to the monomial basis in `x`.
    pub fn to_monomial(&self) -> Polynomial {
        let mut t_prev = Polynomial::new(vec![1.0]);
        let mut t_cur = Polynomial::new(vec![0.0, 1.0]);
        let mut acc = vec![0.0; self.coeffs.len().max(1)];
        for (k, &c) in self.coeffs.iter().enumerate() {
            let tk = match k {
                0 => t_prev.clone(),
                1 => t_cur.clone(),
                _ => {
                    let next = Polynomial::new(vec![0.0, 2.0]).mul(&t_cur);
                    let mut cs = next.coeffs.clone();
                    for (i, p) in t_prev.coeffs.iter().enumerate() {
                        cs[i] -= p;
                    }
                    t_prev = t_cur;
                    t_cur = Polynomial::new(cs);
                    t_cur.clone()
                }
            };
            for (i, p) in tk.coeffs.iter().enumerate() {
                acc[i] += c * p;
            }
        }
        let in_t = Polynomial::new(acc);
        let scale = 2.0 / (self.b - self.a);
        in_t.compose_affine(scale, -(self.a + self.b) / (self.b - self.a))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_eval() {
        // (x − 1)(x + 2) = x² + x − 2
        let p = Polynomial::product(&[&[-1.0, 1.0], &[2.0, 1.0]]);
        assert_eq!(p.coeffs(), &[-2.0, 1.0, 1.0]);
        assert_eq!(p.eval(3.0), 10.0);
        assert_eq!(p.degree(), 2);
    }

    #[test]
    fn compose_affine_shifts() {
        // p(x) = x², p(2x + 1) = 4x² + 4x + 1
        let p = Polynomial::new(vec![0.0, 0.0, 1.0]).compose_affine(2.0, 1.0);
        assert_eq!(p.coeffs(), &[1.0, 4.0, 4.0]);
    }

    #[test]
    fn chebyshev_round_trip_recovers_cubic() {
        let p = Polynomial::new(vec![1.0, -2.0, 0.5, 3.0]);
        let nodes = chebyshev_nodes(10, 0.0, 4.0);
        let values: Vec<f64> = nodes.iter().map(|&x| p.eval(x)).collect();
        let s = ChebyshevSeries::interpolate(&values, 0.0, 4.0);
        assert_eq!(s.effective_degree(1e-12), 3);
        for &x in &[0.1, 1.7, 3.9] {
            assert!((s.eval(x) - p.eval(x)).abs() < 1e-11);
        }
        let back = s.truncate(3).to_monomial();
        assert!(back.max_coeff_diff(&p) < 1e-11, "{back:?}");
    }

    #[test]
    fn nodes_are_ascending_and_interior() {
        let n = chebyshev_nodes(24, 0.0, 4.0);
        assert!(n.windows(2).all(|w| w[0] < w[1]));
        assert!(n[0] > 0.0 && n[23] < 4.0);
    }
}
