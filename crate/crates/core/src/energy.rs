//! Energy forms, graph Laplacians and harmonic extension on the level-`m`
//! path graphs.

use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::LevelGraph;
use crate::linalg::{thomas, DoubleDouble, Scalar};
use crate::{math, Error, Rational, Result, DEFAULT_LEVEL_CAP};

/// Real values on the vertices of a level, in curve order.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexFunction {
    level: u32,
    values: Vec<f64>,
}

impl VertexFunction {
    pub fn new(level: u32, values: Vec<f64>) -> Result<Self> {
        let expected = level_len(level)?;
        if values.len() != expected {
            return Err(Error::LengthMismatch { level, expected, got: values.len() });
        }
        Ok(Self { level, values })
    }

    /// Function given by `f(index)` on every vertex.
    pub fn from_fn(level: u32, f: impl FnMut(usize) -> f64) -> Result<Self> {
        let n = level_len(level)?;
        Ok(Self { level, values: (0..n).map(f).collect() })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// `min(max(u, 0), 1)` pointwise.
    pub fn clamp_unit(&self) -> Self {
        Self { level: self.level, values: self.values.iter().map(|v| v.clamp(0.0, 1.0)).collect() }
    }
}

fn level_len(level: u32) -> Result<usize> {
    let n = crate::geometry::vertex_count(level)?;
    usize::try_from(n).map_err(|_| Error::Overflow { what: "vertex count", level })
}

/// Per-level prefactor applied to the edge sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NormalizationConvention {
    /// Plain sum of squared differences.
    Raw,
    /// `8^m`, keeping harmonic energy level-invariant.
    #[default]
    Conserved,
    /// `8^m · 64^m = 512^m`.
    PaperGeometric,
}

impl NormalizationConvention {
    pub fn prefactor(self, m: u32) -> f64 {
        match self {
            Self::Raw => 1.0,
            Self::Conserved => math::powu(8.0, m),
            Self::PaperGeometric => math::powu(512.0, m),
        }
    }
}

/// Harmonic extension of boundary data `(A, B)` to level `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicExtensionResult {
    pub level: u32,
    pub boundary: (f64, f64),
    pub interior_values: Vec<f64>,
    /// Level-0 energy `(A − B)²`.
    pub energy_in: f64,
    /// Level-`m` energy under the conserved convention.
    pub energy_out: f64,
}

impl HarmonicExtensionResult {
    /// Boundary and interior values in curve order.
    pub fn function(&self) -> VertexFunction {
        let mut values = Vec::with_capacity(self.interior_values.len() + 2);
        values.push(self.boundary.0);
        values.extend_from_slice(&self.interior_values);
        values.push(self.boundary.1);
        VertexFunction { level: self.level, values }
    }

    pub fn energy_under(&self, n: NormalizationConvention) -> f64 {
        n.prefactor(self.level) * edge_sum(&self.function().values, &self.function().values)
    }
}

/// `Δ_m u(X) = Σ_{Y ~ X} (u(Y) − u(X))` at an interior vertex.
pub fn graph_laplacian(g: &LevelGraph, u: &VertexFunction, x: usize) -> Result<f64> {
    check_level(g, u)?;
    if x >= g.len() {
        return Err(Error::IndexOutOfRange { index: x, len: g.len() });
    }
    if g.is_boundary(x) {
        return Err(Error::BoundaryVertex { index: x });
    }
    let v = &u.values;
    Ok(v[x - 1] + v[x + 1] - 2.0 * v[x])
}

fn check_level(g: &LevelGraph, u: &VertexFunction) -> Result<()> {
    if g.level() != u.level {
        return Err(Error::LevelMismatch { left: g.level(), right: u.level });
    }
    Ok(())
}

/// Interior values minimizing the level-`m` energy with `u(P_0) = A`,
/// `u(P_1) = B`, from the tridiagonal system `2u_i − u_{i−1} − u_{i+1} = 0`.
///
/// The sweep runs in double-double arithmetic so the level-`m` increments,
/// of size `8^{−m}`, keep full relative precision up to the level cap.
pub fn harmonic_extension(a: f64, b: f64, m: u32) -> Result<HarmonicExtensionResult> {
    let interior_values = solve_harmonic(DoubleDouble::new(a), DoubleDouble::new(b), m)?
        .into_iter()
        .map(DoubleDouble::to_f64)
        .collect();
    let mut r = HarmonicExtensionResult {
        level: m,
        boundary: (a, b),
        interior_values,
        energy_in: (a - b) * (a - b),
        energy_out: 0.0,
    };
    r.energy_out = r.energy_under(NormalizationConvention::Conserved);
    Ok(r)
}

/// Exact harmonic extension in rational arithmetic.
pub fn harmonic_extension_exact(a: Rational, b: Rational, m: u32) -> Result<Vec<Rational>> {
    if m > 4 {
        return Err(Error::LevelCap { level: m, cap: 4 });
    }
    solve_harmonic(a, b, m)
}

/// Coefficients `(α_i, β_i)` with `u(X_i) = α_i A + β_i B` for the harmonic
/// extension to level `m`.
pub fn harmonic_coefficients(m: u32) -> Result<Vec<(Rational, Rational)>> {
    let zero = Rational::from_integer(0);
    let one = Rational::from_integer(1);
    let alpha = harmonic_extension_exact(one, zero, m)?;
    let beta = harmonic_extension_exact(zero, one, m)?;
    Ok(alpha.into_iter().zip(beta).collect())
}

fn solve_harmonic<T: Scalar>(a: T, b: T, m: u32) -> Result<Vec<T>> {
    if m > DEFAULT_LEVEL_CAP {
        return Err(Error::LevelCap { level: m, cap: DEFAULT_LEVEL_CAP });
    }
    let n = level_len(m)? - 2;
    if n == 0 {
        return Ok(Vec::new());
    }
    let two = T::one() + T::one();
    let off = vec![-T::one(); n - 1];
    let diag = vec![two; n];
    let mut rhs = vec![T::zero(); n];
    rhs[0] = a;
    rhs[n - 1] = rhs[n - 1].clone() + b;
    thomas(&off, &diag, &off, &rhs)
}

/// Compensated sum of `Σ (u_i − u_{i−1})(v_i − v_{i−1})`.
fn edge_sum(u: &[f64], v: &[f64]) -> f64 {
    let (mut sum, mut carry) = (0.0f64, 0.0f64);
    for (a, b) in u.windows(2).zip(v.windows(2)) {
        let term = (a[1] - a[0]) * (b[1] - b[0]);
        let t = sum + term;
        carry += if math::abs(sum) >= math::abs(term) { (sum - t) + term } else { (term - t) + sum };
        sum = t;
    }
    sum + carry
}

/// `prefactor · Σ_edges (u(Y) − u(X))²`.
pub fn energy(g: &LevelGraph, u: &VertexFunction, n: NormalizationConvention) -> Result<f64> {
    check_level(g, u)?;
    Ok(n.prefactor(u.level) * edge_sum(&u.values, &u.values))
}

/// Polarized form `ℰ_m(u, v)`.
pub fn energy_pair(u: &VertexFunction, v: &VertexFunction, n: NormalizationConvention) -> Result<f64> {
    if u.level != v.level {
        return Err(Error::LevelMismatch { left: u.level, right: v.level });
    }
    Ok(n.prefactor(u.level) * edge_sum(&u.values, &v.values))
}

/// Ratio of the raw level-1 harmonic energy to the level-0 energy.
pub fn ramification_constant() -> Result<f64> {
    ramification_ratio(0.0, 1.0)
}

/// The same ratio for arbitrary non-constant boundary data.
pub fn ramification_ratio(a: f64, b: f64) -> Result<f64> {
    if a == b {
        return Err(Error::Domain("boundary data must differ"));
    }
    let g0 = crate::geometry::build_level(0)?;
    let g1 = crate::geometry::build_level(1)?;
    let e0 = energy(&g0, &VertexFunction::new(0, vec![a, b])?, NormalizationConvention::Raw)?;
    let h = harmonic_extension(a, b, 1)?;
    let e1 = energy(&g1, &h.function(), NormalizationConvention::Raw)?;
    Ok(e1 / e0)
}

/// Weight `μ_i` of each cell in the self-similar measure.
pub fn self_similar_weight() -> f64 {
    1.0 / 8.0
}

/// `∫ ψ dμ` for a level-`m` tent function (`m ≥ 1`), or for the sum of the
/// two level-0 tents (`m = 0`), integrated cellwise on level `m + 1`.
///
/// Tents are harmonic on each level-`m` cell, hence linear in the level
/// `m + 1` index, so the trapezoid sum is exact.
pub fn spline_integral(m: u32) -> Result<f64> {
    if m >= DEFAULT_LEVEL_CAP {
        return Err(Error::LevelCap { level: m, cap: DEFAULT_LEVEL_CAP - 1 });
    }
    let fine = level_len(m + 1)?;
    let cell = math::powu(self_similar_weight(), m + 1);
    let tent = |i: usize| -> f64 {
        if m == 0 {
            return 1.0;
        }
        let d = (i as f64 - 8.0).abs();
        (1.0 - d / 8.0).max(0.0)
    };
    Ok((1..fine).map(|i| cell * 0.5 * (tent(i - 1) + tent(i))).sum())
}

/// `64^m`, the pointwise Laplacian renormalizer.
pub fn laplacian_renormalizer(m: u32) -> Result<f64> {
    let v = math::powu(64.0, m);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow { what: "laplacian renormalizer", level: m })
    }
}

/// Level-`m` partial normal derivative `prefactor · Σ_{Y ~ X} (u(X) − u(Y))`
/// at a boundary vertex.
pub fn normal_derivative(u: &VertexFunction, x: usize, n: NormalizationConvention) -> Result<f64> {
    let v = &u.values;
    let last = v.len() - 1;
    let diff = match x {
        0 => v[0] - v[1],
        i if i == last => v[last] - v[last - 1],
        i if i < last => return Err(Error::InteriorVertex { index: i }),
        i => return Err(Error::IndexOutOfRange { index: i, len: v.len() }),
    };
    Ok(n.prefactor(u.level) * diff)
}

/// The three terms of the discrete Gauss–Green identity:
/// `ℰ(u, v)`, `Σ_{interior} v · prefactor · Δu`, `Σ_{V_0} v · ∂_n u`.
pub fn gauss_green_terms(
    u: &VertexFunction,
    v: &VertexFunction,
    n: NormalizationConvention,
) -> Result<(f64, f64, f64)> {
    let e = energy_pair(u, v, n)?;
    let p = n.prefactor(u.level);
    let (uu, vv) = (&u.values, &v.values);
    let last = uu.len() - 1;
    let interior: f64 = (1..last).map(|i| vv[i] * p * (uu[i - 1] + uu[i + 1] - 2.0 * uu[i])).sum();
    let boundary = vv[0] * normal_derivative(u, 0, n)? + vv[last] * normal_derivative(u, last, n)?;
    Ok((e, interior, boundary))
}

/// `|ℰ(u, v) + Σ_{interior} v · prefactor · Δu − Σ_{V_0} v · ∂_n u|`.
pub fn gauss_green_residual(u: &VertexFunction, v: &VertexFunction, n: NormalizationConvention) -> Result<f64> {
    let (e, interior, boundary) = gauss_green_terms(u, v, n)?;
    Ok(math::abs(e + interior - boundary))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_level;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn laplacian_examples() {
        let g = build_level(1).unwrap();
        let c = VertexFunction::from_fn(1, |_| 3.5).unwrap();
        assert_eq!(graph_laplacian(&g, &c, 4), Ok(0.0));
        let lin = VertexFunction::from_fn(1, |i| i as f64 / 8.0).unwrap();
        assert!(graph_laplacian(&g, &lin, 3).unwrap().abs() < 1e-15);
        let ind = VertexFunction::from_fn(1, |i| if i == 4 { 1.0 } else { 0.0 }).unwrap();
        assert_eq!(graph_laplacian(&g, &ind, 4), Ok(-2.0));
        assert_eq!(graph_laplacian(&g, &ind, 0), Err(Error::BoundaryVertex { index: 0 }));
    }

    #[test]
    fn level_one_coefficients_are_exact() {
        let want = [(7, 1), (6, 2), (5, 3), (4, 4), (3, 5), (2, 6), (1, 7)];
        let got = harmonic_coefficients(1).unwrap();
        for ((a, b), (wa, wb)) in got.into_iter().zip(want) {
            assert_eq!((a, b), (r(wa, 8), r(wb, 8)));
        }
    }

    #[test]
    fn extension_examples() {
        let h = harmonic_extension(2.5, 2.5, 2).unwrap();
        assert!(h.interior_values.iter().all(|&v| (v - 2.5).abs() < 1e-14));
        let h = harmonic_extension(0.0, 1.0, 2).unwrap();
        for (k, v) in h.interior_values.iter().enumerate() {
            assert!((v - (k + 1) as f64 / 64.0).abs() < 1e-15);
        }
        assert!((h.energy_out - 1.0).abs() < 1e-13);
    }

    #[test]
    fn energy_examples() {
        let g0 = build_level(0).unwrap();
        let u = VertexFunction::new(0, vec![2.0, 5.0]).unwrap();
        for n in [NormalizationConvention::Raw, NormalizationConvention::Conserved, NormalizationConvention::PaperGeometric] {
            assert_eq!(energy(&g0, &u, n), Ok(9.0));
        }
        let g1 = build_level(1).unwrap();
        let h = harmonic_extension(2.0, 5.0, 1).unwrap();
        let e = energy(&g1, &h.function(), NormalizationConvention::Raw).unwrap();
        assert!((e - 9.0 / 8.0).abs() < 1e-14);
        assert!(matches!(energy(&g0, &h.function(), NormalizationConvention::Raw), Err(Error::LevelMismatch { .. })));
        assert!(matches!(VertexFunction::new(1, vec![0.0; 3]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn ramification_examples() {
        assert!((ramification_constant().unwrap() - 0.125).abs() < 1e-15);
        let a = ramification_ratio(0.0, 1.0).unwrap();
        let b = ramification_ratio(2.0, 5.0).unwrap();
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn measure_constants() {
        assert_eq!(self_similar_weight(), 0.125);
        assert!((spline_integral(0).unwrap() - 1.0).abs() < 1e-15);
        assert!((spline_integral(1).unwrap() - 1.0 / 8.0).abs() < 1e-15);
        assert!((spline_integral(2).unwrap() - 1.0 / 64.0).abs() < 1e-15);
        assert_eq!(laplacian_renormalizer(0), Ok(1.0));
        assert_eq!(laplacian_renormalizer(1), Ok(64.0));
        assert_eq!(laplacian_renormalizer(3), Ok(262_144.0));
        assert!(laplacian_renormalizer(170).is_ok());
        assert!(laplacian_renormalizer(171).is_err());
    }

    #[test]
    fn normal_derivative_examples() {
        for m in 0..5 {
            let c = VertexFunction::from_fn(m, |_| 1.0).unwrap();
            assert_eq!(normal_derivative(&c, 0, NormalizationConvention::Raw), Ok(0.0));
            let h = harmonic_extension(0.0, 1.0, m).unwrap().function();
            let last = h.values().len() - 1;
            let d = normal_derivative(&h, last, NormalizationConvention::Conserved).unwrap();
            assert!((d - 1.0).abs() < 1e-12);
            let d0 = normal_derivative(&h, 0, NormalizationConvention::Raw).unwrap();
            assert!((d0 + math::powu(0.125, m)).abs() < 1e-15);
        }
        let h = harmonic_extension(0.0, 1.0, 1).unwrap().function();
        assert_eq!(normal_derivative(&h, 3, NormalizationConvention::Raw), Err(Error::InteriorVertex { index: 3 }));
    }

    #[test]
    fn gauss_green_by_hand() {
        let u = VertexFunction::from_fn(1, |i| if i == 3 { 1.0 } else { 0.0 }).unwrap();
        let (e, interior, boundary) = gauss_green_terms(&u, &u, NormalizationConvention::Raw).unwrap();
        assert_eq!((e, interior, boundary), (2.0, -2.0, 0.0));
        assert_eq!(gauss_green_residual(&u, &u, NormalizationConvention::Raw), Ok(0.0));
        let h = harmonic_extension(0.3, -1.2, 2).unwrap().function();
        let v = VertexFunction::from_fn(2, |i| if i == 0 || i == 64 { 0.0 } else { (i as f64).sin() }).unwrap();
        let (e, interior, boundary) = gauss_green_terms(&h, &v, NormalizationConvention::Conserved).unwrap();
        assert!(e.abs() < 1e-12 && interior.abs() < 1e-12 && boundary.abs() < 1e-12);
    }
}
