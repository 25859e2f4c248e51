//! Strong harmonic structure of the curve and of the island: the boundary
//! Schur complement, the rational pair `(K_D, K_T)`, and the decimation
//! polynomial recovered from them.

use alloc::vec::Vec;

use crate::decimation::{forbidden_eigenvalues, DecimationPolynomial};
use crate::linalg::{symmetric_eigenvalues, Matrix};
use crate::math::{self, sqrt};
use crate::poly::{chebyshev_nodes, ChebyshevSeries, Polynomial};
use crate::{Error, Rational, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Curve,
    Island,
}

/// The matrices `(D, T, X, M, J)` of one variant.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicStructure {
    pub variant: Variant,
    pub d: Matrix<Rational>,
    pub t: Matrix<Rational>,
    pub x: Matrix<Rational>,
    pub m: Matrix<Rational>,
    pub j: Matrix<Rational>,
}

fn int(v: i64) -> Rational {
    Rational::from_integer(v)
}

/// The 7×7 interior block: `−2` on the diagonal, `1` beside it.
fn interior_block() -> Matrix<Rational> {
    let mut b = Matrix::zeros(7, 7);
    for i in 0..7 {
        b[(i, i)] = int(-2);
        if i + 1 < 7 {
            b[(i, i + 1)] = int(1);
            b[(i + 1, i)] = int(1);
        }
    }
    b
}

pub fn build_structure(variant: Variant) -> HarmonicStructure {
    let b = interior_block();
    let c = Matrix::<Rational>::identity(7).scale(int(2));
    match variant {
        Variant::Curve => {
            let d = Matrix::from_rows(&[alloc::vec![int(-1), int(1)], alloc::vec![int(1), int(-1)]]);
            let t = Matrix::<Rational>::identity(2).scale(int(-1));
            let mut j = Matrix::zeros(7, 2);
            j[(0, 0)] = int(1);
            j[(6, 1)] = int(1);
            HarmonicStructure { variant, d, t, x: b, m: c, j }
        }
        Variant::Island => {
            let mut d = Matrix::<Rational>::identity(4).scale(int(-2));
            for i in 0..4 {
                d[(i, (i + 1) % 4)] = int(1);
                d[((i + 1) % 4, i)] = int(1);
            }
            let t = Matrix::<Rational>::identity(4).scale(int(-2));
            let x = Matrix::block_diag(&[b.clone(), b.clone(), b.clone(), b]);
            let m = Matrix::block_diag(&[c.clone(), c.clone(), c.clone(), c]);
            let mut j = Matrix::zeros(28, 4);
            for (row, col) in [(0, 0), (6, 1), (7, 1), (13, 2), (14, 2), (20, 3), (21, 3), (27, 0)] {
                j[(row, col)] = int(1);
            }
            HarmonicStructure { variant, d, t, x, m, j }
        }
    }
}

/// Values of `λ` with `det(X + λM) = 0`, ascending.
pub fn resonances(s: &HarmonicStructure) -> Vec<f64> {
    // M is a positive diagonal, so the pencil reduces to the symmetric
    // matrix −M^{−1/2} X M^{−1/2}.
    let x = s.x.to_f64();
    let m = s.m.to_f64();
    let n = x.rows();
    let mut a = Matrix::<f64>::zeros(n, n);
    for i in 0..n {
        for k in 0..n {
            a[(i, k)] = -x[(i, k)] / sqrt(m[(i, i)] * m[(k, k)]);
        }
    }
    symmetric_eigenvalues(&a)
}

/// Distance below which `X + λM` is treated as singular.
pub const RESONANCE_GUARD: f64 = 1e-12;

/// `T − Jᵀ (X + λM)^{−1} J`, by a linear solve.
///
/// With the `+` sign the identity with the closed-form `K_D`, `K_T` fails
/// already at `λ = 0`; the `−` sign is the trace of the graph Laplacian on
/// the boundary and is the one the closed forms describe.
pub fn schur_complement(s: &HarmonicStructure, lambda: f64) -> Result<Matrix<f64>> {
    let distance = resonances(s).iter().map(|r| math::abs(r - lambda)).fold(f64::INFINITY, f64::min);
    if distance < RESONANCE_GUARD {
        return Err(Error::Resonance { lambda, distance });
    }
    let pencil = s.x.to_f64().add_scaled(lambda, &s.m.to_f64());
    let j = s.j.to_f64();
    let y = pencil.solve(&j)?;
    Ok(s.t.to_f64().add_scaled(-1.0, &j.transpose().mul(&y)))
}

/// Exact Schur complement at a rational `λ`.
pub fn schur_complement_exact(s: &HarmonicStructure, lambda: Rational) -> Result<Matrix<Rational>> {
    let pencil = s.x.add_scaled(lambda, &s.m);
    let y = pencil.solve(&s.j)?;
    Ok(s.t.add_scaled(int(-1), &s.j.transpose().mul(&y)))
}

/// `K_D(λ) = −1 / (8(λ−1)(2(λ−2)λ+1)(8(λ−2)λ(λ−1)²+1))`.
pub fn k_d(l: f64) -> f64 {
    -1.0 / (8.0 * (l - 1.0) * (2.0 * (l - 2.0) * l + 1.0) * (8.0 * (l - 2.0) * l * (l - 1.0) * (l - 1.0) + 1.0))
}

/// `K_T(λ) = λ(4λ(λ(2λ−7)+7)−7) / (8(λ−2)λ(λ−1)²+1)`.
pub fn k_t(l: f64) -> f64 {
    l * (4.0 * l * (l * (2.0 * l - 7.0) + 7.0) - 7.0) / (8.0 * (l - 2.0) * l * (l - 1.0) * (l - 1.0) + 1.0)
}

/// Least-squares `(K_D, K_T)` with `S ≈ K_D D + K_T T`, and the remaining
/// entrywise residual.
pub fn fit_pair(s: &HarmonicStructure, schur: &Matrix<f64>) -> (f64, f64, f64) {
    let d = s.d.to_f64();
    let t = s.t.to_f64();
    let n = d.rows();
    let (mut dd, mut dt, mut tt, mut ds, mut ts) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            let (a, b, c) = (d[(i, k)], t[(i, k)], schur[(i, k)]);
            dd += a * a;
            dt += a * b;
            tt += b * b;
            ds += a * c;
            ts += b * c;
        }
    }
    let det = dd * tt - dt * dt;
    let kd = (ds * tt - ts * dt) / det;
    let kt = (dd * ts - dt * ds) / det;
    let residual = schur.add_scaled(-kd, &d).add_scaled(-kt, &t).max_abs();
    (kd, kt, residual)
}

/// `‖S(λ) − K_D(λ) D − K_T(λ) T‖_∞` with the closed forms.
pub fn identity_residual(s: &HarmonicStructure, lambda: f64) -> Result<f64> {
    let schur = schur_complement(s, lambda)?;
    Ok(schur.add_scaled(-k_d(lambda), &s.d.to_f64()).add_scaled(-k_t(lambda), &s.t.to_f64()).max_abs())
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrongHarmonicReport {
    pub variant: Variant,
    /// Largest closed-form identity residual.
    pub max_residual: f64,
    /// Largest deviation of the fitted pair from the closed forms.
    pub max_pair_deviation: f64,
    pub samples_used: usize,
    pub samples_skipped: usize,
}

/// Samples closer than this to a resonance are skipped.
pub const SAMPLE_CLEARANCE: f64 = 1e-3;

/// Checks the identity at `sample_count` evenly spaced points of `[−1, 5]`.
pub fn verify_strong_harmonic(variant: Variant, sample_count: usize) -> Result<StrongHarmonicReport> {
    let s = build_structure(variant);
    let res = resonances(&s);
    let mut report = StrongHarmonicReport {
        variant,
        max_residual: 0.0,
        max_pair_deviation: 0.0,
        samples_used: 0,
        samples_skipped: 0,
    };
    for i in 0..sample_count {
        let lambda = -1.0 + 6.0 * (i as f64 + 0.5) / sample_count as f64;
        if res.iter().any(|r| math::abs(r - lambda) < SAMPLE_CLEARANCE) {
            report.samples_skipped += 1;
            continue;
        }
        let schur = schur_complement(&s, lambda)?;
        let (kd, kt, _) = fit_pair(&s, &schur);
        let (cd, ct) = (k_d(lambda), k_t(lambda));
        let residual = schur.add_scaled(-cd, &s.d.to_f64()).add_scaled(-ct, &s.t.to_f64()).max_abs();
        report.max_residual = report.max_residual.max(residual);
        report.max_pair_deviation = report.max_pair_deviation.max(math::abs(kd - cd)).max(math::abs(kt - ct));
        report.samples_used += 1;
    }
    Ok(report)
}

/// Affine map `λ ↦ a λ + b` taking the resonances onto the forbidden
/// eigenvalues, fitted by least squares.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bridge {
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
}

/// Fits the bridge between the `(X + λM)` variable and the graph Laplacian
/// eigenvalue on the curve.
pub fn resonance_bridge() -> Bridge {
    let r = resonances(&build_structure(Variant::Curve));
    let f = forbidden_eigenvalues();
    let n = r.len() as f64;
    let mx = r.iter().sum::<f64>() / n;
    let my = f.iter().sum::<f64>() / n;
    let sxy: f64 = r.iter().zip(&f).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = r.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = r.iter().zip(&f).map(|(x, y)| math::abs(slope * x + intercept - y)).fold(0.0, f64::max);
    Bridge { slope, intercept, max_residual }
}

/// Slope of the bridge: the decimation variable is twice the pencil variable.
pub const BRIDGE_SLOPE: f64 = 2.0;

/// Degree of the decimation polynomial.
pub const DECIMATION_DEGREE: usize = 8;

/// Sample count for the fit; odd-multiple Chebyshev angles over 48 never
/// meet the forbidden angles `kπ/8`.
pub const DEFAULT_FIT_SAMPLES: usize = 24;

/// Polynomial recovered from the structure.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFit {
    pub polynomial: Polynomial,
    pub degree: usize,
    /// Coefficientwise distance to the factored decimation polynomial.
    pub max_coeff_diff: f64,
    pub samples: usize,
}

/// Recovers `R(μ) = 2 (λ − K_T(λ)) / K_D(λ)` at `λ = μ/2`, with `K_D`,
/// `K_T` fitted from the Schur complement at each sample.
pub fn spectral_function_from_structure(variant: Variant, samples: usize) -> Result<SpectralFit> {
    let s = build_structure(variant);
    let res = resonances(&s);
    let nodes = chebyshev_nodes(samples, 0.0, 4.0);
    let mut values = Vec::with_capacity(samples);
    for &mu in &nodes {
        let lambda = mu / BRIDGE_SLOPE;
        let distance = res.iter().map(|r| math::abs(r - lambda)).fold(f64::INFINITY, f64::min);
        if distance < 1e-9 {
            return Err(Error::Resonance { lambda, distance });
        }
        let (kd, kt, _) = fit_pair(&s, &schur_complement(&s, lambda)?);
        values.push(BRIDGE_SLOPE * (lambda - kt) / kd);
    }
    let series = ChebyshevSeries::interpolate(&values, 0.0, 4.0);
    let degree = series.effective_degree(1e-10);
    if degree != DECIMATION_DEGREE {
        return Err(Error::FitDegree { expected: DECIMATION_DEGREE, found: degree });
    }
    let polynomial = series.truncate(degree).to_monomial();
    let max_coeff_diff = polynomial.max_coeff_diff(&DecimationPolynomial::standard().expanded());
    Ok(SpectralFit { polynomial, degree, max_coeff_diff, samples })
}

/// `K_D(0)` fitted from the `λ = 0` Schur complement.
pub fn ramification_from_structure(variant: Variant) -> Result<f64> {
    let s = build_structure(variant);
    Ok(fit_pair(&s, &schur_complement(&s, 0.0)?).0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_shapes() {
        let c = build_structure(Variant::Curve);
        assert_eq!(c.d.to_f64(), Matrix::from_rows(&[alloc::vec![-1.0, 1.0], alloc::vec![1.0, -1.0]]));
        assert_eq!(c.t.to_f64(), Matrix::<f64>::identity(2).scale(-1.0));
        let i = build_structure(Variant::Island);
        assert_eq!((i.x.rows(), i.j.rows(), i.j.cols()), (28, 28, 4));
        assert!(i.d.is_symmetric() && i.x.is_symmetric());
        for r in 0..4 {
            assert_eq!(i.d[(r, r)], int(-2));
        }
        let b = interior_block();
        for blk in 0..4 {
            for r in 0..7 {
                for k in 0..7 {
                    assert_eq!(i.x[(7 * blk + r, 7 * blk + k)], b[(r, k)]);
                }
            }
        }
        for m in [&c, &i] {
            let n = m.m.rows();
            assert!((0..n).all(|r| m.m[(r, r)] == -m.x[(r, r)]));
        }
    }

    #[test]
    fn exact_schur_at_zero() {
        for v in [Variant::Curve, Variant::Island] {
            let s = build_structure(v);
            let got = schur_complement_exact(&s, int(0)).unwrap();
            assert_eq!(got, s.d.scale(Rational::new(1, 8)));
        }
    }

    #[test]
    fn identity_at_half() {
        for v in [Variant::Curve, Variant::Island] {
            let s = build_structure(v);
            assert!(identity_residual(&s, 0.5).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn plus_sign_does_not_match() {
        let s = build_structure(Variant::Curve);
        let plus = s.t.add_scaled(int(1), &s.j.transpose().mul(&s.x.solve(&s.j).unwrap()));
        let want = s.d.scale(Rational::new(1, 8));
        assert_ne!(plus, want);
    }

    #[test]
    fn resonance_is_rejected() {
        let s = build_structure(Variant::Curve);
        assert!(matches!(schur_complement(&s, 1.0), Err(Error::Resonance { .. }) | Err(Error::Singular)));
    }

    #[test]
    fn pair_at_zero() {
        assert_eq!(k_d(0.0), 0.125);
        assert_eq!(k_t(0.0), 0.0);
        for v in [Variant::Curve, Variant::Island] {
            assert!((ramification_from_structure(v).unwrap() - 0.125).abs() < 1e-14);
        }
    }

    #[test]
    fn bridge_is_doubling() {
        let b = resonance_bridge();
        assert!((b.slope - 2.0).abs() < 1e-12);
        assert!(b.intercept.abs() < 1e-12);
        assert!(b.max_residual < 1e-12);
    }

    #[test]
    fn fit_recovers_the_polynomial() {
        for v in [Variant::Curve, Variant::Island] {
            let f = spectral_function_from_structure(v, DEFAULT_FIT_SAMPLES).unwrap();
            assert_eq!(f.degree, 8);
            assert!(f.max_coeff_diff < 1e-8, "{}", f.max_coeff_diff);
            assert!(f.polynomial.eval(0.0).abs() < 1e-8);
            let t = 2.0 - 2.0 * (math::PI / 8.0).cos();
            assert!((f.polynomial.eval(t) - 4.0).abs() < 1e-8);
        }
    }

    #[test]
    fn twenty_samples_hit_resonances() {
        assert!(matches!(
            spectral_function_from_structure(Variant::Curve, 20),
            Err(Error::Resonance { .. } | Error::Singular)
        ));
    }
}
