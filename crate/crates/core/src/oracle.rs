//! Independent ground truth: a Sturm-sequence eigensolver for the path
//! Laplacians, the trigonometric closed form, determinant audits, printed
//! eigenvector checks and series resistance.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::energy::{harmonic_extension, NormalizationConvention};
use crate::linalg::{thomas, Matrix};
use crate::math::{self, sqrt};
use crate::{Error, Result, DENSE_ORACLE_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Dirichlet,
    Neumann,
}

/// Symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl Tridiagonal {
    /// Graph Laplacian of the level-`m` path under the given condition.
    pub fn path_laplacian(m: u32, bc: Boundary) -> Result<Self> {
        if m > DENSE_ORACLE_CAP {
            return Err(Error::LevelCap { level: m, cap: DENSE_ORACLE_CAP });
        }
        let edges = 1usize << (3 * m);
        Ok(match bc {
            Boundary::Dirichlet => Self { diag: vec![2.0; edges - 1], off: vec![-1.0; edges.saturating_sub(2)] },
            Boundary::Neumann => {
                let mut diag = vec![2.0; edges + 1];
                diag[0] = 1.0;
                diag[edges] = 1.0;
                Self { diag, off: vec![-1.0; edges] }
            }
        })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Number of eigenvalues strictly below `x` (Sturm sign count).
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0f64;
        for i in 0..self.diag.len() {
            let b2 = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] };
            q = self.diag[i] - x - if i == 0 { 0.0 } else { b2 / q };
            if q == 0.0 {
                q = -f64::EPSILON * (math::abs(x) + 1.0);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { math::abs(self.off[i - 1]) } else { 0.0 }
                + if i + 1 < n { math::abs(self.off[i]) } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// All eigenvalues, ascending, by bisection with count-based splitting.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let n = self.diag.len();
        let mut out = vec![0.0; n];
        if n == 0 {
            return out;
        }
        let (lo, hi) = self.gershgorin();
        let pad = 1e-12 * (1.0 + math::abs(lo).max(math::abs(hi)));
        // Each entry: interval (a, b) holding eigenvalues with indices
        // count(a)..count(b).
        let mut stack = vec![(lo - pad, hi + pad, 0usize, n)];
        while let Some((a, b, ca, cb)) = stack.pop() {
            if ca == cb {
                continue;
            }
            let mid = 0.5 * (a + b);
            if b - a <= 2.0 * f64::EPSILON * (math::abs(a) + math::abs(b)) + f64::MIN_POSITIVE || mid <= a || mid >= b {
                for slot in &mut out[ca..cb] {
                    *slot = mid;
                }
                continue;
            }
            let cm = self.count_below(mid);
            stack.push((a, mid, ca, cm));
            stack.push((mid, b, cm, cb));
        }
        out
    }

    /// Eigenvector for `lambda` by inverse iteration, unit 2-norm, with the
    /// largest-magnitude entry positive.
    pub fn eigenvector(&self, lambda: f64) -> Result<Vec<f64>> {
        let n = self.diag.len();
        let shift = lambda + 1e-10 * (1.0 + math::abs(lambda));
        let diag: Vec<f64> = self.diag.iter().map(|d| d - shift).collect();
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.01 * ((i * 7919) % 101) as f64).collect();
        for _ in 0..3 {
            x = thomas(&self.off, &diag, &self.off, &x)?;
            let norm = sqrt(x.iter().map(|v| v * v).sum());
            x.iter_mut().for_each(|v| *v /= norm);
        }
        let big = x.iter().copied().fold(0.0f64, |acc, v| if math::abs(v) > math::abs(acc) { v } else { acc });
        if big < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
        Ok(x)
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * v[i];
                if i > 0 {
                    s += self.off[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    s += self.off[i] * v[i + 1];
                }
                s
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseSpectrum {
    pub level: u32,
    pub boundary: Boundary,
    pub eigenvalues: Vec<f64>,
    /// One unit vector per eigenvalue, when requested.
    pub eigenvectors: Option<Vec<Vec<f64>>>,
}

impl DenseSpectrum {
    /// Largest `‖A v − λ v‖_∞` over the retained pairs.
    pub fn max_residual(&self) -> Result<f64> {
        let a = Tridiagonal::path_laplacian(self.level, self.boundary)?;
        let vs = self.eigenvectors.as_ref().ok_or(Error::Domain("eigenvectors were not retained"))?;
        Ok(self
            .eigenvalues
            .iter()
            .zip(vs)
            .map(|(&l, v)| {
                a.mul_vec(v).iter().zip(v).map(|(av, x)| math::abs(av - l * x)).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max))
    }
}

/// Spectrum of the level-`m` path Laplacian (`m ≤ 4`).
pub fn dense_spectrum(m: u32, bc: Boundary, vectors: bool) -> Result<DenseSpectrum> {
    let a = Tridiagonal::path_laplacian(m, bc)?;
    let eigenvalues = a.eigenvalues();
    let eigenvectors = if vectors {
        Some(eigenvalues.iter().map(|&l| a.eigenvector(l)).collect::<Result<Vec<_>>>()?)
    } else {
        None
    };
    Ok(DenseSpectrum { level: m, boundary: bc, eigenvalues, eigenvectors })
}

/// Largest level accepted by [`closed_form_spectrum`].
pub const CLOSED_FORM_CAP: u32 = 10;

/// `2 − 2cos(kπ/8^m)`, evaluated as `4 sin²(kπ/(2·8^m))`.
pub fn closed_form_eigenvalue(k: u64, m: u32) -> f64 {
    let n = math::powu(8.0, m);
    let s = libm::sin(k as f64 * math::PI / (2.0 * n));
    4.0 * s * s
}

/// `{2 − 2cos(kπ/8^m) : k = 1..8^m − 1}`, ascending.
pub fn closed_form_spectrum(m: u32) -> Result<Vec<f64>> {
    if m > CLOSED_FORM_CAP {
        return Err(Error::LevelCap { level: m, cap: CLOSED_FORM_CAP });
    }
    let n = 1u64 << (3 * m);
    Ok((1..n).map(|k| closed_form_eigenvalue(k, m)).collect())
}

/// Largest amount by which `ν_i ≤ δ_i ≤ ν_{i+2}` fails, for Dirichlet
/// eigenvalues `δ` and Neumann eigenvalues `ν` of the same level.
pub fn interlacing_violation(dirichlet: &[f64], neumann: &[f64]) -> f64 {
    assert_eq!(dirichlet.len() + 2, neumann.len(), "Neumann problem has two more vertices");
    dirichlet
        .iter()
        .enumerate()
        .map(|(i, &d)| (neumann[i] - d).max(d - neumann[i + 2]).max(0.0))
        .fold(0.0, f64::max)
}

/// `A_1(λ)`: `2 − λ` on the diagonal, `−1` beside it, side 7.
pub fn a1_matrix(lambda: f64) -> Matrix<f64> {
    let mut a = Matrix::zeros(7, 7);
    for i in 0..7 {
        a[(i, i)] = 2.0 - lambda;
        if i + 1 < 7 {
            a[(i, i + 1)] = -1.0;
            a[(i + 1, i)] = -1.0;
        }
    }
    a
}

/// `det A_1(λ)` by dense elimination.
pub fn det_a1(lambda: f64) -> f64 {
    a1_matrix(lambda).det()
}

/// How the printed level-2 vectors are read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transcription {
    /// Entries exactly as printed.
    Literal,
    /// The two entries of the `2 + ε√(2+√2)` vector that lack their `ε`
    /// factor are given it.
    Corrected,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenvectorCheck {
    pub label: String,
    pub lambda: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenvectorReport {
    pub level: u32,
    pub checks: Vec<EigenvectorCheck>,
    /// `permutation[p]` is the path index (1-based interior) of printed
    /// position `p`.
    pub permutation: Vec<usize>,
}

impl EigenvectorReport {
    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }
}

/// `‖A_m(λ) v‖_∞` with zero Dirichlet values appended at both ends.
pub fn dirichlet_residual(lambda: f64, interior: &[f64]) -> f64 {
    let n = interior.len();
    let at = |i: isize| if i < 0 || i as usize >= n { 0.0 } else { interior[i as usize] };
    (0..n as isize)
        .map(|i| math::abs((2.0 - lambda) * at(i) - at(i - 1) - at(i + 1)))
        .fold(0.0, f64::max)
}

struct Radicals {
    r2: f64,
    s: f64,
    t: f64,
}

fn radicals() -> Radicals {
    let r2 = sqrt(2.0);
    Radicals { r2, s: sqrt(2.0 + r2), t: sqrt(2.0 - r2) }
}

fn level1_vectors() -> Vec<(String, f64, [f64; 7])> {
    let Radicals { r2, s, t } = radicals();
    let mut out = vec![(String::from("2"), 2.0, [-1.0, 0.0, 1.0, 0.0, -1.0, 0.0, 1.0])];
    for e in [1.0, -1.0] {
        let sign = if e > 0.0 { "+" } else { "-" };
        out.push((alloc::format!("2{sign}sqrt2"), 2.0 + e * r2, [-1.0, e * r2, -1.0, 0.0, 1.0, -e * r2, 1.0]));
        out.push((
            alloc::format!("2{sign}sqrt(2+sqrt2)"),
            2.0 + e * s,
            [1.0, -e * s, 1.0 + r2, -e * r2 * s, 1.0 + r2, -e * s, 1.0],
        ));
        out.push((
            alloc::format!("2{sign}sqrt(2-sqrt2)"),
            2.0 + e * t,
            [1.0, -e * t, 1.0 - r2, e * r2 * t, 1.0 - r2, -e * t, 1.0],
        ));
    }
    out
}

/// Seven zeros on `V_1`, then eight cells alternating `odd`, `even`.
fn alternating_cells(odd: &[f64; 7], even: &[f64; 7]) -> Vec<f64> {
    let mut v = vec![0.0; 7];
    for c in 0..8 {
        v.extend_from_slice(if c % 2 == 0 { odd } else { even });
    }
    v
}

/// Printed level-2 vectors in printed order: `X_1..X_7`, then
/// `Z^1_1..Z^1_7`, …, `Z^8_1..Z^8_7`.
fn level2_vectors(tr: Transcription) -> Vec<(String, f64, Vec<f64>)> {
    let Radicals { r2, s, t } = radicals();
    let rs = r2 * s;
    let rt = r2 * t;
    let mut out = Vec::new();
    let c2 = [-1.0, 0.0, 1.0, 0.0, -1.0, 0.0, 1.0];
    out.push((String::from("2"), 2.0, alternating_cells(&c2, &c2)));
    for e in [1.0, -1.0] {
        let sign = if e > 0.0 { "+" } else { "-" };
        let a = [-1.0, e * r2, -1.0, 0.0, 1.0, -e * r2, 1.0];
        out.push((alloc::format!("2{sign}sqrt2"), 2.0 + e * r2, alternating_cells(&a, &a)));
        // Printed positions 13 and 20 read √(2+√2) and −√(2+√2) without ε.
        let (p13, p20) = match tr {
            Transcription::Literal => (s, -s),
            Transcription::Corrected => (e * s, -e * s),
        };
        let odd = [-1.0, e * s, -1.0 - r2, e * rs, -1.0 - r2, e * s, -1.0];
        let even = [1.0, -e * s, 1.0 + r2, -e * rs, 1.0 + r2, -e * s, 1.0];
        let mut v = alternating_cells(&odd, &even);
        v[12] = p13;
        v[19] = p20;
        out.push((alloc::format!("2{sign}sqrt(2+sqrt2)"), 2.0 + e * s, v));
        let odd = [-1.0, e * t, r2 - 1.0, -e * rt, r2 - 1.0, e * t, -1.0];
        let even = [1.0, -e * t, 1.0 - r2, e * rt, 1.0 - r2, -e * t, 1.0];
        out.push((alloc::format!("2{sign}sqrt(2-sqrt2)"), 2.0 + e * t, alternating_cells(&odd, &even)));
    }
    out
}

/// Path index (1..=63) of each printed level-2 position: `X_i ↦ 8i`,
/// `Z^i_j ↦ 8(i−1) + j`.
pub fn level2_permutation() -> Vec<usize> {
    let mut p: Vec<usize> = (1..=7).map(|i| 8 * i).collect();
    for i in 1..=8 {
        for j in 1..=7 {
            p.push(8 * (i - 1) + j);
        }
    }
    p
}

/// Checks the printed eigenvectors of level 1 or 2 against `A_m(λ) v = 0`.
pub fn verify_level_eigenvectors(m: u32, tr: Transcription) -> Result<EigenvectorReport> {
    match m {
        1 => Ok(EigenvectorReport {
            level: 1,
            checks: level1_vectors()
                .into_iter()
                .map(|(label, lambda, v)| EigenvectorCheck { label, lambda, residual: dirichlet_residual(lambda, &v) })
                .collect(),
            permutation: (1..=7).collect(),
        }),
        2 => {
            let perm = level2_permutation();
            let checks = level2_vectors(tr)
                .into_iter()
                .map(|(label, lambda, printed)| {
                    let mut path = vec![0.0; 63];
                    for (pos, &v) in printed.iter().enumerate() {
                        path[perm[pos] - 1] = v;
                    }
                    EigenvectorCheck { label, lambda, residual: dirichlet_residual(lambda, &path) }
                })
                .collect();
            Ok(EigenvectorReport { level: 2, checks, permutation: perm })
        }
        _ => Err(Error::Domain("printed eigenvectors exist for levels 1 and 2 only")),
    }
}

/// Effective resistance between `P_0` and `P_1`: the inverse of the minimal
/// energy with `u(P_0) = 0`, `u(P_1) = 1`.
pub fn series_resistance(m: u32, n: NormalizationConvention) -> Result<f64> {
    Ok(1.0 / harmonic_extension(0.0, 1.0, m)?.energy_under(n))
}

/// `d` with `resistance_scale^d = measure_weight`.
pub fn resistance_dimension(measure_weight: f64, resistance_scale: f64) -> Result<f64> {
    let open_unit = |v: f64| v > 0.0 && v < 1.0;
    if !open_unit(measure_weight) || !open_unit(resistance_scale) {
        return Err(Error::Domain("measure weight and resistance scale must lie in (0, 1)"));
    }
    Ok(math::ln(measure_weight) / math::ln(resistance_scale))
}

/// Value stated in the text for the resistance-metric dimension.
pub const RESISTANCE_DIMENSION_CLAIM: f64 = 2.0 / 3.0;

/// Resistance-metric dimension from per-cell measure `1/16` and resistance
/// scale `1/8`, next to the stated value.
pub fn resistance_dimension_report() -> Result<(f64, f64)> {
    Ok((resistance_dimension(1.0 / 16.0, 1.0 / 8.0)?, RESISTANCE_DIMENSION_CLAIM))
}
