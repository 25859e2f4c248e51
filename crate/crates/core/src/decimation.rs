//! Spectral decimation for the Dirichlet Laplacian on the level-`m` paths:
//! the polynomial `R`, its inverse branches, forbidden eigenvalues, the full
//! spectrum with genealogy, the continuous limit and the counting function.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::thomas;
use crate::math::{self, sqrt};
use crate::poly::Polynomial;
use crate::{Error, Result, DEFAULT_SPECTRUM_CAP};

/// Sign triple `(ε_1, ε_2, ε_3)` selecting one inverse branch.
pub type Signs = [i8; 3];

/// All eight sign triples, `−` before `+` in each slot.
pub const ALL_SIGNS: [Signs; 8] = [
    [-1, -1, -1],
    [-1, -1, 1],
    [-1, 1, -1],
    [-1, 1, 1],
    [1, -1, -1],
    [1, -1, 1],
    [1, 1, -1],
    [1, 1, 1],
];

/// `R(λ) = −(λ−4)(λ−2)² λ ((λ−4)λ + 2)²`, optionally with one coefficient
/// shifted for mutation testing.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DecimationPolynomial {
    shift: Option<(u32, f64)>,
}

impl DecimationPolynomial {
    pub const fn standard() -> Self {
        Self { shift: None }
    }

    /// `R(λ) + delta · λ^power`.
    pub const fn perturbed(power: u32, delta: f64) -> Self {
        Self { shift: Some((power, delta)) }
    }

    pub fn is_standard(&self) -> bool {
        self.shift.is_none()
    }

    pub fn eval(&self, l: f64) -> f64 {
        let q = (l - 4.0) * l + 2.0;
        let base = -(l - 4.0) * (l - 2.0) * (l - 2.0) * l * q * q;
        match self.shift {
            None => base,
            Some((k, d)) => base + d * math::powu(l, k),
        }
    }

    /// Monomial coefficients of the polynomial.
    pub fn expanded(&self) -> Polynomial {
        let base = Polynomial::product(&[
            &[4.0, -1.0],
            &[-2.0, 1.0],
            &[-2.0, 1.0],
            &[0.0, 1.0],
            &[2.0, -4.0, 1.0],
            &[2.0, -4.0, 1.0],
        ]);
        match self.shift {
            None => base,
            Some((k, d)) => {
                let mut c = base.coeffs().to_vec();
                c.resize(c.len().max(k as usize + 1), 0.0);
                c[k as usize] += d;
                Polynomial::new(c)
            }
        }
    }

    fn derivative(&self, l: f64) -> f64 {
        let c = self.expanded();
        c.coeffs().iter().enumerate().skip(1).rev().fold(0.0, |acc, (i, &a)| acc * l + i as f64 * a)
    }

    /// Newton-polishes `seed` towards a root of `R(λ) = target`.
    fn polish(&self, seed: f64, target: f64) -> f64 {
        let mut l = seed;
        for _ in 0..50 {
            let d = self.derivative(l);
            if d == 0.0 {
                break;
            }
            let step = (self.eval(l) - target) / d;
            l -= step;
            if math::abs(step) <= 1e-16 * (1.0 + math::abs(l)) {
                break;
            }
        }
        l
    }
}

/// `R(λ)` as factored.
pub fn decimation_poly(lambda: f64) -> f64 {
    DecimationPolynomial::standard().eval(lambda)
}

/// One preimage of a level-`(m−1)` eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branch {
    pub lambda: f64,
    pub signs: Signs,
}

/// Slack allowed above 4 and below 0 before rejecting an argument.
const DOMAIN_SLACK: f64 = 1e-9;

/// `λ = 2 + ε_1 √(2 + ε_2 √(2 + ε_3 √(4 − p)))` for the given signs.
///
/// Each `2 − √b` is evaluated as `(4 − b) / (2 + √b)`, carrying `4 − b`
/// alongside `b`, so values near 0 keep full relative precision.
pub fn branch(p: f64, signs: Signs) -> Result<f64> {
    if !(-DOMAIN_SLACK..=4.0 + DOMAIN_SLACK).contains(&p) {
        return Err(Error::Domain("inverse branches need an argument in [0, 4]"));
    }
    let p = p.clamp(0.0, 4.0);
    // (b, 4 − b) at the innermost level: b = 4 − p.
    let (mut b, mut c) = (4.0 - p, p);
    for &e in signs.iter().rev() {
        let s = sqrt(b);
        let plus = 2.0 + s;
        let minus = c / plus;
        (b, c) = if e > 0 { (plus, minus) } else { (minus, plus) };
    }
    Ok(b)
}

/// The eight preimages of `lambda_prev` under `R`.
pub fn inverse_branches(lambda_prev: f64) -> Result<[Branch; 8]> {
    let mut out = [Branch { lambda: 0.0, signs: [0; 3] }; 8];
    for (slot, signs) in out.iter_mut().zip(ALL_SIGNS) {
        *slot = Branch { lambda: branch(lambda_prev, signs)?, signs };
    }
    Ok(out)
}

/// `2 − 2cos(kπ/8)` written with nested radicals, `k = 1..=7`.
fn forbidden_value(k: u32) -> f64 {
    let r2 = sqrt(2.0);
    // 2 − √(2 ± √2) = (2 ∓ √2) / (2 + √(2 ± √2)), and 2 − √2 = 2 / (2 + √2).
    let two_minus_r2 = 2.0 / (2.0 + r2);
    match k {
        1 => two_minus_r2 / (2.0 + sqrt(2.0 + r2)),
        2 => two_minus_r2,
        3 => (2.0 + r2) / (2.0 + sqrt(two_minus_r2)),
        4 => 2.0,
        5 => 2.0 + sqrt(two_minus_r2),
        6 => 2.0 + r2,
        7 => 2.0 + sqrt(2.0 + r2),
        _ => unreachable!("forbidden index {k}"),
    }
}

/// `{2, 2 ± √2, 2 ± √(2 + √2), 2 ± √(2 − √2)}`, ascending.
pub fn forbidden_eigenvalues() -> [f64; 7] {
    core::array::from_fn(|i| forbidden_value(i as u32 + 1))
}

/// Where a spectrum node comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    /// The `k`-th forbidden value `2 − 2cos(kπ/8)` inserted at this level.
    Forbidden { k: u32 },
    /// Preimage of node `parent` of the previous level.
    Branch { parent: usize, signs: Signs },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumNode {
    pub level: u32,
    pub lambda: f64,
    pub multiplicity: u64,
    pub origin: Origin,
    /// `64^m · λ`.
    pub continuous_estimate: f64,
}

/// Dirichlet spectrum of one level, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumLevel {
    pub level: u32,
    pub nodes: Vec<SpectrumNode>,
}

impl SpectrumLevel {
    pub fn total_multiplicity(&self) -> u64 {
        self.nodes.iter().map(|n| n.multiplicity).sum()
    }

    /// Eigenvalues repeated by multiplicity, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.nodes
            .iter()
            .flat_map(|n| core::iter::repeat_n(n.lambda, n.multiplicity as usize))
            .collect()
    }

    /// `64^m · λ_k`, with `k` counted from 1 with multiplicity.
    pub fn continuous(&self, k: usize) -> Result<f64> {
        let len = self.total_multiplicity() as usize;
        if k == 0 || k > len {
            return Err(Error::IndexOutOfRange { index: k, len });
        }
        let mut seen = 0usize;
        for n in &self.nodes {
            seen += n.multiplicity as usize;
            if seen >= k {
                return Ok(n.continuous_estimate);
            }
        }
        unreachable!("k checked against the total multiplicity")
    }
}

/// Spectra of levels `1..=m`; `levels[i]` is level `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTower {
    pub levels: Vec<SpectrumLevel>,
}

impl SpectrumTower {
    pub fn level(&self, m: u32) -> Option<&SpectrumLevel> {
        self.levels.get((m as usize).checked_sub(1)?)
    }

    pub fn top(&self) -> &SpectrumLevel {
        self.levels.last().expect("tower has at least one level")
    }

    /// Sign triples from the forbidden ancestor down to node `index` of
    /// level `m`, together with the ancestor's level and index `k`.
    pub fn genealogy(&self, m: u32, index: usize) -> Result<Genealogy> {
        let lvl = self.level(m).ok_or(Error::LevelCap { level: m, cap: self.levels.len() as u32 })?;
        if index >= lvl.nodes.len() {
            return Err(Error::IndexOutOfRange { index, len: lvl.nodes.len() });
        }
        let mut signs = Vec::new();
        let (mut level, mut idx) = (m, index);
        loop {
            let node = &self.levels[level as usize - 1].nodes[idx];
            match node.origin {
                Origin::Forbidden { k } => {
                    signs.reverse();
                    return Ok(Genealogy { root_level: level, root_k: k, signs });
                }
                Origin::Branch { parent, signs: s } => {
                    signs.push(s);
                    level -= 1;
                    idx = parent;
                }
            }
        }
    }
}

/// Ancestry of an eigenvalue back to its forbidden origin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Genealogy {
    pub root_level: u32,
    pub root_k: u32,
    /// Sign triples applied at levels `root_level + 1, …`.
    pub signs: Vec<Signs>,
}

/// Relative merge tolerance; see [`merge_tolerance`].
const MERGE_TOLERANCE: f64 = 1e-9;

/// Children closer than this are treated as one eigenvalue at level `m`.
///
/// The smallest spacing of the level-`m` spectrum is about `3π²/64^m`, so a
/// fixed absolute tolerance would merge distinct eigenvalues from `m = 6` on.
pub fn merge_tolerance(m: u32) -> f64 {
    MERGE_TOLERANCE * math::powu(0.25, m)
}

/// Dirichlet spectrum of level `m` under the default cap.
pub fn enumerate_spectrum(m: u32) -> Result<SpectrumLevel> {
    Ok(enumerate_tower(m, DEFAULT_SPECTRUM_CAP, &DecimationPolynomial::standard())?.levels.pop().expect("m >= 1"))
}

/// Spectra of all levels up to `m`, built by decimation from the forbidden
/// values. A perturbed polynomial has its preimages Newton-polished so the
/// enumeration follows the perturbation.
pub fn enumerate_tower(m: u32, cap: u32, poly: &DecimationPolynomial) -> Result<SpectrumTower> {
    if m == 0 {
        return Err(Error::Domain("the Dirichlet spectrum starts at level 1"));
    }
    if m > cap {
        return Err(Error::LevelCap { level: m, cap });
    }
    let forbidden = forbidden_eigenvalues();
    let mut levels: Vec<SpectrumLevel> = Vec::with_capacity(m as usize);
    for level in 1..=m {
        let scale = math::powu(64.0, level);
        let mut nodes: Vec<SpectrumNode> = forbidden
            .iter()
            .enumerate()
            .map(|(i, &lambda)| SpectrumNode {
                level,
                lambda,
                multiplicity: 1,
                origin: Origin::Forbidden { k: i as u32 + 1 },
                continuous_estimate: scale * lambda,
            })
            .collect();
        if let Some(prev) = levels.last() {
            nodes.reserve(8 * prev.nodes.len());
            for (parent, p) in prev.nodes.iter().enumerate() {
                for b in inverse_branches(p.lambda)? {
                    let lambda = if poly.is_standard() { b.lambda } else { poly.polish(b.lambda, p.lambda) };
                    nodes.push(SpectrumNode {
                        level,
                        lambda,
                        multiplicity: p.multiplicity,
                        origin: Origin::Branch { parent, signs: b.signs },
                        continuous_estimate: scale * lambda,
                    });
                }
            }
        }
        nodes.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
        let tol = merge_tolerance(level);
        let mut merged: Vec<SpectrumNode> = Vec::with_capacity(nodes.len());
        for n in nodes {
            match merged.last_mut() {
                Some(last) if n.lambda - last.lambda <= tol => last.multiplicity += n.multiplicity,
                _ => merged.push(n),
            }
        }
        levels.push(SpectrumLevel { level, nodes: merged });
    }
    Ok(SpectrumTower { levels })
}

/// `64^m · λ_k(m)`.
pub fn continuous_eigenvalue(k: usize, m: u32) -> Result<f64> {
    enumerate_spectrum(m)?.continuous(k)
}

/// `2 − √(2 + √(2 + √(4 − x)))`, the preimage branch through 0.
pub fn small_branch(x: f64) -> Result<f64> {
    branch(x, [-1, 1, 1])
}

/// `(x, |small_branch(x) − x/64|, residual / x²)` for each `x`.
pub fn taylor_residuals(xs: &[f64]) -> Result<Vec<(f64, f64, f64)>> {
    xs.iter()
        .map(|&x| {
            let r = math::abs(small_branch(x)? - x / 64.0);
            Ok((x, r, r / (x * x)))
        })
        .collect()
}

/// `#{k : 64^m λ_k ≤ x}` with multiplicity.
pub fn counting_function(level: &SpectrumLevel, x: f64) -> u64 {
    let end = level.nodes.partition_point(|n| n.continuous_estimate <= x);
    level.nodes[..end].iter().map(|n| n.multiplicity).sum()
}

/// Least-squares fit of `ln N(x)` against `ln x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountingFit {
    pub slope: f64,
    pub intercept: f64,
    pub x_lo: f64,
    pub x_hi: f64,
    pub samples: usize,
}

/// Samples used by [`counting_slope`].
pub const COUNTING_SAMPLES: usize = 64;

/// Fits the counting exponent over the decade centred geometrically on
/// `√(x_min x_max)` of the renormalized spectrum.
pub fn counting_slope(level: &SpectrumLevel) -> Result<CountingFit> {
    let lo = level.nodes.first().ok_or(Error::Domain("empty spectrum"))?.continuous_estimate;
    let hi = level.nodes.last().ok_or(Error::Domain("empty spectrum"))?.continuous_estimate;
    let centre = sqrt(lo * hi);
    let (x_lo, x_hi) = (centre / sqrt(10.0), centre * sqrt(10.0));
    let n = COUNTING_SAMPLES;
    let pts: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let x = x_lo * math::exp(i as f64 / (n - 1) as f64 * math::ln(x_hi / x_lo));
            (x, counting_function(level, x))
        })
        .filter(|&(_, c)| c > 0)
        .map(|(x, c)| (math::ln(x), math::ln(c as f64)))
        .collect();
    if pts.len() < 2 {
        return Err(Error::Domain("too few nonzero counts to fit"));
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = sxy / sxx;
    Ok(CountingFit { slope, intercept: my - slope * mx, x_lo, x_hi, samples: pts.len() })
}

/// Level-1 kernel vector of `A_1(λ)`: `y_0 = 0`, `y_1 = 1`,
/// `y_{j+1} = (2 − λ) y_j − y_{j−1}`; interior entries `y_1..y_7`.
pub fn forbidden_vector(k: u32) -> Result<[f64; 7]> {
    if !(1..=7).contains(&k) {
        return Err(Error::IndexOutOfRange { index: k as usize, len: 8 });
    }
    let l = forbidden_value(k);
    let mut y = [0.0f64; 9];
    y[1] = 1.0;
    for j in 1..8 {
        y[j + 1] = (2.0 - l) * y[j] - y[j - 1];
    }
    Ok(core::array::from_fn(|i| y[i + 1]))
}

/// Eigenvector of node `index` of level `m` on all `8^m + 1` vertices
/// (zero at both ends), rebuilt from its genealogy and scaled to unit
/// maximum norm.
pub fn eigenfunction(tower: &SpectrumTower, m: u32, index: usize) -> Result<Vec<f64>> {
    let g = tower.genealogy(m, index)?;
    let k = g.root_k;
    let base = forbidden_vector(k)?;
    // Forbidden vector at its own level: zero on the coarser vertices, the
    // level-1 pattern in every cell, signs chosen to satisfy the junctions.
    let cells = 1usize << (3 * (g.root_level - 1));
    let ratio = -base[6] / base[0];
    let mut u = vec![0.0; 8 * cells + 1];
    let mut sign = 1.0;
    for c in 0..cells {
        for (j, &v) in base.iter().enumerate() {
            u[8 * c + j + 1] = sign * v;
        }
        sign *= ratio;
    }
    // Each branch step extends by solving A_1(λ) inside every new cell.
    let mut level = g.root_level;
    let mut idx_chain = ancestor_indices(tower, m, index);
    idx_chain.reverse();
    for _ in &g.signs {
        level += 1;
        let lambda = tower.levels[level as usize - 1].nodes[idx_chain[(level - g.root_level) as usize]].lambda;
        u = extend(&u, lambda)?;
    }
    let big = u.iter().map(|v| math::abs(*v)).fold(0.0, f64::max);
    Ok(u.into_iter().map(|v| v / big).collect())
}

/// Indices of node `index` and its ancestors, from level `m` downward.
fn ancestor_indices(tower: &SpectrumTower, m: u32, index: usize) -> Vec<usize> {
    let mut out = vec![index];
    let (mut level, mut idx) = (m, index);
    while let Origin::Branch { parent, .. } = tower.levels[level as usize - 1].nodes[idx].origin {
        out.push(parent);
        level -= 1;
        idx = parent;
    }
    out
}

/// Refines `u` one level: in each cell with end values `(a, b)` solve
/// `(2 − λ) y_j − y_{j−1} − y_{j+1} = 0` for the seven new interior values.
fn extend(u: &[f64], lambda: f64) -> Result<Vec<f64>> {
    let diag = [2.0 - lambda; 7];
    let off = [-1.0; 6];
    let mut out = Vec::with_capacity(8 * (u.len() - 1) + 1);
    out.push(u[0]);
    for w in u.windows(2) {
        let mut rhs = [0.0; 7];
        rhs[0] = w[0];
        rhs[6] += w[1];
        out.extend(thomas(&off, &diag, &off, &rhs)?);
        out.push(w[1]);
    }
    Ok(out)
}
