//! Absorbing random walk on the level-1 path, crossing times and the
//! walk, Hausdorff and spectral dimensions.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::geometry::{build_level, LevelGraph};
use crate::linalg::Matrix;
use crate::math::{self, exact_log_ratio, rational_to_f64};
use crate::{Error, Rational, Result};

/// Transition probabilities among the transient states of a chain.
#[derive(Debug, Clone, PartialEq)]
pub struct AbsorbingChain {
    transient: Matrix<Rational>,
    labels: Vec<String>,
}

impl AbsorbingChain {
    /// Validates row sums `≤ 1` with at least one leaking row.
    pub fn new(transient: Matrix<Rational>, labels: Vec<String>) -> Result<Self> {
        let n = transient.rows();
        if transient.cols() != n || labels.len() != n {
            return Err(Error::InvalidChain("matrix must be square with one label per state"));
        }
        let one = Rational::from_integer(1);
        let zero = Rational::from_integer(0);
        let mut leaks = false;
        for i in 0..n {
            let mut sum = zero;
            for j in 0..n {
                let p = transient[(i, j)];
                if p < zero {
                    return Err(Error::InvalidChain("negative transition probability"));
                }
                sum += p;
            }
            if sum > one {
                return Err(Error::InvalidChain("row sum exceeds one"));
            }
            leaks |= sum < one;
        }
        if !leaks {
            return Err(Error::InvalidChain("no row leaks to an absorbing state"));
        }
        Ok(Self { transient, labels })
    }

    /// Simple random walk on `graph` (uniform over neighbours), absorbed at
    /// `P_1`; `P_0` keeps its single outgoing edge and so reflects.
    pub fn from_path(graph: &LevelGraph) -> Result<Self> {
        let n = graph.len() - 1;
        let mut m = Matrix::<Rational>::zeros(n, n);
        for i in 0..n {
            let nb = graph.neighbors(i)?;
            let p = Rational::new(1, nb.len() as i64);
            for j in nb.into_iter().filter(|&j| j < n) {
                m[(i, j)] = p;
            }
        }
        let labels = (0..n).map(|i| if i == 0 { String::from("P0") } else { format!("X{i}") }).collect();
        Self::new(m, labels)
    }

    pub fn transient_matrix(&self) -> &Matrix<Rational> {
        &self.transient
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn row_sum(&self, i: usize) -> Rational {
        (0..self.transient.cols()).map(|j| self.transient[(i, j)]).sum()
    }
}

/// The level-1 chain over `P_0, X_1, …, X_7` with `P_1` absorbing.
pub fn build_level1_chain() -> Result<AbsorbingChain> {
    AbsorbingChain::from_path(&build_level(1)?)
}

/// The transient matrix exactly as printed alongside the level-1 graph;
/// its `X_5` row reads `1` towards `X_6` where the walk has `1/2`.
pub fn printed_level1_matrix() -> Matrix<Rational> {
    let h = Rational::new(1, 2);
    let one = Rational::from_integer(1);
    let mut m = Matrix::<Rational>::zeros(8, 8);
    m[(0, 1)] = one;
    for i in 1..8 {
        m[(i, i - 1)] = h;
        if i + 1 < 8 {
            m[(i, i + 1)] = h;
        }
    }
    m[(5, 6)] = one;
    m
}

/// Expected absorption times from each transient state.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossingTimes {
    pub exact: Vec<Rational>,
}

impl CrossingTimes {
    pub fn times(&self) -> Vec<f64> {
        self.exact.iter().map(|&t| rational_to_f64(t)).collect()
    }
}

/// Solves `(I − M) T = 1` exactly.
pub fn crossing_times(c: &AbsorbingChain) -> Result<CrossingTimes> {
    let n = c.transient.rows();
    let system = Matrix::<Rational>::identity(n).add_scaled(Rational::from_integer(-1), &c.transient);
    let exact = system.solve_vec(&vec![Rational::from_integer(1); n])?;
    Ok(CrossingTimes { exact })
}

/// `‖(I − M) T − 1‖_∞`.
pub fn crossing_residual(c: &AbsorbingChain, t: &CrossingTimes) -> f64 {
    let n = c.transient.rows();
    let system = Matrix::<Rational>::identity(n).add_scaled(Rational::from_integer(-1), &c.transient);
    system
        .mul_vec(&t.exact)
        .into_iter()
        .map(|v| math::abs(rational_to_f64(v - Rational::from_integer(1))))
        .fold(0.0, f64::max)
}

/// Exact values behind a [`DimensionSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactDimensions {
    pub d_w: Rational,
    pub delta: Rational,
    pub d_h: Rational,
    pub d_s: Rational,
    pub rho: Rational,
    pub mean_crossing: Rational,
}

impl ExactDimensions {
    /// `D_H − D_S · D_W / 2`.
    pub fn einstein_defect(&self) -> Rational {
        self.d_h - self.d_s * self.d_w / Rational::from_integer(2)
    }

    /// `4^{2δ} / 8`, defined when `2δ` is an integer.
    pub fn rho_from_delta(&self) -> Result<Rational> {
        let two_delta = self.delta * Rational::from_integer(2);
        if !two_delta.is_integer() || *two_delta.numer() < 0 {
            return Err(Error::Domain("4^{2δ} is not an integer power"));
        }
        let p = u32::try_from(*two_delta.numer()).map_err(|_| Error::Domain("exponent too large"))?;
        let four = 4i64.checked_pow(p).ok_or(Error::Overflow { what: "4^{2δ}", level: p })?;
        Ok(Rational::new(four, 8))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DimensionSet {
    pub d_w: f64,
    pub delta: f64,
    pub d_h: f64,
    pub d_s: f64,
    pub rho: f64,
    pub mean_crossing: f64,
    pub crossing_times: Vec<f64>,
    pub einstein_residual: f64,
    pub exact: ExactDimensions,
}

/// Number of maps and their contraction ratio.
const N_MAPS: i64 = 8;
const RATIO: (i64, i64) = (1, 4);

/// Dimensions from the level-1 crossing time from `P_0`.
pub fn dimensions() -> Result<DimensionSet> {
    let times = crossing_times(&build_level1_chain()?)?;
    let mean = times.exact[0];
    let n = Rational::from_integer(N_MAPS);
    let k = Rational::new(RATIO.0, RATIO.1);
    let irrational = Error::Domain("dimension is not rational");
    // D_W = ln E / ln(1/k), D_H = −ln N / ln k, D_S = 2 ln N / ln(N ρ).
    let d_w = exact_log_ratio(mean, k.recip()).ok_or(irrational.clone())?;
    let d_h = -exact_log_ratio(n, k).ok_or(irrational.clone())?;
    let rho = mean / n;
    let d_s = Rational::from_integer(2) * exact_log_ratio(n, n * rho).ok_or(irrational)?;
    let exact = ExactDimensions {
        d_w,
        delta: d_w / Rational::from_integer(2),
        d_h,
        d_s,
        rho,
        mean_crossing: mean,
    };
    Ok(DimensionSet {
        d_w: rational_to_f64(exact.d_w),
        delta: rational_to_f64(exact.delta),
        d_h: rational_to_f64(exact.d_h),
        d_s: rational_to_f64(exact.d_s),
        rho: rational_to_f64(exact.rho),
        mean_crossing: rational_to_f64(mean),
        crossing_times: times.times(),
        einstein_residual: math::abs(rational_to_f64(exact.einstein_defect())),
        exact,
    })
}

/// Monte-Carlo estimate of the crossing time from `P_0` to `P_1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkEstimate {
    pub level: u32,
    pub trials: u64,
    pub seed: u64,
    pub mean: f64,
    /// 95% normal-approximation half-width.
    pub half_width: f64,
    pub standard_error: f64,
    /// Analytic value `64^level`.
    pub analytic: f64,
}

/// Largest level accepted by [`simulate_walk`].
pub const SIMULATION_LEVEL_CAP: u32 = 3;

/// Runs `trials` independent walks from `P_0` on the level-`level` path,
/// one random bit per step, reflecting at `P_0` and absorbed at `P_1`.
pub fn simulate_walk(level: u32, trials: u64, seed: u64) -> Result<WalkEstimate> {
    if level == 0 || level > SIMULATION_LEVEL_CAP {
        return Err(Error::LevelCap { level, cap: SIMULATION_LEVEL_CAP });
    }
    if trials == 0 {
        return Err(Error::Domain("at least one trial is needed"));
    }
    let target = 1i64 << (3 * level);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut bits, mut left) = (0u64, 0u32);
    let (mut sum, mut sum_sq) = (0.0f64, 0.0f64);
    for _ in 0..trials {
        let (mut pos, mut steps) = (0i64, 0u64);
        while pos < target {
            if pos == 0 {
                pos = 1;
            } else {
                if left == 0 {
                    bits = rng.next_u64();
                    left = 64;
                }
                pos += if bits & 1 == 1 { 1 } else { -1 };
                bits >>= 1;
                left -= 1;
            }
            steps += 1;
        }
        let s = steps as f64;
        sum += s;
        sum_sq += s * s;
    }
    let n = trials as f64;
    let mean = sum / n;
    let var = if trials > 1 { (sum_sq - n * mean * mean) / (n - 1.0) } else { 0.0 };
    let standard_error = math::sqrt(var.max(0.0) / n);
    Ok(WalkEstimate {
        level,
        trials,
        seed,
        mean,
        half_width: 1.96 * standard_error,
        standard_error,
        analytic: math::powu(64.0, level),
    })
}
