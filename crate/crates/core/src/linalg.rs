//! Small dense and tridiagonal linear algebra, generic over `f64` and exact
//! rationals.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Neg;

use core::ops::{Add, Div, Mul, Sub};

use num_traits::{One, Signed, Zero};

use crate::{math, Error, Rational, Result};

/// Field element usable by the solvers.
pub trait Scalar:
    Clone
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Exact types never treat a tiny nonzero pivot as singular.
    const EXACT: bool;

    /// Size used to pick pivots; any positive value works for exact types.
    fn magnitude(&self) -> f64;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn magnitude(&self) -> f64 {
        math::abs(*self)
    }
}

impl Scalar for DoubleDouble {
    const EXACT: bool = false;

    fn magnitude(&self) -> f64 {
        math::abs(self.hi)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn magnitude(&self) -> f64 {
        math::rational_to_f64(self.abs())
    }
}

/// Unevaluated sum `hi + lo` carrying about 106 bits of mantissa.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

impl DoubleDouble {
    pub const fn new(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> DoubleDouble {
    let s = a + b;
    DoubleDouble { hi: s, lo: b - (s - a) }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let r = quick_two_sum(s, e + t);
        quick_two_sum(r.hi, r.lo + f)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        Self { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let p = self.hi * o.hi;
        let e = libm::fma(self.hi, o.hi, -p);
        quick_two_sum(p, e + (self.hi * o.lo + self.lo * o.hi))
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let q1 = self.hi / o.hi;
        let r = self - o * Self::new(q1);
        let q2 = r.hi / o.hi;
        let r = r - o * Self::new(q2);
        let q3 = r.hi / o.hi;
        let q = quick_two_sum(q1, q2);
        q + Self::new(q3)
    }
}

impl Zero for DoubleDouble {
    fn zero() -> Self {
        Self::new(0.0)
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }
}

impl One for DoubleDouble {
    fn one() -> Self {
        Self::new(1.0)
    }
}

/// Solves a tridiagonal system. `lower[i]` couples row `i + 1` to column
/// `i`, `upper[i]` couples row `i` to column `i + 1`.
pub fn thomas<T: Scalar>(lower: &[T], diag: &[T], upper: &[T], rhs: &[T]) -> Result<Vec<T>> {
    let n = diag.len();
    if rhs.len() != n || (n > 0 && (lower.len() != n - 1 || upper.len() != n - 1)) {
        return Err(Error::Domain("tridiagonal band lengths disagree"));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut c = Vec::with_capacity(n);
    let mut d = Vec::with_capacity(n);
    let mut denom = diag[0].clone();
    if denom.is_zero() {
        return Err(Error::Singular);
    }
    c.push(if n > 1 { upper[0].clone() / denom.clone() } else { T::zero() });
    d.push(rhs[0].clone() / denom);
    for i in 1..n {
        denom = diag[i].clone() - lower[i - 1].clone() * c[i - 1].clone();
        if denom.is_zero() {
            return Err(Error::Singular);
        }
        let ci = if i + 1 < n { upper[i].clone() / denom.clone() } else { T::zero() };
        let di = (rhs[i].clone() - lower[i - 1].clone() * d[i - 1].clone()) / denom;
        c.push(ci);
        d.push(di);
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        let next = x[i + 1].clone();
        x[i] = x[i].clone() - c[i].clone() * next;
    }
    Ok(x)
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T = f64> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    /// Builds a matrix from rows of equal length.
    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self { rows: r, cols: c, data: rows.iter().flatten().cloned().collect() }
    }

    /// Block-diagonal matrix with the given blocks along the diagonal.
    pub fn block_diag(blocks: &[Matrix<T>]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out[(r0 + i, c0 + j)] = b[(i, j)].clone();
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)].clone();
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)].clone() + a.clone() * other[(k, j)].clone();
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "vector length differs");
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(T::zero(), |acc, j| acc + self[(i, j)].clone() * v[j].clone())
            })
            .collect()
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, s: T, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shapes differ");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.clone() + s.clone() * b.clone())
            .collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, s: T) -> Self {
        let data = self.data.iter().map(|a| a.clone() * s.clone()).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(Scalar::magnitude).fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    /// Solves `self * X = rhs` by Gaussian elimination with partial pivoting.
    pub fn solve(&self, rhs: &Self) -> Result<Self> {
        if self.rows != self.cols || rhs.rows != self.rows {
            return Err(Error::Domain("solve needs a square matrix and matching right-hand side"));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut b = rhs.clone();
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| a[(i, col)].magnitude().total_cmp(&a[(j, col)].magnitude()))
                .unwrap_or(col);
            let p = a[(pivot, col)].clone();
            if p.is_zero() || p.magnitude() <= scale * 1e-15 && !T::EXACT {
                return Err(Error::Singular);
            }
            a.swap_rows(col, pivot);
            b.swap_rows(col, pivot);
            for r in col + 1..n {
                let f = a[(r, col)].clone() / p.clone();
                if f.is_zero() {
                    continue;
                }
                for c in col..n {
                    a[(r, c)] = a[(r, c)].clone() - f.clone() * a[(col, c)].clone();
                }
                for c in 0..b.cols {
                    b[(r, c)] = b[(r, c)].clone() - f.clone() * b[(col, c)].clone();
                }
            }
        }
        let mut x = Self::zeros(n, b.cols);
        for c in 0..b.cols {
            for r in (0..n).rev() {
                let mut acc = b[(r, c)].clone();
                for k in r + 1..n {
                    acc = acc - a[(r, k)].clone() * x[(k, c)].clone();
                }
                x[(r, c)] = acc / a[(r, r)].clone();
            }
        }
        Ok(x)
    }

    /// Solves `self * x = rhs` for a single vector.
    pub fn solve_vec(&self, rhs: &[T]) -> Result<Vec<T>> {
        let b = Self { rows: rhs.len(), cols: 1, data: rhs.to_vec() };
        Ok(self.solve(&b)?.data)
    }

    /// Determinant by elimination.
    pub fn det(&self) -> T {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = T::one();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| a[(i, col)].magnitude().total_cmp(&a[(j, col)].magnitude()))
                .unwrap_or(col);
            let p = a[(pivot, col)].clone();
            if p.is_zero() {
                return T::zero();
            }
            if pivot != col {
                a.swap_rows(col, pivot);
                det = -det;
            }
            det = det * p.clone();
            for r in col + 1..n {
                let f = a[(r, col)].clone() / p.clone();
                for c in col..n {
                    a[(r, c)] = a[(r, c)].clone() - f.clone() * a[(col, c)].clone();
                }
            }
        }
        det
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }
}

impl Matrix<Rational> {
    pub fn to_f64(&self) -> Matrix<f64> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&r| math::rational_to_f64(r)).collect(),
        }
    }
}

impl<T> core::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        assert!(i < self.rows && j < self.cols, "matrix index out of range");
        &self.data[i * self.cols + j]
    }
}

impl<T> core::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        assert!(i < self.rows && j < self.cols, "matrix index out of range");
        &mut self.data[i * self.cols + j]
    }
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations,
/// ascending.
pub fn symmetric_eigenvalues(a: &Matrix<f64>) -> Vec<f64> {
    assert_eq!(a.rows, a.cols, "eigenvalues of a non-square matrix");
    let n = a.rows;
    let mut m = a.clone();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum();
        if off < 1e-30 * (1.0 + m.max_abs()) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (math::abs(theta) + math::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / math::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}
