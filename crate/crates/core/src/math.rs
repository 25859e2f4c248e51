//! Scalar helpers that work without `std`.

use crate::Rational;

pub use core::f64::consts::PI;

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

/// `base^exp` by repeated squaring; exact for powers of two until overflow.
pub fn powu(base: f64, mut exp: u32) -> f64 {
    let mut acc = 1.0;
    let mut b = base;
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= b;
        }
        b *= b;
        exp >>= 1;
    }
    acc
}

pub fn rational_to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Exact value of `ln(x) / ln(y)` for positive rationals that are rational
/// powers of one another, e.g. `ln 64 / ln 4 = 3` or `ln 8 / ln (1/4) = -3/2`.
///
/// Returns `None` when the ratio is irrational or either argument is
/// non-positive or equal to one.
pub fn exact_log_ratio(x: Rational, y: Rational) -> Option<Rational> {
    if *x.numer() <= 0 || *y.numer() <= 0 {
        return None;
    }
    let fx = factor_rational(x)?;
    let fy = factor_rational(y)?;
    if fy.is_empty() {
        return None;
    }
    // x = prod p^a_p, y = prod p^b_p; need a = t b for a single rational t.
    let mut ratio: Option<Rational> = None;
    let mut primes: alloc::vec::Vec<u64> = fx.iter().map(|&(p, _)| p).collect();
    primes.extend(fy.iter().map(|&(p, _)| p));
    primes.sort_unstable();
    primes.dedup();
    for p in primes {
        let a = exponent_of(&fx, p);
        let b = exponent_of(&fy, p);
        if b == 0 {
            if a != 0 {
                return None;
            }
            continue;
        }
        let t = Rational::new(a, b);
        match ratio {
            None => ratio = Some(t),
            Some(prev) if prev != t => return None,
            _ => {}
        }
    }
    ratio
}

fn exponent_of(f: &[(u64, i64)], p: u64) -> i64 {
    f.iter().find(|&&(q, _)| q == p).map_or(0, |&(_, e)| e)
}

fn factor_rational(r: Rational) -> Option<alloc::vec::Vec<(u64, i64)>> {
    let mut out = alloc::vec::Vec::new();
    for (value, sign) in [(*r.numer(), 1i64), (*r.denom(), -1i64)] {
        let mut n = u64::try_from(value).ok()?;
        let mut p = 2u64;
        while p * p <= n {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            if e > 0 {
                out.push((p, sign * e));
            }
            p += 1;
        }
        if n > 1 {
            out.push((n, sign));
        }
    }
    Some(out)
}
