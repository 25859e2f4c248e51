//! The eight-map iterated function system and the level-`m` path graphs.

use alloc::vec::Vec;
use core::fmt;

use num_integer::Integer;

use crate::{math, Error, Result, DEFAULT_LEVEL_CAP};

/// A point of the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        let (dx, dy) = (self.x - other.x, self.y - other.y);
        math::sqrt(dx * dx + dy * dy)
    }
}

/// Left endpoint `P_0 = (0, 0)`.
pub const P0: Point = Point::new(0.0, 0.0);
/// Right endpoint `P_1 = (1, 0)`.
pub const P1: Point = Point::new(1.0, 0.0);

/// Point with coordinates `(x, y) / 4^scale`, exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicPoint {
    pub x: i64,
    pub y: i64,
    pub scale: u32,
}

impl DyadicPoint {
    pub const fn new(x: i64, y: i64, scale: u32) -> Self {
        Self { x, y, scale }
    }

    /// Re-expresses the point with denominator `4^scale` (`scale` must not shrink).
    pub fn rescale(self, scale: u32) -> Self {
        assert!(scale >= self.scale, "rescaling would lose precision");
        let f = 1i64 << (2 * (scale - self.scale));
        Self { x: self.x * f, y: self.y * f, scale }
    }

    pub fn to_point(self) -> Point {
        let d = math::powu(4.0, self.scale);
        Point::new(self.x as f64 / d, self.y as f64 / d)
    }

    /// Coordinates as reduced fractions `((x_num, x_den), (y_num, y_den))`.
    pub fn fractions(self) -> ((i64, i64), (i64, i64)) {
        let den = 1i64 << (2 * self.scale);
        let reduce = |n: i64| {
            let g = n.gcd(&den);
            (n / g, den / g)
        };
        (reduce(self.x), reduce(self.y))
    }

    /// Equality as points of the plane, regardless of scale.
    pub fn same_point(self, other: Self) -> bool {
        let s = self.scale.max(other.scale);
        self.rescale(s) == other.rescale(s)
    }
}

/// Rotation by a multiple of a quarter turn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuarterTurn {
    R0,
    R90,
    R180,
    R270,
}

impl QuarterTurn {
    pub fn angle(self) -> f64 {
        match self {
            QuarterTurn::R0 => 0.0,
            QuarterTurn::R90 => math::PI / 2.0,
            QuarterTurn::R180 => math::PI,
            QuarterTurn::R270 => 3.0 * math::PI / 2.0,
        }
    }

    fn rotate_int(self, x: i64, y: i64) -> (i64, i64) {
        match self {
            QuarterTurn::R0 => (x, y),
            QuarterTurn::R90 => (-y, x),
            QuarterTurn::R180 => (-x, -y),
            QuarterTurn::R270 => (y, -x),
        }
    }

    fn rotate(self, p: Point) -> Point {
        match self {
            QuarterTurn::R0 => p,
            QuarterTurn::R90 => Point::new(-p.y, p.x),
            QuarterTurn::R180 => Point::new(-p.x, -p.y),
            QuarterTurn::R270 => Point::new(p.y, -p.x),
        }
    }
}

/// `X ↦ (R X + t) / 4` with `t` an integer vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Similarity {
    pub rotation: QuarterTurn,
    pub shift: (i64, i64),
}

impl Similarity {
    pub const RATIO: f64 = 0.25;

    pub fn angle(&self) -> f64 {
        self.rotation.angle()
    }

    pub fn ratio(&self) -> f64 {
        Self::RATIO
    }

    /// Translation part, already divided by 4.
    pub fn translation(&self) -> Point {
        Point::new(self.shift.0 as f64 / 4.0, self.shift.1 as f64 / 4.0)
    }

    pub fn apply(&self, p: Point) -> Point {
        let r = self.rotation.rotate(p);
        Point::new((r.x + self.shift.0 as f64) / 4.0, (r.y + self.shift.1 as f64) / 4.0)
    }

    pub fn apply_dyadic(&self, p: DyadicPoint) -> DyadicPoint {
        let (rx, ry) = self.rotation.rotate_int(p.x, p.y);
        let f = 1i64 << (2 * p.scale);
        DyadicPoint::new(rx + self.shift.0 * f, ry + self.shift.1 * f, p.scale + 1)
    }
}

const MAPS: [Similarity; 8] = [
    Similarity { rotation: QuarterTurn::R0, shift: (0, 0) },
    Similarity { rotation: QuarterTurn::R90, shift: (1, 0) },
    Similarity { rotation: QuarterTurn::R0, shift: (1, 1) },
    Similarity { rotation: QuarterTurn::R270, shift: (2, 1) },
    Similarity { rotation: QuarterTurn::R270, shift: (2, 0) },
    Similarity { rotation: QuarterTurn::R0, shift: (2, -1) },
    Similarity { rotation: QuarterTurn::R90, shift: (3, -1) },
    Similarity { rotation: QuarterTurn::R0, shift: (3, 0) },
];

/// The maps `f_1, …, f_8` in order.
pub fn build_similarities() -> [Similarity; 8] {
    MAPS
}

/// A word over the letters `1..=8`; the empty word is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word {
    letters: Vec<u8>,
}

impl Word {
    pub fn new(letters: Vec<u8>) -> Result<Self> {
        if let Some(&bad) = letters.iter().find(|&&l| !(1..=8).contains(&l)) {
            return Err(Error::InvalidLetter(bad));
        }
        Ok(Self { letters })
    }

    /// The `len`-letter word whose letters are the base-8 digits of `n`
    /// (most significant first), shifted to `1..=8`.
    pub fn from_index(mut n: u64, len: usize) -> Self {
        let mut letters = alloc::vec![1u8; len];
        for slot in letters.iter_mut().rev() {
            *slot = (n % 8) as u8 + 1;
            n /= 8;
        }
        Self { letters }
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// `f_{w_1} ∘ ⋯ ∘ f_{w_m}` applied to `p`.
pub fn apply_word(w: &Word, p: Point) -> Point {
    w.letters.iter().rev().fold(p, |q, &l| MAPS[usize::from(l - 1)].apply(q))
}

/// Exact version of [`apply_word`].
pub fn apply_word_dyadic(w: &Word, p: DyadicPoint) -> DyadicPoint {
    w.letters.iter().rev().fold(p, |q, &l| MAPS[usize::from(l - 1)].apply_dyadic(q))
}

/// `8^m + 1`, via `N_0 = 2`, `N_m = 8 N_{m−1} − 7`.
pub fn vertex_count(m: u32) -> Result<u64> {
    let mut n: u64 = 2;
    for _ in 0..m {
        n = n
            .checked_mul(8)
            .and_then(|v| v.checked_sub(7))
            .ok_or(Error::Overflow { what: "vertex count", level: m })?;
    }
    Ok(n)
}

/// Which end of the unit segment a word is applied to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    P0,
    P1,
}

/// Vertices of level `m` in order along the curve.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelGraph {
    level: u32,
    vertices: Vec<DyadicPoint>,
}

/// Builds level `m` under the default cap.
pub fn build_level(m: u32) -> Result<LevelGraph> {
    build_level_with_cap(m, DEFAULT_LEVEL_CAP)
}

/// Builds `V_m = ⋃ f_i(V_{m−1})`, merging the shared endpoints of
/// consecutive cells exactly.
pub fn build_level_with_cap(m: u32, cap: u32) -> Result<LevelGraph> {
    if m > cap {
        return Err(Error::LevelCap { level: m, cap });
    }
    // Coordinates are stored as integers over 4^m.
    if m > 30 {
        return Err(Error::Overflow { what: "coordinate denominator", level: m });
    }
    let mut level = LevelGraph {
        level: 0,
        vertices: alloc::vec![DyadicPoint::new(0, 0, 0), DyadicPoint::new(1, 0, 0)],
    };
    for _ in 0..m {
        level = level.refine();
    }
    Ok(level)
}

impl LevelGraph {
    fn refine(&self) -> LevelGraph {
        let n = self.vertices.len();
        let mut vertices = Vec::with_capacity(8 * (n - 1) + 1);
        for (i, f) in MAPS.iter().enumerate() {
            let mut image = self.vertices.iter().map(|&v| f.apply_dyadic(v));
            if i > 0 {
                let first = image.next().expect("non-empty level");
                let last = *vertices.last().expect("previous cell present");
                assert_eq!(first, last, "cells {i} and {} do not share an endpoint", i + 1);
            }
            vertices.extend(image);
        }
        LevelGraph { level: self.level + 1, vertices }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[DyadicPoint] {
        &self.vertices
    }

    pub fn point(&self, i: usize) -> Point {
        self.vertices[i].to_point()
    }

    pub fn points(&self) -> Vec<Point> {
        self.vertices.iter().map(|v| v.to_point()).collect()
    }

    /// Consecutive index pairs.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (1..self.vertices.len()).map(|i| (i - 1, i))
    }

    /// Indices of `P_0` and `P_1`.
    pub fn boundary(&self) -> [usize; 2] {
        [0, self.vertices.len() - 1]
    }

    pub fn is_boundary(&self, i: usize) -> bool {
        i == 0 || i + 1 == self.vertices.len()
    }

    pub fn neighbors(&self, i: usize) -> Result<Vec<usize>> {
        let n = self.vertices.len();
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, len: n });
        }
        let mut out = Vec::with_capacity(2);
        if i > 0 {
            out.push(i - 1);
        }
        if i + 1 < n {
            out.push(i + 1);
        }
        Ok(out)
    }

    /// Number of distinct vertices adjacent to `i` in the plane geometry:
    /// consecutive vertices are the only ones at distance `4^{−m}`.
    pub fn degree(&self, i: usize) -> Result<usize> {
        let p = *self.vertices.get(i).ok_or(Error::IndexOutOfRange { index: i, len: self.len() })?;
        Ok(self.neighbors(i)?.into_iter().filter(|&j| unit_step(p, self.vertices[j])).count())
    }

    /// The words of length `m` that produce vertex `i`.
    pub fn addresses(&self, i: usize) -> Result<Vec<(Word, Endpoint)>> {
        let n = self.vertices.len();
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, len: n });
        }
        let m = self.level as usize;
        let mut out = Vec::with_capacity(2);
        if i + 1 < n {
            out.push((Word::from_index(i as u64, m), Endpoint::P0));
        }
        if i > 0 {
            out.push((Word::from_index(i as u64 - 1, m), Endpoint::P1));
        }
        Ok(out)
    }
}

fn unit_step(a: DyadicPoint, b: DyadicPoint) -> bool {
    (a.x - b.x).abs() + (a.y - b.y).abs() == 1
}
