#![no_std]

//! Graph approximations of the Minkowski curve and their spectral theory.
//!
//! The crate builds the level-`m` vertex sets of the eight-map iterated
//! function system, the energy forms and graph Laplacians on them, the
//! absorbing random walk that fixes the walk dimension, the spectral
//! decimation map with its full Dirichlet spectrum enumeration, the strong
//! harmonic structure of the curve and of the Minkowski island, and an
//! independent oracle (Sturm-sequence eigensolver, closed-form spectra,
//! determinant audits) to check every result against.
//!
//! Everything here is pure computation over `alloc`; file formats, the CLI
//! and figure emission live in the `fractal-spectra` companion crate.

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod decimation;
pub mod energy;
mod error;
pub mod geometry;
pub mod harmonic_structure;
pub mod linalg;
pub mod math;
pub mod oracle;
pub mod poly;
pub mod walk;

pub use error::{Error, Result};

/// Exact rational number used for the closed-form computations.
pub type Rational = num_rational::Ratio<i64>;

/// Default upper bound on the geometry level (`8^8 + 1` vertices).
pub const DEFAULT_LEVEL_CAP: u32 = 8;

/// Default upper bound on the spectrum enumeration level.
pub const DEFAULT_SPECTRUM_CAP: u32 = 6;

/// Largest level the dense tridiagonal oracle accepts (matrix side 4095).
pub const DENSE_ORACLE_CAP: u32 = 4;
