use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("level {level} exceeds the cap {cap}")]
    LevelCap { level: u32, cap: u32 },

    #[error("{what} overflows at level {level}")]
    Overflow { what: &'static str, level: u32 },

    #[error("vertex {index} is a boundary vertex")]
    BoundaryVertex { index: usize },

    #[error("vertex {index} is not a boundary vertex")]
    InteriorVertex { index: usize },

    #[error("index {index} out of range 0..{len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("function has {got} values, level {level} needs {expected}")]
    LengthMismatch { level: u32, expected: usize, got: usize },

    #[error("levels differ: {left} vs {right}")]
    LevelMismatch { left: u32, right: u32 },

    #[error("invalid letter {0} (letters are 1..=8)")]
    InvalidLetter(u8),

    #[error("linear system is singular")]
    Singular,

    #[error("lambda {lambda} is within {distance:e} of a resonance")]
    Resonance { lambda: f64, distance: f64 },

    #[error("argument out of domain: {0}")]
    Domain(&'static str),

    #[error("fitted degree {found}, expected {expected}")]
    FitDegree { expected: usize, found: usize },

    #[error("invalid chain: {0}")]
    InvalidChain(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
