//! Unified error type.
//!
//! Variants sort into two failure families that the CLI maps onto distinct
//! exit codes: invalid input (rejected before any computation runs) and
//! numerically degenerate results (well-formed input, meaningless output).

use thiserror::Error;

/// Errors produced by every module in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter failed validation before any computation ran.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Mode index outside the aliasing-free window for the array size.
    #[error(
        "mode {index} out of range for {n_elements} elements: \
         mode must lie in ({lo_exclusive}, {hi_inclusive}]"
    )]
    ModeOutOfRange {
        index: i32,
        n_elements: usize,
        lo_exclusive: i32,
        hi_inclusive: i32,
    },

    /// Excitation vector length does not match the array size.
    #[error("excitation has {actual} weights but the array has {expected} elements")]
    LengthMismatch { expected: usize, actual: usize },

    /// Bessel reference queried outside its validated accuracy envelope.
    #[error(
        "bessel reference outside validated range: order {order} with |order| <= {max_order}, \
         argument {argument} with 0 < argument <= {max_argument}"
    )]
    BesselRange {
        order: i32,
        max_order: i32,
        argument: f64,
        max_argument: f64,
    },

    /// Pattern or field grid carries no usable signal (e.g. all-zero excitation).
    #[error("degenerate pattern: {0}")]
    DegeneratePattern(String),

    /// Linear system could not be solved at the requested regularization.
    #[error("singular system: {0}; increase the ridge parameter")]
    SingularSystem(String),

    /// Unknown preset name.
    #[error("unknown preset \"{name}\": valid presets are {valid}")]
    UnknownPreset { name: String, valid: String },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors describing a numerically degenerate computation
    /// rather than invalid input. The CLI maps these to a separate exit code.
    pub fn is_degenerate(&self) -> bool {
        matches!(
            self,
            Error::DegeneratePattern(_) | Error::SingularSystem(_)
        )
    }
}
