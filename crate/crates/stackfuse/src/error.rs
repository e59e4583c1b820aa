//! Errors shared across the pixel kernels.

use thiserror::Error;

/// Two grids that were required to share dimensions did not.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("dimension mismatch: {left_width}x{left_height} vs {right_width}x{right_height}")]
pub struct DimensionMismatch {
    pub left_width: usize,
    pub left_height: usize,
    pub right_width: usize,
    pub right_height: usize,
}

impl DimensionMismatch {
    pub(crate) fn check(
        (lw, lh): (usize, usize),
        (rw, rh): (usize, usize),
    ) -> Result<(), DimensionMismatch> {
        if lw == rw && lh == rh {
            Ok(())
        } else {
            Err(DimensionMismatch {
                left_width: lw,
                left_height: lh,
                right_width: rw,
                right_height: rh,
            })
        }
    }
}

/// A numeric parameter violated its documented precondition.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid parameter {name}: {message} (got {value})")]
pub struct InvalidParam {
    pub name: &'static str,
    pub message: &'static str,
    pub value: f64,
}

impl InvalidParam {
    pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64, InvalidParam> {
        if value.is_finite() && value > 0.0 {
            Ok(value)
        } else {
            Err(InvalidParam {
                name,
                message: "must be finite and > 0",
                value,
            })
        }
    }
}
