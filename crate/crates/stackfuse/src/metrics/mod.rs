//! Objective quality metrics: mean CIEDE2000 between two images and
//! no-reference statistical naturalness of one image.

mod de2000;
mod lab;
mod naturalness;

pub use de2000::{de2000, mean_de2000};
pub use lab::rgb_to_lab;
pub use naturalness::{statistical_naturalness, statistical_naturalness_with, NaturalnessParams};

use std::fmt;

/// One metric record for an image (pair). Rendered as a single
/// line-delimited `key=value` record with values at 6 significant
/// digits.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetricReport {
    pub image_a: String,
    pub image_b: Option<String>,
    pub mean_de2000: Option<f64>,
    pub statistical_naturalness: Option<f64>,
    /// Parameter echo appended to the record, e.g. block sizes.
    pub params: Vec<(String, String)>,
}

impl fmt::Display for MetricReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "image_a={}", self.image_a)?;
        if let Some(b) = &self.image_b {
            write!(f, " image_b={b}")?;
        }
        if let Some(v) = self.mean_de2000 {
            write!(f, " mean_de2000={}", format_significant(v, 6))?;
        }
        if let Some(v) = self.statistical_naturalness {
            write!(f, " statistical_naturalness={}", format_significant(v, 6))?;
        }
        for (key, value) in &self.params {
            write!(f, " {key}={value}")?;
        }
        Ok(())
    }
}

/// Decimal rendering with `digits` significant digits (no exponent).
pub fn format_significant(value: f64, digits: usize) -> String {
    if value == 0.0 || !value.is_finite() {
        return format!("{value:.*}", digits.saturating_sub(1));
    }
    let magnitude = value.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    format!("{value:.decimals$}")
}
