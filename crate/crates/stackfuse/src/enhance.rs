//! Local contrast enhancement: `L_c = L^2 / L_a` where `L_a` is a
//! bilateral-filtered local average of the luminance.
//!
//! Both kernels are Gaussians of the form `exp(-d^2 / sigma^2)` — note
//! the plain `sigma^2` denominator, not the conventional `2 sigma^2`;
//! the stock parameters below were tuned against this form. The kernel
//! normalization constants cancel between numerator and denominator and
//! are omitted, so the filter is invariant to any positive scaling of
//! either kernel.

use rayon::prelude::*;

use crate::error::{DimensionMismatch, InvalidParam};
use crate::image::LuminanceMap;

/// Bilateral filter parameters.
///
/// `sigma_spatial` is in pixels, `sigma_range` in luminance units. The
/// window is truncated at `window_radius` pixels and intersected with
/// the image bounds, so a window at least as large as the image degrades
/// to the exact all-pixels sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BilateralParams {
    sigma_spatial: f64,
    sigma_range: f64,
    window_radius: usize,
}

/// Stock spatial sigma (pixels).
pub const DEFAULT_SIGMA_SPATIAL: f64 = 16.0;
/// Stock range sigma: 3/255 in luminance units.
pub const DEFAULT_SIGMA_RANGE: f64 = 3.0 / 255.0;

impl BilateralParams {
    pub fn new(
        sigma_spatial: f64,
        sigma_range: f64,
        window_radius: usize,
    ) -> Result<Self, InvalidParam> {
        InvalidParam::positive("sigma_spatial", sigma_spatial)?;
        InvalidParam::positive("sigma_range", sigma_range)?;
        if window_radius == 0 {
            return Err(InvalidParam {
                name: "window_radius",
                message: "must be >= 1",
                value: 0.0,
            });
        }
        Ok(Self {
            sigma_spatial,
            sigma_range,
            window_radius,
        })
    }

    /// Window radius `ceil(3 * sigma_spatial)`; Gaussian mass beyond 3
    /// sigma is negligible.
    pub fn with_default_radius(sigma_spatial: f64, sigma_range: f64) -> Result<Self, InvalidParam> {
        InvalidParam::positive("sigma_spatial", sigma_spatial)?;
        let radius = (3.0 * sigma_spatial).ceil() as usize;
        Self::new(sigma_spatial, sigma_range, radius.max(1))
    }

    pub fn sigma_spatial(&self) -> f64 {
        self.sigma_spatial
    }

    pub fn sigma_range(&self) -> f64 {
        self.sigma_range
    }

    pub fn window_radius(&self) -> usize {
        self.window_radius
    }
}

impl Default for BilateralParams {
    fn default() -> Self {
        Self::with_default_radius(DEFAULT_SIGMA_SPATIAL, DEFAULT_SIGMA_RANGE)
            .expect("stock parameters are valid")
    }
}

/// Edge-preserving local average: each output pixel is the
/// kernel-weighted mean of the in-window, in-image neighbors.
///
/// Output at every pixel is a convex combination of window values. Rows
/// are processed in parallel; the summation order within each pixel's
/// window is fixed, so results do not depend on the schedule.
pub fn bilateral_filter(luminance: &LuminanceMap, params: &BilateralParams) -> LuminanceMap {
    let (width, height) = luminance.dimensions();
    let radius = params.window_radius;
    let inv_sigma_sq_spatial = 1.0 / (params.sigma_spatial * params.sigma_spatial);
    let inv_sigma_sq_range = 1.0 / (params.sigma_range * params.sigma_range);

    // Spatial weights depend only on the offset; build the table once.
    let table_width = 2 * radius + 1;
    let mut spatial = vec![0.0f64; table_width * table_width];
    for dy in -(radius as isize)..=(radius as isize) {
        for dx in -(radius as isize)..=(radius as isize) {
            let d2 = (dx * dx + dy * dy) as f64;
            spatial[(dy + radius as isize) as usize * table_width
                + (dx + radius as isize) as usize] = (-d2 * inv_sigma_sq_spatial).exp();
        }
    }

    let src = luminance.values();
    let mut out = vec![0.0f64; width * height];
    out.par_chunks_mut(width)
        .enumerate()
        .for_each(|(y, out_row)| {
            let dy_min = y.saturating_sub(radius);
            let dy_max = (y + radius).min(height - 1);
            for (x, out_px) in out_row.iter_mut().enumerate() {
                let center = src[y * width + x];
                let dx_min = x.saturating_sub(radius);
                let dx_max = (x + radius).min(width - 1);
                let mut num = 0.0f64;
                let mut den = 0.0f64;
                for qy in dy_min..=dy_max {
                    let table_row = (qy + radius - y) * table_width;
                    for qx in dx_min..=dx_max {
                        let value = src[qy * width + qx];
                        let diff = value - center;
                        let w = spatial[table_row + (qx + radius - x)]
                            * (-diff * diff * inv_sigma_sq_range).exp();
                        num += value * w;
                        den += w;
                    }
                }
                // den >= the center tap's weight of 1.
                *out_px = num / den;
            }
        });
    LuminanceMap::from_values(width, height, out).expect("source dimensions are valid")
}

/// Dodging and burning: `L_c(p) = L(p)^2 / L_a(p)`, with the `0 / 0`
/// pixel guarded to 0 (any averaging filter maps zero neighborhoods to
/// zero, so `L_a(p) = 0` implies `L(p) = 0`).
pub fn dodge_burn(
    luminance: &LuminanceMap,
    local_average: &LuminanceMap,
) -> Result<LuminanceMap, DimensionMismatch> {
    DimensionMismatch::check(luminance.dimensions(), local_average.dimensions())?;
    let values = luminance
        .values()
        .iter()
        .zip(local_average.values())
        .map(|(&l, &la)| if la == 0.0 { 0.0 } else { l * l / la })
        .collect();
    Ok(LuminanceMap::from_values(luminance.width(), luminance.height(), values)
        .expect("source dimensions are valid"))
}

/// The full enhancement step: `dodge_burn(L, bilateral_filter(L))`.
///
/// Fixes constants: a constant map passes through unchanged.
pub fn local_contrast_enhance(
    luminance: &LuminanceMap,
    params: &BilateralParams,
) -> LuminanceMap {
    let average = bilateral_filter(luminance, params);
    dodge_burn(luminance, &average).expect("filter preserves dimensions")
}
