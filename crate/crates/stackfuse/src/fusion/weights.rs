//! Per-pixel quality weights: contrast, saturation and well-exposedness,
//! combined multiplicatively and normalized across the stack.

use crate::image::{relative_luminance, ExposureStack, LuminanceMap};

/// Exponents applied to the three quality measures; 0 disables a
/// measure, 1 is the stock weighting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightExponents {
    pub contrast: f64,
    pub saturation: f64,
    pub exposedness: f64,
}

impl Default for WeightExponents {
    fn default() -> Self {
        Self {
            contrast: 1.0,
            saturation: 1.0,
            exposedness: 1.0,
        }
    }
}

/// Gaussian width of the well-exposedness measure around 0.5.
const EXPOSEDNESS_SIGMA: f64 = 0.2;
/// Floor added to every raw weight so normalization never divides by 0.
const WEIGHT_FLOOR: f64 = 1e-12;

/// One normalized weight map per stack member.
///
/// At every pixel the maps sum to 1 and each entry is nonnegative. The
/// stack type guarantees at least one member.
#[derive(Debug, Clone)]
pub struct WeightMaps {
    maps: Vec<LuminanceMap>,
}

impl WeightMaps {
    pub fn maps(&self) -> &[LuminanceMap] {
        &self.maps
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }
}

/// Computes normalized quality weights for a stack.
pub fn quality_weights(stack: &ExposureStack, exponents: &WeightExponents) -> WeightMaps {
    let (width, height) = stack.dimensions();
    let mut raw: Vec<Vec<f64>> = stack
        .images()
        .map(|img| {
            let gray = relative_luminance(img);
            let contrast = laplacian_magnitude(&gray);
            img.pixels()
                .iter()
                .zip(contrast)
                .map(|(p, c)| {
                    let s = channel_stddev(p);
                    let e = well_exposedness(p);
                    c.powf(exponents.contrast)
                        * s.powf(exponents.saturation)
                        * e.powf(exponents.exposedness)
                        + WEIGHT_FLOOR
                })
                .collect()
        })
        .collect();

    for px in 0..width * height {
        let total: f64 = raw.iter().map(|m| m[px]).sum();
        for m in &mut raw {
            m[px] /= total;
        }
    }

    WeightMaps {
        maps: raw
            .into_iter()
            .map(|values| {
                LuminanceMap::from_values(width, height, values).expect("stack dims valid")
            })
            .collect(),
    }
}

/// `|Laplacian|` of a grayscale map with the 3x3 kernel
/// `[0 1 0; 1 -4 1; 0 1 0]` and replicated borders.
fn laplacian_magnitude(gray: &LuminanceMap) -> Vec<f64> {
    let (width, height) = gray.dimensions();
    let at = |x: isize, y: isize| {
        let x = x.clamp(0, width as isize - 1) as usize;
        let y = y.clamp(0, height as isize - 1) as usize;
        gray.get(x, y)
    };
    let mut out = Vec::with_capacity(width * height);
    for y in 0..height as isize {
        for x in 0..width as isize {
            let lap = at(x, y - 1) + at(x - 1, y) + at(x + 1, y) + at(x, y + 1)
                - 4.0 * at(x, y);
            out.push(lap.abs());
        }
    }
    out
}

/// Population standard deviation of the three channels.
fn channel_stddev(p: &[f64; 3]) -> f64 {
    let mean = (p[0] + p[1] + p[2]) / 3.0;
    let var = ((p[0] - mean).powi(2) + (p[1] - mean).powi(2) + (p[2] - mean).powi(2)) / 3.0;
    var.sqrt()
}

/// Product over channels of a Gaussian in the distance from mid-gray.
fn well_exposedness(p: &[f64; 3]) -> f64 {
    p.iter()
        .map(|&c| (-(c - 0.5) * (c - 0.5) / (2.0 * EXPOSEDNESS_SIGMA * EXPOSEDNESS_SIGMA)).exp())
        .product()
}
