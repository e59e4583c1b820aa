//! Multi-scale exposure fusion: quality-weighted blending of Laplacian
//! pyramids, with the weights low-passed through a matching Gaussian
//! pyramid.

use super::pyramid::{self, full_depth, gaussian_pyramid, laplacian_pyramid};
use super::weights::{quality_weights, WeightExponents};
use super::{FusionBackend, FusionError};
use crate::image::{ExposureStack, RgbImage};

/// Pyramid-blending fusion backend.
#[derive(Debug, Clone, Default)]
pub struct MertensFusion {
    exponents: WeightExponents,
    /// Cap on pyramid depth; `None` uses the full depth for the image
    /// size. A cap of 1 degrades to a flat per-pixel weighted average.
    max_depth: Option<usize>,
}

impl MertensFusion {
    pub fn new(exponents: WeightExponents) -> Self {
        Self {
            exponents,
            max_depth: None,
        }
    }

    pub fn with_max_depth(mut self, max_depth: Option<usize>) -> Self {
        self.max_depth = max_depth;
        self
    }

    pub fn exponents(&self) -> &WeightExponents {
        &self.exponents
    }
}

impl FusionBackend for MertensFusion {
    fn name(&self) -> &'static str {
        "mertens"
    }

    fn fuse(&self, stack: &ExposureStack) -> Result<RgbImage, FusionError> {
        Ok(fuse(stack, &self.exponents, self.max_depth))
    }
}

/// Fuses a stack: per-level blend of member Laplacian pyramids under
/// Gaussian-smoothed normalized weights, then collapse.
///
/// Fusing N copies of one image returns that image (weights are 1/N at
/// every level and pyramid blending is linear), and the result is
/// invariant to stack order up to floating-point rounding. Output values
/// may leave `[0, 1]` slightly; encoding clamps.
pub fn fuse(
    stack: &ExposureStack,
    exponents: &WeightExponents,
    max_depth: Option<usize>,
) -> RgbImage {
    let (width, height) = stack.dimensions();
    let depth = max_depth
        .unwrap_or(usize::MAX)
        .clamp(1, full_depth(width, height));

    let weights = quality_weights(stack, exponents);

    let mut blended: Option<Vec<RgbImage>> = None;
    for (member, weight_map) in stack.members().iter().zip(weights.maps()) {
        let image_pyr = laplacian_pyramid(&member.image, depth);
        let weight_pyr = gaussian_pyramid(weight_map, depth);
        match &mut blended {
            None => {
                blended = Some(
                    image_pyr
                        .levels()
                        .iter()
                        .zip(weight_pyr.levels())
                        .map(|(level, w)| {
                            let pixels = level
                                .pixels()
                                .iter()
                                .zip(w.values())
                                .map(|(p, &wv)| [p[0] * wv, p[1] * wv, p[2] * wv])
                                .collect();
                            RgbImage::from_pixels(level.width(), level.height(), pixels)
                                .expect("pyramid level dims valid")
                        })
                        .collect(),
                );
            }
            Some(acc) => {
                for ((acc_level, level), w) in acc
                    .iter_mut()
                    .zip(image_pyr.levels())
                    .zip(weight_pyr.levels())
                {
                    for ((a, p), &wv) in acc_level
                        .pixels_mut()
                        .iter_mut()
                        .zip(level.pixels())
                        .zip(w.values())
                    {
                        a[0] += p[0] * wv;
                        a[1] += p[1] * wv;
                        a[2] += p[2] * wv;
                    }
                }
            }
        }
    }

    let levels = blended.expect("stack has at least one member");
    pyramid::collapse(&pyramid::from_levels(levels))
}
