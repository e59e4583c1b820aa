//! Pixel containers and luminance conversion.
//!
//! Channel values are display-referred intensities on a nominal `[0, 1]`
//! scale, stored as `f64`. Values above 1 are permitted in memory (HDR
//! loads, exposure scaling); clamping happens only when encoding to an
//! 8-bit file format. Sums and means are accumulated in `f64` throughout.

use crate::error::DimensionMismatch;
use thiserror::Error;

/// Rec. 709 luma weights, used for every RGB -> luminance conversion in
/// this crate.
pub const LUMA_R: f64 = 0.2126;
pub const LUMA_G: f64 = 0.7152;
pub const LUMA_B: f64 = 0.0722;

/// Construction failed because the requested grid shape is unusable.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ImageError {
    #[error("invalid image dimensions {width}x{height}: both must be >= 1")]
    InvalidDimensions { width: usize, height: usize },
    #[error("pixel buffer length {len} does not match {width}x{height}")]
    LengthMismatch {
        width: usize,
        height: usize,
        len: usize,
    },
}

fn check_dims(width: usize, height: usize) -> Result<(), ImageError> {
    if width == 0 || height == 0 {
        return Err(ImageError::InvalidDimensions { width, height });
    }
    // Guards the w*h multiplication on 32-bit targets.
    if width.checked_mul(height).is_none() {
        return Err(ImageError::InvalidDimensions { width, height });
    }
    Ok(())
}

/// A width x height grid of RGB triples in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    pixels: Vec<[f64; 3]>,
}

impl RgbImage {
    /// All-black image.
    pub fn new(width: usize, height: usize) -> Result<Self, ImageError> {
        check_dims(width, height)?;
        Ok(Self {
            width,
            height,
            pixels: vec![[0.0; 3]; width * height],
        })
    }

    pub fn from_pixels(
        width: usize,
        height: usize,
        pixels: Vec<[f64; 3]>,
    ) -> Result<Self, ImageError> {
        check_dims(width, height)?;
        if pixels.len() != width * height {
            return Err(ImageError::LengthMismatch {
                width,
                height,
                len: pixels.len(),
            });
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// Constant-color image, mostly useful in tests.
    pub fn splat(width: usize, height: usize, rgb: [f64; 3]) -> Result<Self, ImageError> {
        check_dims(width, height)?;
        Ok(Self {
            width,
            height,
            pixels: vec![rgb; width * height],
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn pixels(&self) -> &[[f64; 3]] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [[f64; 3]] {
        &mut self.pixels
    }

    #[inline]
    pub fn pixel(&self, x: usize, y: usize) -> [f64; 3] {
        self.pixels[y * self.width + x]
    }

    #[inline]
    pub fn set_pixel(&mut self, x: usize, y: usize, rgb: [f64; 3]) {
        self.pixels[y * self.width + x] = rgb;
    }

    /// Applies `f` to every channel of every pixel.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> RgbImage {
        RgbImage {
            width: self.width,
            height: self.height,
            pixels: self
                .pixels
                .iter()
                .map(|p| [f(p[0]), f(p[1]), f(p[2])])
                .collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.pixels.iter().all(|p| p.iter().all(|c| c.is_finite()))
    }
}

/// Single-channel luminance grid, same layout rules as [`RgbImage`].
#[derive(Debug, Clone, PartialEq)]
pub struct LuminanceMap {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl LuminanceMap {
    pub fn new(width: usize, height: usize) -> Result<Self, ImageError> {
        check_dims(width, height)?;
        Ok(Self {
            width,
            height,
            values: vec![0.0; width * height],
        })
    }

    pub fn from_values(
        width: usize,
        height: usize,
        values: Vec<f64>,
    ) -> Result<Self, ImageError> {
        check_dims(width, height)?;
        if values.len() != width * height {
            return Err(ImageError::LengthMismatch {
                width,
                height,
                len: values.len(),
            });
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub fn splat(width: usize, height: usize, value: f64) -> Result<Self, ImageError> {
        check_dims(width, height)?;
        Ok(Self {
            width,
            height,
            values: vec![value; width * height],
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: f64) {
        self.values[y * self.width + x] = value;
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> LuminanceMap {
        LuminanceMap {
            width: self.width,
            height: self.height,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Per-pixel Rec. 709 relative luminance: `0.2126 R + 0.7152 G + 0.0722 B`.
///
/// Linear in the input: `luminance(a * img) == a * luminance(img)` up to
/// floating-point rounding.
pub fn relative_luminance(img: &RgbImage) -> LuminanceMap {
    LuminanceMap {
        width: img.width,
        height: img.height,
        values: img
            .pixels
            .iter()
            .map(|p| LUMA_R * p[0] + LUMA_G * p[1] + LUMA_B * p[2])
            .collect(),
    }
}

/// One image of an exposure stack, tagged with its exposure value in EV
/// units (finite; +1 EV doubles collected light).
#[derive(Debug, Clone, PartialEq)]
pub struct StackMember {
    pub ev: f64,
    pub image: RgbImage,
}

/// Ordered list of same-size images tagged with exposure values.
#[derive(Debug, Clone, PartialEq)]
pub struct ExposureStack {
    members: Vec<StackMember>,
}

/// Construction failed for an [`ExposureStack`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum StackError {
    #[error("exposure stack must contain at least one member")]
    Empty,
    #[error("stack member {index} does not match the stack dimensions: {source}")]
    Mismatched {
        index: usize,
        source: DimensionMismatch,
    },
    #[error("stack member {index} has a non-finite exposure value {ev}")]
    NonFiniteEv { index: usize, ev: f64 },
}

impl ExposureStack {
    pub fn new(members: Vec<StackMember>) -> Result<Self, StackError> {
        let first = members.first().ok_or(StackError::Empty)?;
        let dims = first.image.dimensions();
        for (index, member) in members.iter().enumerate() {
            if !member.ev.is_finite() {
                return Err(StackError::NonFiniteEv {
                    index,
                    ev: member.ev,
                });
            }
            DimensionMismatch::check(dims, member.image.dimensions())
                .map_err(|source| StackError::Mismatched { index, source })?;
        }
        Ok(Self { members })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dimensions(&self) -> (usize, usize) {
        self.members[0].image.dimensions()
    }

    pub fn members(&self) -> &[StackMember] {
        &self.members
    }

    pub fn images(&self) -> impl Iterator<Item = &RgbImage> {
        self.members.iter().map(|m| &m.image)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn luminance_of_gray_is_identity() {
        let img = RgbImage::splat(3, 2, [0.5, 0.5, 0.5]).unwrap();
        let lum = relative_luminance(&img);
        for &v in lum.values() {
            assert!((v - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn luminance_of_black_is_zero() {
        let img = RgbImage::new(4, 4).unwrap();
        let lum = relative_luminance(&img);
        assert!(lum.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn luminance_of_pure_green_is_its_coefficient() {
        let img = RgbImage::splat(1, 1, [0.0, 1.0, 0.0]).unwrap();
        assert_eq!(relative_luminance(&img).get(0, 0), LUMA_G);
    }

    #[test]
    fn luminance_is_linear_in_scale() {
        let img = RgbImage::from_pixels(
            2,
            2,
            vec![
                [0.1, 0.9, 0.3],
                [0.0, 0.2, 0.8],
                [1.0, 1.0, 0.0],
                [0.25, 0.5, 0.75],
            ],
        )
        .unwrap();
        let a = 3.0;
        let scaled = relative_luminance(&img.map(|c| a * c));
        let direct = relative_luminance(&img);
        for (s, d) in scaled.values().iter().zip(direct.values()) {
            assert!((s - a * d).abs() <= 1e-15 * s.abs().max(1.0));
        }
    }

    #[test]
    fn zero_dimension_is_rejected() {
        assert!(matches!(
            RgbImage::new(0, 5),
            Err(ImageError::InvalidDimensions { .. })
        ));
        assert!(matches!(
            LuminanceMap::new(5, 0),
            Err(ImageError::InvalidDimensions { .. })
        ));
    }

    #[test]
    fn stack_rejects_mixed_dimensions() {
        let a = RgbImage::new(2, 2).unwrap();
        let b = RgbImage::new(3, 2).unwrap();
        let err = ExposureStack::new(vec![
            StackMember { ev: 0.0, image: a },
            StackMember { ev: 1.0, image: b },
        ])
        .unwrap_err();
        assert!(matches!(err, StackError::Mismatched { index: 1, .. }));
    }

    #[test]
    fn stack_rejects_empty() {
        assert!(matches!(ExposureStack::new(vec![]), Err(StackError::Empty)));
    }
}
