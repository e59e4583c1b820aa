//! Gaussian and Laplacian pyramids with the separable 5-tap binomial
//! kernel (1, 4, 6, 4, 1)/16.
//!
//! Odd dimensions reduce by ceil halving; expand mirrors the reduce
//! geometry so `collapse(decompose(img))` reconstructs the input up to
//! floating-point rounding. Borders replicate in the source domain, and
//! both reduce and expand preserve constants exactly (the contributing
//! tap weights sum to 1 for every output pixel).

use crate::image::{LuminanceMap, RgbImage};

const KERNEL: [f64; 5] = [1.0 / 16.0, 4.0 / 16.0, 6.0 / 16.0, 4.0 / 16.0, 1.0 / 16.0];

/// Full pyramid depth for a grid: `floor(log2(min(w, h)))` reduce steps,
/// i.e. that many band levels plus the residual.
pub fn full_depth(width: usize, height: usize) -> usize {
    width.min(height).ilog2() as usize + 1
}

pub(crate) trait PyramidSample: Copy {
    const ZERO: Self;
    fn mul_add_assign(&mut self, other: Self, k: f64);
    fn sub(self, other: Self) -> Self;
    fn add(self, other: Self) -> Self;
}

impl PyramidSample for f64 {
    const ZERO: Self = 0.0;

    #[inline]
    fn mul_add_assign(&mut self, other: Self, k: f64) {
        *self += other * k;
    }

    #[inline]
    fn sub(self, other: Self) -> Self {
        self - other
    }

    #[inline]
    fn add(self, other: Self) -> Self {
        self + other
    }
}

impl PyramidSample for [f64; 3] {
    const ZERO: Self = [0.0; 3];

    #[inline]
    fn mul_add_assign(&mut self, other: Self, k: f64) {
        self[0] += other[0] * k;
        self[1] += other[1] * k;
        self[2] += other[2] * k;
    }

    #[inline]
    fn sub(self, other: Self) -> Self {
        [self[0] - other[0], self[1] - other[1], self[2] - other[2]]
    }

    #[inline]
    fn add(self, other: Self) -> Self {
        [self[0] + other[0], self[1] + other[1], self[2] + other[2]]
    }
}

fn ceil_half(n: usize) -> usize {
    n.div_ceil(2)
}

/// Blur + decimate one axis, then the other. Output is
/// `ceil(w/2) x ceil(h/2)`.
fn reduce<P: PyramidSample>(src: &[P], width: usize, height: usize) -> (Vec<P>, usize, usize) {
    let half_w = ceil_half(width);
    // Horizontal pass.
    let mut tmp = vec![P::ZERO; half_w * height];
    for y in 0..height {
        let row = &src[y * width..(y + 1) * width];
        for i in 0..half_w {
            let mut acc = P::ZERO;
            for (k, &weight) in KERNEL.iter().enumerate() {
                let x = (2 * i + k) as isize - 2;
                let x = x.clamp(0, width as isize - 1) as usize;
                acc.mul_add_assign(row[x], weight);
            }
            tmp[y * half_w + i] = acc;
        }
    }
    // Vertical pass.
    let half_h = ceil_half(height);
    let mut out = vec![P::ZERO; half_w * half_h];
    for j in 0..half_h {
        for i in 0..half_w {
            let mut acc = P::ZERO;
            for (k, &weight) in KERNEL.iter().enumerate() {
                let y = (2 * j + k) as isize - 2;
                let y = y.clamp(0, height as isize - 1) as usize;
                acc.mul_add_assign(tmp[y * half_w + i], weight);
            }
            out[j * half_w + i] = acc;
        }
    }
    (out, half_w, half_h)
}

/// Upsample one axis of a zero-interleaved signal with doubled kernel
/// weights; only even taps carry source samples, and the weights of the
/// contributing taps sum to 1 for both output parities.
fn expand_axis<P: PyramidSample>(
    src: &[P],
    src_len: usize,
    stride: usize,
    lanes: usize,
    lane_stride: usize,
    out_len: usize,
    out: &mut [P],
    out_stride: usize,
    out_lane_stride: usize,
) {
    for lane in 0..lanes {
        for x in 0..out_len {
            let mut acc = P::ZERO;
            for (k, &weight) in KERNEL.iter().enumerate() {
                let u = x as isize + k as isize - 2;
                if u.rem_euclid(2) != 0 {
                    continue;
                }
                let j = (u / 2).clamp(0, src_len as isize - 1) as usize;
                acc.mul_add_assign(src[lane * lane_stride + j * stride], 2.0 * weight);
            }
            out[lane * out_lane_stride + x * out_stride] = acc;
        }
    }
}

/// Expand a reduced grid back to `target_w x target_h` (which must be a
/// valid pre-image of the source under ceil halving).
fn expand<P: PyramidSample>(
    src: &[P],
    src_w: usize,
    src_h: usize,
    target_w: usize,
    target_h: usize,
) -> Vec<P> {
    debug_assert_eq!(ceil_half(target_w), src_w);
    debug_assert_eq!(ceil_half(target_h), src_h);
    // Vertical then horizontal; order does not matter for a separable
    // kernel.
    let mut tall = vec![P::ZERO; src_w * target_h];
    expand_axis(src, src_h, src_w, src_w, 1, target_h, &mut tall, src_w, 1);
    let mut out = vec![P::ZERO; target_w * target_h];
    expand_axis(&tall, src_w, 1, target_h, src_w, target_w, &mut out, 1, target_w);
    out
}

/// Low-pass pyramid of a single-channel map; level 0 is the input.
#[derive(Debug, Clone)]
pub struct GaussianPyramid {
    levels: Vec<LuminanceMap>,
}

impl GaussianPyramid {
    pub fn levels(&self) -> &[LuminanceMap] {
        &self.levels
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }
}

/// Band-pass pyramid of an RGB image; the last level is the low-pass
/// residual.
#[derive(Debug, Clone)]
pub struct LaplacianPyramid {
    levels: Vec<RgbImage>,
}

impl LaplacianPyramid {
    pub fn levels(&self) -> &[RgbImage] {
        &self.levels
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Dimensions of the finest level.
    pub fn dimensions(&self) -> (usize, usize) {
        self.levels[0].dimensions()
    }
}

fn clamp_depth(requested: usize, width: usize, height: usize) -> usize {
    requested.clamp(1, full_depth(width, height))
}

/// Builds a Gaussian pyramid with at most `depth` levels (clamped to the
/// grid's full depth).
pub fn gaussian_pyramid(map: &LuminanceMap, depth: usize) -> GaussianPyramid {
    let (width, height) = map.dimensions();
    let depth = clamp_depth(depth, width, height);
    let mut levels = Vec::with_capacity(depth);
    levels.push(map.clone());
    let (mut data, mut w, mut h) = (map.values().to_vec(), width, height);
    for _ in 1..depth {
        let (next, nw, nh) = reduce(&data, w, h);
        levels.push(LuminanceMap::from_values(nw, nh, next.clone()).expect("reduce keeps dims >= 1"));
        data = next;
        w = nw;
        h = nh;
    }
    GaussianPyramid { levels }
}

/// Builds a Laplacian pyramid with at most `depth` levels (clamped); a
/// depth of 1 yields just the image as its own residual.
pub fn laplacian_pyramid(img: &RgbImage, depth: usize) -> LaplacianPyramid {
    let (width, height) = img.dimensions();
    let depth = clamp_depth(depth, width, height);
    let mut levels = Vec::with_capacity(depth);
    let (mut data, mut w, mut h) = (img.pixels().to_vec(), width, height);
    for _ in 1..depth {
        let (next, nw, nh) = reduce(&data, w, h);
        let back = expand(&next, nw, nh, w, h);
        let band: Vec<[f64; 3]> = data
            .iter()
            .zip(&back)
            .map(|(&fine, &coarse)| fine.sub(coarse))
            .collect();
        levels.push(RgbImage::from_pixels(w, h, band).expect("dims valid"));
        data = next;
        w = nw;
        h = nh;
    }
    levels.push(RgbImage::from_pixels(w, h, data).expect("dims valid"));
    LaplacianPyramid { levels }
}

/// Inverts [`laplacian_pyramid`]: repeatedly expand and add bands.
pub fn collapse(pyramid: &LaplacianPyramid) -> RgbImage {
    let levels = &pyramid.levels;
    let residual = levels.last().expect("pyramid has at least one level");
    let (mut data, mut w, mut h) = (
        residual.pixels().to_vec(),
        residual.width(),
        residual.height(),
    );
    for band in levels[..levels.len() - 1].iter().rev() {
        let (bw, bh) = band.dimensions();
        let up = expand(&data, w, h, bw, bh);
        data = band
            .pixels()
            .iter()
            .zip(&up)
            .map(|(&fine, &coarse)| fine.add(coarse))
            .collect();
        w = bw;
        h = bh;
    }
    RgbImage::from_pixels(w, h, data).expect("dims valid")
}

/// Assembles a pyramid from externally blended levels. The levels must
/// form a valid ceil-halving chain; used by fusion backends.
pub(crate) fn from_levels(levels: Vec<RgbImage>) -> LaplacianPyramid {
    debug_assert!(!levels.is_empty());
    for pair in levels.windows(2) {
        debug_assert_eq!(ceil_half(pair[0].width()), pair[1].width());
        debug_assert_eq!(ceil_half(pair[0].height()), pair[1].height());
    }
    LaplacianPyramid { levels }
}
