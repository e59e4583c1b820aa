//! No-reference statistical naturalness score.
//!
//! `N = P_m * P_d / K`, where `P_m` is a Gaussian density evaluated at
//! the global mean gray level and `P_d` a Beta density evaluated at the
//! mean per-block standard deviation (rescaled); `K = max(P_m) * max(P_d)`
//! normalizes the score into `[0, 1]`. Gray levels use the crate's
//! Rec. 709 luminance scaled to `[0, 255]`.

use crate::image::{relative_luminance, RgbImage};

/// Density parameters for the naturalness score. The defaults are the
/// published fits over natural-image statistics: a Gaussian over the
/// global mean and a Beta law over the rescaled mean local contrast.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NaturalnessParams {
    pub gaussian_mean: f64,
    pub gaussian_std: f64,
    pub beta_alpha: f64,
    pub beta_beta: f64,
    /// Divisor mapping mean block standard deviation into the Beta domain.
    pub std_scale: f64,
    /// Side length of the square blocks used for local contrast.
    pub block_size: usize,
}

impl Default for NaturalnessParams {
    fn default() -> Self {
        Self {
            gaussian_mean: 115.94,
            gaussian_std: 27.99,
            beta_alpha: 4.4,
            beta_beta: 10.1,
            std_scale: 64.29,
            block_size: 11,
        }
    }
}

/// Statistical naturalness with the stock parameters.
pub fn statistical_naturalness(img: &RgbImage) -> f64 {
    statistical_naturalness_with(img, &NaturalnessParams::default())
}

/// Statistical naturalness with explicit parameters. Returns a value in
/// `[0, 1]`.
pub fn statistical_naturalness_with(img: &RgbImage, params: &NaturalnessParams) -> f64 {
    let gray: Vec<f64> = relative_luminance(img)
        .values()
        .iter()
        .map(|&v| v.clamp(0.0, 1.0) * 255.0)
        .collect();
    let (width, height) = img.dimensions();

    let mean = gray.iter().sum::<f64>() / gray.len() as f64;
    let mean_block_std = mean_block_stddev(&gray, width, height, params.block_size);

    let p_mean = gaussian_pdf(mean, params.gaussian_mean, params.gaussian_std);
    let p_contrast = beta_pdf(
        mean_block_std / params.std_scale,
        params.beta_alpha,
        params.beta_beta,
    );

    let k = gaussian_pdf_max(params.gaussian_std)
        * beta_pdf_max(params.beta_alpha, params.beta_beta);
    (p_mean * p_contrast / k).clamp(0.0, 1.0)
}

/// Mean of the per-block sample standard deviation over a non-overlapping
/// tiling; edge blocks keep their actual (smaller) size.
fn mean_block_stddev(gray: &[f64], width: usize, height: usize, block: usize) -> f64 {
    let block = block.max(1);
    let mut sum = 0.0f64;
    let mut count = 0usize;
    let mut by = 0;
    while by < height {
        let bh = block.min(height - by);
        let mut bx = 0;
        while bx < width {
            let bw = block.min(width - bx);
            sum += block_stddev(gray, width, bx, by, bw, bh);
            count += 1;
            bx += block;
        }
        by += block;
    }
    sum / count as f64
}

fn block_stddev(gray: &[f64], stride: usize, x0: usize, y0: usize, bw: usize, bh: usize) -> f64 {
    let n = bw * bh;
    if n < 2 {
        return 0.0;
    }
    let mut sum = 0.0f64;
    for y in y0..y0 + bh {
        for x in x0..x0 + bw {
            sum += gray[y * stride + x];
        }
    }
    let mean = sum / n as f64;
    let mut ss = 0.0f64;
    for y in y0..y0 + bh {
        for x in x0..x0 + bw {
            let d = gray[y * stride + x] - mean;
            ss += d * d;
        }
    }
    (ss / (n - 1) as f64).sqrt()
}

fn gaussian_pdf(x: f64, mean: f64, std: f64) -> f64 {
    let z = (x - mean) / std;
    (-0.5 * z * z).exp() / (std * (2.0 * std::f64::consts::PI).sqrt())
}

fn gaussian_pdf_max(std: f64) -> f64 {
    1.0 / (std * (2.0 * std::f64::consts::PI).sqrt())
}

fn beta_pdf(x: f64, alpha: f64, beta: f64) -> f64 {
    if !(0.0..=1.0).contains(&x) || x == 0.0 || x == 1.0 {
        return 0.0;
    }
    let log_norm = ln_gamma(alpha) + ln_gamma(beta) - ln_gamma(alpha + beta);
    ((alpha - 1.0) * x.ln() + (beta - 1.0) * (1.0 - x).ln() - log_norm).exp()
}

/// Beta density peak, at the mode `(alpha - 1) / (alpha + beta - 2)`
/// (both shape parameters exceed 1 for the stock fit).
fn beta_pdf_max(alpha: f64, beta: f64) -> f64 {
    let mode = (alpha - 1.0) / (alpha + beta - 2.0);
    beta_pdf(mode, alpha, beta)
}

/// Lanczos approximation of `ln Gamma`, g = 7, n = 9.
fn ln_gamma(z: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if z < 0.5 {
        // Reflection formula.
        let pi = std::f64::consts::PI;
        return (pi / (pi * z).sin()).ln() - ln_gamma(1.0 - z);
    }
    let z = z - 1.0;
    let mut x = COEF[0];
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}
