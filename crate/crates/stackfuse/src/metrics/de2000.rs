//! CIEDE2000 color difference with kL = kC = kH = 1.
//!
//! Hue terms are defined as 0 when either adjusted chroma is 0, and the
//! mean hue then degenerates to the sum of the two hue angles.

use super::lab::rgb_to_lab;
use crate::error::DimensionMismatch;
use crate::image::RgbImage;

const POW7_25: f64 = 6103515625.0; // 25^7

fn deg_to_rad(d: f64) -> f64 {
    d.to_radians()
}

/// Hue angle of `(a, b)` in degrees within `[0, 360)`; 0 for the origin.
fn hue_angle(a: f64, b: f64) -> f64 {
    if a == 0.0 && b == 0.0 {
        return 0.0;
    }
    let h = b.atan2(a).to_degrees();
    if h < 0.0 {
        h + 360.0
    } else {
        h
    }
}

/// CIEDE2000 distance between two Lab triples.
///
/// Symmetric and nonnegative; 0 exactly when the inputs are equal.
pub fn de2000(lab1: [f64; 3], lab2: [f64; 3]) -> f64 {
    let [l1, a1, b1] = lab1;
    let [l2, a2, b2] = lab2;

    let c1 = (a1 * a1 + b1 * b1).sqrt();
    let c2 = (a2 * a2 + b2 * b2).sqrt();
    let c_mean = 0.5 * (c1 + c2);
    let c_mean7 = c_mean.powi(7);
    let g = 0.5 * (1.0 - (c_mean7 / (c_mean7 + POW7_25)).sqrt());

    let a1p = (1.0 + g) * a1;
    let a2p = (1.0 + g) * a2;
    let c1p = (a1p * a1p + b1 * b1).sqrt();
    let c2p = (a2p * a2p + b2 * b2).sqrt();
    let h1p = hue_angle(a1p, b1);
    let h2p = hue_angle(a2p, b2);

    let dl = l2 - l1;
    let dc = c2p - c1p;

    let chroma_product = c1p * c2p;
    let dh = if chroma_product == 0.0 {
        0.0
    } else {
        let diff = h2p - h1p;
        if diff.abs() <= 180.0 {
            diff
        } else if diff > 180.0 {
            diff - 360.0
        } else {
            diff + 360.0
        }
    };
    let dh_big = 2.0 * chroma_product.sqrt() * deg_to_rad(dh / 2.0).sin();

    let l_mean = 0.5 * (l1 + l2);
    let cp_mean = 0.5 * (c1p + c2p);
    let h_mean = if chroma_product == 0.0 {
        h1p + h2p
    } else {
        let sum = h1p + h2p;
        if (h1p - h2p).abs() <= 180.0 {
            0.5 * sum
        } else if sum < 360.0 {
            0.5 * (sum + 360.0)
        } else {
            0.5 * (sum - 360.0)
        }
    };

    let t = 1.0 - 0.17 * deg_to_rad(h_mean - 30.0).cos()
        + 0.24 * deg_to_rad(2.0 * h_mean).cos()
        + 0.32 * deg_to_rad(3.0 * h_mean + 6.0).cos()
        - 0.20 * deg_to_rad(4.0 * h_mean - 63.0).cos();

    let l_dev = (l_mean - 50.0) * (l_mean - 50.0);
    let s_l = 1.0 + 0.015 * l_dev / (20.0 + l_dev).sqrt();
    let s_c = 1.0 + 0.045 * cp_mean;
    let s_h = 1.0 + 0.015 * cp_mean * t;

    let d_theta = 30.0 * (-((h_mean - 275.0) / 25.0).powi(2)).exp();
    let cp_mean7 = cp_mean.powi(7);
    let r_c = 2.0 * (cp_mean7 / (cp_mean7 + POW7_25)).sqrt();
    let r_t = -deg_to_rad(2.0 * d_theta).sin() * r_c;

    let tl = dl / s_l;
    let tc = dc / s_c;
    let th = dh_big / s_h;
    (tl * tl + tc * tc + th * th + r_t * tc * th).sqrt()
}

/// Arithmetic mean of per-pixel CIEDE2000 between two same-size images.
/// Channels are clamped to `[0, 1]` before the Lab conversion.
pub fn mean_de2000(a: &RgbImage, b: &RgbImage) -> Result<f64, DimensionMismatch> {
    DimensionMismatch::check(a.dimensions(), b.dimensions())?;
    let mut sum = 0.0f64;
    for (pa, pb) in a.pixels().iter().zip(b.pixels()) {
        let lab_a = rgb_to_lab(pa.map(|c| c.clamp(0.0, 1.0)));
        let lab_b = rgb_to_lab(pb.map(|c| c.clamp(0.0, 1.0)));
        sum += de2000(lab_a, lab_b);
    }
    Ok(sum / a.pixels().len() as f64)
}
