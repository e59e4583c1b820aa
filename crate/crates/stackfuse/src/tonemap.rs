//! Global tone mapping and color restoration.
//!
//! The rational curve `F(L) = L (1 + L / Lw^2) / (1 + L)` compresses
//! luminance into `[0, 1]` when `Lw` is the map maximum, so no pixel is
//! truncated by the LDR encode. Color is restored by scaling the source
//! RGB by the luminance ratio, which preserves channel ratios (hue)
//! wherever the source luminance is positive.

use crate::error::{DimensionMismatch, InvalidParam};
use crate::image::{LuminanceMap, RgbImage};

/// Applies the global operator with white point `l_white`.
///
/// Strictly increasing in `L`; `F(0) = 0` and `F(l_white) = 1` exactly.
/// Inputs above `l_white` map above 1.
pub fn reinhard_global(
    luminance: &LuminanceMap,
    l_white: f64,
) -> Result<LuminanceMap, InvalidParam> {
    InvalidParam::positive("l_white", l_white)?;
    // Evaluated as (L + (L/Lw)^2) / (1 + L): algebraically identical to
    // L (1 + L/Lw^2) / (1 + L), and the L == Lw case yields exactly 1 in
    // floating point because numerator and denominator round identically.
    Ok(luminance.map(|l| {
        let r = l / l_white;
        (l + r * r) / (1.0 + l)
    }))
}

/// White point for a stack member: the luminance maximum, or 1 for an
/// all-black map so downstream math stays finite.
pub fn pick_l_white(luminance: &LuminanceMap) -> f64 {
    let max = luminance.max_value();
    if max > 0.0 {
        max
    } else {
        1.0
    }
}

/// Rebuilds RGB from a tone-mapped luminance: `C'(p) = (L'(p) / L(p)) C(p)`,
/// with black source pixels mapped to black. Output channels are left
/// unclamped; values above 1 carry gradient information the fusion
/// weights use, and the LDR encode clamps later.
pub fn restore_color(
    mapped: &LuminanceMap,
    original: &LuminanceMap,
    img: &RgbImage,
) -> Result<RgbImage, DimensionMismatch> {
    DimensionMismatch::check(mapped.dimensions(), original.dimensions())?;
    DimensionMismatch::check(mapped.dimensions(), img.dimensions())?;
    let pixels = img
        .pixels()
        .iter()
        .zip(mapped.values().iter().zip(original.values()))
        .map(|(rgb, (&lp, &l))| {
            if l == 0.0 {
                [0.0; 3]
            } else {
                let ratio = lp / l;
                [rgb[0] * ratio, rgb[1] * ratio, rgb[2] * ratio]
            }
        })
        .collect();
    Ok(RgbImage::from_pixels(img.width(), img.height(), pixels)
        .expect("source dimensions are valid"))
}

/// One pseudo exposure: tone-map the scaled luminance with its own white
/// point, then restore color against the original image.
pub fn make_pseudo_exposure(
    img: &RgbImage,
    original_luminance: &LuminanceMap,
    scaled_luminance: &LuminanceMap,
) -> Result<RgbImage, DimensionMismatch> {
    let l_white = pick_l_white(scaled_luminance);
    let mapped = reinhard_global(scaled_luminance, l_white)
        .expect("pick_l_white returns a positive value");
    restore_color(&mapped, original_luminance, img)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exposure::apply_ev;
    use crate::image::relative_luminance;

    fn map(values: Vec<f64>) -> LuminanceMap {
        let n = values.len();
        LuminanceMap::from_values(n, 1, values).unwrap()
    }

    #[test]
    fn curve_endpoints() {
        let out = reinhard_global(&map(vec![0.0, 2.0]), 2.0).unwrap();
        assert_eq!(out.get(0, 0), 0.0);
        assert_eq!(out.get(1, 0), 1.0);
    }

    #[test]
    fn curve_direct_substitution() {
        // L = 1, Lw = 2: (1 * (1 + 1/4)) / 2 = 0.625
        let out = reinhard_global(&map(vec![1.0]), 2.0).unwrap();
        assert!((out.get(0, 0) - 0.625).abs() < 1e-15);
    }

    #[test]
    fn curve_is_strictly_monotone() {
        let values: Vec<f64> = (0..100).map(|i| i as f64 * 0.07).collect();
        let out = reinhard_global(&map(values), 5.0).unwrap();
        for pair in out.values().windows(2) {
            assert!(pair[0] < pair[1]);
        }
    }

    #[test]
    fn curve_bounded_by_one_below_white_point() {
        let values: Vec<f64> = (0..1000).map(|i| i as f64 * 0.013).collect();
        let l_white = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let out = reinhard_global(&map(values), l_white).unwrap();
        for &v in out.values() {
            assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn rejects_nonpositive_white_point() {
        assert!(reinhard_global(&map(vec![0.5]), 0.0).is_err());
        assert!(reinhard_global(&map(vec![0.5]), -1.0).is_err());
    }

    #[test]
    fn white_point_picks_max_or_guards() {
        assert_eq!(pick_l_white(&map(vec![0.2, 0.9])), 0.9);
        assert_eq!(pick_l_white(&map(vec![0.0, 0.0])), 1.0);
        assert_eq!(pick_l_white(&map(vec![0.4, 0.4])), 0.4);
    }

    #[test]
    fn restore_color_identity_and_scaling() {
        let img = RgbImage::splat(1, 1, [0.1, 0.2, 0.3]).unwrap();
        let l = relative_luminance(&img);
        let same = restore_color(&l, &l, &img).unwrap();
        assert_eq!(same, img);

        let doubled = l.map(|v| 2.0 * v);
        let out = restore_color(&doubled, &l, &img).unwrap();
        let got = out.pixel(0, 0);
        for (g, w) in got.iter().zip([0.2, 0.4, 0.6]) {
            assert!((g - w).abs() < 1e-12);
        }
    }

    #[test]
    fn restore_color_guards_black_pixels() {
        let img = RgbImage::new(1, 1).unwrap();
        let l = LuminanceMap::new(1, 1).unwrap();
        let lp = LuminanceMap::splat(1, 1, 0.5).unwrap();
        assert_eq!(restore_color(&lp, &l, &img).unwrap().pixel(0, 0), [0.0; 3]);
    }

    #[test]
    fn restore_color_preserves_channel_ratios() {
        let img = RgbImage::splat(1, 1, [0.6, 0.3, 0.15]).unwrap();
        let l = relative_luminance(&img);
        let lp = l.map(|v| 0.77 * v);
        let out = restore_color(&lp, &l, &img).unwrap().pixel(0, 0);
        let got = out[0] / out[1];
        assert!((got - 2.0).abs() < 1e-6 * 2.0);
    }

    #[test]
    fn restore_color_rejects_mismatched_dims() {
        let img = RgbImage::new(2, 2).unwrap();
        let l = LuminanceMap::new(2, 2).unwrap();
        let lp = LuminanceMap::new(3, 2).unwrap();
        assert!(restore_color(&lp, &l, &img).is_err());
    }

    #[test]
    fn pseudo_exposure_luminance_never_exceeds_one() {
        let mut img = RgbImage::new(4, 4).unwrap();
        for (i, p) in img.pixels_mut().iter_mut().enumerate() {
            let v = (i as f64 + 1.0) / 16.0;
            *p = [v, v * 0.5, v * 0.25];
        }
        let l = relative_luminance(&img);
        let scaled = apply_ev(&l, 2.0);
        let member = make_pseudo_exposure(&img, &l, &scaled).unwrap();
        let out_lum = relative_luminance(&member);
        for &v in out_lum.values() {
            assert!(v <= 1.0 + 1e-9, "{v}");
        }
    }

    #[test]
    fn pseudo_exposure_matches_stepwise_composition() {
        // 4x4 deterministic pseudo-random image, +1 EV member composed
        // scalar by scalar.
        let mut img = RgbImage::new(4, 4).unwrap();
        let mut seed = 0x2545F4914F6CDD1Du64;
        for p in img.pixels_mut() {
            for c in p.iter_mut() {
                seed ^= seed << 13;
                seed ^= seed >> 7;
                seed ^= seed << 17;
                *c = (seed >> 11) as f64 / (1u64 << 53) as f64;
            }
        }
        let l = relative_luminance(&img);
        let l_i = apply_ev(&l, 1.0);
        let got = make_pseudo_exposure(&img, &l, &l_i).unwrap();

        let l_white = l_i.values().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        for (idx, p) in img.pixels().iter().enumerate() {
            let li = l_i.values()[idx];
            let r = li / l_white;
            let mapped = (li + r * r) / (1.0 + li);
            let lum = l.values()[idx];
            let want = if lum == 0.0 {
                [0.0; 3]
            } else {
                [
                    p[0] * mapped / lum,
                    p[1] * mapped / lum,
                    p[2] * mapped / lum,
                ]
            };
            for k in 0..3 {
                assert!((got.pixels()[idx][k] - want[k]).abs() < 1e-12);
            }
        }
    }
}
