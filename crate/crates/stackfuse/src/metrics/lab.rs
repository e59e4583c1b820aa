//! sRGB to CIELAB conversion (IEC decode, D65 white).

/// D65 reference white.
const WHITE: [f64; 3] = [0.95047, 1.0, 1.08883];

/// CIE threshold (6/29)^3 and slope constant for the Lab function.
const EPSILON: f64 = 216.0 / 24389.0;
const KAPPA: f64 = 24389.0 / 27.0;

fn srgb_decode(c: f64) -> f64 {
    if c <= 0.04045 {
        c / 12.92
    } else {
        ((c + 0.055) / 1.055).powf(2.4)
    }
}

fn lab_f(t: f64) -> f64 {
    if t > EPSILON {
        t.cbrt()
    } else {
        (KAPPA * t + 16.0) / 116.0
    }
}

/// Converts one sRGB pixel (channels in `[0, 1]`) to `(L*, a*, b*)`.
pub fn rgb_to_lab(rgb: [f64; 3]) -> [f64; 3] {
    let r = srgb_decode(rgb[0]);
    let g = srgb_decode(rgb[1]);
    let b = srgb_decode(rgb[2]);

    let x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
    let y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
    let z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;

    let fx = lab_f(x / WHITE[0]);
    let fy = lab_f(y / WHITE[1]);
    let fz = lab_f(z / WHITE[2]);

    [116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn white_maps_to_l100() {
        let [l, a, b] = rgb_to_lab([1.0, 1.0, 1.0]);
        assert!((l - 100.0).abs() < 0.01, "L = {l}");
        assert!(a.abs() < 0.01 && b.abs() < 0.01, "a = {a}, b = {b}");
    }

    #[test]
    fn black_maps_to_origin() {
        let [l, a, b] = rgb_to_lab([0.0, 0.0, 0.0]);
        assert_eq!([l, a, b], [0.0, 0.0, 0.0]);
    }

    #[test]
    fn mid_gray_sits_on_the_gray_axis() {
        let [l, a, b] = rgb_to_lab([0.5, 0.5, 0.5]);
        assert!(l > 0.0 && l < 100.0);
        assert!(a.abs() < 0.01 && b.abs() < 0.01);
    }

    #[test]
    fn primaries_have_expected_hue_signs() {
        let [_, a_red, _] = rgb_to_lab([1.0, 0.0, 0.0]);
        assert!(a_red > 0.0, "red should have positive a*");
        let [_, a_green, _] = rgb_to_lab([0.0, 1.0, 0.0]);
        assert!(a_green < 0.0, "green should have negative a*");
        let [_, _, b_blue] = rgb_to_lab([0.0, 0.0, 1.0]);
        assert!(b_blue < 0.0, "blue should have negative b*");
    }
}
