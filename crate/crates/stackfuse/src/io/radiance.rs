//! Radiance RGBE (`.hdr`) reader.
//!
//! Handles flat scanlines, old-style run markers and new-style adaptive
//! RLE. A shared-exponent pixel `(m_r, m_g, m_b, e)` decodes to
//! `m * 2^(e - 136)` per channel, zero when `e == 0`.

use std::io::Read;

use super::{CountingReader, IoError};
use crate::image::RgbImage;

const FORMAT: super::ImageFormat = super::ImageFormat::RadianceHdr;

fn err<R: Read>(r: &CountingReader<R>, message: impl Into<String>) -> IoError {
    IoError::format(FORMAT, r.offset(), message)
}

#[inline]
fn decode_rgbe([mr, mg, mb, e]: [u8; 4]) -> [f64; 3] {
    if e == 0 {
        return [0.0; 3];
    }
    let scale = (e as f64 - 136.0).exp2();
    [mr as f64 * scale, mg as f64 * scale, mb as f64 * scale]
}

fn read_line<R: Read>(r: &mut CountingReader<R>) -> Result<String, IoError> {
    let mut line = Vec::new();
    loop {
        let byte = r.read_byte().map_err(|e| match e.kind() {
            std::io::ErrorKind::UnexpectedEof => err(r, "unexpected end of header"),
            _ => IoError::Io(e),
        })?;
        if byte == b'\n' {
            break;
        }
        if line.len() > 4096 {
            return Err(err(r, "header line longer than 4096 bytes"));
        }
        line.push(byte);
    }
    String::from_utf8(line).map_err(|_| err(r, "header line is not valid UTF-8"))
}

pub(super) fn decode<R: Read>(r: &mut CountingReader<R>) -> Result<RgbImage, IoError> {
    let signature = read_line(r)?;
    if !signature.starts_with("#?") {
        return Err(err(r, "missing '#?' program signature"));
    }

    let mut format_seen = false;
    loop {
        let line = read_line(r)?;
        if line.is_empty() {
            break;
        }
        if line.starts_with('#') {
            continue;
        }
        if let Some(value) = line.strip_prefix("FORMAT=") {
            if value.trim() != "32-bit_rle_rgbe" {
                return Err(err(r, format!("unsupported FORMAT '{}'", value.trim())));
            }
            format_seen = true;
        }
        // EXPOSURE / GAMMA / PRIMARIES etc. are recorded by some writers;
        // pixel data is loaded as stored.
    }
    if !format_seen {
        return Err(err(r, "header does not declare FORMAT=32-bit_rle_rgbe"));
    }

    let resolution = read_line(r)?;
    let fields: Vec<&str> = resolution.split_whitespace().collect();
    let (height, width) = match fields.as_slice() {
        ["-Y", h, "+X", w] => (
            h.parse::<usize>()
                .map_err(|_| err(r, format!("bad height '{h}'")))?,
            w.parse::<usize>()
                .map_err(|_| err(r, format!("bad width '{w}'")))?,
        ),
        _ => {
            return Err(err(
                r,
                format!("unsupported resolution line '{resolution}' (expected '-Y h +X w')"),
            ))
        }
    };

    super::check_decode_dims(FORMAT, r.offset(), width, height)?;
    let mut pixels = Vec::with_capacity(width.saturating_mul(height));
    let mut scanline = vec![[0u8; 4]; width];
    for _ in 0..height {
        read_scanline(r, &mut scanline)?;
        pixels.extend(scanline.iter().map(|&p| decode_rgbe(p)));
    }
    Ok(RgbImage::from_pixels(width, height, pixels)?)
}

fn read_rgbe<R: Read>(r: &mut CountingReader<R>) -> Result<[u8; 4], IoError> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => err(r, "pixel data truncated"),
        _ => IoError::Io(e),
    })?;
    Ok(buf)
}

fn read_scanline<R: Read>(
    r: &mut CountingReader<R>,
    out: &mut [[u8; 4]],
) -> Result<(), IoError> {
    let width = out.len();
    let first = read_rgbe(r)?;

    // New-style adaptive RLE: marker (2, 2, hi, lo) with hi/lo carrying the
    // scanline width; only defined for widths in [8, 32767].
    if first[0] == 2 && first[1] == 2 && first[2] & 0x80 == 0 {
        let marker_width = ((first[2] as usize) << 8) | first[3] as usize;
        if marker_width != width {
            return Err(err(
                r,
                format!("RLE scanline width {marker_width} does not match image width {width}"),
            ));
        }
        for channel in 0..4 {
            let mut x = 0;
            while x < width {
                let code = r.read_byte().map_err(|e| match e.kind() {
                    std::io::ErrorKind::UnexpectedEof => err(r, "RLE data truncated"),
                    _ => IoError::Io(e),
                })?;
                if code > 128 {
                    let run = (code - 128) as usize;
                    if x + run > width {
                        return Err(err(r, "RLE run overflows scanline"));
                    }
                    let value = r.read_byte()?;
                    for pixel in &mut out[x..x + run] {
                        pixel[channel] = value;
                    }
                    x += run;
                } else {
                    let count = code as usize;
                    if count == 0 {
                        return Err(err(r, "zero-length RLE literal"));
                    }
                    if x + count > width {
                        return Err(err(r, "RLE literal overflows scanline"));
                    }
                    for pixel in &mut out[x..x + count] {
                        pixel[channel] = r.read_byte()?;
                    }
                    x += count;
                }
            }
        }
        return Ok(());
    }

    // Flat scanline, possibly containing old-style repeat markers
    // (1, 1, 1, n): repeat the previous pixel n << (8 * consecutive) times.
    let mut x = 0;
    let mut pixel = first;
    let mut repeat_shift = 0u32;
    loop {
        if pixel[0] == 1 && pixel[1] == 1 && pixel[2] == 1 {
            if x == 0 {
                return Err(err(r, "repeat marker with no previous pixel"));
            }
            let run = (pixel[3] as usize) << repeat_shift;
            if x + run > width {
                return Err(err(r, "old-style repeat overflows scanline"));
            }
            let prev = out[x - 1];
            for slot in &mut out[x..x + run] {
                *slot = prev;
            }
            x += run;
            repeat_shift += 8;
        } else {
            out[x] = pixel;
            x += 1;
            repeat_shift = 0;
        }
        if x == width {
            return Ok(());
        }
        pixel = read_rgbe(r)?;
    }
}

#[cfg(test)]
mod tests {
    use super::super::{load_image, ImageFormat, IoError};
    use std::path::PathBuf;

    fn write_hdr(body: &[u8]) -> (tempfile::TempDir, PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.hdr");
        let mut data = b"#?RADIANCE\nFORMAT=32-bit_rle_rgbe\n\n".to_vec();
        data.extend_from_slice(body);
        std::fs::write(&path, data).unwrap();
        (dir, path)
    }

    #[test]
    fn flat_pixel_decodes_with_shared_exponent() {
        // mantissas (128,128,128), e=128 -> 128 * 2^-8 = 0.5 per channel.
        let mut body = b"-Y 1 +X 1\n".to_vec();
        body.extend_from_slice(&[128, 128, 128, 128]);
        let (_dir, path) = write_hdr(&body);
        let img = load_image(&path, ImageFormat::RadianceHdr).unwrap();
        assert_eq!(img.pixel(0, 0), [0.5, 0.5, 0.5]);
    }

    #[test]
    fn zero_exponent_is_black() {
        let mut body = b"-Y 1 +X 2\n".to_vec();
        body.extend_from_slice(&[200, 10, 30, 0]);
        body.extend_from_slice(&[255, 0, 0, 129]);
        let (_dir, path) = write_hdr(&body);
        let img = load_image(&path, ImageFormat::RadianceHdr).unwrap();
        assert_eq!(img.pixel(0, 0), [0.0, 0.0, 0.0]);
        assert_eq!(img.pixel(1, 0), [255.0 / 128.0, 0.0, 0.0]);
    }

    #[test]
    fn adaptive_rle_round_trips_runs_and_literals() {
        // Width 8; per-channel streams: R: run of 8 value 10; G: 8
        // literals 0..8; B: run 4 value 3 + run 4 value 4; E: run 8 of 130.
        let mut body = b"-Y 1 +X 8\n".to_vec();
        body.extend_from_slice(&[2, 2, 0, 8]);
        body.extend_from_slice(&[128 + 8, 10]);
        body.extend_from_slice(&[8, 0, 1, 2, 3, 4, 5, 6, 7]);
        body.extend_from_slice(&[128 + 4, 3, 128 + 4, 4]);
        body.extend_from_slice(&[128 + 8, 130]);
        let (_dir, path) = write_hdr(&body);
        let img = load_image(&path, ImageFormat::RadianceHdr).unwrap();
        let scale = (130.0f64 - 136.0).exp2();
        for x in 0..8 {
            let [r, g, b] = img.pixel(x, 0);
            assert_eq!(r, 10.0 * scale);
            assert_eq!(g, x as f64 * scale);
            assert_eq!(b, if x < 4 { 3.0 } else { 4.0 } * scale);
        }
    }

    #[test]
    fn old_style_repeat_marker_expands() {
        let mut body = b"-Y 1 +X 4\n".to_vec();
        body.extend_from_slice(&[100, 50, 25, 128]); // one literal pixel
        body.extend_from_slice(&[1, 1, 1, 3]); // repeat previous 3 times
        let (_dir, path) = write_hdr(&body);
        let img = load_image(&path, ImageFormat::RadianceHdr).unwrap();
        for x in 1..4 {
            assert_eq!(img.pixel(x, 0), img.pixel(0, 0));
        }
    }

    #[test]
    fn truncated_pixels_report_offset() {
        let mut body = b"-Y 2 +X 2\n".to_vec();
        body.extend_from_slice(&[10, 10, 10, 128]);
        let (_dir, path) = write_hdr(&body);
        match load_image(&path, ImageFormat::RadianceHdr).unwrap_err() {
            IoError::Format { offset, message, .. } => {
                assert!(message.contains("truncated"), "{message}");
                assert!(offset > 0);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn missing_signature_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.hdr");
        std::fs::write(&path, b"RADIANCE\n\n-Y 1 +X 1\n\x80\x80\x80\x80").unwrap();
        assert!(matches!(
            load_image(&path, ImageFormat::RadianceHdr).unwrap_err(),
            IoError::Format { .. }
        ));
    }

    #[test]
    fn missing_format_declaration_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nofmt.hdr");
        std::fs::write(&path, b"#?RADIANCE\n\n-Y 1 +X 1\x00\x00\x00\x00").unwrap();
        assert!(matches!(
            load_image(&path, ImageFormat::RadianceHdr).unwrap_err(),
            IoError::Format { .. }
        ));
    }
}
