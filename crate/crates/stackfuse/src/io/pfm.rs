//! Portable float map reader.
//!
//! `PF` (color) and `Pf` (grayscale, replicated to RGB). The sign of the
//! scale line selects endianness (negative = little-endian); its
//! magnitude is ignored, matching common practice. Rows are stored
//! bottom-to-top.

use std::io::Read;

use super::{CountingReader, IoError};
use crate::image::RgbImage;

const FORMAT: super::ImageFormat = super::ImageFormat::Pfm;

fn err<R: Read>(r: &CountingReader<R>, message: impl Into<String>) -> IoError {
    IoError::format(FORMAT, r.offset(), message)
}

fn next_byte<R: Read>(r: &mut CountingReader<R>) -> Result<u8, IoError> {
    match r.read_byte() {
        Ok(b) => Ok(b),
        Err(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => {
            Err(IoError::format(FORMAT, r.offset(), "unexpected end of header"))
        }
        Err(e) => Err(IoError::Io(e)),
    }
}

/// One whitespace-delimited token; PFM headers are three such lines.
fn read_token<R: Read>(r: &mut CountingReader<R>) -> Result<String, IoError> {
    let mut byte = next_byte(r)?;
    while byte.is_ascii_whitespace() {
        byte = next_byte(r)?;
    }
    let mut token = Vec::new();
    while !byte.is_ascii_whitespace() {
        token.push(byte);
        if token.len() > 64 {
            return Err(err(r, "header token longer than 64 bytes"));
        }
        byte = next_byte(r)?;
    }
    String::from_utf8(token).map_err(|_| err(r, "header token is not valid UTF-8"))
}

pub(super) fn decode<R: Read>(r: &mut CountingReader<R>) -> Result<RgbImage, IoError> {
    let magic = read_token(r)?;
    let channels = match magic.as_str() {
        "PF" => 3,
        "Pf" => 1,
        other => return Err(err(r, format!("expected magic 'PF' or 'Pf', found '{other}'"))),
    };
    let width: usize = read_token(r)?
        .parse()
        .map_err(|_| err(r, "bad width"))?;
    let height: usize = read_token(r)?
        .parse()
        .map_err(|_| err(r, "bad height"))?;
    let scale: f64 = read_token(r)?
        .parse()
        .map_err(|_| err(r, "bad scale"))?;
    if scale == 0.0 {
        return Err(err(r, "scale must be nonzero"));
    }
    let little_endian = scale < 0.0;
    super::check_decode_dims(FORMAT, r.offset(), width, height)?;

    let samples = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(channels))
        .ok_or_else(|| err(r, "image too large"))?;
    let mut raw = vec![0u8; samples * 4];
    r.read_exact(&mut raw).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => err(r, "sample data truncated"),
        _ => IoError::Io(e),
    })?;

    let mut values = Vec::with_capacity(samples);
    for chunk in raw.chunks_exact(4) {
        let bits = [chunk[0], chunk[1], chunk[2], chunk[3]];
        let v = if little_endian {
            f32::from_le_bytes(bits)
        } else {
            f32::from_be_bytes(bits)
        };
        values.push(v as f64);
    }

    // Bottom row first on disk; flip while assembling.
    let mut pixels = vec![[0.0f64; 3]; width.checked_mul(height).unwrap_or(0)];
    for disk_row in 0..height {
        let y = height - 1 - disk_row;
        for x in 0..width {
            let src = (disk_row * width + x) * channels;
            pixels[y * width + x] = if channels == 3 {
                [values[src], values[src + 1], values[src + 2]]
            } else {
                [values[src]; 3]
            };
        }
    }
    Ok(RgbImage::from_pixels(width, height, pixels)?)
}
