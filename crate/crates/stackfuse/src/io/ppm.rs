//! Binary PPM (P6), maxval 255.

use std::io::{Read, Write};

use super::{check_decode_dims, from_bytes, CountingReader, IoError};
use crate::image::RgbImage;

const FORMAT: super::ImageFormat = super::ImageFormat::Ppm;

fn next_byte<R: Read>(r: &mut CountingReader<R>) -> Result<u8, IoError> {
    match r.read_byte() {
        Ok(b) => Ok(b),
        Err(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => Err(IoError::format(
            FORMAT,
            r.offset(),
            "unexpected end of header",
        )),
        Err(e) => Err(IoError::Io(e)),
    }
}

pub(super) fn decode<R: Read>(r: &mut CountingReader<R>) -> Result<RgbImage, IoError> {
    let magic = [next_byte(r)?, next_byte(r)?];
    if magic != *b"P6" {
        return Err(IoError::format(FORMAT, r.offset(), "expected magic 'P6'"));
    }
    let width = read_header_number(r)?;
    let height = read_header_number(r)?;
    let maxval = read_header_number(r)?;
    check_decode_dims(FORMAT, r.offset(), width, height)?;
    if maxval != 255 {
        return Err(IoError::format(
            FORMAT,
            r.offset(),
            format!("unsupported maxval {maxval}, only 255 is accepted"),
        ));
    }
    // read_header_number consumed exactly one trailing whitespace byte,
    // which the format defines as the header/raster separator.
    let mut bytes = vec![0u8; width * height * 3];
    r.read_exact(&mut bytes).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => {
            IoError::format(FORMAT, r.offset(), "raster data truncated")
        }
        _ => IoError::Io(e),
    })?;
    Ok(from_bytes(width, height, &bytes)?)
}

/// Reads one ASCII decimal, skipping leading whitespace and `#` comments,
/// consuming exactly one whitespace byte after the digits.
fn read_header_number<R: Read>(r: &mut CountingReader<R>) -> Result<usize, IoError> {
    let mut byte = next_byte(r)?;
    loop {
        if byte == b'#' {
            while byte != b'\n' {
                byte = next_byte(r)?;
            }
        }
        if byte.is_ascii_whitespace() {
            byte = next_byte(r)?;
        } else if byte == b'#' {
            continue;
        } else {
            break;
        }
    }
    if !byte.is_ascii_digit() {
        return Err(IoError::format(
            FORMAT,
            r.offset().saturating_sub(1),
            format!("expected digit in header, found 0x{byte:02x}"),
        ));
    }
    let mut value = 0usize;
    while byte.is_ascii_digit() {
        value = value
            .checked_mul(10)
            .and_then(|v| v.checked_add((byte - b'0') as usize))
            .ok_or_else(|| IoError::format(FORMAT, r.offset(), "header number overflow"))?;
        byte = next_byte(r)?;
    }
    if !byte.is_ascii_whitespace() {
        return Err(IoError::format(
            FORMAT,
            r.offset().saturating_sub(1),
            format!("expected whitespace after header number, found 0x{byte:02x}"),
        ));
    }
    Ok(value)
}

pub(super) fn encode<W: Write>(
    w: &mut W,
    width: usize,
    height: usize,
    bytes: &[u8],
) -> Result<(), IoError> {
    write!(w, "P6\n{width} {height}\n255\n")?;
    w.write_all(bytes)?;
    Ok(())
}
