//! 8-bit RGB PNG, backed by the `png` crate.
//!
//! Encoding pins the compression level and row filter so the byte stream
//! is a pure function of the pixel data.

use std::io::{BufRead, Seek, Write};

use super::{from_bytes, CountingReader, IoError};
use crate::image::RgbImage;

const FORMAT: super::ImageFormat = super::ImageFormat::Png8;

pub(super) fn decode<R: BufRead + Seek>(r: &mut CountingReader<R>) -> Result<RgbImage, IoError> {
    // The decode happens in an inner scope so the reader borrow ends
    // before the failure offset is read back out.
    let result = {
        let decoder = png::Decoder::new(&mut *r);
        decoder.read_info().map_err(|e| e.to_string()).and_then(
            |mut reader| -> Result<_, String> {
                let buf_size = reader
                    .output_buffer_size()
                    .ok_or_else(|| "image too large".to_string())?;
                let mut buf = vec![0u8; buf_size];
                let info = reader.next_frame(&mut buf).map_err(|e| e.to_string())?;
                buf.truncate(info.buffer_size());
                Ok((info.width, info.height, info.color_type, info.bit_depth, buf))
            },
        )
    };
    let (width, height, color_type, bit_depth, buf) =
        result.map_err(|message| IoError::format(FORMAT, r.offset(), message))?;
    if bit_depth != png::BitDepth::Eight || color_type != png::ColorType::Rgb {
        return Err(IoError::format(
            FORMAT,
            r.offset(),
            format!("unsupported PNG layout {color_type:?}/{bit_depth:?}, only 8-bit RGB is accepted"),
        ));
    }
    Ok(from_bytes(width as usize, height as usize, &buf)?)
}

pub(super) fn encode<W: Write>(
    w: &mut W,
    width: usize,
    height: usize,
    bytes: &[u8],
) -> Result<(), IoError> {
    let mut encoder = png::Encoder::new(w, width as u32, height as u32);
    encoder.set_color(png::ColorType::Rgb);
    encoder.set_depth(png::BitDepth::Eight);
    encoder.set_compression(png::Compression::Balanced);
    encoder.set_filter(png::Filter::Adaptive);
    let mut writer = encoder
        .write_header()
        .map_err(|e| IoError::format(FORMAT, 0, e.to_string()))?;
    writer
        .write_image_data(bytes)
        .map_err(|e| IoError::format(FORMAT, 0, e.to_string()))?;
    writer
        .finish()
        .map_err(|e| IoError::format(FORMAT, 0, e.to_string()))?;
    Ok(())
}
