//! Image file I/O.
//!
//! Reads PPM (P6, maxval 255), 8-bit RGB PNG, Radiance RGBE `.hdr` (flat,
//! old-style and adaptive RLE scanlines) and PFM. Writes PPM and PNG.
//!
//! 8-bit inputs map to `[0, 1]` as `value / 255` with no gamma
//! linearization; the pipeline operates on stored pixel values directly.
//! HDR formats load their raw floating-point radiance. Writing clamps to
//! `[0, 1]` and quantizes as `round(v * 255)`, and is byte-deterministic
//! for a fixed input.

mod pfm;
mod png_codec;
mod ppm;
mod radiance;

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::image::{ImageError, RgbImage};
use thiserror::Error;

/// File formats understood by [`load_image`] / [`save_image`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    /// 8-bit RGB PNG.
    Png8,
    /// Binary PPM, maxval 255.
    Ppm,
    /// Radiance RGBE (`.hdr` / `.pic`).
    RadianceHdr,
    /// Portable float map, color or grayscale.
    Pfm,
}

impl ImageFormat {
    /// Guess from a path's extension (case-insensitive).
    pub fn from_path(path: &Path) -> Option<ImageFormat> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "png" => Some(ImageFormat::Png8),
            "ppm" => Some(ImageFormat::Ppm),
            "hdr" | "pic" => Some(ImageFormat::RadianceHdr),
            "pfm" => Some(ImageFormat::Pfm),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ImageFormat::Png8 => "png8",
            ImageFormat::Ppm => "ppm",
            ImageFormat::RadianceHdr => "radiance_hdr",
            ImageFormat::Pfm => "pfm",
        }
    }

    /// Formats [`save_image`] can write.
    pub fn is_writable(self) -> bool {
        matches!(self, ImageFormat::Png8 | ImageFormat::Ppm)
    }
}

impl std::fmt::Display for ImageFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error)]
pub enum IoError {
    /// The byte stream did not parse under the named format. `offset` is
    /// the number of bytes consumed when the failure was detected.
    #[error("{format} parse error at byte {offset}: {message}")]
    Format {
        format: ImageFormat,
        offset: u64,
        message: String,
    },
    #[error("invalid image: {0}")]
    InvalidImage(#[from] ImageError),
    #[error("cannot write {0} files")]
    UnwritableFormat(ImageFormat),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl IoError {
    fn format(format: ImageFormat, offset: u64, message: impl Into<String>) -> IoError {
        IoError::Format {
            format,
            offset,
            message: message.into(),
        }
    }
}

/// Upper bound on either decoded dimension. Rejects absurd header
/// values before any pixel allocation happens.
pub(crate) const MAX_DIMENSION: usize = 1 << 16;

pub(crate) fn check_decode_dims(
    format: ImageFormat,
    offset: u64,
    width: usize,
    height: usize,
) -> Result<(), IoError> {
    if width > MAX_DIMENSION || height > MAX_DIMENSION {
        return Err(IoError::format(
            format,
            offset,
            format!("declared dimensions {width}x{height} exceed the {MAX_DIMENSION} limit"),
        ));
    }
    Ok(())
}

/// Reader wrapper that tracks how many bytes were consumed, so parse
/// errors can point at a byte offset.
pub(crate) struct CountingReader<R> {
    inner: R,
    offset: u64,
}

impl<R: Read> CountingReader<R> {
    pub(crate) fn new(inner: R) -> Self {
        Self { inner, offset: 0 }
    }

    pub(crate) fn offset(&self) -> u64 {
        self.offset
    }

    pub(crate) fn read_byte(&mut self) -> std::io::Result<u8> {
        let mut buf = [0u8; 1];
        self.read_exact(&mut buf)?;
        Ok(buf[0])
    }
}

impl<R: Read> Read for CountingReader<R> {
    fn read(&mut self, buf: &mut [u8]) -> std::io::Result<usize> {
        let n = self.inner.read(buf)?;
        self.offset += n as u64;
        Ok(n)
    }
}

impl<R: std::io::BufRead> std::io::BufRead for CountingReader<R> {
    fn fill_buf(&mut self) -> std::io::Result<&[u8]> {
        self.inner.fill_buf()
    }

    fn consume(&mut self, amt: usize) {
        self.offset += amt as u64;
        self.inner.consume(amt);
    }
}

impl<R: std::io::Seek> std::io::Seek for CountingReader<R> {
    fn seek(&mut self, pos: std::io::SeekFrom) -> std::io::Result<u64> {
        // After a seek the count tracks the absolute stream position.
        let new = self.inner.seek(pos)?;
        self.offset = new;
        Ok(new)
    }
}

/// Load an image file in the given format.
pub fn load_image(path: &Path, format: ImageFormat) -> Result<RgbImage, IoError> {
    let file = File::open(path)?;
    let mut reader = CountingReader::new(BufReader::new(file));
    let img = match format {
        ImageFormat::Png8 => png_codec::decode(&mut reader)?,
        ImageFormat::Ppm => ppm::decode(&mut reader)?,
        ImageFormat::RadianceHdr => radiance::decode(&mut reader)?,
        ImageFormat::Pfm => pfm::decode(&mut reader)?,
    };
    if !img.is_finite() {
        return Err(IoError::format(
            format,
            reader.offset(),
            "decoded pixel data contains non-finite values",
        ));
    }
    Ok(img)
}

/// Load an image, inferring the format from the file extension.
pub fn load_image_auto(path: &Path) -> Result<RgbImage, IoError> {
    let format = ImageFormat::from_path(path).ok_or_else(|| {
        IoError::Io(std::io::Error::new(
            std::io::ErrorKind::InvalidInput,
            format!("cannot infer image format from path {}", path.display()),
        ))
    })?;
    load_image(path, format)
}

/// Save an image. Channels are clamped to `[0, 1]` and quantized as
/// `round(v * 255)`; the byte stream is deterministic for a fixed input.
pub fn save_image(img: &RgbImage, path: &Path, format: ImageFormat) -> Result<(), IoError> {
    let bytes = quantize(img);
    let file = File::create(path)?;
    let mut writer = BufWriter::new(file);
    match format {
        ImageFormat::Png8 => png_codec::encode(&mut writer, img.width(), img.height(), &bytes)?,
        ImageFormat::Ppm => ppm::encode(&mut writer, img.width(), img.height(), &bytes)?,
        other => return Err(IoError::UnwritableFormat(other)),
    }
    writer.flush()?;
    Ok(())
}

/// Save, inferring the format from the file extension.
pub fn save_image_auto(img: &RgbImage, path: &Path) -> Result<(), IoError> {
    let format = ImageFormat::from_path(path).ok_or_else(|| {
        IoError::Io(std::io::Error::new(
            std::io::ErrorKind::InvalidInput,
            format!("cannot infer image format from path {}", path.display()),
        ))
    })?;
    save_image(img, path, format)
}

/// 8-bit quantization used by every writer: clamp then `round(v * 255)`.
pub fn quantize(img: &RgbImage) -> Vec<u8> {
    let mut out = Vec::with_capacity(img.pixels().len() * 3);
    for p in img.pixels() {
        for &c in p {
            out.push((c.clamp(0.0, 1.0) * 255.0).round() as u8);
        }
    }
    out
}

pub(crate) fn from_bytes(width: usize, height: usize, bytes: &[u8]) -> Result<RgbImage, ImageError> {
    let pixels = bytes
        .chunks_exact(3)
        .map(|c| {
            [
                c[0] as f64 / 255.0,
                c[1] as f64 / 255.0,
                c[2] as f64 / 255.0,
            ]
        })
        .collect();
    RgbImage::from_pixels(width, height, pixels)
}
