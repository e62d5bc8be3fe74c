//! Binary PPM (`P6`) and PGM (`P5`) with maximum value 255.

use alloc::vec::Vec;

use super::image::ImageMatrix;
use crate::error::{Error, Result};

fn bad(reason: impl Into<alloc::string::String>) -> Error {
    Error::Format {
        what: "netpbm image",
        reason: reason.into(),
    }
}

/// Reads whitespace-separated header fields, skipping `#` comments.
struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Header<'a> {
    fn skip_space(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                b if b.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn number(&mut self) -> Result<usize> {
        self.skip_space();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let digits = core::str::from_utf8(&self.bytes[start..self.pos]).map_err(|_| bad("header"))?;
        digits.parse().map_err(|_| bad("expected a header number"))
    }
}

pub fn decode(bytes: &[u8]) -> Result<ImageMatrix> {
    if bytes.len() < 2 {
        return Err(bad("file too short"));
    }
    let channels = match &bytes[..2] {
        b"P5" => 1,
        b"P6" => 3,
        _ => return Err(bad("only binary P5/P6 are supported")),
    };
    let mut h = Header { bytes, pos: 2 };
    let width = h.number()?;
    let height = h.number()?;
    let maxval = h.number()?;
    if maxval != 255 {
        return Err(bad(alloc::format!("max value {maxval} (expected 255)")));
    }
    // exactly one whitespace byte separates the header from the raster
    if h.pos >= bytes.len() || !bytes[h.pos].is_ascii_whitespace() {
        return Err(bad("missing raster separator"));
    }
    let raster = &bytes[h.pos + 1..];
    let expected = width * height * channels;
    if raster.len() < expected {
        return Err(Error::Truncated {
            what: "netpbm raster",
            expected,
            actual: raster.len(),
        });
    }
    ImageMatrix::new(height, width, channels, raster[..expected].to_vec())
}

pub fn encode(img: &ImageMatrix) -> Vec<u8> {
    let magic = if img.channels() == 1 { "P5" } else { "P6" };
    let mut out = alloc::format!("{magic}\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.pixels());
    out
}
