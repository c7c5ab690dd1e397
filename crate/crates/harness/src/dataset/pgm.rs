//! Netpbm graymaps: ASCII `P2` and binary `P5`, 8-bit only.

use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    maxval: u16,
    pixels: Vec<u16>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PgmError {
    #[error("bad magic number {0:?}; expected P2 or P5")]
    BadMagic(String),
    #[error("truncated data: {0}")]
    Truncated(&'static str),
    #[error("malformed {field}: {token:?}")]
    BadToken { field: &'static str, token: String },
    #[error("maxval {0} out of range; only 1..=255 is supported")]
    MaxvalOutOfRange(u32),
    #[error("image dimensions must be positive, got {width}x{height}")]
    ZeroDimension { width: usize, height: usize },
    #[error("pixel {index} has value {value} above maxval {maxval}")]
    PixelOutOfRange { index: usize, value: u32, maxval: u16 },
    #[error("expected {expected} pixels, got {got}")]
    PixelCount { expected: usize, got: usize },
}

impl GrayImage {
    pub fn new(width: usize, height: usize, maxval: u16, pixels: Vec<u16>) -> Result<Self, PgmError> {
        if width == 0 || height == 0 {
            return Err(PgmError::ZeroDimension { width, height });
        }
        if maxval == 0 || maxval > 255 {
            return Err(PgmError::MaxvalOutOfRange(maxval.into()));
        }
        if pixels.len() != width * height {
            return Err(PgmError::PixelCount {
                expected: width * height,
                got: pixels.len(),
            });
        }
        if let Some(index) = pixels.iter().position(|&v| v > maxval) {
            return Err(PgmError::PixelOutOfRange {
                index,
                value: pixels[index].into(),
                maxval,
            });
        }
        Ok(Self {
            width,
            height,
            maxval,
            pixels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn maxval(&self) -> u16 {
        self.maxval
    }

    /// Row-major pixel values.
    pub fn pixels(&self) -> &[u16] {
        &self.pixels
    }

    pub fn get(&self, row: usize, col: usize) -> u16 {
        self.pixels[row * self.width + col]
    }
}

/// Header tokenizer: whitespace-separated tokens, `#` to end of line is a comment.
struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Option<&'a [u8]> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|b| !b.is_ascii_whitespace() && *b != b'#')
        {
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.bytes[start..self.pos])
    }

    fn number(&mut self, field: &'static str) -> Result<u32, PgmError> {
        let token = self.token().ok_or(PgmError::Truncated(field))?;
        std::str::from_utf8(token)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| PgmError::BadToken {
                field,
                token: String::from_utf8_lossy(token).into_owned(),
            })
    }
}

/// Decodes a `P2` or `P5` graymap.
///
/// For `P5` the raster starts right after the single whitespace byte that
/// terminates maxval; bytes past the raster are ignored.
pub fn read_pgm(bytes: &[u8]) -> Result<GrayImage, PgmError> {
    let magic = bytes.get(..2).ok_or(PgmError::Truncated("magic number"))?;
    let binary = match magic {
        b"P5" => true,
        b"P2" => false,
        other => return Err(PgmError::BadMagic(String::from_utf8_lossy(other).into_owned())),
    };
    let mut cursor = Cursor { bytes, pos: 2 };
    let width = cursor.number("width")? as usize;
    let height = cursor.number("height")? as usize;
    let maxval = cursor.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(PgmError::ZeroDimension { width, height });
    }
    if maxval == 0 || maxval > 255 {
        return Err(PgmError::MaxvalOutOfRange(maxval));
    }
    let count = width * height;

    let pixels = if binary {
        match bytes.get(cursor.pos) {
            Some(b) if b.is_ascii_whitespace() => {}
            _ => return Err(PgmError::Truncated("whitespace after maxval")),
        }
        let start = cursor.pos + 1;
        let raster = bytes
            .get(start..start + count)
            .ok_or(PgmError::Truncated("binary raster"))?;
        raster.iter().map(|&b| u16::from(b)).collect()
    } else {
        let mut pixels = Vec::with_capacity(count);
        for index in 0..count {
            let v = cursor.number("pixel").map_err(|e| match e {
                PgmError::Truncated(_) => PgmError::Truncated("ASCII raster"),
                other => other,
            })?;
            if v > maxval {
                return Err(PgmError::PixelOutOfRange {
                    index,
                    value: v,
                    maxval: maxval as u16,
                });
            }
            pixels.push(v as u16);
        }
        pixels
    };
    GrayImage::new(width, height, maxval as u16, pixels)
}

/// Encodes as ASCII `P2`, one image row per line.
pub fn write_pgm_ascii(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P2\n{} {}\n{}\n", img.width, img.height, img.maxval);
    for row in img.pixels.chunks(img.width) {
        let line: Vec<String> = row.iter().map(u16::to_string).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    out.into_bytes()
}

/// Encodes as binary `P5`.
pub fn write_pgm_binary(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n{}\n", img.width, img.height, img.maxval).into_bytes();
    out.extend(img.pixels.iter().map(|&v| v as u8));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn minimal_ascii() {
        let img = read_pgm(b"P2 2 2 255 0 128 255 64").unwrap();
        assert_eq!((img.width(), img.height(), img.maxval()), (2, 2, 255));
        assert_eq!(img.pixels(), &[0, 128, 255, 64]);
    }

    #[test]
    fn binary_matches_ascii() {
        let mut bytes = b"P5 2 2 255\n".to_vec();
        bytes.extend([0u8, 128, 255, 64]);
        assert_eq!(read_pgm(&bytes).unwrap(), read_pgm(b"P2 2 2 255 0 128 255 64").unwrap());
    }

    #[test]
    fn header_comments_are_skipped() {
        let plain = read_pgm(b"P2\n2 2\n255\n0 128 255 64\n").unwrap();
        let commented = read_pgm(b"P2\n# created by hand\n2 2\n# max\n255\n0 128 255 64\n").unwrap();
        assert_eq!(plain, commented);

        let mut bytes = b"P5\n# comment\n2 1 # trailing\n255\n".to_vec();
        bytes.extend([9u8, 10]);
        assert_eq!(read_pgm(&bytes).unwrap().pixels(), &[9, 10]);
    }

    #[test]
    fn binary_raster_may_start_with_whitespace_bytes() {
        // 0x0A and 0x20 are valid pixels, not header whitespace
        let mut bytes = b"P5 3 1 255\n".to_vec();
        bytes.extend([b'\n', b' ', 7]);
        assert_eq!(read_pgm(&bytes).unwrap().pixels(), &[10, 32, 7]);
    }

    #[test]
    fn defects_are_named() {
        assert!(matches!(read_pgm(b"P6 1 1 255 0"), Err(PgmError::BadMagic(m)) if m == "P6"));
        assert!(matches!(read_pgm(b"P"), Err(PgmError::Truncated(_))));
        assert_eq!(
            read_pgm(b"P2 2 2 65535 0 0 0 0"),
            Err(PgmError::MaxvalOutOfRange(65535))
        );
        assert_eq!(read_pgm(b"P2 2 2 255 0 1 2"), Err(PgmError::Truncated("ASCII raster")));
        assert_eq!(
            read_pgm(b"P5 2 2 255\n\x01\x02"),
            Err(PgmError::Truncated("binary raster"))
        );
        assert!(matches!(
            read_pgm(b"P2 2 x 255"),
            Err(PgmError::BadToken { field: "height", .. })
        ));
        assert!(matches!(
            read_pgm(b"P2 1 1 100 101"),
            Err(PgmError::PixelOutOfRange { value: 101, .. })
        ));
        assert!(matches!(read_pgm(b"P2 0 1 255"), Err(PgmError::ZeroDimension { .. })));
        assert!(read_pgm(b"P2 1 1 255 999999").is_err());
        assert!(format!("{}", PgmError::MaxvalOutOfRange(1000)).contains("maxval 1000"));
    }

    fn image() -> impl Strategy<Value = GrayImage> {
        (1..12usize, 1..12usize, 1..=255u16).prop_flat_map(|(w, h, maxval)| {
            proptest::collection::vec(0..=maxval, w * h).prop_map(move |px| GrayImage::new(w, h, maxval, px).unwrap())
        })
    }

    proptest! {
        #[test]
        fn encode_decode_round_trip(img in image()) {
            prop_assert_eq!(read_pgm(&write_pgm_ascii(&img)).unwrap(), img.clone());
            prop_assert_eq!(read_pgm(&write_pgm_binary(&img)).unwrap(), img);
        }
    }
}
