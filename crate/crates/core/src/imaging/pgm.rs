use std::fs;
use std::path::Path;

use super::{GrayImage, ImagingError, Result};

/// Reads a binary (P5) graymap with maxval at most 255.
pub fn load_pgm(path: impl AsRef<Path>) -> Result<GrayImage> {
    let bytes = fs::read(path)?;
    decode_pgm(&bytes)
}

pub fn save_pgm(path: impl AsRef<Path>, img: &GrayImage) -> Result<()> {
    fs::write(path, encode_pgm(img))?;
    Ok(())
}

pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.pixels());
    out
}

struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderCursor<'a> {
    fn skip_whitespace_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u32> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(ImagingError::MalformedHeader(format!("missing {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| ImagingError::MalformedHeader(format!("{what} out of range")))
    }
}

pub fn decode_pgm(bytes: &[u8]) -> Result<GrayImage> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(ImagingError::MalformedHeader("magic number is not P5".into()));
    }
    let mut cur = HeaderCursor { bytes, pos: 2 };
    let width = cur.number("width")? as usize;
    let height = cur.number("height")? as usize;
    let maxval = cur.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(ImagingError::MalformedHeader(format!(
            "zero dimension {width}x{height}"
        )));
    }
    if maxval == 0 {
        return Err(ImagingError::MalformedHeader("maxval is zero".into()));
    }
    if maxval > 255 {
        return Err(ImagingError::UnsupportedDepth(maxval));
    }
    // exactly one whitespace byte separates maxval from the raster
    match bytes.get(cur.pos) {
        Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
        _ => {
            return Err(ImagingError::MalformedHeader(
                "no whitespace after maxval".into(),
            ))
        }
    }
    let expected = width * height;
    let data = &bytes[cur.pos..];
    if data.len() < expected {
        return Err(ImagingError::Truncated {
            expected,
            found: data.len(),
        });
    }
    GrayImage::new(width, height, data[..expected].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decodes_two_by_two() {
        let img = decode_pgm(b"P5\n2 2\n255\n\x00\xff\x11\x22").unwrap();
        assert_eq!((img.width(), img.height()), (2, 2));
        assert_eq!(img.pixels(), &[0, 255, 17, 34]);
    }

    #[test]
    fn comments_in_header() {
        let img = decode_pgm(b"P5 # scanner\n# another\n1 1 255 \x07").unwrap();
        assert_eq!(img.pixels(), &[7]);
    }

    #[test]
    fn sixteen_bit_is_unsupported() {
        let err = decode_pgm(b"P5\n2 2\n65535\n\x00\x00\x00\x00\x00\x00\x00\x00").unwrap_err();
        assert!(matches!(err, ImagingError::UnsupportedDepth(65535)));
        assert!(err.to_string().contains("unsupported depth"));
    }

    #[test]
    fn errors_are_distinct() {
        assert!(matches!(
            decode_pgm(b"P2\n1 1\n255\n1"),
            Err(ImagingError::MalformedHeader(_))
        ));
        assert!(matches!(
            decode_pgm(b"P5\n2\n"),
            Err(ImagingError::MalformedHeader(_))
        ));
        assert!(matches!(
            decode_pgm(b"P5\n2 2\n255\n\x01\x02"),
            Err(ImagingError::Truncated {
                expected: 4,
                found: 2
            })
        ));
    }

    #[test]
    fn encode_decode_roundtrip() {
        let img = GrayImage::from_fn(5, 3, |r, c| (r * 40 + c * 3) as u8).unwrap();
        assert_eq!(decode_pgm(&encode_pgm(&img)).unwrap(), img);
    }

    #[test]
    fn file_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.pgm");
        let img = GrayImage::from_fn(256, 256, |r, c| (r ^ c) as u8).unwrap();
        save_pgm(&path, &img).unwrap();
        let back = load_pgm(&path).unwrap();
        assert_eq!(back.pixels().len(), 65536);
        assert_eq!(back, img);
    }
}
