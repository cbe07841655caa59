//! Gray images, PGM I/O, quantization, and overlapping segmentation.

mod manifest;
mod pgm;
mod segment;

pub use manifest::{read_segment_manifest, write_segment_manifest, ManifestEntry, MANIFEST_FILE};
pub use pgm::{decode_pgm, encode_pgm, load_pgm, save_pgm};
pub use segment::{
    segment_image, split_assignment, split_train_test, Boundary, Segment, SegmentationConfig,
    Split,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ImagingError {
    #[error("image dimensions must be at least 1x1 (got {width}x{height})")]
    EmptyImage { width: usize, height: usize },
    #[error("pixel buffer holds {found} values but {width}x{height} needs {expected}")]
    BufferSize {
        width: usize,
        height: usize,
        expected: usize,
        found: usize,
    },
    #[error("malformed PGM header: {0}")]
    MalformedHeader(String),
    #[error("unsupported depth: maxval {0} exceeds 255")]
    UnsupportedDepth(u32),
    #[error("truncated pixel data: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("quantization levels must lie in [2, 256] (got {0})")]
    LevelsOutOfRange(usize),
    #[error("invalid segmentation config: {0}")]
    InvalidSegmentation(String),
    #[error("segment size {size} exceeds image {width}x{height}")]
    SegmentTooLarge {
        size: usize,
        width: usize,
        height: usize,
    },
    #[error("train_count must be at least 1")]
    EmptyTrainSplit,
    #[error("class {label} has {available} segments, cannot take {requested} for training")]
    NotEnoughSegments {
        label: usize,
        available: usize,
        requested: usize,
    },
    #[error("manifest: {0}")]
    Manifest(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, ImagingError>;

/// 8-bit gray image stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(ImagingError::EmptyImage { width, height });
        }
        let expected = width * height;
        if pixels.len() != expected {
            return Err(ImagingError::BufferSize {
                width,
                height,
                expected,
                found: pixels.len(),
            });
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// Builds an image by evaluating `f(row, col)` at every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Result<Self> {
        let mut pixels = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                pixels.push(f(r, c));
            }
        }
        Self::new(width, height, pixels)
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.width + col]
    }

    pub fn transpose(&self) -> GrayImage {
        let mut out = vec![0u8; self.pixels.len()];
        for r in 0..self.height {
            for c in 0..self.width {
                out[c * self.height + r] = self.pixels[r * self.width + c];
            }
        }
        GrayImage {
            width: self.height,
            height: self.width,
            pixels: out,
        }
    }

    pub fn to_real(&self) -> RealImage {
        RealImage {
            width: self.width,
            height: self.height,
            data: self.pixels.iter().map(|&p| p as f64).collect(),
        }
    }

    pub fn max_value(&self) -> u8 {
        self.pixels.iter().copied().max().unwrap_or(0)
    }
}

/// Real-valued grid used for synthesized fields and intermediate results.
#[derive(Debug, Clone, PartialEq)]
pub struct RealImage {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

/// Affine map applied when converting a real field to 8 bits: `gray = gain * value + offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rescale {
    pub gain: f64,
    pub offset: f64,
}

impl RealImage {
    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![0.0; width * height],
        }
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, v: f64) {
        self.data[row * self.width + col] = v;
    }

    pub fn transpose(&self) -> RealImage {
        let mut out = RealImage::zeros(self.height, self.width);
        for r in 0..self.height {
            for c in 0..self.width {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    /// Linear min-max rescale to [0, 255] with rounding. A constant field maps to 128.
    pub fn to_gray_rescaled(&self) -> (GrayImage, Rescale) {
        let (lo, hi) = self
            .data
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        let rescale = if hi > lo {
            let gain = 255.0 / (hi - lo);
            Rescale {
                gain,
                offset: -lo * gain,
            }
        } else {
            Rescale {
                gain: 0.0,
                offset: 128.0,
            }
        };
        let pixels = self
            .data
            .iter()
            .map(|&v| (rescale.gain * v + rescale.offset).round().clamp(0.0, 255.0) as u8)
            .collect();
        let img = GrayImage {
            width: self.width,
            height: self.height,
            pixels,
        };
        (img, rescale)
    }
}

/// Maps each pixel to `floor(pixel * levels / 256)`.
pub fn quantize(img: &GrayImage, levels: usize) -> Result<GrayImage> {
    if !(2..=256).contains(&levels) {
        return Err(ImagingError::LevelsOutOfRange(levels));
    }
    let pixels = img
        .pixels
        .iter()
        .map(|&p| ((p as usize * levels) / 256) as u8)
        .collect();
    Ok(GrayImage {
        width: img.width,
        height: img.height,
        pixels,
    })
}
