//! Statistical texture features: co-occurrence (GLCM), run-length (RLM)
//! and autocovariance (ACF).

mod acf;
mod glcm;
mod rlm;

pub use acf::{acf_compute, acf_features, fit_exponential, AcfConfig, AcfSurface, Axis, ExpFit};
pub use glcm::{
    glcm_compute, glcm_counts, glcm_feature_vector, haralick_features, haralick_from_probabilities, Glcm,
    HARALICK_NAMES,
};
pub use rlm::{rlm_compute, rlm_feature_vector, rlm_features, Rlm, RLM_NAMES};

use thiserror::Error;

/// Default quantization for co-occurrence matrices.
pub const DEFAULT_GLCM_LEVELS: usize = 32;
/// Default quantization for run-length matrices.
pub const DEFAULT_RLM_LEVELS: usize = 16;

#[derive(Debug, Error, PartialEq)]
pub enum StatError {
    #[error("pixel value {value} is outside [0, {levels})")]
    PixelOutOfRange { value: u8, levels: usize },
    #[error("gray levels must lie in [2, 256] (got {0})")]
    LevelsOutOfRange(usize),
    #[error("offset {distance} in direction {degrees} leaves no pixel pairs in a {width}x{height} segment")]
    NoPairs {
        distance: usize,
        degrees: u16,
        width: usize,
        height: usize,
    },
    #[error("distance must be at least 1")]
    ZeroDistance,
    #[error("co-occurrence matrix is not normalized (sum {0})")]
    Unnormalized(f64),
    #[error("max_shift {max_shift} must be below the smaller segment side {limit}")]
    ShiftTooLarge { max_shift: usize, limit: usize },
    #[error("segment has zero variance")]
    ZeroVariance,
}

pub type Result<T> = std::result::Result<T, StatError>;

/// Pixel-pair direction; offsets are (row, col) with rows growing downward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Deg0,
    Deg45,
    Deg90,
    Deg135,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::Deg0, Direction::Deg45, Direction::Deg90, Direction::Deg135];

    pub fn degrees(self) -> u16 {
        match self {
            Direction::Deg0 => 0,
            Direction::Deg45 => 45,
            Direction::Deg90 => 90,
            Direction::Deg135 => 135,
        }
    }

    /// 0° → (0, d), 45° → (−d, d), 90° → (−d, 0), 135° → (−d, −d).
    pub fn offset(self, distance: usize) -> (isize, isize) {
        let d = distance as isize;
        match self {
            Direction::Deg0 => (0, d),
            Direction::Deg45 => (-d, d),
            Direction::Deg90 => (-d, 0),
            Direction::Deg135 => (-d, -d),
        }
    }
}

fn check_levels(levels: usize) -> Result<()> {
    if !(2..=256).contains(&levels) {
        return Err(StatError::LevelsOutOfRange(levels));
    }
    Ok(())
}

fn check_pixels(seg: &crate::imaging::GrayImage, levels: usize) -> Result<()> {
    match seg.pixels().iter().find(|&&p| p as usize >= levels) {
        Some(&value) => Err(StatError::PixelOutOfRange { value, levels }),
        None => Ok(()),
    }
}
