//! Third-order Gaussian Markov random field features.
//!
//! Each interior pixel is modelled as a Gaussian whose mean is a linear
//! combination of six symmetric neighbour-pair sums (rows `i`, columns `j`):
//!
//! ```text
//! s1 = I[i-1,j]   + I[i+1,j]      s4 = I[i,j-2]   + I[i,j+2]
//! s2 = I[i,j-1]   + I[i,j+1]      s5 = I[i-1,j-1] + I[i+1,j+1]
//! s3 = I[i-2,j]   + I[i+2,j]      s6 = I[i-1,j+1] + I[i+1,j-1]
//! ```
//!
//! The coefficients come from the least-squares normal equations summed over
//! the interior, and the conditional variance from the mean squared residual.
//! Feature order is `alpha1..alpha6, sigma2`.

mod synth;

pub use synth::{max_spectral_response, synthesize_gmrf, synthesize_gmrf_field};

use nalgebra::{Matrix6, Vector6};
use thiserror::Error;

use crate::features::{DegeneratePolicy, FeatureVector, Method};
use crate::imaging::{GrayImage, RealImage};

/// Largest condition number of the normal matrix accepted as non-singular.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Pixel offsets (row, col) of the six pair sums; each sum adds the pixel at
/// `+offset` and `-offset`.
pub const PAIR_OFFSETS: [(isize, isize); 6] = [(1, 0), (0, 1), (2, 0), (0, 2), (1, 1), (1, -1)];

#[derive(Debug, Error, PartialEq)]
pub enum GmrfError {
    #[error("segment {width}x{height} has no interior pixels (needs at least 5x5)")]
    TooSmall { width: usize, height: usize },
    #[error("pixel ({row}, {col}) is not interior")]
    NotInterior { row: usize, col: usize },
    #[error("normal matrix is singular or ill-conditioned (condition number {condition:e})")]
    Singular { condition: f64 },
    #[error("parameters are unstable: peak spectral response {response} must stay below 1")]
    Unstable { response: f64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

pub type Result<T> = std::result::Result<T, GmrfError>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmrfParams {
    pub alpha: [f64; 6],
    pub sigma2: f64,
}

impl GmrfParams {
    pub fn new(alpha: [f64; 6], sigma2: f64) -> Result<Self> {
        if !(sigma2 >= 0.0) || alpha.iter().any(|a| !a.is_finite()) || !sigma2.is_finite() {
            return Err(GmrfError::InvalidParams(format!(
                "alpha {alpha:?}, sigma2 {sigma2}"
            )));
        }
        Ok(Self { alpha, sigma2 })
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = self.alpha.to_vec();
        v.push(self.sigma2);
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeighborSums(pub [f64; 6]);

/// Denominator used for the conditional variance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum VarianceDenominator {
    /// `(M-2)(N-2)`.
    #[default]
    Printed,
    /// `(M-4)(N-4)`, the number of interior pixels actually summed.
    Interior,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct GmrfConfig {
    pub denominator: VarianceDenominator,
    pub degenerate: DegeneratePolicy,
}

#[inline]
fn sums_at(data: &[f64], width: usize, row: usize, col: usize) -> [f64; 6] {
    let at = |dr: isize, dc: isize| {
        data[(row as isize + dr) as usize * width + (col as isize + dc) as usize]
    };
    let mut s = [0.0; 6];
    for (slot, &(dr, dc)) in s.iter_mut().zip(PAIR_OFFSETS.iter()) {
        *slot = at(-dr, -dc) + at(dr, dc);
    }
    s
}

fn is_interior(width: usize, height: usize, row: usize, col: usize) -> bool {
    width >= 5 && height >= 5 && (2..height - 2).contains(&row) && (2..width - 2).contains(&col)
}

/// The six pair sums at an interior pixel of the raw segment.
pub fn neighbor_sums(seg: &GrayImage, row: usize, col: usize) -> Result<NeighborSums> {
    if !is_interior(seg.width(), seg.height(), row, col) {
        return Err(GmrfError::NotInterior { row, col });
    }
    let data: Vec<f64> = seg.pixels().iter().map(|&p| p as f64).collect();
    Ok(NeighborSums(sums_at(&data, seg.width(), row, col)))
}

/// Least-squares GMRF fit of an 8-bit segment after subtracting its mean.
pub fn estimate_gmrf(seg: &GrayImage, cfg: &GmrfConfig) -> Result<GmrfParams> {
    estimate_gmrf_field(&seg.to_real(), cfg)
}

/// Least-squares GMRF fit of a real-valued field after subtracting its mean.
pub fn estimate_gmrf_field(field: &RealImage, cfg: &GmrfConfig) -> Result<GmrfParams> {
    let (w, h) = (field.width, field.height);
    if w < 5 || h < 5 {
        return Err(GmrfError::TooSmall {
            width: w,
            height: h,
        });
    }
    let mean = field.mean();
    let centered: Vec<f64> = field.data.iter().map(|v| v - mean).collect();

    let mut normal = Matrix6::<f64>::zeros();
    let mut rhs = Vector6::<f64>::zeros();
    for i in 2..h - 2 {
        for j in 2..w - 2 {
            let s = Vector6::from(sums_at(&centered, w, i, j));
            normal += s * s.transpose();
            rhs += s * centered[i * w + j];
        }
    }

    let svd = normal.svd(true, true);
    let max_sv = svd.singular_values.max();
    let min_sv = svd.singular_values.min();
    let condition = if min_sv > 0.0 { max_sv / min_sv } else { f64::INFINITY };
    if !(condition <= CONDITION_LIMIT) {
        return Err(GmrfError::Singular { condition });
    }
    let alpha = svd
        .solve(&rhs, 0.0)
        .map_err(|_| GmrfError::Singular { condition })?;

    let mut rss = 0.0;
    for i in 2..h - 2 {
        for j in 2..w - 2 {
            let s = Vector6::from(sums_at(&centered, w, i, j));
            let r = centered[i * w + j] - alpha.dot(&s);
            rss += r * r;
        }
    }
    let denom = match cfg.denominator {
        VarianceDenominator::Printed => (h - 2) * (w - 2),
        VarianceDenominator::Interior => (h - 4) * (w - 4),
    };
    Ok(GmrfParams {
        alpha: alpha.into(),
        sigma2: rss / denom as f64,
    })
}

/// Seven GMRF features `alpha1..alpha6, sigma2`.
pub fn gmrf_features(seg: &GrayImage, cfg: &GmrfConfig) -> Result<FeatureVector> {
    match estimate_gmrf(seg, cfg) {
        Ok(p) => Ok(FeatureVector::new(Method::Gmrf, p.to_vec())),
        Err(GmrfError::Singular { .. }) if cfg.degenerate == DegeneratePolicy::Designated => {
            Ok(FeatureVector::degenerate(Method::Gmrf, vec![0.0; 7]))
        }
        Err(e) => Err(e),
    }
}
