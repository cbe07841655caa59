//! Fractional Brownian motion fractal dimension.
//!
//! For every pixel, the mean absolute gray difference of pixel pairs inside
//! a square window is collected per integer distance bin, a line is fitted
//! through `(ln Δr, ln E|ΔI|)`, and its slope `H` gives `FD = 3 − H`. The
//! resulting FD image is summarized by five first-order statistics.

mod curve;
mod synth;

pub use curve::{mean_abs_diff_curve, OffsetTable};
pub use synth::synthesize_fbm;

use thiserror::Error;

use crate::features::{FeatureVector, Method};
use crate::imaging::GrayImage;

/// Substitute for empty-difference bins before the log fit (half a gray level).
pub const ZERO_GUARD: f64 = 1.0 / 512.0;

#[derive(Debug, Error, PartialEq)]
pub enum FractalError {
    #[error("invalid fBm config: {0}")]
    InvalidConfig(String),
    #[error("curve has {0} usable points, need at least 2")]
    TooFewPoints(usize),
    #[error("curve is identically zero, Hurst exponent undefined")]
    FlatCurve,
    #[error("center ({row}, {col}) is outside the {width}x{height} segment")]
    CenterOutside {
        row: usize,
        col: usize,
        width: usize,
        height: usize,
    },
    #[error("segment {width}x{height} is too small for a two-bin window")]
    SegmentTooSmall { width: usize, height: usize },
}

pub type Result<T> = std::result::Result<T, FractalError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FbmConfig {
    /// Half-width of the square window around each pixel, clipped at borders.
    pub window_radius: usize,
    /// Largest pixel-pair distance considered.
    pub max_distance: usize,
    /// Number of integer distance bins `1..=distance_bins` (capped by `max_distance`).
    pub distance_bins: usize,
    /// Map flat windows to FD = 2 instead of failing.
    pub flat_as_plane: bool,
}

impl Default for FbmConfig {
    fn default() -> Self {
        Self {
            window_radius: 8,
            max_distance: 4,
            distance_bins: 4,
            flat_as_plane: true,
        }
    }
}

impl FbmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_distance < 1 || self.max_distance > self.window_radius {
            return Err(FractalError::InvalidConfig(format!(
                "max_distance {} must lie in [1, window_radius = {}]",
                self.max_distance, self.window_radius
            )));
        }
        if self.distance_bins < 2 {
            return Err(FractalError::InvalidConfig(format!(
                "distance_bins {} must be at least 2",
                self.distance_bins
            )));
        }
        Ok(())
    }

    pub(crate) fn bins(&self) -> usize {
        self.distance_bins.min(self.max_distance)
    }
}

/// Log-log line fit of a mean-absolute-difference curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HurstFit {
    /// Slope, unclamped.
    pub h: f64,
    /// `exp(intercept)`.
    pub k: f64,
}

/// Ordinary least squares through `(ln Δr, ln E)`. Zero means are replaced by
/// [`ZERO_GUARD`] when at least one is positive.
pub fn hurst_fit(curve: &[(f64, f64)]) -> Result<HurstFit> {
    if curve.len() < 2 {
        return Err(FractalError::TooFewPoints(curve.len()));
    }
    if curve.iter().all(|&(_, e)| e <= 0.0) {
        return Err(FractalError::FlatCurve);
    }
    let n = curve.len() as f64;
    let pts: Vec<(f64, f64)> = curve
        .iter()
        .map(|&(r, e)| (r.ln(), if e > 0.0 { e } else { ZERO_GUARD }.ln()))
        .collect();
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(x, y) in &pts {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx <= 0.0 {
        return Err(FractalError::TooFewPoints(1));
    }
    let h = sxy / sxx;
    Ok(HurstFit {
        h,
        k: (my - h * mx).exp(),
    })
}

/// Per-pixel fractal dimension of a segment, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FdImage {
    pub width: usize,
    pub height: usize,
    /// `3 − clamp(H, 0, 1)`, always in [2, 3].
    pub fd: Vec<f64>,
    /// Unclamped slope per pixel (1 for flat windows).
    pub raw_h: Vec<f64>,
}

impl FdImage {
    pub fn mean_fd(&self) -> f64 {
        self.fd.iter().sum::<f64>() / self.fd.len() as f64
    }

    pub fn mean_raw_h(&self) -> f64 {
        self.raw_h.iter().sum::<f64>() / self.raw_h.len() as f64
    }

    /// Linear rescale of [2, 3] to [0, 255] for inspection.
    pub fn to_gray(&self) -> GrayImage {
        GrayImage::new(
            self.width,
            self.height,
            self.fd
                .iter()
                .map(|&v| ((v - 2.0) * 255.0).round().clamp(0.0, 255.0) as u8)
                .collect(),
        )
        .expect("dimensions come from a valid segment")
    }
}

pub fn fd_image(seg: &GrayImage, cfg: &FbmConfig) -> Result<FdImage> {
    cfg.validate()?;
    let (w, h) = (seg.width(), seg.height());
    let table = OffsetTable::new(seg, cfg);
    let mut fd = Vec::with_capacity(w * h);
    let mut raw_h = Vec::with_capacity(w * h);
    for r in 0..h {
        for c in 0..w {
            let curve = table.curve_at(r, c).map_err(|e| match e {
                FractalError::TooFewPoints(_) => FractalError::SegmentTooSmall { width: w, height: h },
                other => other,
            })?;
            let slope = match hurst_fit(&curve) {
                Ok(fit) => fit.h,
                Err(FractalError::FlatCurve) if cfg.flat_as_plane => 1.0,
                Err(e) => return Err(e),
            };
            raw_h.push(slope);
            fd.push(3.0 - slope.clamp(0.0, 1.0));
        }
    }
    Ok(FdImage {
        width: w,
        height: h,
        fd,
        raw_h,
    })
}

/// Population moments of an FD image: mean, variance, lacunarity
/// (variance / mean), skewness and non-excess kurtosis. A zero-variance
/// population yields zero skewness and kurtosis and sets the degenerate flag.
pub fn fd_statistics(values: &[f64]) -> ([f64; 5], bool) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let m = |k: i32| values.iter().map(|v| (v - mean).powi(k)).sum::<f64>() / n;
    let var = m(2);
    let lacunarity = var / mean;
    if var > 0.0 {
        let sd = var.sqrt();
        ([mean, var, lacunarity, m(3) / (sd * var), m(4) / (var * var)], false)
    } else {
        ([mean, 0.0, lacunarity, 0.0, 0.0], true)
    }
}

/// Five fBm features: statistics of the segment's FD image.
pub fn fbm_features(seg: &GrayImage, cfg: &FbmConfig) -> Result<FeatureVector> {
    let img = fd_image(seg, cfg)?;
    let (values, degenerate) = fd_statistics(&img.fd);
    Ok(if degenerate {
        FeatureVector::degenerate(Method::Fbm, values.to_vec())
    } else {
        FeatureVector::new(Method::Fbm, values.to_vec())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn noise(size: usize, seed: u64) -> GrayImage {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        GrayImage::from_fn(size, size, |_, _| rng.random()).unwrap()
    }

    #[test]
    fn exact_power_law() {
        let fit = hurst_fit(&[(1.0, 2.0), (2.0, 4.0), (4.0, 8.0)]).unwrap();
        assert!((fit.h - 1.0).abs() < 1e-12);
        assert!((fit.k - 2.0).abs() < 1e-12);
    }

    #[test]
    fn constant_curve_has_zero_slope() {
        let fit = hurst_fit(&[(1.0, 3.5), (2.0, 3.5)]).unwrap();
        assert!(fit.h.abs() < 1e-15);
    }

    #[test]
    fn fit_errors() {
        assert_eq!(hurst_fit(&[(1.0, 1.0)]), Err(FractalError::TooFewPoints(1)));
        assert_eq!(hurst_fit(&[(1.0, 0.0), (2.0, 0.0)]), Err(FractalError::FlatCurve));
        // one positive bin: zero guard keeps the fit finite
        let fit = hurst_fit(&[(1.0, 0.0), (2.0, 1.0)]).unwrap();
        assert!((fit.h - (512f64).ln() / 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn constant_segment_is_a_plane() {
        let img = GrayImage::filled(32, 32, 90).unwrap();
        let fd = fd_image(&img, &FbmConfig::default()).unwrap();
        assert!(fd.fd.iter().all(|&v| v == 2.0));
        let fv = fbm_features(&img, &FbmConfig::default()).unwrap();
        assert_eq!(fv.values, vec![2.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(fv.degenerate);
        let strict = FbmConfig {
            flat_as_plane: false,
            ..Default::default()
        };
        assert_eq!(fd_image(&img, &strict), Err(FractalError::FlatCurve));
    }

    #[test]
    fn two_point_population_moments() {
        let (stats, degenerate) = fd_statistics(&[2.0, 3.0, 2.0, 3.0]);
        assert!(!degenerate);
        let want = [2.5, 0.25, 0.1, 0.0, 1.0];
        for (a, b) in stats.iter().zip(want) {
            assert!((a - b).abs() < 1e-12, "{stats:?}");
        }
    }

    /// Band frozen from 100 noise segments; observed mean FD in [2.979, 2.999].
    #[test]
    fn white_noise_is_rough() {
        for seed in 0..100 {
            let fd = fd_image(&noise(32, seed), &FbmConfig::default()).unwrap();
            let m = fd.mean_fd();
            assert!(m > 2.6 && m <= 3.0, "seed {seed}: {m}");
        }
    }

    #[test]
    fn feature_length() {
        assert_eq!(fbm_features(&noise(32, 1), &FbmConfig::default()).unwrap().len(), 5);
    }

    #[test]
    fn config_validation() {
        let bad = FbmConfig {
            max_distance: 9,
            ..Default::default()
        };
        assert!(matches!(bad.validate(), Err(FractalError::InvalidConfig(_))));
        let bad = FbmConfig {
            distance_bins: 1,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn tiny_segment() {
        let img = GrayImage::new(2, 1, vec![1, 9]).unwrap();
        assert!(matches!(
            fd_image(&img, &FbmConfig::default()),
            Err(FractalError::SegmentTooSmall { .. })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn fd_in_range_and_shift_invariant(seed in any::<u64>(), shift in 0u8..60) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let img = GrayImage::from_fn(20, 20, |r, _| rng.random_range(0..180u8) / (1 + r as u8 % 4)).unwrap();
            let shifted = GrayImage::from_fn(20, 20, |r, c| img.get(r, c) + shift).unwrap();
            let cfg = FbmConfig::default();
            let a = fd_image(&img, &cfg).unwrap();
            prop_assert!(a.fd.iter().all(|v| (2.0..=3.0).contains(v)));
            prop_assert_eq!(&a, &fd_image(&shifted, &cfg).unwrap());
        }

        #[test]
        fn slope_invariant_under_gain(seed in any::<u64>(), gain in 2u8..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let img = GrayImage::from_fn(16, 16, |_, _| rng.random_range(1..60u8)).unwrap();
            let scaled = GrayImage::from_fn(16, 16, |r, c| img.get(r, c) * gain).unwrap();
            let cfg = FbmConfig::default();
            let a = fd_image(&img, &cfg).unwrap();
            let b = fd_image(&scaled, &cfg).unwrap();
            for (x, y) in a.raw_h.iter().zip(&b.raw_h) {
                prop_assert!((x - y).abs() < 1e-9);
            }
        }

        #[test]
        fn power_laws_recovered(h in -0.5f64..1.5, k in 0.1f64..100.0) {
            let curve: Vec<(f64, f64)> = (1..=4).map(|d| (d as f64, k * (d as f64).powf(h))).collect();
            let fit = hurst_fit(&curve).unwrap();
            prop_assert!((fit.h - h).abs() < 1e-12);
            prop_assert!((fit.k - k).abs() < 1e-10 * k);
        }
    }
}
