//! Autocovariance surface and exponential fits to its axis margins.
//!
//! `rho(x, y)` averages `(I(r, c) - mu) * (I(r + y, c + x) - mu)` over the
//! `(W - x)(H - y)` overlapping positions, where `x` shifts along columns
//! (horizontal) and `y` along rows (vertical).

use super::{Result, StatError};
use crate::features::{DegeneratePolicy, FeatureVector, Method};
use crate::imaging::GrayImage;

/// Floor applied to margin values before taking logs.
pub const MARGIN_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AcfConfig {
    pub max_shift: usize,
    /// Divide the surface by `rho(0, 0)`.
    pub normalize: bool,
    pub degenerate: DegeneratePolicy,
}

impl Default for AcfConfig {
    fn default() -> Self {
        Self {
            max_shift: 16,
            normalize: true,
            degenerate: DegeneratePolicy::Error,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AcfSurface {
    pub max_shift: usize,
    /// `values[y * (max_shift + 1) + x]`.
    pub values: Vec<f64>,
    /// `rho(0, 0)` before normalization: the population variance.
    pub variance: f64,
    pub normalized: bool,
}

impl AcfSurface {
    #[inline]
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.values[y * (self.max_shift + 1) + x]
    }

    pub fn horizontal_margin(&self) -> Vec<f64> {
        (0..=self.max_shift).map(|x| self.at(x, 0)).collect()
    }

    pub fn vertical_margin(&self) -> Vec<f64> {
        (0..=self.max_shift).map(|y| self.at(0, y)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Horizontal,
    Vertical,
}

/// `margin(d) ≈ amplitude * exp(-decay * d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpFit {
    pub amplitude: f64,
    pub decay: f64,
    pub axis: Axis,
}

/// Evaluates the autocovariance for all shifts in `[0, max_shift]²`.
pub fn acf_compute(seg: &GrayImage, max_shift: usize, normalize: bool) -> Result<AcfSurface> {
    let (w, h) = (seg.width(), seg.height());
    let limit = w.min(h);
    if max_shift >= limit {
        return Err(StatError::ShiftTooLarge { max_shift, limit });
    }
    let n = (w * h) as f64;
    let mu = seg.pixels().iter().map(|&p| p as f64).sum::<f64>() / n;
    let centered: Vec<f64> = seg.pixels().iter().map(|&p| p as f64 - mu).collect();
    let side = max_shift + 1;
    let mut values = vec![0.0; side * side];
    for y in 0..=max_shift {
        for x in 0..=max_shift {
            let mut acc = 0.0;
            for r in 0..h - y {
                let a = &centered[r * w..r * w + w - x];
                let b = &centered[(r + y) * w + x..(r + y) * w + w];
                acc += a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
            }
            values[y * side + x] = acc / ((w - x) * (h - y)) as f64;
        }
    }
    let variance = values[0];
    if !(variance > 0.0) {
        return Err(StatError::ZeroVariance);
    }
    if normalize {
        values.iter_mut().for_each(|v| *v /= variance);
    }
    Ok(AcfSurface {
        max_shift,
        values,
        variance,
        normalized: normalize,
    })
}

/// Least-squares line through `(d, ln margin[d])` with margins floored at
/// [`MARGIN_FLOOR`]; amplitude from the intercept, decay from minus the slope.
pub fn fit_exponential(margin: &[f64], axis: Axis) -> ExpFit {
    let n = margin.len() as f64;
    let xs = (0..margin.len()).map(|d| d as f64);
    let ys: Vec<f64> = margin.iter().map(|&m| m.max(MARGIN_FLOOR).ln()).collect();
    let mean_x = xs.clone().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.zip(&ys) {
        sxy += (x - mean_x) * (y - mean_y);
        sxx += (x - mean_x) * (x - mean_x);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    ExpFit {
        amplitude: (mean_y - slope * mean_x).exp(),
        decay: -slope,
        axis,
    }
}

/// Four features `(A_h, b_h, A_v, b_v)` from exponential fits to the margins.
pub fn acf_features(seg: &GrayImage, cfg: &AcfConfig) -> Result<FeatureVector> {
    let surface = match acf_compute(seg, cfg.max_shift, cfg.normalize) {
        Ok(s) => s,
        Err(StatError::ZeroVariance) if cfg.degenerate == DegeneratePolicy::Designated => {
            return Ok(FeatureVector::degenerate(Method::Acf, vec![0.0; 4]));
        }
        Err(e) => return Err(e),
    };
    let h = fit_exponential(&surface.horizontal_margin(), Axis::Horizontal);
    let v = fit_exponential(&surface.vertical_margin(), Axis::Vertical);
    Ok(FeatureVector::new(
        Method::Acf,
        vec![h.amplitude, h.decay, v.amplitude, v.decay],
    ))
}
