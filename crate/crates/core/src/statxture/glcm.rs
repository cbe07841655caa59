use super::{check_levels, check_pixels, Direction, Result, StatError};
use crate::features::{FeatureVector, Method};
use crate::imaging::{quantize, GrayImage};

/// Haralick feature names in output order.
pub const HARALICK_NAMES: [&str; 8] = [
    "contrast",
    "correlation",
    "energy",
    "entropy",
    "homogeneity",
    "dissimilarity",
    "idm",
    "maxprob",
];

/// Symmetric, normalized gray-level co-occurrence matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Glcm {
    pub levels: usize,
    pub direction: Direction,
    pub distance: usize,
    /// Raw symmetric pair counts, row-major `levels x levels`.
    pub counts: Vec<u64>,
    /// `counts` divided by their total.
    pub cells: Vec<f64>,
}

impl Glcm {
    #[inline]
    pub fn p(&self, i: usize, j: usize) -> f64 {
        self.cells[i * self.levels + j]
    }
}

/// Pair counts at the direction's offset, each pair counted in both orders.
pub fn glcm_counts(seg: &GrayImage, direction: Direction, distance: usize, levels: usize) -> Result<Vec<u64>> {
    check_levels(levels)?;
    if distance == 0 {
        return Err(StatError::ZeroDistance);
    }
    check_pixels(seg, levels)?;
    let (w, h) = (seg.width() as isize, seg.height() as isize);
    let (dr, dc) = direction.offset(distance);
    let mut counts = vec![0u64; levels * levels];
    let mut pairs = 0u64;
    for r in 0..h {
        let r2 = r + dr;
        if !(0..h).contains(&r2) {
            continue;
        }
        for c in 0..w {
            let c2 = c + dc;
            if !(0..w).contains(&c2) {
                continue;
            }
            let a = seg.get(r as usize, c as usize) as usize;
            let b = seg.get(r2 as usize, c2 as usize) as usize;
            counts[a * levels + b] += 1;
            counts[b * levels + a] += 1;
            pairs += 1;
        }
    }
    if pairs == 0 {
        return Err(StatError::NoPairs {
            distance,
            degrees: direction.degrees(),
            width: seg.width(),
            height: seg.height(),
        });
    }
    Ok(counts)
}

/// Co-occurrence matrix of a segment already quantized to `[0, levels)`.
pub fn glcm_compute(seg: &GrayImage, direction: Direction, distance: usize, levels: usize) -> Result<Glcm> {
    let counts = glcm_counts(seg, direction, distance, levels)?;
    let total: u64 = counts.iter().sum();
    let cells = counts.iter().map(|&n| n as f64 / total as f64).collect();
    Ok(Glcm {
        levels,
        direction,
        distance,
        counts,
        cells,
    })
}

pub fn haralick_features(g: &Glcm) -> Result<[f64; 8]> {
    haralick_from_probabilities(g.levels, &g.cells)
}

/// Eight Haralick statistics of a normalized `levels x levels` matrix:
/// contrast, correlation, energy, entropy (natural log), homogeneity
/// (`1/(1+|i-j|)`), dissimilarity, inverse difference moment
/// (`1/(1+(i-j)^2)`), maximum probability.
pub fn haralick_from_probabilities(levels: usize, p: &[f64]) -> Result<[f64; 8]> {
    assert_eq!(p.len(), levels * levels, "matrix must be levels x levels");
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > 1e-9 || p.iter().any(|&v| v < 0.0) {
        return Err(StatError::Unnormalized(sum));
    }
    let mut mu_r = 0.0;
    let mut mu_c = 0.0;
    for i in 0..levels {
        for j in 0..levels {
            let v = p[i * levels + j];
            mu_r += i as f64 * v;
            mu_c += j as f64 * v;
        }
    }
    let (mut var_r, mut var_c) = (0.0, 0.0);
    let mut out = [0.0; 8];
    let [contrast, corr, energy, entropy, homog, dissim, idm, maxprob] = &mut out;
    for i in 0..levels {
        for j in 0..levels {
            let v = p[i * levels + j];
            let (fi, fj) = (i as f64, j as f64);
            let diff = fi - fj;
            var_r += (fi - mu_r).powi(2) * v;
            var_c += (fj - mu_c).powi(2) * v;
            *corr += (fi - mu_r) * (fj - mu_c) * v;
            *contrast += diff * diff * v;
            *energy += v * v;
            if v > 0.0 {
                *entropy -= v * v.ln();
            }
            *homog += v / (1.0 + diff.abs());
            *dissim += v * diff.abs();
            *idm += v / (1.0 + diff * diff);
            *maxprob = maxprob.max(v);
        }
    }
    let sd = var_r.sqrt() * var_c.sqrt();
    *corr = if sd > 0.0 { *corr / sd } else { 0.0 };
    Ok(out)
}

/// 32 features: the eight Haralick statistics for 0°, 45°, 90° and 135° at
/// distance 1, direction-major. The raw segment is quantized to `levels` first.
pub fn glcm_feature_vector(seg: &GrayImage, levels: usize) -> Result<FeatureVector> {
    check_levels(levels)?;
    let q = quantize(seg, levels).map_err(|_| StatError::LevelsOutOfRange(levels))?;
    let mut values = Vec::with_capacity(32);
    for dir in Direction::ALL {
        values.extend(haralick_features(&glcm_compute(&q, dir, 1, levels)?)?);
    }
    Ok(FeatureVector::new(Method::Glcm, values))
}
