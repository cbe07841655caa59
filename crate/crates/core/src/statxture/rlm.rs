use super::{check_levels, check_pixels, Direction, Result, StatError};
use crate::features::{FeatureVector, Method};
use crate::imaging::{quantize, GrayImage};

/// Run-length feature names in output order.
pub const RLM_NAMES: [&str; 5] = ["sre", "lre", "gln", "rln", "rp"];

/// Gray-level run-length matrix: `counts[i * max_run + (j - 1)]` is the
/// number of maximal runs of level `i` with length exactly `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rlm {
    pub levels: usize,
    pub direction: Direction,
    pub max_run: usize,
    pub counts: Vec<u64>,
    pub pixel_count: u64,
}

impl Rlm {
    #[inline]
    pub fn runs(&self, level: usize, length: usize) -> u64 {
        self.counts[level * self.max_run + length - 1]
    }
}

/// Counts maximal runs along every line of the direction.
pub fn rlm_compute(seg: &GrayImage, direction: Direction, levels: usize) -> Result<Rlm> {
    check_levels(levels)?;
    check_pixels(seg, levels)?;
    let (w, h) = (seg.width() as isize, seg.height() as isize);
    let max_run = seg.width().max(seg.height());
    let (dr, dc) = direction.offset(1);
    let inside = |r: isize, c: isize| (0..h).contains(&r) && (0..w).contains(&c);
    let mut counts = vec![0u64; levels * max_run];

    for r0 in 0..h {
        for c0 in 0..w {
            // a line starts where stepping backwards leaves the segment
            if inside(r0 - dr, c0 - dc) {
                continue;
            }
            let (mut r, mut c) = (r0, c0);
            let mut level = seg.get(r as usize, c as usize);
            let mut len = 0usize;
            while inside(r, c) {
                let v = seg.get(r as usize, c as usize);
                if v == level {
                    len += 1;
                } else {
                    counts[level as usize * max_run + len - 1] += 1;
                    level = v;
                    len = 1;
                }
                r += dr;
                c += dc;
            }
            counts[level as usize * max_run + len - 1] += 1;
        }
    }
    Ok(Rlm {
        levels,
        direction,
        max_run,
        counts,
        pixel_count: seg.pixels().len() as u64,
    })
}

/// SRE, LRE, GLN, RLN and run percentage.
pub fn rlm_features(rlm: &Rlm) -> [f64; 5] {
    let mut n_runs = 0.0;
    let (mut sre, mut lre) = (0.0, 0.0);
    let mut per_level = vec![0.0; rlm.levels];
    let mut per_length = vec![0.0; rlm.max_run];
    for (i, level_total) in per_level.iter_mut().enumerate() {
        for j in 1..=rlm.max_run {
            let p = rlm.runs(i, j) as f64;
            if p == 0.0 {
                continue;
            }
            let jf = j as f64;
            n_runs += p;
            sre += p / (jf * jf);
            lre += p * jf * jf;
            *level_total += p;
            per_length[j - 1] += p;
        }
    }
    debug_assert!(n_runs > 0.0, "non-empty segment always has runs");
    let gln: f64 = per_level.iter().map(|v| v * v).sum();
    let rln: f64 = per_length.iter().map(|v| v * v).sum();
    [
        sre / n_runs,
        lre / n_runs,
        gln / n_runs,
        rln / n_runs,
        n_runs / rlm.pixel_count as f64,
    ]
}

/// 20 features: the five run-length statistics for 0°, 45°, 90° and 135°,
/// direction-major. The raw segment is quantized to `levels` first.
pub fn rlm_feature_vector(seg: &GrayImage, levels: usize) -> Result<FeatureVector> {
    check_levels(levels)?;
    let q = quantize(seg, levels).map_err(|_| StatError::LevelsOutOfRange(levels))?;
    let mut values = Vec::with_capacity(20);
    for dir in Direction::ALL {
        values.extend(rlm_features(&rlm_compute(&q, dir, levels)?));
    }
    Ok(FeatureVector::new(Method::Rlm, values))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_rows() {
        let w = 8;
        let img = GrayImage::filled(w, w, 2).unwrap();
        let rlm = rlm_compute(&img, Direction::Deg0, 4).unwrap();
        assert_eq!(rlm.runs(2, w), w as u64);
        assert_eq!(rlm.counts.iter().sum::<u64>(), w as u64);
        let f = rlm_features(&rlm);
        let wf = w as f64;
        let want = [1.0 / (wf * wf), wf * wf, wf, wf, 1.0 / wf];
        for (a, b) in f.iter().zip(want) {
            assert!((a - b).abs() < 1e-12, "{f:?}");
        }
    }

    #[test]
    fn alternating_rows_are_unit_runs() {
        let w = 6;
        let img = GrayImage::from_fn(w, w, |_, c| (c % 2) as u8).unwrap();
        let rlm = rlm_compute(&img, Direction::Deg0, 2).unwrap();
        assert_eq!(rlm.runs(0, 1) + rlm.runs(1, 1), (w * w) as u64);
        let f = rlm_features(&rlm);
        assert_eq!((f[0], f[1], f[4]), (1.0, 1.0, 1.0));
    }

    #[test]
    fn diagonal_lines() {
        // 3x3 identity-like pattern: the 135° diagonal through the centre is one run of 3
        let img = GrayImage::from_fn(3, 3, |r, c| (r == c) as u8).unwrap();
        let rlm = rlm_compute(&img, Direction::Deg135, 2).unwrap();
        assert_eq!(rlm.runs(1, 3), 1);
        assert_eq!(rlm.runs(0, 2), 2);
        assert_eq!(rlm.runs(0, 1), 2);
        let rlm45 = rlm_compute(&img, Direction::Deg45, 2).unwrap();
        // every lit pixel sits on its own 45° line
        assert_eq!(rlm45.runs(1, 1), 3);
        assert_eq!(rlm45.runs(0, 1), 2);
        assert_eq!(rlm45.runs(0, 2), 2);
    }

    #[test]
    fn coverage_identity_every_direction() {
        let img = GrayImage::from_fn(7, 5, |r, c| ((r * 3 + c * c + r * c) % 5) as u8).unwrap();
        for dir in Direction::ALL {
            let rlm = rlm_compute(&img, dir, 5).unwrap();
            let covered: u64 = (0..5)
                .flat_map(|i| (1..=rlm.max_run).map(move |j| (i, j)))
                .map(|(i, j)| j as u64 * rlm.runs(i, j))
                .sum();
            assert_eq!(covered, rlm.pixel_count);
        }
    }

    #[test]
    fn feature_vector_length() {
        let img = GrayImage::from_fn(32, 32, |r, c| (r * 8 + c) as u8).unwrap();
        assert_eq!(rlm_feature_vector(&img, 16).unwrap().len(), 20);
    }

    #[test]
    fn rejects_out_of_range_pixels() {
        let img = GrayImage::filled(3, 3, 16).unwrap();
        assert!(rlm_compute(&img, Direction::Deg0, 16).is_err());
    }
}
