use super::{FbmConfig, FractalError, Result};
use crate::imaging::GrayImage;

/// One displacement `(dr, dc)` taken once per unordered pixel pair, with a
/// summed-area table of `|I(p) − I(p + offset)|` over valid anchors `p`.
struct OffsetSums {
    dr: usize,
    dc: isize,
    bin: usize,
    dist: f64,
    /// `(height + 1) x (width + 1)` prefix sums of the difference image.
    prefix: Vec<u64>,
}

/// Per-segment precomputation that answers windowed mean-absolute-difference
/// queries in `O(offsets)` per pixel.
pub struct OffsetTable {
    width: usize,
    height: usize,
    radius: usize,
    bins: usize,
    offsets: Vec<OffsetSums>,
}

/// Bin `d` collects distances in `(d − 0.5, d + 0.5]`.
fn bin_of(dist: f64) -> usize {
    (dist - 0.5).ceil() as usize
}

impl OffsetTable {
    pub fn new(seg: &GrayImage, cfg: &FbmConfig) -> Self {
        let (w, h) = (seg.width(), seg.height());
        let bins = cfg.bins();
        let reach = bins as isize;
        let mut offsets = Vec::new();
        for dr in 0..=reach {
            for dc in -reach..=reach {
                if dr == 0 && dc <= 0 {
                    continue;
                }
                let dist = ((dr * dr + dc * dc) as f64).sqrt();
                let bin = bin_of(dist);
                if bin < 1 || bin > bins || dist > cfg.max_distance as f64 + 0.5 {
                    continue;
                }
                offsets.push(Self::offset_sums(seg, dr as usize, dc, bin, dist));
            }
        }
        Self {
            width: w,
            height: h,
            radius: cfg.window_radius,
            bins,
            offsets,
        }
    }

    fn offset_sums(seg: &GrayImage, dr: usize, dc: isize, bin: usize, dist: f64) -> OffsetSums {
        let (w, h) = (seg.width(), seg.height());
        let stride = w + 1;
        let mut prefix = vec![0u64; (h + 1) * stride];
        for r in 0..h {
            let mut row_acc = 0u64;
            for c in 0..w {
                let c2 = c as isize + dc;
                let r2 = r + dr;
                if r2 < h && (0..w as isize).contains(&c2) {
                    row_acc += seg.get(r, c).abs_diff(seg.get(r2, c2 as usize)) as u64;
                }
                prefix[(r + 1) * stride + c + 1] = prefix[r * stride + c + 1] + row_acc;
            }
        }
        OffsetSums {
            dr,
            dc,
            bin,
            dist,
            prefix,
        }
    }

    /// Sum over anchors in rows `[r0, r1)` and columns `[c0, c1)`.
    fn rect_sum(&self, o: &OffsetSums, r0: usize, r1: usize, c0: usize, c1: usize) -> u64 {
        let s = self.width + 1;
        o.prefix[r1 * s + c1] + o.prefix[r0 * s + c0] - o.prefix[r0 * s + c1] - o.prefix[r1 * s + c0]
    }

    /// `(Δr, E|ΔI|)` for each non-empty bin of the window centred at (row, col),
    /// where `Δr` is the mean distance of the pairs in the bin.
    pub fn curve_at(&self, row: usize, col: usize) -> Result<Vec<(f64, f64)>> {
        if row >= self.height || col >= self.width {
            return Err(FractalError::CenterOutside {
                row,
                col,
                width: self.width,
                height: self.height,
            });
        }
        // inclusive window bounds
        let r_lo = row.saturating_sub(self.radius);
        let r_hi = (row + self.radius).min(self.height - 1);
        let c_lo = col.saturating_sub(self.radius);
        let c_hi = (col + self.radius).min(self.width - 1);

        let mut sums = vec![0u64; self.bins + 1];
        let mut counts = vec![0u64; self.bins + 1];
        let mut dist_sums = vec![0.0; self.bins + 1];
        for o in &self.offsets {
            if r_lo + o.dr > r_hi {
                continue;
            }
            let (a_c0, a_c1) = if o.dc >= 0 {
                (c_lo, c_hi as isize - o.dc)
            } else {
                ((c_lo as isize - o.dc) as usize, c_hi as isize)
            };
            if a_c1 < a_c0 as isize {
                continue;
            }
            let (r0, r1) = (r_lo, r_hi - o.dr + 1);
            let (c0, c1) = (a_c0, a_c1 as usize + 1);
            sums[o.bin] += self.rect_sum(o, r0, r1, c0, c1);
            let n = ((r1 - r0) * (c1 - c0)) as u64;
            counts[o.bin] += n;
            dist_sums[o.bin] += n as f64 * o.dist;
        }
        let curve: Vec<(f64, f64)> = (1..=self.bins)
            .filter(|&d| counts[d] > 0)
            .map(|d| (dist_sums[d] / counts[d] as f64, sums[d] as f64 / counts[d] as f64))
            .collect();
        if curve.len() < 2 {
            return Err(FractalError::TooFewPoints(curve.len()));
        }
        Ok(curve)
    }
}

/// Mean absolute difference of pixel pairs per integer distance bin, over
/// the window of radius `cfg.window_radius` around `center` (clipped).
/// Bin `d` holds pairs at distances in `(d − 0.5, d + 0.5]`; its `Δr` is the
/// mean distance of those pairs.
pub fn mean_abs_diff_curve(seg: &GrayImage, center: (usize, usize), cfg: &FbmConfig) -> Result<Vec<(f64, f64)>> {
    cfg.validate()?;
    OffsetTable::new(seg, cfg).curve_at(center.0, center.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Enumerates every unordered pair of window pixels.
    fn oracle_curve(seg: &GrayImage, center: (usize, usize), cfg: &FbmConfig) -> Vec<(f64, f64)> {
        let rad = cfg.window_radius as isize;
        let (h, w) = (seg.height() as isize, seg.width() as isize);
        let mut px = Vec::new();
        for r in (center.0 as isize - rad)..=(center.0 as isize + rad) {
            for c in (center.1 as isize - rad)..=(center.1 as isize + rad) {
                if (0..h).contains(&r) && (0..w).contains(&c) {
                    px.push((r, c, seg.get(r as usize, c as usize) as f64));
                }
            }
        }
        let bins = cfg.distance_bins.min(cfg.max_distance);
        let mut sum = vec![0.0; bins + 1];
        let mut cnt = vec![0.0; bins + 1];
        let mut dsum = vec![0.0; bins + 1];
        for a in 0..px.len() {
            for b in a + 1..px.len() {
                let d = (((px[a].0 - px[b].0).pow(2) + (px[a].1 - px[b].1).pow(2)) as f64).sqrt();
                for k in 1..=bins {
                    if d > k as f64 - 0.5 && d <= k as f64 + 0.5 && d <= cfg.max_distance as f64 + 0.5 {
                        sum[k] += (px[a].2 - px[b].2).abs();
                        cnt[k] += 1.0;
                        dsum[k] += d;
                    }
                }
            }
        }
        (1..=bins)
            .filter(|&k| cnt[k] > 0.0)
            .map(|k| (dsum[k] / cnt[k], sum[k] / cnt[k]))
            .collect()
    }

    fn assert_close(a: &[(f64, f64)], b: &[(f64, f64)]) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x.0 - y.0).abs() < 1e-9);
            assert!((x.1 - y.1).abs() < 1e-9, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn constant_segment_is_zero() {
        let img = GrayImage::filled(20, 20, 40).unwrap();
        let curve = mean_abs_diff_curve(&img, (10, 10), &FbmConfig::default()).unwrap();
        assert_eq!(curve.len(), 4);
        assert!(curve.iter().all(|&(_, e)| e == 0.0));
    }

    #[test]
    fn checkerboard_matches_enumeration() {
        let img = GrayImage::from_fn(32, 32, |r, c| if (r + c) % 2 == 0 { 0 } else { 255 }).unwrap();
        let cfg = FbmConfig::default();
        for center in [(16, 16), (0, 0), (3, 30)] {
            let curve = mean_abs_diff_curve(&img, center, &cfg).unwrap();
            assert_close(&curve, &oracle_curve(&img, center, &cfg));
        }
        // interior window: bin 1 has 2*(17*16) axis pairs at 255 and 2*16*16 diagonal pairs at 0
        let curve = mean_abs_diff_curve(&img, (16, 16), &cfg).unwrap();
        let axis = 2.0 * 17.0 * 16.0;
        let diag = 2.0 * 16.0 * 16.0;
        assert!((curve[0].1 - 255.0 * axis / (axis + diag)).abs() < 1e-9);
    }

    #[test]
    fn ramp_grows_with_distance() {
        let img = GrayImage::from_fn(32, 32, |r, _| (r * 4) as u8).unwrap();
        let cfg = FbmConfig::default();
        let curve = mean_abs_diff_curve(&img, (16, 16), &cfg).unwrap();
        assert_close(&curve, &oracle_curve(&img, (16, 16), &cfg));
        for pair in curve.windows(2) {
            assert!(pair[1].1 > pair[0].1);
        }
        // roughly proportional to the bin distance
        assert!((curve[3].1 / curve[0].1 - 4.0).abs() < 1.5);
    }

    #[test]
    fn center_must_be_inside() {
        let img = GrayImage::filled(8, 8, 1).unwrap();
        assert!(matches!(
            mean_abs_diff_curve(&img, (8, 0), &FbmConfig::default()),
            Err(FractalError::CenterOutside { .. })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn matches_enumeration_oracle(
            seed in any::<u64>(),
            w in 3usize..14,
            h in 3usize..14,
            radius in 2usize..6,
            max_distance in 2usize..5,
            bins in 2usize..6,
        ) {
            let max_distance = max_distance.min(radius);
            let cfg = FbmConfig { window_radius: radius, max_distance, distance_bins: bins, flat_as_plane: true };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let img = GrayImage::from_fn(w, h, |_, _| rng.random()).unwrap();
            let center = (rng.random_range(0..h), rng.random_range(0..w));
            let oracle = oracle_curve(&img, center, &cfg);
            match mean_abs_diff_curve(&img, center, &cfg) {
                Ok(curve) => assert_close(&curve, &oracle),
                Err(FractalError::TooFewPoints(n)) => prop_assert_eq!(n, oracle.len()),
                Err(e) => prop_assert!(false, "{e}"),
            }
        }
    }
}
