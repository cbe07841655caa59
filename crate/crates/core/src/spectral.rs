//! Shared helpers for FFT-based stationary field synthesis.

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

/// In-place 2-D FFT of a row-major `rows x cols` buffer (unnormalized).
pub(crate) fn fft2(buf: &mut [Complex64], rows: usize, cols: usize, direction: FftDirection) {
    let mut planner = FftPlanner::new();
    let row_fft = planner.plan_fft(cols, direction);
    for row in buf.chunks_exact_mut(cols) {
        row_fft.process(row);
    }
    let col_fft = planner.plan_fft(rows, direction);
    let mut column = vec![Complex64::default(); rows];
    for c in 0..cols {
        for r in 0..rows {
            column[r] = buf[r * cols + c];
        }
        col_fft.process(&mut column);
        for r in 0..rows {
            buf[r * cols + c] = column[r];
        }
    }
}

/// Signed integer frequency of DFT bin `k` out of `n`.
#[inline]
pub(crate) fn signed_freq(k: usize, n: usize) -> f64 {
    if k <= n / 2 {
        k as f64
    } else {
        k as f64 - n as f64
    }
}

/// Draws a real stationary field on a `rows x cols` torus whose covariance
/// has eigenvalues `density(u, v)` at angular frequencies (u, v).
///
/// `density` must be even in (u, v) and non-negative.
pub(crate) fn sample_stationary<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    rng: &mut R,
    density: impl Fn(f64, f64) -> f64,
) -> Vec<f64> {
    let n = rows * cols;
    let mut buf: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.sample(StandardNormal), 0.0))
        .collect();
    fft2(&mut buf, rows, cols, FftDirection::Forward);
    for r in 0..rows {
        let u = 2.0 * std::f64::consts::PI * signed_freq(r, rows) / rows as f64;
        for c in 0..cols {
            let v = 2.0 * std::f64::consts::PI * signed_freq(c, cols) / cols as f64;
            buf[r * cols + c] *= density(u, v).max(0.0).sqrt();
        }
    }
    fft2(&mut buf, rows, cols, FftDirection::Inverse);
    buf.iter().map(|z| z.re / n as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn fft_roundtrip() {
        let mut buf: Vec<Complex64> = (0..12).map(|i| Complex64::new(i as f64, -(i as f64) / 3.0)).collect();
        let orig = buf.clone();
        fft2(&mut buf, 3, 4, FftDirection::Forward);
        fft2(&mut buf, 3, 4, FftDirection::Inverse);
        for (a, b) in buf.iter().zip(&orig) {
            assert!((a / 12.0 - b).norm() < 1e-12);
        }
    }

    #[test]
    fn flat_density_gives_unit_variance_noise() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let x = sample_stationary(64, 64, &mut rng, |_, _| 1.0);
        let mean = x.iter().sum::<f64>() / x.len() as f64;
        let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / x.len() as f64;
        assert!((var - 1.0).abs() < 0.08, "var {var}");
    }
}
