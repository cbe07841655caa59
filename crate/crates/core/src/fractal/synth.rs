use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{FractalError, Result};
use crate::imaging::RealImage;
use crate::spectral;

/// Alias images summed explicitly on each axis before the tail integral.
const ALIAS_REACH: i32 = 4;

/// Continuous power law `|w|^-beta` folded onto the sampling lattice:
/// explicit images within `ALIAS_REACH` plus an integral for the rest.
fn aliased_power(u: f64, v: f64, beta: f64) -> f64 {
    let tau = 2.0 * std::f64::consts::PI;
    let mut s = 0.0;
    for a in -ALIAS_REACH..=ALIAS_REACH {
        for b in -ALIAS_REACH..=ALIAS_REACH {
            let (x, y) = (u + tau * a as f64, v + tau * b as f64);
            let f2 = x * x + y * y;
            if f2 > 0.0 {
                s += f2.powf(-beta / 2.0);
            }
        }
    }
    // remaining images approximated by the integral of |x|^-beta outside
    // the disc of equal area to the summed square of cells
    let radius = tau * (ALIAS_REACH as f64 + 0.5) * 2.0 / std::f64::consts::PI.sqrt();
    s + tau * radius.powf(2.0 - beta) / ((beta - 2.0) * tau * tau)
}

/// Fractional Brownian surface by spectral synthesis on a `size x size`
/// torus. The power spectrum is `|w|^-(2H + 2)` folded onto the lattice
/// (so small-lag increments follow the continuous power law) with the mean
/// removed.
pub fn synthesize_fbm(size: usize, hurst: f64, seed: u64) -> Result<RealImage> {
    if !(hurst > 0.0 && hurst < 1.0) {
        return Err(FractalError::InvalidConfig(format!("Hurst exponent {hurst} must lie in (0, 1)")));
    }
    if size < 4 {
        return Err(FractalError::InvalidConfig(format!("surface size {size} below 4")));
    }
    let beta = 2.0 * hurst + 2.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = spectral::sample_stationary(size, size, &mut rng, |u, v| {
        if u == 0.0 && v == 0.0 {
            0.0
        } else {
            aliased_power(u, v, beta)
        }
    });
    Ok(RealImage {
        width: size,
        height: size,
        data,
    })
}
