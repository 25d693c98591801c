//! Log-space helpers.

use libm::erfc;
use statrs::function::factorial::ln_factorial;

pub const LN_10: f64 = std::f64::consts::LN_10;

/// ln C(n, k).
pub fn ln_choose(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// ln Σ exp(xᵢ), stable for large negative inputs.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Natural log of the standard normal upper tail P(Z > z).
///
/// Past z = 30 `erfc` would underflow, so the asymptotic Mills-ratio series
/// takes over; its truncation error there is below 2e-12.
pub fn ln_normal_sf(z: f64) -> f64 {
    if z < 30.0 {
        (0.5 * erfc(z / std::f64::consts::SQRT_2)).ln()
    } else {
        let z2 = z * z;
        let ln_pdf = -0.5 * z2 - 0.5 * (2.0 * std::f64::consts::PI).ln();
        let series =
            1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2) + 105.0 / (z2 * z2 * z2 * z2);
        ln_pdf - z.ln() + series.ln()
    }
}
