//! Integer-coefficient filter stages of the Pan-Tompkins cascade, designed
//! for 200 Hz input. Every stage starts from zero state; history before
//! the first sample reads as zero.

use crate::error::{Error, Result};

/// Samples of delay introduced by [`low_pass`].
pub const LOW_PASS_DELAY: usize = 5;
/// Samples of delay introduced by [`high_pass`].
pub const HIGH_PASS_DELAY: usize = 16;
/// Samples of delay introduced by [`derivative`].
pub const DERIVATIVE_DELAY: usize = 2;
/// High-pass output samples still inside the filter's start-up transient.
pub const HIGH_PASS_WARMUP: usize = 32;
/// 150 ms at 200 Hz.
pub const DEFAULT_MWI_WIDTH: usize = 30;

#[inline]
fn at(x: &[f64], n: usize, lag: usize) -> f64 {
    if n >= lag {
        x[n - lag]
    } else {
        0.0
    }
}

/// y(n) = 2y(n-1) - y(n-2) + x(n) - 2x(n-6) + x(n-12). DC gain 36.
pub fn low_pass(x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; x.len()];
    for n in 0..x.len() {
        y[n] = 2.0 * at(&y, n, 1) - at(&y, n, 2) + x[n] - 2.0 * at(x, n, 6) + at(x, n, 12);
    }
    y
}

/// Running sum p(n) = p(n-1) + x(n) - x(n-32), then y(n) = 32x(n-16) - p(n):
/// an all-pass delay minus a 32-tap box low-pass, so DC is rejected exactly.
pub fn high_pass(x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; x.len()];
    let mut p = 0.0;
    for n in 0..x.len() {
        p += x[n] - at(x, n, 32);
        y[n] = 32.0 * at(x, n, 16) - p;
    }
    y
}

/// Low-pass followed by high-pass; passband roughly 5-15 Hz at 200 Hz.
pub fn band_pass(x: &[f64]) -> Vec<f64> {
    high_pass(&low_pass(x))
}

/// Five-point derivative y(n) = (2x(n) + x(n-1) - x(n-3) - 2x(n-4)) / 8.
pub fn derivative(x: &[f64]) -> Result<Vec<f64>> {
    if x.len() < 5 {
        return Err(Error::invalid(format!(
            "derivative needs at least 5 samples, got {}",
            x.len()
        )));
    }
    Ok((0..x.len())
        .map(|n| (2.0 * x[n] + at(x, n, 1) - at(x, n, 3) - 2.0 * at(x, n, 4)) / 8.0)
        .collect())
}

pub fn square(x: &[f64]) -> Vec<f64> {
    x.iter().map(|v| v * v).collect()
}

/// Trailing mean over `width` samples, zeros before the start.
pub fn moving_window_integrate(x: &[f64], width: usize) -> Result<Vec<f64>> {
    if width == 0 {
        return Err(Error::invalid("integration width must be at least 1"));
    }
    let w = width as f64;
    // exact windowed sums; a running sum would drift over long records
    let mut out = Vec::with_capacity(x.len());
    for n in 0..x.len() {
        let lo = (n + 1).saturating_sub(width);
        out.push(x[lo..=n].iter().sum::<f64>() / w);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn impulse(n: usize) -> Vec<f64> {
        let mut x = vec![0.0; n];
        x[0] = 1.0;
        x
    }

    // Direct evaluation of the recursion with explicit bounds checks.
    fn low_pass_oracle(x: &[f64]) -> Vec<f64> {
        let get = |v: &[f64], i: isize| if i < 0 { 0.0 } else { v[i as usize] };
        let mut y: Vec<f64> = Vec::new();
        for n in 0..x.len() as isize {
            let v = 2.0 * get(&y, n - 1) - get(&y, n - 2) + get(x, n) - 2.0 * get(x, n - 6) + get(x, n - 12);
            y.push(v);
        }
        y
    }

    #[test]
    fn zero_in_zero_out() {
        assert!(band_pass(&vec![0.0; 100]).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn low_pass_impulse_is_triangle() {
        let y = low_pass(&impulse(16));
        assert_eq!(y, low_pass_oracle(&impulse(16)));
        assert_eq!(&y[..13], &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 5.0, 4.0, 3.0, 2.0, 1.0, 0.0, 0.0]);
        assert_eq!(y.iter().sum::<f64>(), 36.0);
    }

    #[test]
    fn high_pass_rejects_dc() {
        let y = high_pass(&vec![1.0; 100]);
        assert!(y[..32].iter().any(|&v| v != 0.0));
        assert!(y[32..].iter().all(|&v| v == 0.0), "{:?}", &y[30..40]);
        let y = band_pass(&vec![1.0; 200]);
        assert!(y[50..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn derivative_cases() {
        let y = derivative(&[3.0; 10]).unwrap();
        assert!(y[4..].iter().all(|&v| v == 0.0));
        // (2n + (n-1) - (n-3) - 2(n-4)) / 8 = 10/8
        let ramp: Vec<f64> = (0..20).map(|n| n as f64).collect();
        let y = derivative(&ramp).unwrap();
        assert!(y[4..].iter().all(|&v| v == 1.25));
        let y = derivative(&[0.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(y[4], 0.25);
        assert!(derivative(&[1.0; 4]).is_err());
    }

    #[test]
    fn square_cases() {
        assert_eq!(square(&[-2.0, 0.0, 0.5]), vec![4.0, 0.0, 0.25]);
    }

    #[test]
    fn integrate_cases() {
        let y = moving_window_integrate(&vec![1.0; 60], 30).unwrap();
        assert!(y[29..].iter().all(|&v| (v - 1.0).abs() < 1e-15));
        assert!(y[28] < 1.0);
        let y = moving_window_integrate(&impulse(40), 30).unwrap();
        assert!(y[..30].iter().all(|&v| v == 1.0 / 30.0));
        assert!(y[30..].iter().all(|&v| v == 0.0));
        assert_eq!(moving_window_integrate(&[1.0, 2.0, 3.0], 2).unwrap(), vec![0.5, 1.5, 2.5]);
        assert!(moving_window_integrate(&[1.0], 0).is_err());
    }
}
