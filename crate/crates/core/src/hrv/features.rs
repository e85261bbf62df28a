use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::RrSeries;
use crate::error::{Error, Result};

pub const N_FEATURES: usize = 15;
/// Shortest cleaned RR series a segment may contribute.
pub const MIN_RR_COUNT: usize = 30;
/// 7.8125 ms histogram bins for the triangular index.
const HISTOGRAM_BINS_PER_S: f64 = 128.0;

/// Slot order of [`FeatureVector`]. All RR statistics are in seconds,
/// heart-rate statistics in beats per minute.
pub const FEATURE_NAMES: [&str; N_FEATURES] = [
    "mean_rr",
    "median_rr",
    "sdnn",
    "rmssd",
    "sdsd",
    "nn50",
    "pnn50",
    "min_rr",
    "max_rr",
    "range_rr",
    "cv",
    "mean_hr",
    "sd_hr",
    "triangular_index",
    "mad_rr",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector(pub [f64; N_FEATURES]);

impl FeatureVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        FEATURE_NAMES.iter().position(|n| *n == name).map(|i| self.0[i])
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Population standard deviation.
fn sd(v: &[f64]) -> f64 {
    let m = mean(v);
    (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64).sqrt()
}

fn median_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

/// Computes the 15 time-domain features of a cleaned RR series.
pub fn extract_features(rr: &RrSeries) -> Result<FeatureVector> {
    let x = &rr.values;
    if x.len() < MIN_RR_COUNT {
        return Err(Error::Coverage(format!(
            "{} RR intervals, at least {MIN_RR_COUNT} required",
            x.len()
        )));
    }
    if x.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::invalid("RR intervals must be finite and positive"));
    }

    let ordered = sorted(x);
    let mean_rr = mean(x);
    let median_rr = median_sorted(&ordered);
    let sdnn = sd(x);

    let diffs: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let rmssd = (diffs.iter().map(|d| d * d).sum::<f64>() / diffs.len() as f64).sqrt();
    let sdsd = sd(&diffs);
    let nn50 = diffs.iter().filter(|d| d.abs() > 0.05).count() as f64;
    let pnn50 = 100.0 * nn50 / diffs.len() as f64;

    let min_rr = ordered[0];
    let max_rr = ordered[ordered.len() - 1];

    let hr: Vec<f64> = x.iter().map(|v| 60.0 / v).collect();

    let mut bins: HashMap<i64, usize> = HashMap::new();
    for v in x {
        *bins.entry((v * HISTOGRAM_BINS_PER_S).floor() as i64).or_default() += 1;
    }
    let modal = bins.values().copied().max().unwrap_or(1);

    let deviations = sorted(&x.iter().map(|v| (v - median_rr).abs()).collect::<Vec<_>>());

    Ok(FeatureVector([
        mean_rr,
        median_rr,
        sdnn,
        rmssd,
        sdsd,
        nn50,
        pnn50,
        min_rr,
        max_rr,
        max_rr - min_rr,
        sdnn / mean_rr,
        60.0 / mean_rr,
        sd(&hr),
        x.len() as f64 / modal as f64,
        median_sorted(&deviations),
    ]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(v: Vec<f64>) -> RrSeries {
        RrSeries { values: v, removed: 0 }
    }

    #[test]
    fn constant_series() {
        let f = extract_features(&series(vec![1.0; 60])).unwrap();
        assert_eq!(f.get("mean_rr"), Some(1.0));
        assert_eq!(f.get("sdnn"), Some(0.0));
        assert_eq!(f.get("rmssd"), Some(0.0));
        assert_eq!(f.get("pnn50"), Some(0.0));
        assert_eq!(f.get("mean_hr"), Some(60.0));
        assert_eq!(f.get("triangular_index"), Some(1.0));
        assert_eq!(f.get("mad_rr"), Some(0.0));
    }

    #[test]
    fn alternating_series() {
        let v: Vec<f64> = (0..60).map(|i| if i % 2 == 0 { 0.8 } else { 1.2 }).collect();
        let f = extract_features(&series(v)).unwrap();
        assert!((f.get("mean_rr").unwrap() - 1.0).abs() < 1e-12);
        assert!((f.get("rmssd").unwrap() - 0.4).abs() < 1e-12);
        assert_eq!(f.get("nn50"), Some(59.0));
        assert_eq!(f.get("pnn50"), Some(100.0));
        assert!((f.get("sdnn").unwrap() - 0.2).abs() < 1e-12);
        assert!((f.get("median_rr").unwrap() - 1.0).abs() < 1e-12);
        assert!((f.get("range_rr").unwrap() - 0.4).abs() < 1e-12);
        assert_eq!(f.get("triangular_index"), Some(2.0));
    }

    #[test]
    fn too_short_rejected() {
        assert!(matches!(extract_features(&series(vec![1.0; 29])), Err(Error::Coverage(_))));
    }

    #[test]
    fn names_are_unique() {
        let mut n = FEATURE_NAMES.to_vec();
        n.sort();
        n.dedup();
        assert_eq!(n.len(), N_FEATURES);
    }
}
