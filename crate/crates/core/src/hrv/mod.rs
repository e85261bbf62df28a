//! RR intervals, the 15-slot time-domain HRV feature vector, labelled
//! feature matrices and z-score normalisation.

mod features;
pub(crate) mod matrix;
mod normalizer;
pub mod synthetic;

pub use features::{extract_features, FeatureVector, FEATURE_NAMES, MIN_RR_COUNT, N_FEATURES};
pub use matrix::{build_matrix, read_feature_csv, read_feature_rows, write_feature_csv, FeatureMatrix};
pub use normalizer::{apply_normalizer, fit_normalizer, Normalizer};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qrs::RPeakSeries;

/// Version tag of the feature slot order. Bumped whenever a slot changes.
pub const FEATURE_VERSION: &str = "hrv-td15-v1";

/// Physiological RR bounds in seconds (15-300 bpm). Bounds are inclusive
/// up to a 1 ns slack that absorbs rounding in time subtraction.
pub const RR_MIN_S: f64 = 0.2;
pub const RR_MAX_S: f64 = 4.0;
const RR_SLACK_S: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RrSeries {
    /// Seconds, each within the physiological bounds.
    pub values: Vec<f64>,
    /// Intervals dropped by the bounds check.
    pub removed: usize,
}

impl RrSeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// rr(i) = r(i+1) - r(i), then out-of-range intervals are removed.
pub fn rr_from_times(times: &[f64]) -> Result<RrSeries> {
    if times.len() < 2 {
        return Err(Error::Coverage(format!(
            "RR series needs at least 2 peaks, got {}",
            times.len()
        )));
    }
    let raw: Vec<f64> = times.windows(2).map(|w| w[1] - w[0]).collect();
    let total = raw.len();
    let values: Vec<f64> = raw
        .into_iter()
        .filter(|v| (RR_MIN_S - RR_SLACK_S..=RR_MAX_S + RR_SLACK_S).contains(v))
        .collect();
    Ok(RrSeries {
        removed: total - values.len(),
        values,
    })
}

pub fn rr_intervals(peaks: &RPeakSeries) -> Result<RrSeries> {
    rr_from_times(&peaks.times)
}
