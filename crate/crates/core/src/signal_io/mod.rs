//! ECG records and everything that gets samples into or out of them.

mod csv;
mod resample;
mod segment;
mod synth;
pub mod wfdb;

pub use self::csv::{read_annotations, read_csv_record, write_annotations, write_csv_record};
pub use self::resample::resample;
pub use self::segment::{segment, SegmentSet, DEFAULT_HOP_S, DEFAULT_WINDOW_S, MIN_WINDOW_S};
pub use self::synth::{synthesize_ecg, synthesize_ecg_with, SynthParams, SYNTH_FS};
pub use self::wfdb::{read_wfdb_record, write_wfdb_record};

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rate every record is brought to before QRS detection.
pub const CANONICAL_FS: f64 = 200.0;

/// A single-lead, uniformly sampled ECG recording in millivolts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EcgRecord {
    pub name: String,
    pub fs: f64,
    pub samples: Vec<f64>,
    /// Ground-truth beat times in seconds, strictly increasing.
    pub annotations: Option<Vec<f64>>,
}

impl EcgRecord {
    pub fn new(name: impl Into<String>, fs: f64, samples: Vec<f64>) -> Result<Self> {
        if !(fs > 0.0 && fs.is_finite()) {
            return Err(Error::invalid(format!("sampling rate must be positive, got {fs}")));
        }
        Ok(EcgRecord {
            name: name.into(),
            fs,
            samples,
            annotations: None,
        })
    }

    /// Attaches ground-truth beat times, checking ordering and range.
    pub fn with_annotations(mut self, times: Vec<f64>) -> Result<Self> {
        let end = self.duration_s();
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("annotation times must be strictly increasing"));
        }
        if times.iter().any(|&t| !(0.0..=end).contains(&t)) {
            return Err(Error::invalid(format!(
                "annotation outside record span [0, {end}]"
            )));
        }
        self.annotations = Some(times);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.fs
    }
}

/// Reads a record from either a `.hea` WFDB header or a CSV sample file.
pub fn read_record(path: &Path, fs_override: Option<f64>) -> Result<EcgRecord> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("hea") => {
            let mut rec = read_wfdb_record(path)?;
            if let Some(fs) = fs_override {
                rec.fs = fs;
            }
            Ok(rec)
        }
        _ => read_csv_record(path, fs_override),
    }
}
