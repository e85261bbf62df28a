use super::EcgRecord;
use crate::error::{Error, Result};

pub const DEFAULT_WINDOW_S: f64 = 300.0;
pub const DEFAULT_HOP_S: f64 = 300.0;
pub const MIN_WINDOW_S: f64 = 30.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentSet {
    pub parent: String,
    pub window_s: f64,
    pub hop_s: f64,
    pub segments: Vec<EcgRecord>,
}

impl SegmentSet {
    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }
}

/// Cuts `record` into windows of `window_s` seconds starting every `hop_s`
/// seconds. A tail shorter than a window is dropped. Annotations falling
/// inside a window are re-based to the window start.
pub fn segment(record: &EcgRecord, window_s: f64, hop_s: f64) -> Result<SegmentSet> {
    if !(window_s >= MIN_WINDOW_S) {
        return Err(Error::invalid(format!(
            "segment window must be at least {MIN_WINDOW_S} s, got {window_s}"
        )));
    }
    if !(hop_s > 0.0 && hop_s <= window_s) {
        return Err(Error::invalid(format!("hop must be in (0, window], got {hop_s}")));
    }
    let win = (window_s * record.fs).round() as usize;
    let hop = ((hop_s * record.fs).round() as usize).max(1);
    if record.len() < win {
        return Err(Error::Coverage(format!(
            "record {} ({:.1} s) is shorter than one {window_s} s window",
            record.name,
            record.duration_s()
        )));
    }

    let mut segments = Vec::new();
    let mut start = 0usize;
    while start + win <= record.len() {
        let t0 = start as f64 / record.fs;
        let t1 = (start + win) as f64 / record.fs;
        let annotations = record.annotations.as_ref().map(|a| {
            a.iter()
                .filter(|&&t| t >= t0 && t < t1)
                .map(|&t| t - t0)
                .collect()
        });
        segments.push(EcgRecord {
            name: format!("{}_s{:03}", record.name, segments.len()),
            fs: record.fs,
            samples: record.samples[start..start + win].to_vec(),
            annotations,
        });
        start += hop;
    }
    Ok(SegmentSet {
        parent: record.name.clone(),
        window_s,
        hop_s,
        segments,
    })
}
