use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::filters::{self, DEFAULT_MWI_WIDTH};
use crate::error::{Error, Result};

/// Group delay of each stage in samples at 200 Hz, implied by filter order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageDelays {
    pub band_pass: f64,
    pub derivative: f64,
    pub integration: f64,
}

impl StageDelays {
    pub fn for_width(width: usize) -> Self {
        StageDelays {
            band_pass: (filters::LOW_PASS_DELAY + filters::HIGH_PASS_DELAY) as f64,
            derivative: filters::DERIVATIVE_DELAY as f64,
            integration: (width as f64 - 1.0) / 2.0,
        }
    }

    /// Delay from the raw signal to the integrated waveform.
    pub fn total(&self) -> f64 {
        self.band_pass + self.derivative + self.integration
    }
}

/// Every intermediate waveform of the cascade, all the same length as the
/// input record. `bandpassed` is computed on the raw signal minus its first
/// sample so that a baseline offset does not excite a start-up transient.
#[derive(Debug, Clone, PartialEq)]
pub struct StageTrace {
    pub raw: Vec<f64>,
    pub bandpassed: Vec<f64>,
    pub derivative: Vec<f64>,
    pub squared: Vec<f64>,
    pub integrated: Vec<f64>,
    pub delays: StageDelays,
}

impl StageTrace {
    pub fn compute(raw: &[f64]) -> Result<Self> {
        let x0 = raw.first().copied().unwrap_or(0.0);
        let centred: Vec<f64> = raw.iter().map(|v| v - x0).collect();
        let bandpassed = filters::band_pass(&centred);
        let derivative = filters::derivative(&bandpassed)?;
        let squared = filters::square(&derivative);
        let integrated = filters::moving_window_integrate(&squared, DEFAULT_MWI_WIDTH)?;
        Ok(StageTrace {
            raw: raw.to_vec(),
            bandpassed,
            derivative,
            squared,
            integrated,
            delays: StageDelays::for_width(DEFAULT_MWI_WIDTH),
        })
    }

    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }

    /// CSV with columns `n,raw,bandpassed,derivative,squared,integrated,is_peak`.
    pub fn to_csv(&self, peak_indices: &[usize]) -> String {
        let mut out = String::with_capacity(self.len() * 64);
        out.push_str("n,raw,bandpassed,derivative,squared,integrated,is_peak\n");
        let mut peaks = peak_indices.iter().peekable();
        for n in 0..self.len() {
            let is_peak = if peaks.peek() == Some(&&n) {
                peaks.next();
                1
            } else {
                0
            };
            writeln!(
                out,
                "{n},{},{},{},{},{},{is_peak}",
                self.raw[n], self.bandpassed[n], self.derivative[n], self.squared[n], self.integrated[n]
            )
            .unwrap();
        }
        out
    }

    pub fn write_csv(&self, peak_indices: &[usize], path: &Path) -> Result<()> {
        fs::write(path, self.to_csv(peak_indices)).map_err(|e| Error::io(path, e))
    }
}
