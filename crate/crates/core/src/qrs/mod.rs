//! Pan-Tompkins QRS detection: filter cascade, stage traces, adaptive
//! dual-threshold R-peak search and beat matching against a reference.

mod detector;
pub mod filters;
mod matching;
mod trace;

pub use detector::{detect_r_peaks, detect_resampled, RPeakSeries, ThresholdSnapshot};
pub use filters::{band_pass, derivative, moving_window_integrate, square};
pub use matching::{match_beats, BeatMatch, DEFAULT_MATCH_TOLERANCE_S};
pub use trace::{StageDelays, StageTrace};
