//! ECG rhythm classification built from a Pan-Tompkins QRS detector, a
//! 15-slot time-domain HRV feature vector, small multilayer perceptrons
//! trained with scaled conjugate gradient, and a one-vs-one ensemble that
//! fuses ten pair networks through per-class flag counts.
//!
//! The crate is organised by pipeline stage:
//!
//! - [`signal_io`]: ECG records, CSV / WFDB format 212 readers and writers,
//!   resampling, segmentation and a synthetic ECG generator.
//! - [`qrs`]: the filter cascade, stage traces and adaptive-threshold
//!   R-peak detection.
//! - [`hrv`]: RR intervals, feature extraction, feature matrices and
//!   z-score normalisation.
//! - [`neural`]: topologies, forward/backward passes, the SCG trainer and
//!   the model file format.
//! - [`ovo`]: the condition table, flag voting, pair-network banks and the
//!   five-class baseline.
//! - [`eval`]: accuracy reports, table rendering and the command layer
//!   behind the `ecg-ovo` binary.
//!
//! ## Examples
//!
//! Each capability has a runnable example under `examples/`:
//!
//! ```text
//! detect_synthetic    R peaks on a noisy synthetic ECG, scored against truth
//! wfdb_roundtrip      format 212 write/read and detection at 360 Hz
//! stage_traces        per-stage detector waveforms as CSV
//! hrv_features        the fifteen features for two rhythms
//! scg_training        every network kind trained with validation stopping
//! pairwise_ensemble   flag voting, ties and the pairwise accuracy table
//! compare_methods     baselines against pair banks for all kinds
//! end_to_end          records to features to models to reports
//! ```
//!
//! ```bash
//! cargo run --release --example compare_methods
//! ```

pub mod error;
pub mod eval;
pub mod hrv;
pub mod neural;
pub mod ovo;
pub mod qrs;
pub mod rng;
pub mod signal_io;

pub use error::{Error, Result};
