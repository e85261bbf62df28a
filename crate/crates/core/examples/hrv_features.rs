//! RR intervals and the fifteen time-domain HRV features for a calm and a
//! jittery synthetic rhythm.

use ecg_ovo::hrv::{extract_features, rr_intervals, FEATURE_NAMES};
use ecg_ovo::qrs::detect_r_peaks;
use ecg_ovo::signal_io::{synthesize_ecg_with, SynthParams};

fn main() -> ecg_ovo::Result<()> {
    let mut columns = Vec::new();
    for (bpm, rr_sd) in [(62.0, 0.01), (95.0, 0.08)] {
        let mut params = SynthParams::new(bpm, 300.0, 0.02, 11);
        params.rr_sd = rr_sd;
        let (record, _) = synthesize_ecg_with(&params)?;
        let (peaks, _) = detect_r_peaks(&record)?;
        let rr = rr_intervals(&peaks)?;
        println!("{bpm} bpm, rr sd {rr_sd}: {} peaks, {} intervals, {} removed", peaks.len(), rr.len(), rr.removed);
        columns.push(extract_features(&rr)?);
    }
    println!("{:<18}{:>12}{:>12}", "feature", "calm", "jittery");
    for (i, name) in FEATURE_NAMES.iter().enumerate() {
        println!("{name:<18}{:>12.5}{:>12.5}", columns[0].0[i], columns[1].0[i]);
    }
    Ok(())
}
