//! Detect R peaks in a noisy synthetic ECG and score them against the
//! generator's beat times.
//!
//!     cargo run --example detect_synthetic -- 90 0.05

use ecg_ovo::qrs::{detect_r_peaks, match_beats, DEFAULT_MATCH_TOLERANCE_S};
use ecg_ovo::signal_io::synthesize_ecg;

fn main() -> ecg_ovo::Result<()> {
    let mut args = std::env::args().skip(1);
    let bpm: f64 = args.next().map_or(75.0, |a| a.parse().expect("bpm"));
    let noise: f64 = args.next().map_or(0.05, |a| a.parse().expect("noise sd in mV"));

    let (record, truth) = synthesize_ecg(bpm, 120.0, noise, 42)?;
    let (peaks, _) = detect_r_peaks(&record)?;
    let score = match_beats(&peaks.times, &truth, DEFAULT_MATCH_TOLERANCE_S);

    println!("{bpm} bpm, noise sd {noise} mV, {} s at {} Hz", record.duration_s(), record.fs);
    println!("true beats {}, detected {}", truth.len(), peaks.len());
    println!(
        "TP {} FP {} FN {}  sensitivity {:.4}  +P {:.4}",
        score.true_positives,
        score.false_positives,
        score.false_negatives,
        score.sensitivity(),
        score.positive_predictivity()
    );
    println!("first peaks (s): {:?}", &peaks.times[..peaks.len().min(5)]);
    if let Some(last) = peaks.threshold_log.last() {
        println!("final SPKI {:.4} NPKI {:.4} threshold {:.4}", last.spki, last.npki, last.threshold);
    }
    Ok(())
}
