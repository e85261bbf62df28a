//! Write a record as a WFDB format-212 header/data pair, read it back and
//! check that detection sees the same beats. A 360 Hz copy exercises the
//! resampling path.

use ecg_ovo::qrs::{detect_r_peaks, detect_resampled};
use ecg_ovo::signal_io::{read_record, resample, synthesize_ecg, write_wfdb_record};

fn main() -> ecg_ovo::Result<()> {
    let dir = tempfile::tempdir().expect("temp dir");
    let (record, _) = synthesize_ecg(68.0, 60.0, 0.02, 7)?;

    let header = write_wfdb_record(&record, dir.path(), 200.0, 0)?;
    println!("{}", std::fs::read_to_string(&header).expect("header").trim_end());
    let back = read_record(&header, None)?;
    let worst = record
        .samples
        .iter()
        .zip(&back.samples)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("{} samples, max quantisation error {worst:.4} mV (step 0.005)", back.len());

    let (original, _) = detect_r_peaks(&record)?;
    let (decoded, _) = detect_r_peaks(&back)?;
    println!("peaks: original {}, decoded {}, identical indices: {}", original.len(), decoded.len(), original.indices == decoded.indices);

    let fast = resample(&record, 360.0)?;
    let header = write_wfdb_record(&fast, dir.path(), 200.0, 1024)?;
    let (p360, _) = detect_resampled(&read_record(&header, None)?)?;
    println!("360 Hz copy with baseline 1024: {} peaks", p360.len());
    Ok(())
}
