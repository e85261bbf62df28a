//! Dump every detector stage (raw, band-pass, derivative, squared,
//! integrated) with peak markers as CSV for plotting.
//!
//!     cargo run --example stage_traces -- traces.csv

use ecg_ovo::qrs::detect_r_peaks;
use ecg_ovo::signal_io::synthesize_ecg;

fn main() -> ecg_ovo::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "stage_traces.csv".into());
    let (record, _) = synthesize_ecg(80.0, 10.0, 0.03, 3)?;
    let (peaks, trace) = detect_r_peaks(&record)?;
    trace.write_csv(&peaks.indices, path.as_ref())?;

    let d = trace.delays;
    println!("wrote {} rows to {path}", trace.len());
    println!(
        "stage delays in samples: band-pass {}, derivative {}, integration {}, total {}",
        d.band_pass,
        d.derivative,
        d.integration,
        d.total()
    );
    let peak = |v: &[f64]| v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    println!(
        "peak amplitude per stage: raw {:.3}, band-pass {:.1}, derivative {:.1}, squared {:.0}, integrated {:.0}",
        peak(&trace.raw),
        peak(&trace.bandpassed),
        peak(&trace.derivative),
        peak(&trace.squared),
        peak(&trace.integrated)
    );
    Ok(())
}
