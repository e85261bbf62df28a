use super::EcgRecord;
use crate::error::{Error, Result};

/// Linearly interpolates `record` onto a uniform grid at `target_fs`.
///
/// The grid starts at t = 0 and includes every point up to the last
/// source sample time, so duration is kept to within one target period.
/// Annotations are carried over unchanged.
pub fn resample(record: &EcgRecord, target_fs: f64) -> Result<EcgRecord> {
    if !(target_fs > 0.0 && target_fs.is_finite()) {
        return Err(Error::invalid(format!("target rate must be positive, got {target_fs}")));
    }
    if record.samples.len() < 2 {
        return Err(Error::invalid("resampling needs at least two samples"));
    }
    if target_fs == record.fs {
        return Ok(record.clone());
    }
    let x = &record.samples;
    let last = (x.len() - 1) as f64;
    let ratio = record.fs / target_fs;
    // small slack so that exact grid coincidences are not lost to rounding
    let n_out = ((last / ratio) + 1e-9).floor() as usize + 1;
    let samples = (0..n_out)
        .map(|k| {
            let pos = (k as f64 * ratio).min(last);
            let i = pos.floor() as usize;
            let frac = pos - i as f64;
            if i + 1 >= x.len() || frac == 0.0 {
                x[i]
            } else {
                x[i] + (x[i + 1] - x[i]) * frac
            }
        })
        .collect();
    Ok(EcgRecord {
        name: record.name.clone(),
        fs: target_fs,
        samples,
        annotations: record.annotations.clone(),
    })
}
