use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::EcgRecord;
use crate::error::{Error, Result};

fn record_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "record".to_string())
}

/// Parses the `# fs=<float>` header line, if the line is one.
fn parse_fs_header(line: &str) -> Option<std::result::Result<f64, String>> {
    let rest = line.trim().strip_prefix('#')?.trim();
    let value = rest.strip_prefix("fs")?.trim_start().strip_prefix('=')?;
    Some(
        value
            .trim()
            .parse::<f64>()
            .map_err(|e| format!("bad sampling rate {value:?}: {e}")),
    )
}

/// Reads a one-sample-per-line CSV recording.
///
/// The optional first line `# fs=<float>` declares the sampling rate;
/// `fs_override` wins over it when both are present.
pub fn read_csv_record(path: &Path, fs_override: Option<f64>) -> Result<EcgRecord> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };

    let mut header_fs = None;
    let mut samples = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if i == 0 {
            if let Some(fs) = parse_fs_header(trimmed) {
                header_fs = Some(fs.map_err(|m| parse_err(lineno, m))?);
                continue;
            }
        }
        if trimmed.starts_with('#') {
            continue;
        }
        let v: f64 = trimmed
            .parse()
            .map_err(|_| parse_err(lineno, format!("non-numeric sample {trimmed:?}")))?;
        samples.push(v);
    }

    if samples.is_empty() {
        return Err(parse_err(1, "file contains no samples".into()));
    }
    let fs = fs_override
        .or(header_fs)
        .ok_or_else(|| parse_err(1, "no `# fs=` header and no sampling rate override".into()))?;
    EcgRecord::new(record_name(path), fs, samples)
}

/// Writes the CSV form read by [`read_csv_record`].
pub fn write_csv_record(record: &EcgRecord, path: &Path) -> Result<()> {
    let mut out = String::with_capacity(record.samples.len() * 10 + 16);
    writeln!(out, "# fs={}", record.fs).unwrap();
    for v in &record.samples {
        writeln!(out, "{v}").unwrap();
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Reads a beat-time sidecar: one time in seconds per line.
pub fn read_annotations(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut times = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        times.push(t.parse().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message: format!("non-numeric beat time {t:?}"),
        })?);
    }
    Ok(times)
}

pub fn write_annotations(times: &[f64], path: &Path) -> Result<()> {
    let mut out = String::new();
    for t in times {
        writeln!(out, "{t}").unwrap();
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}
