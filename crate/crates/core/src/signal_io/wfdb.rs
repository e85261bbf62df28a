//! PhysioNet WFDB records stored in format 212.
//!
//! Format 212 packs two 12-bit two's-complement samples into three bytes:
//! byte 0 holds the low eight bits of the first sample, the low nibble of
//! byte 1 its high four bits, the high nibble of byte 1 the high four bits
//! of the second sample, and byte 2 the second sample's low eight bits.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::EcgRecord;
use crate::error::{Error, Result};

/// WFDB default ADC gain (units per mV) when the header omits it.
pub const DEFAULT_GAIN: f64 = 200.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SignalSpec {
    pub file_name: String,
    pub format: u16,
    pub byte_offset: u64,
    pub gain: f64,
    pub baseline: i32,
    pub units: String,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Header {
    pub record_name: String,
    pub fs: f64,
    /// Samples per signal; `None` when the header leaves it out.
    pub n_samples: Option<usize>,
    pub signals: Vec<SignalSpec>,
}

fn sign_extend_12(v: u16) -> i16 {
    ((v << 4) as i16) >> 4
}

/// Unpacks a format-212 byte stream. A trailing two-byte group carries a
/// single sample.
pub fn decode_212(bytes: &[u8]) -> Vec<i16> {
    let mut out = Vec::with_capacity(bytes.len() * 2 / 3 + 1);
    let mut chunks = bytes.chunks_exact(3);
    for c in &mut chunks {
        let first = c[0] as u16 | ((c[1] as u16 & 0x0F) << 8);
        let second = c[2] as u16 | ((c[1] as u16 & 0xF0) << 4);
        out.push(sign_extend_12(first));
        out.push(sign_extend_12(second));
    }
    let rest = chunks.remainder();
    if rest.len() == 2 {
        out.push(sign_extend_12(rest[0] as u16 | ((rest[1] as u16 & 0x0F) << 8)));
    }
    out
}

/// Packs 12-bit samples; values outside [-2048, 2047] are truncated to
/// their low 12 bits.
pub fn encode_212(samples: &[i16]) -> Vec<u8> {
    let mut out = Vec::with_capacity(samples.len().div_ceil(2) * 3);
    let mut pairs = samples.chunks_exact(2);
    for p in &mut pairs {
        let a = p[0] as u16 & 0x0FFF;
        let b = p[1] as u16 & 0x0FFF;
        out.push((a & 0xFF) as u8);
        out.push(((a >> 8) | ((b >> 8) << 4)) as u8);
        out.push((b & 0xFF) as u8);
    }
    if let [last] = pairs.remainder() {
        let a = *last as u16 & 0x0FFF;
        out.push((a & 0xFF) as u8);
        out.push((a >> 8) as u8);
    }
    out
}

fn leading_number(field: &str) -> &str {
    let end = field
        .find(|c: char| !(c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E')))
        .unwrap_or(field.len());
    &field[..end]
}

pub fn parse_header(text: &str, path: &Path) -> Result<Header> {
    let err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (lineno, record_line) = lines
        .next()
        .ok_or_else(|| err(1, "empty header".into()))?;
    let fields: Vec<&str> = record_line.split_whitespace().collect();
    if fields.len() < 2 {
        return Err(err(lineno, "record line needs a name and signal count".into()));
    }
    let record_name = fields[0].split('/').next().unwrap_or(fields[0]).to_string();
    let n_sig: usize = fields[1]
        .parse()
        .map_err(|_| err(lineno, format!("bad signal count {:?}", fields[1])))?;
    let fs = match fields.get(2) {
        Some(f) => leading_number(f)
            .parse::<f64>()
            .map_err(|_| err(lineno, format!("bad sampling frequency {f:?}")))?,
        None => 250.0,
    };
    let n_samples = match fields.get(3) {
        Some(f) => {
            let n: usize = f
                .parse()
                .map_err(|_| err(lineno, format!("bad sample count {f:?}")))?;
            (n > 0).then_some(n)
        }
        None => None,
    };

    let mut signals = Vec::with_capacity(n_sig);
    for _ in 0..n_sig {
        let (lineno, line) = lines
            .next()
            .ok_or_else(|| err(lineno, format!("expected {n_sig} signal lines")))?;
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() < 2 {
            return Err(err(lineno, "signal line needs a file name and format".into()));
        }
        let fmt_field = f[1];
        let format: u16 = leading_number(fmt_field)
            .parse()
            .map_err(|_| err(lineno, format!("bad format {fmt_field:?}")))?;
        let byte_offset = match fmt_field.split_once('+') {
            Some((_, off)) => off
                .parse()
                .map_err(|_| err(lineno, format!("bad byte offset in {fmt_field:?}")))?,
            None => 0,
        };
        let adc_zero: i32 = f.get(4).and_then(|s| s.parse().ok()).unwrap_or(0);
        let (gain, baseline, units) = match f.get(2) {
            Some(g) => {
                let (head, units) = match g.split_once('/') {
                    Some((h, u)) => (h, u.to_string()),
                    None => (*g, "mV".to_string()),
                };
                let (gain_str, baseline) = match head.split_once('(') {
                    Some((gs, b)) => {
                        let b = b.trim_end_matches(')');
                        let b: i32 = b
                            .parse()
                            .map_err(|_| err(lineno, format!("bad baseline {b:?}")))?;
                        (gs, b)
                    }
                    None => (head, adc_zero),
                };
                let gain: f64 = gain_str
                    .parse()
                    .map_err(|_| err(lineno, format!("bad gain {gain_str:?}")))?;
                (gain, baseline, units)
            }
            None => (DEFAULT_GAIN, adc_zero, "mV".to_string()),
        };
        let description = if f.len() > 8 { f[8..].join(" ") } else { String::new() };
        signals.push(SignalSpec {
            file_name: f[0].to_string(),
            format,
            byte_offset,
            gain,
            baseline,
            units,
            description,
        });
    }
    if signals.is_empty() {
        return Err(err(lineno, "record declares no signals".into()));
    }
    Ok(Header {
        record_name,
        fs,
        n_samples,
        signals,
    })
}

/// Reads the first signal of a WFDB record given its `.hea` header path.
pub fn read_wfdb_record(header_path: &Path) -> Result<EcgRecord> {
    let text = fs::read_to_string(header_path).map_err(|e| Error::io(header_path, e))?;
    let header = parse_header(&text, header_path)?;
    let sig = &header.signals[0];
    if sig.format != 212 {
        return Err(Error::Format(format!(
            "signal storage format {} is not supported (only 212)",
            sig.format
        )));
    }
    if sig.gain == 0.0 {
        return Err(Error::Format("signal gain is zero".into()));
    }
    // Signals sharing the first signal's file are interleaved frame by frame.
    let frame = header
        .signals
        .iter()
        .filter(|s| s.file_name == sig.file_name)
        .count();
    if header.signals.iter().any(|s| s.file_name == sig.file_name && s.format != 212) {
        return Err(Error::Format("mixed storage formats within one file".into()));
    }

    let dat_path: PathBuf = header_path
        .parent()
        .unwrap_or_else(|| Path::new("."))
        .join(&sig.file_name);
    let bytes = fs::read(&dat_path).map_err(|e| Error::io(&dat_path, e))?;
    let offset = sig.byte_offset as usize;
    if offset > bytes.len() {
        return Err(Error::Format(format!("{}: truncated before byte offset", dat_path.display())));
    }
    let raw = decode_212(&bytes[offset..]);
    let available = raw.len() / frame;
    let n = match header.n_samples {
        Some(n) if n > available => {
            return Err(Error::Format(format!(
                "{}: truncated, header declares {n} samples but file holds {available}",
                dat_path.display()
            )))
        }
        Some(n) => n,
        None => available,
    };
    if n == 0 {
        return Err(Error::Format(format!("{}: no samples", dat_path.display())));
    }
    let baseline = sig.baseline as f64;
    let samples = raw
        .iter()
        .step_by(frame)
        .take(n)
        .map(|&r| (r as f64 - baseline) / sig.gain)
        .collect();
    EcgRecord::new(header.record_name.clone(), header.fs, samples)
}

/// Writes `record` as a single-signal format-212 record `<dir>/<name>.hea`
/// plus `<dir>/<name>.dat`, returning the header path. Samples are scaled
/// by `gain` units/mV, shifted by `baseline` and clamped to 12 bits.
pub fn write_wfdb_record(record: &EcgRecord, dir: &Path, gain: f64, baseline: i32) -> Result<PathBuf> {
    if gain == 0.0 {
        return Err(Error::invalid("gain must be non-zero"));
    }
    let raw: Vec<i16> = record
        .samples
        .iter()
        .map(|&v| (v * gain + baseline as f64).round().clamp(-2048.0, 2047.0) as i16)
        .collect();
    let dat_name = format!("{}.dat", record.name);
    let dat_path = dir.join(&dat_name);
    fs::write(&dat_path, encode_212(&raw)).map_err(|e| Error::io(&dat_path, e))?;

    let checksum = raw.iter().fold(0i16, |acc, &v| acc.wrapping_add(v));
    let init = raw.first().copied().unwrap_or(0);
    let mut hea = String::new();
    writeln!(hea, "{} 1 {} {}", record.name, record.fs, raw.len()).unwrap();
    writeln!(
        hea,
        "{dat_name} 212 {gain}({baseline})/mV 12 {baseline} {init} {checksum} 0 ECG"
    )
    .unwrap();
    let hea_path = dir.join(format!("{}.hea", record.name));
    fs::write(&hea_path, hea).map_err(|e| Error::io(&hea_path, e))?;
    Ok(hea_path)
}
