//! Deterministic synthetic ECG built from Gaussian P, Q, R, S and T bumps.

use rand_distr::{Distribution, Normal};

use super::EcgRecord;
use crate::error::{Error, Result};
use crate::rng;

pub const SYNTH_FS: f64 = 200.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthParams {
    pub bpm: f64,
    pub duration_s: f64,
    /// Standard deviation of additive white noise, mV.
    pub noise_sd: f64,
    /// Standard deviation of beat-to-beat RR jitter, seconds.
    pub rr_sd: f64,
    pub seed: u64,
}

impl SynthParams {
    pub fn new(bpm: f64, duration_s: f64, noise_sd: f64, seed: u64) -> Self {
        SynthParams {
            bpm,
            duration_s,
            noise_sd,
            rr_sd: 0.0,
            seed,
        }
    }
}

struct Bump {
    offset: f64,
    amp: f64,
    width: f64,
    scales_with_rate: bool,
}

// QRS apex 1.2 mV; P and T stay at or below a quarter of that.
const TEMPLATE: [Bump; 5] = [
    Bump { offset: -0.16, amp: 0.12, width: 0.025, scales_with_rate: true },
    Bump { offset: -0.028, amp: -0.12, width: 0.008, scales_with_rate: false },
    Bump { offset: 0.0, amp: 1.2, width: 0.010, scales_with_rate: false },
    Bump { offset: 0.028, amp: -0.25, width: 0.010, scales_with_rate: false },
    Bump { offset: 0.28, amp: 0.30, width: 0.045, scales_with_rate: true },
];

/// Fixed-rate synthetic ECG at 200 Hz. Returns the record (annotated with
/// the truth) and the exact R-apex times in seconds.
pub fn synthesize_ecg(bpm: f64, duration_s: f64, noise_sd: f64, seed: u64) -> Result<(EcgRecord, Vec<f64>)> {
    synthesize_ecg_with(&SynthParams::new(bpm, duration_s, noise_sd, seed))
}

pub fn synthesize_ecg_with(p: &SynthParams) -> Result<(EcgRecord, Vec<f64>)> {
    if !(30.0..=220.0).contains(&p.bpm) {
        return Err(Error::invalid(format!("bpm must be in [30, 220], got {}", p.bpm)));
    }
    if !(p.duration_s > 0.0) || !(p.noise_sd >= 0.0) || !(p.rr_sd >= 0.0) {
        return Err(Error::invalid("duration must be positive and noise/jitter non-negative"));
    }
    let fs = SYNTH_FS;
    let n = (p.duration_s * fs).round() as usize;
    let rr = 60.0 / p.bpm;

    // R apexes sit on the sample grid so that sample maxima coincide with them.
    let mut r_idx: Vec<usize> = Vec::new();
    let mut rr_of_beat: Vec<f64> = Vec::new();
    if p.rr_sd == 0.0 {
        let mut k = 0usize;
        loop {
            let i = ((0.5 * rr + k as f64 * rr) * fs).round() as usize;
            if i >= n {
                break;
            }
            r_idx.push(i);
            rr_of_beat.push(rr);
            k += 1;
        }
    } else {
        let mut jitter_rng = rng::stream(rng::derive_seed(p.seed, 1));
        let jitter = Normal::new(0.0, p.rr_sd).expect("finite sd");
        let mut t = 0.5 * rr;
        loop {
            let i = (t * fs).round() as usize;
            if i >= n {
                break;
            }
            let this_rr = (rr + jitter.sample(&mut jitter_rng)).clamp(0.3, 2.0);
            r_idx.push(i);
            rr_of_beat.push(this_rr);
            t = i as f64 / fs + this_rr;
        }
    }

    let mut samples = vec![0.0; n];
    for (&ri, &beat_rr) in r_idx.iter().zip(&rr_of_beat) {
        let scale = (beat_rr / 0.9).clamp(0.35, 1.0);
        for b in &TEMPLATE {
            let (offset, width) = if b.scales_with_rate {
                (b.offset * scale, b.width * scale)
            } else {
                (b.offset, b.width)
            };
            let centre = ri as f64 + offset * fs;
            let sd = width * fs;
            let lo = (centre - 5.0 * sd).floor().max(0.0) as usize;
            let hi = ((centre + 5.0 * sd).ceil() as usize).min(n.saturating_sub(1));
            for (j, s) in samples.iter_mut().enumerate().take(hi + 1).skip(lo) {
                let z = (j as f64 - centre) / sd;
                *s += b.amp * (-0.5 * z * z).exp();
            }
        }
    }

    if p.noise_sd > 0.0 {
        let mut noise_rng = rng::stream(rng::derive_seed(p.seed, 0));
        let noise = Normal::new(0.0, p.noise_sd).expect("finite sd");
        for s in &mut samples {
            *s += noise.sample(&mut noise_rng);
        }
    }

    let truth: Vec<f64> = r_idx.iter().map(|&i| i as f64 / fs).collect();
    let record = EcgRecord::new("synthetic", fs, samples)?.with_annotations(truth.clone())?;
    Ok((record, truth))
}
