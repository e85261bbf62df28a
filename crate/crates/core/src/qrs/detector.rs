//! Adaptive dual-threshold peak search on the integrated waveform.
//!
//! Running estimates follow the classic 200 Hz formulation:
//! SPKI <- 0.125 PEAKI + 0.875 SPKI for signal peaks, NPKI likewise for
//! noise peaks, THRESHOLD_I1 = NPKI + 0.25 (SPKI - NPKI). Search-back uses
//! THRESHOLD_I1 / 2 and updates SPKI with weight 0.25.

use std::collections::VecDeque;

use super::filters::HIGH_PASS_WARMUP;
use super::trace::StageTrace;
use crate::error::{Error, Result};
use crate::signal_io::{resample, EcgRecord, CANONICAL_FS};

const FS: f64 = CANONICAL_FS;
/// 200 ms.
const REFRACTORY: usize = 40;
/// 360 ms.
const T_WAVE_WINDOW: usize = 72;
const T_WAVE_SLOPE_RATIO: f64 = 0.5;
const SEARCH_BACK_RR_FACTOR: f64 = 1.66;
/// First 2 s initialise the thresholds.
const LEARNING_SAMPLES: usize = 400;
/// Raw-signal search radius around the delay-compensated fiducial.
const LOCALIZE_RADIUS: usize = 40;
const RR_AVERAGE_LEN: usize = 8;
pub const MIN_DURATION_S: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdSnapshot {
    pub spki: f64,
    pub npki: f64,
    pub threshold: f64,
}

/// Detected R peaks of one 200 Hz record.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RPeakSeries {
    /// Seconds, strictly increasing, at least 0.2 s apart.
    pub times: Vec<f64>,
    /// Sample positions in the 200 Hz record.
    pub indices: Vec<usize>,
    /// Threshold state right after each peak was accepted.
    pub threshold_log: Vec<ThresholdSnapshot>,
}

impl RPeakSeries {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    index: usize,
    amp: f64,
    slope: f64,
}

#[derive(Debug, Clone, Copy)]
struct Accepted {
    cand: Candidate,
    snapshot: ThresholdSnapshot,
}

struct Thresholds {
    spki: f64,
    npki: f64,
    i1: f64,
}

impl Thresholds {
    fn new(spki: f64, npki: f64) -> Self {
        let mut t = Thresholds { spki, npki, i1: 0.0 };
        t.refresh();
        t
    }

    fn refresh(&mut self) {
        self.i1 = self.npki + 0.25 * (self.spki - self.npki);
    }

    fn signal(&mut self, amp: f64, weight: f64) {
        self.spki = weight * amp + (1.0 - weight) * self.spki;
        self.refresh();
    }

    fn noise(&mut self, amp: f64) {
        self.npki = 0.125 * amp + 0.875 * self.npki;
        self.refresh();
    }

    fn snapshot(&self) -> ThresholdSnapshot {
        ThresholdSnapshot {
            spki: self.spki,
            npki: self.npki,
            threshold: self.i1,
        }
    }
}

/// Local maxima of the integrated waveform after the warm-up region,
/// thinned so that no two lie within one refractory period (the larger
/// amplitude survives).
fn candidates(trace: &StageTrace) -> Vec<Candidate> {
    let y = &trace.integrated;
    let width = trace.delays.integration as usize * 2 + 1;
    let slope_at = |i: usize| {
        let lo = (i + 1).saturating_sub(width);
        trace.derivative[lo..=i].iter().fold(0.0f64, |m, v| m.max(v.abs()))
    };
    let mut out: Vec<Candidate> = Vec::new();
    // the final sample counts as a peak while the waveform is still rising
    for i in HIGH_PASS_WARMUP.max(1)..y.len() {
        let falls_after = i + 1 == y.len() || y[i] >= y[i + 1];
        if !(y[i] > y[i - 1] && falls_after) {
            continue;
        }
        let c = Candidate {
            index: i,
            amp: y[i],
            slope: slope_at(i),
        };
        match out.last_mut() {
            Some(last) if i - last.index < REFRACTORY => {
                if c.amp > last.amp {
                    *last = c;
                }
            }
            _ => out.push(c),
        }
    }
    out
}

struct Search {
    thr: Thresholds,
    accepted: Vec<Accepted>,
    /// Noise-classified candidates since the last accepted peak.
    pending: Vec<Candidate>,
    rr: VecDeque<usize>,
}

impl Search {
    fn accept(&mut self, c: Candidate, weight: f64) {
        self.thr.signal(c.amp, weight);
        if let Some(last) = self.accepted.last() {
            if self.rr.len() == RR_AVERAGE_LEN {
                self.rr.pop_front();
            }
            self.rr.push_back(c.index - last.cand.index);
        }
        self.accepted.push(Accepted {
            cand: c,
            snapshot: self.thr.snapshot(),
        });
        self.pending.retain(|p| p.index > c.index);
    }

    fn rr_average(&self) -> Option<f64> {
        (!self.rr.is_empty()).then(|| self.rr.iter().sum::<usize>() as f64 / self.rr.len() as f64)
    }

    /// Re-examines noise peaks at half threshold while the gap since the
    /// last beat exceeds 1.66 average RR intervals.
    fn search_back(&mut self, now: usize) {
        loop {
            let (Some(last), Some(rr_avg)) = (self.accepted.last(), self.rr_average()) else {
                return;
            };
            if ((now - last.cand.index) as f64) <= SEARCH_BACK_RR_FACTOR * rr_avg {
                return;
            }
            let floor = 0.5 * self.thr.i1;
            let last_idx = last.cand.index;
            let best = self
                .pending
                .iter()
                .filter(|p| p.index >= last_idx + REFRACTORY && p.index < now && p.amp > floor)
                .fold(None::<Candidate>, |best, p| match best {
                    Some(b) if b.amp >= p.amp => Some(b),
                    _ => Some(*p),
                });
            match best {
                Some(c) => self.accept(c, 0.25),
                None => return,
            }
        }
    }

    fn classify(&mut self, c: Candidate) {
        if c.amp > self.thr.i1 {
            if let Some(last) = self.accepted.last() {
                let gap = c.index - last.cand.index;
                let t_wave = gap < T_WAVE_WINDOW && c.slope < T_WAVE_SLOPE_RATIO * last.cand.slope;
                if gap < REFRACTORY || t_wave {
                    self.thr.noise(c.amp);
                    return;
                }
            }
            self.accept(c, 0.125);
        } else {
            self.thr.noise(c.amp);
            self.pending.push(c);
        }
    }
}

/// Detects R peaks in a 200 Hz record and returns them with the stage trace.
pub fn detect_r_peaks(record: &EcgRecord) -> Result<(RPeakSeries, StageTrace)> {
    if record.fs != FS {
        return Err(Error::invalid(format!(
            "detector runs at {FS} Hz, record is {} Hz; resample first",
            record.fs
        )));
    }
    if record.duration_s() < MIN_DURATION_S {
        return Err(Error::invalid(format!(
            "record {} is {:.2} s long, detection needs at least {MIN_DURATION_S} s",
            record.name,
            record.duration_s()
        )));
    }
    let trace = StageTrace::compute(&record.samples)?;
    let y = &trace.integrated;
    let learn = &y[HIGH_PASS_WARMUP..LEARNING_SAMPLES.min(y.len())];
    let (mut max, mut mean) = stats(learn);
    if max <= 0.0 {
        (max, mean) = stats(&y[HIGH_PASS_WARMUP..]);
    }
    if max <= 0.0 {
        return Ok((RPeakSeries::default(), trace));
    }

    let mut search = Search {
        thr: Thresholds::new(0.6 * max, 0.3 * mean),
        accepted: Vec::new(),
        pending: Vec::new(),
        rr: VecDeque::new(),
    };
    for c in candidates(&trace) {
        search.search_back(c.index);
        search.classify(c);
    }
    search.search_back(y.len());

    let peaks = localize(&trace, &search.accepted);
    Ok((peaks, trace))
}

/// Resamples to 200 Hz when needed, then detects.
pub fn detect_resampled(record: &EcgRecord) -> Result<(RPeakSeries, StageTrace)> {
    if record.fs == FS {
        detect_r_peaks(record)
    } else {
        detect_r_peaks(&resample(record, FS)?)
    }
}

fn stats(v: &[f64]) -> (f64, f64) {
    if v.is_empty() {
        return (0.0, 0.0);
    }
    let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (max, v.iter().sum::<f64>() / v.len() as f64)
}

/// Maps integrated-waveform fiducials back to raw-signal maxima. The search
/// window never extends past the midpoint to a neighbouring fiducial.
fn localize(trace: &StageTrace, accepted: &[Accepted]) -> RPeakSeries {
    let raw = &trace.raw;
    let delay = trace.delays.total().round() as usize;
    let mut kept: Vec<(usize, Accepted)> = Vec::with_capacity(accepted.len());
    for (k, a) in accepted.iter().enumerate() {
        let centre = a.cand.index.saturating_sub(delay);
        let mut radius_lo = LOCALIZE_RADIUS;
        let mut radius_hi = LOCALIZE_RADIUS;
        if k > 0 {
            radius_lo = radius_lo.min((a.cand.index - accepted[k - 1].cand.index) / 2);
        }
        if let Some(next) = accepted.get(k + 1) {
            radius_hi = radius_hi.min((next.cand.index - a.cand.index - 1) / 2);
        }
        let lo = centre.saturating_sub(radius_lo);
        let hi = (centre + radius_hi).min(raw.len() - 1);
        let mut best = lo;
        for i in lo..=hi {
            if raw[i] > raw[best] {
                best = i;
            }
        }
        match kept.last_mut() {
            Some((prev, prev_a)) if best < *prev + REFRACTORY => {
                if a.cand.amp > prev_a.cand.amp {
                    *prev = best;
                    *prev_a = *a;
                }
            }
            _ => kept.push((best, *a)),
        }
    }
    // a replacement can land within the refractory period of its predecessor
    let mut out = RPeakSeries::default();
    for (idx, a) in kept {
        if let Some(&prev) = out.indices.last() {
            if idx < prev + REFRACTORY {
                continue;
            }
        }
        out.indices.push(idx);
        out.times.push(idx as f64 / FS);
        out.threshold_log.push(a.snapshot);
    }
    out
}
