//! End-to-end acceptance checks. Runs without the libtest harness so each
//! criterion prints exactly one PASS/FAIL line; exits non-zero on failure.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use ecg_ovo::eval::{render_pairwise_table, CompareOptions, CompareOutput, PairRow, Star};
use ecg_ovo::hrv::synthetic::separable_blobs;
use ecg_ovo::hrv::{extract_features, rr_from_times, RrSeries, FEATURE_NAMES};
use ecg_ovo::neural::{init_network, loss_and_gradient, split_70_30, Batch, Mlp, NetKind, Topology};
use ecg_ovo::ovo::{
    compute_flags, condition_lookup, decide, load_bank, save_bank, train_bank, ClassSet, ConditionTable, NetConfig,
    PairOutcome, PAIRS,
};
use ecg_ovo::qrs::{detect_r_peaks, match_beats};
use ecg_ovo::signal_io::synthesize_ecg;
use ecg_ovo::signal_io::wfdb::{decode_212, encode_212};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ------------------------------------------------------------ voting

/// Condition table written out by hand: rows Net1..Net10, columns A..E.
const TABLE: [[u8; 5]; 10] = [
    [1, 2, 0, 0, 0],
    [1, 0, 2, 0, 0],
    [1, 0, 0, 2, 0],
    [1, 0, 0, 0, 2],
    [0, 1, 2, 0, 0],
    [0, 1, 0, 2, 0],
    [0, 1, 0, 0, 2],
    [0, 0, 1, 2, 0],
    [0, 0, 1, 0, 2],
    [0, 0, 0, 1, 2],
];

fn brute_force(winners: &[u8; 10], scores: &[f64; 10]) -> ([u8; 5], usize, bool) {
    let mut flags = [0u8; 5];
    let mut sums = [0.0f64; 5];
    for c in 0..5 {
        for r in 0..10 {
            if TABLE[r][c] == winners[r] {
                flags[c] += 1;
                sums[c] += scores[r];
            }
        }
    }
    let top = *flags.iter().max().unwrap();
    let tied: Vec<usize> = (0..5).filter(|&c| flags[c] == top).collect();
    let best_sum = tied.iter().map(|&c| sums[c]).fold(f64::NEG_INFINITY, f64::max);
    let class = *tied.iter().find(|&&c| sums[c] == best_sum).unwrap();
    (flags, class, tied.len() > 1)
}

fn voting_oracle() -> Outcome {
    let start = Instant::now();
    for r in 0..10 {
        for c in 0..5 {
            if condition_lookup(r + 1, c).map_err(|e| e.to_string())? != TABLE[r][c] {
                return Err(format!("condition table differs at net {}, class {c}", r + 1));
            }
        }
    }
    let table = ConditionTable::standard();
    let mut rng = ChaCha8Rng::seed_from_u64(1024);
    let mut ties = 0;
    for mask in 0u32..1024 {
        let winners: [u8; 10] = std::array::from_fn(|r| 1 + ((mask >> r) & 1) as u8);
        // coarse scores so that equal tie sums also occur
        let scores: [f64; 10] = std::array::from_fn(|_| rng.random_range(2..5) as f64 / 4.0);
        let outcomes: Vec<PairOutcome> = (0..10).map(|r| PairOutcome { winner: winners[r], score: scores[r] }).collect();
        let flags = compute_flags(&table, &outcomes).map_err(|e| e.to_string())?;
        let decision = decide(flags);
        let (want_flags, want_class, want_tie) = brute_force(&winners, &scores);
        if flags.counts != want_flags || decision.class != want_class || decision.tie_broken != want_tie {
            return Err(format!("mismatch for outcome mask {mask:010b}"));
        }
        if flags.total() != 10 || flags.counts.iter().any(|&f| f > 4) {
            return Err(format!("flag bounds violated for mask {mask:010b}"));
        }
        if flags.counts.iter().filter(|&&f| f == 4).count() > 1 {
            return Err(format!("two classes won all four nets for mask {mask:010b}"));
        }
        ties += usize::from(want_tie);
    }
    let elapsed = start.elapsed().as_secs_f64();
    check(
        elapsed < 1.0,
        format!("1024/1024 outcome vectors agree, {ties} with ties, {elapsed:.3} s"),
    )
}

// --------------------------------------------------------------- QRS

fn qrs_detection() -> Outcome {
    let start = Instant::now();
    let mut worst_sens = 1.0f64;
    let mut worst_ppv = 1.0f64;
    let mut scale_failures = 0;
    let mut records = 0;
    for bpm in [50.0, 75.0, 100.0, 150.0] {
        for noise in [0.0, 0.05] {
            for seed in 0..5 {
                let (rec, truth) = synthesize_ecg(bpm, 600.0, noise, seed).map_err(|e| e.to_string())?;
                let (peaks, _) = detect_r_peaks(&rec).map_err(|e| e.to_string())?;
                let m = match_beats(&peaks.times, &truth, 0.04);
                worst_sens = worst_sens.min(m.sensitivity());
                worst_ppv = worst_ppv.min(m.positive_predictivity());
                for k in [0.5, 2.0, 10.0] {
                    let mut scaled = rec.clone();
                    scaled.samples.iter_mut().for_each(|v| *v *= k);
                    let (p2, _) = detect_r_peaks(&scaled).map_err(|e| e.to_string())?;
                    scale_failures += usize::from(p2.indices != peaks.indices);
                }
                records += 1;
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    check(
        worst_sens >= 0.99 && worst_ppv >= 0.99 && scale_failures == 0 && elapsed < 10.0,
        format!(
            "{records} ten-minute records: min sensitivity {worst_sens:.4}, min +P {worst_ppv:.4}, \
             {scale_failures} scale mismatches, {elapsed:.2} s"
        ),
    )
}

// ---------------------------------------------------------- gradient

fn max_relative_gradient_error(net: &Mlp, batch: &Batch, h: f64) -> f64 {
    let (_, grad) = loss_and_gradient(net, batch).unwrap();
    let mut worst: f64 = 0.0;
    let mut probe = net.clone();
    for i in 0..net.params.len() {
        probe.params[i] = net.params[i] + h;
        let plus = loss_and_gradient(&probe, batch).unwrap().0;
        probe.params[i] = net.params[i] - h;
        let minus = loss_and_gradient(&probe, batch).unwrap().0;
        probe.params[i] = net.params[i];
        let fd = (plus - minus) / (2.0 * h);
        let scale = fd.abs().max(grad[i].abs()).max(1e-7);
        worst = worst.max((fd - grad[i]).abs() / scale);
    }
    worst
}

fn gradient_check() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let kind = NetKind::ALL[i % 4];
        let input = rng.random_range(2..7);
        let output = rng.random_range(2..5);
        let hidden: Vec<usize> = (0..rng.random_range(1..3)).map(|_| rng.random_range(1..6)).collect();
        let topo = Topology::new(kind, input, hidden, output).map_err(|e| e.to_string())?;
        let names = (0..output).map(|c| format!("c{c}")).collect();
        let mut net = init_network(topo, names, i as u64);
        net.params.iter_mut().for_each(|p| *p += rng.random_range(-0.3..0.3));
        let rows = rng.random_range(3..9);
        let batch = Batch {
            inputs: (0..rows).map(|_| (0..input).map(|_| rng.random_range(-2.0..2.0)).collect()).collect(),
            targets: (0..rows)
                .map(|_| {
                    let mut t = vec![0.0; output];
                    t[rng.random_range(0..output)] = 1.0;
                    t
                })
                .collect(),
        };
        worst = worst.max(max_relative_gradient_error(&net, &batch, 1e-6));
    }
    check(worst < 1e-4, format!("20 nets across 4 kinds, max relative error {worst:.2e}"))
}

// ---------------------------------------------------------- features

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 0 {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    } else {
        v[n / 2]
    }
}

fn pop_sd(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n).sqrt()
}

/// Direct restatement of the fifteen feature definitions.
fn oracle_features(rr: &[f64]) -> [f64; 15] {
    let n = rr.len() as f64;
    let mean = rr.iter().sum::<f64>() / n;
    let mut d = Vec::new();
    for i in 1..rr.len() {
        d.push(rr[i] - rr[i - 1]);
    }
    let rmssd = (d.iter().map(|x| x * x).sum::<f64>() / d.len() as f64).sqrt();
    let nn50 = d.iter().filter(|x| x.abs() > 0.05).count() as f64;
    let min = rr.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = rr.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let hr: Vec<f64> = rr.iter().map(|x| 60.0 / x).collect();
    let mut bins = BTreeMap::new();
    for x in rr {
        *bins.entry((x / 0.0078125).floor() as i64).or_insert(0usize) += 1;
    }
    let peak = *bins.values().max().unwrap() as f64;
    let med = median(rr.to_vec());
    [
        mean,
        med,
        pop_sd(rr),
        rmssd,
        pop_sd(&d),
        nn50,
        100.0 * nn50 / d.len() as f64,
        min,
        max,
        max - min,
        pop_sd(rr) / mean,
        60.0 / mean,
        pop_sd(&hr),
        n / peak,
        median(rr.iter().map(|x| (x - med).abs()).collect()),
    ]
}

fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn feature_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.random_range(30..400);
        let base = rng.random_range(0.4..1.5);
        let values: Vec<f64> = (0..n).map(|_| base + rng.random_range(-0.15..0.15)).collect();
        let got = extract_features(&RrSeries { values: values.clone(), removed: 0 }).map_err(|e| e.to_string())?;
        let want = oracle_features(&values);
        for (j, (&g, &w)) in got.0.iter().zip(&want).enumerate() {
            let e = rel_err(g, w);
            if e >= 1e-9 {
                return Err(format!("{} differs: {g} vs {w}", FEATURE_NAMES[j]));
            }
            worst = worst.max(e);
        }
    }
    let constant = extract_features(&RrSeries { values: vec![1.0; 60], removed: 0 }).map_err(|e| e.to_string())?;
    let constant_ok = constant.get("mean_rr") == Some(1.0)
        && constant.get("sdnn") == Some(0.0)
        && constant.get("rmssd") == Some(0.0)
        && constant.get("pnn50") == Some(0.0)
        && constant.get("mean_hr") == Some(60.0);
    let alt: Vec<f64> = (0..60).map(|i| if i % 2 == 0 { 0.8 } else { 1.2 }).collect();
    let a = extract_features(&RrSeries { values: alt, removed: 0 }).map_err(|e| e.to_string())?;
    let alternating_ok = rel_err(a.get("mean_rr").unwrap(), 1.0) < 1e-12
        && rel_err(a.get("rmssd").unwrap(), 0.4) < 1e-12
        && a.get("nn50") == Some(59.0)
        && a.get("pnn50") == Some(100.0);
    check(
        constant_ok && alternating_ok,
        format!(
            "100 random series, max relative error {worst:.1e}; constant case {}, alternating case {}",
            if constant_ok { "ok" } else { "wrong" },
            if alternating_ok { "ok" } else { "wrong" }
        ),
    )
}

// ---------------------------------------------------------- training

fn pair_accuracy(net: &Mlp, test: &ecg_ovo::hrv::FeatureMatrix, a: usize, b: usize) -> f64 {
    let mut n = 0;
    let mut hit = 0;
    for (x, &l) in test.rows.iter().zip(&test.labels) {
        if l == a || l == b {
            n += 1;
            hit += usize::from(net.predict(x).unwrap().class == usize::from(l == b));
        }
    }
    100.0 * hit as f64 / n as f64
}

fn training() -> Outcome {
    let names = ClassSet::default().names;
    let data = separable_blobs(&names, 100, 500);
    let (train, test) = split_70_30(&data, 7).map_err(|e| e.to_string())?;

    let start = Instant::now();
    let opts = CompareOptions {
        seed: 11,
        ..CompareOptions::default()
    };
    let result = CompareOutput::run(&train, &test, &opts).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed().as_secs_f64();

    let mut worst_pair = f64::INFINITY;
    for (_, bank, _) in &result.banks {
        for (r, &(a, b)) in PAIRS.iter().enumerate() {
            worst_pair = worst_pair.min(pair_accuracy(&bank.nets[r], &test, a, b));
        }
    }
    let worst_baseline = result.baselines.iter().map(|(_, _, r)| r.overall_accuracy).fold(f64::INFINITY, f64::min);
    let worst_ensemble = result.banks.iter().map(|(_, _, r)| r.overall_accuracy).fold(f64::INFINITY, f64::min);

    let cfg = NetConfig::new(NetKind::Cascade);
    let (b1, _) = train_bank(&train, &cfg, 3).map_err(|e| e.to_string())?;
    let (b2, _) = train_bank(&train, &cfg, 3).map_err(|e| e.to_string())?;
    let identical = b1.nets.iter().zip(&b2.nets).all(|(x, y)| x.to_json() == y.to_json())
        && result.baselines.iter().all(|(kind, net, _)| {
            let cfg = NetConfig::new(*kind);
            let (again, _) = ecg_ovo::ovo::train_multiclass_baseline(&train, &cfg, 11).unwrap();
            again.to_json() == net.to_json()
        });

    check(
        worst_pair >= 95.0 && worst_baseline >= 95.0 && worst_ensemble >= 95.0 && identical && elapsed < 60.0,
        format!(
            "min pair net {worst_pair:.2}%, min baseline {worst_baseline:.2}%, min ensemble {worst_ensemble:.2}%, \
             reruns byte-identical: {identical}, compare {elapsed:.1} s"
        ),
    )
}

// ------------------------------------------------------------ formats

fn golden_rows() -> Vec<PairRow> {
    let row = |first: &str, second: &str, star, cells: [f64; 4]| PairRow {
        first: first.into(),
        second: second.into(),
        star,
        cells: cells.map(Some),
    };
    let (arr, af, apnea, sva) = ("Arrhythmia", "Long Term AF", "Sleep Apnea", "Supraventricular Arrhythmia");
    vec![
        row(arr, af, Star::First, [66.67, 93.33, 93.33, 80.0]),
        row(arr, af, Star::Second, [96.0, 100.0, 100.0, 96.0]),
        row(af, apnea, Star::First, [100.0, 100.0, 100.0, 92.0]),
        row(af, apnea, Star::Second, [62.5, 70.83, 70.83, 75.0]),
        row(af, sva, Star::First, [100.0; 4]),
        row(af, sva, Star::Second, [100.0; 4]),
        row(apnea, sva, Star::First, [45.83, 70.83, 45.83, 62.5]),
        row(apnea, sva, Star::Second, [93.61, 100.0, 97.87, 100.0]),
        row(arr, apnea, Star::First, [66.67, 73.33, 46.66, 13.33]),
        row(arr, apnea, Star::Second, [100.0, 79.16, 79.16, 83.33]),
        row(arr, sva, Star::First, [0.4, 20.0, 0.0, 20.0]),
        row(arr, sva, Star::Second, [100.0, 95.74, 93.62, 95.74]),
    ]
}

fn formats() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(212);
    for _ in 0..200 {
        let n = rng.random_range(0..500);
        let samples: Vec<i16> = (0..n).map(|_| rng.random_range(-2048..2048)).collect();
        let bytes = encode_212(&samples);
        let decoded = decode_212(&bytes);
        if decoded[..n] != samples[..] || encode_212(&decoded[..n]) != bytes {
            return Err(format!("format 212 round trip failed for {n} samples"));
        }
    }

    let names = ClassSet::default().names;
    let data = separable_blobs(&names, 12, 3);
    let mut cfg = NetConfig::new(NetKind::Pattern);
    cfg.scg.max_iter = 30;
    let (bank, _) = train_bank(&data, &cfg, 5).map_err(|e| e.to_string())?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    save_bank(&bank, dir.path()).map_err(|e| e.to_string())?;
    let loaded = load_bank(dir.path()).map_err(|e| e.to_string())?;
    let bank_ok = loaded == bank;
    let model_ok = bank.nets.iter().all(|n| {
        let text = n.to_json();
        let back = Mlp::from_json(&text).unwrap();
        back == *n && back.to_json() == text
    });

    let golden = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/table_iv.txt"))
        .map_err(|e| e.to_string())?;
    let rendered = render_pairwise_table(&golden_rows());
    let lines: Vec<&str> = rendered.lines().collect();
    let sub_one = lines[11] == "Arrhythmia * ,Supraventricular Arrhythmia\t<1\t20\t<1\t20";
    let full_row = lines[5] == "Long Term AF * ,Supraventricular Arrhythmia\t100\t100\t100\t100";
    check(
        bank_ok && model_ok && rendered == golden && sub_one && full_row,
        format!(
            "format 212 x200 byte-identical; bank round trip {bank_ok}; model round trip {model_ok}; \
             golden table {}",
            if rendered == golden { "identical" } else { "differs" }
        ),
    )
}

// --------------------------------------------------------- length law

fn length_law() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..500 {
        let m = rng.random_range(2..300);
        let mut t = rng.random_range(0.0..100.0);
        let times: Vec<f64> = (0..m)
            .map(|_| {
                t += rng.random_range(0.05..6.0);
                t
            })
            .collect();
        let rr = rr_from_times(&times).map_err(|e| e.to_string())?;
        if rr.values.len() + rr.removed != m - 1 {
            return Err(format!("{m} peaks gave {} kept + {} removed", rr.values.len(), rr.removed));
        }
    }
    Ok("500 random peak series, kept + removed == peaks - 1".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("voting oracle equivalence", voting_oracle),
        ("QRS detection", qrs_detection),
        ("gradient correctness", gradient_check),
        ("feature oracle", feature_oracle),
        ("training determinism and capability", training),
        ("format fidelity", formats),
        ("RR length law", length_law),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
