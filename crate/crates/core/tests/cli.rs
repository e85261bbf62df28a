use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ecg_ovo::hrv::synthetic::separable_blobs;
use ecg_ovo::hrv::write_feature_csv;
use ecg_ovo::neural::split_70_30;
use ecg_ovo::ovo::ClassSet;
use ecg_ovo::signal_io::{synthesize_ecg, write_csv_record, EcgRecord};
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ecg-ovo")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Blob train/test CSVs in `dir`.
fn blob_csvs(dir: &Path, seed: u64) -> (PathBuf, PathBuf) {
    let m = separable_blobs(&ClassSet::default().names, 20, seed);
    let (train, test) = split_70_30(&m, seed).unwrap();
    let paths = (dir.join("train.csv"), dir.join("test.csv"));
    write_feature_csv(&train, &paths.0).unwrap();
    write_feature_csv(&test, &paths.1).unwrap();
    paths
}

#[test]
fn detect_writes_peaks_and_trace() {
    let dir = TempDir::new().unwrap();
    let (rec, truth) = synthesize_ecg(72.0, 30.0, 0.02, 4).unwrap();
    let input = dir.path().join("sine72.csv");
    write_csv_record(&rec, &input).unwrap();
    let out = dir.path().join("out");
    let o = run(&["detect", p(&input), "--trace", "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let peaks = fs::read_to_string(out.join("sine72.peaks.csv")).unwrap();
    let times: Vec<f64> = peaks.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(times.len(), truth.len());
    for (t, u) in times.iter().zip(&truth) {
        assert!((t - u).abs() <= 0.04);
    }
    let trace = fs::read_to_string(out.join("sine72.trace.csv")).unwrap();
    assert_eq!(trace.lines().next().unwrap().split(',').count(), 7);
    assert_eq!(trace.lines().count(), rec.len() + 1);
}

#[test]
fn detect_flat_line_and_missing_file() {
    let dir = TempDir::new().unwrap();
    let flat = EcgRecord::new("flat", 200.0, vec![0.0; 2000]).unwrap();
    let input = dir.path().join("flat.csv");
    write_csv_record(&flat, &input).unwrap();
    let out = dir.path().join("out");
    let o = run(&["detect", p(&input), "--out", p(&out)]);
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read_to_string(out.join("flat.peaks.csv")).unwrap(), "index,time_s\n");

    let o = run(&["detect", p(&dir.path().join("nope.csv")), "--out", p(&out)]);
    assert_eq!(code(&o), 2);
}

#[test]
fn features_segments_and_rejects() {
    let dir = TempDir::new().unwrap();
    let (long, _) = synthesize_ecg(70.0, 600.0, 0.01, 1).unwrap();
    let (short, _) = synthesize_ecg(70.0, 40.0, 0.01, 2).unwrap();
    let long_path = dir.path().join("long.csv");
    let short_path = dir.path().join("short.csv");
    write_csv_record(&long, &long_path).unwrap();
    write_csv_record(&short, &short_path).unwrap();
    let out = dir.path().join("feat");
    let a = format!("E={}", p(&long_path));
    let b = format!("A={}", p(&short_path));
    let o = run(&["features", &a, &b, "--window", "300", "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("features.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert!(!rows.is_empty() && rows.len() <= 2);
    assert!(rows.iter().all(|r| r.starts_with("Normal,")));
    let log = fs::read_to_string(out.join("rejected.csv")).unwrap();
    assert!(log.lines().any(|l| l.contains("short.csv")));

    // nothing usable at all
    let o = run(&["features", &b, "--window", "300", "--out", p(&out)]);
    assert_eq!(code(&o), 4);
}

#[test]
fn train_pairwise_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let (train, _) = blob_csvs(dir.path(), 3);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = run(&["train", p(&train), "--mode", "pairwise", "--kind", "fit", "--max-iter", "40", "--seed", "9", "--out", p(out)]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let mut files: Vec<String> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    files.sort();
    assert_eq!(files.len(), 12);
    assert!(files.contains(&"bank.json".to_string()) && files.contains(&"net10.json".to_string()));
    for f in &files {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn train_multiclass_and_missing_class() {
    let dir = TempDir::new().unwrap();
    let (train, _) = blob_csvs(dir.path(), 4);
    let out = dir.path().join("mc");
    let o = run(&["train", p(&train), "--mode", "multiclass", "--max-iter", "20", "--out", p(&out)]);
    assert_eq!(code(&o), 0);
    assert!(out.join("model.json").exists() && out.join("history.csv").exists());

    let text = fs::read_to_string(&train).unwrap();
    let kept: String = text.lines().filter(|l| !l.starts_with("Sleep Apnea,")).map(|l| format!("{l}\n")).collect();
    let partial = dir.path().join("partial.csv");
    fs::write(&partial, kept).unwrap();
    let o = run(&["train", p(&partial), "--out", p(&dir.path().join("x"))]);
    assert_eq!(code(&o), 4);
}

#[test]
fn evaluate_tables_and_version_check() {
    let dir = TempDir::new().unwrap();
    let (train, test) = blob_csvs(dir.path(), 5);
    let bank = dir.path().join("bank");
    let model = dir.path().join("mc");
    assert_eq!(code(&run(&["train", p(&train), "--kind", "pattern", "--max-iter", "60", "--out", p(&bank)])), 0);
    assert_eq!(
        code(&run(&["train", p(&train), "--mode", "multiclass", "--kind", "pattern", "--max-iter", "60", "--out", p(&model)])),
        0
    );

    let o = run(&["evaluate", p(&bank), "--test", p(&test)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let table = String::from_utf8(o.stdout).unwrap();
    assert_eq!(table.lines().count(), 1 + 12);
    assert!(table.lines().nth(1).unwrap().starts_with("Arrhythmia * ,Sleep Apnea\t-\t-\t-\t"));

    let rep = dir.path().join("rep");
    let o = run(&["evaluate", p(&bank), p(&model.join("model.json")), "--test", p(&test), "--table", "comparison", "--out", p(&rep)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let table = String::from_utf8(o.stdout).unwrap();
    assert_eq!(table.lines().count(), 2 + 5);
    assert!(rep.join("report.json").exists());

    let manifest = bank.join("bank.json");
    let text = fs::read_to_string(&manifest).unwrap().replace("hrv-td15-v1", "hrv-td15-v0");
    fs::write(&manifest, text).unwrap();
    assert_eq!(code(&run(&["evaluate", p(&bank), "--test", p(&test)])), 3);
}

#[test]
fn classify_and_malformed_input() {
    let dir = TempDir::new().unwrap();
    let (train, test) = blob_csvs(dir.path(), 6);
    let bank = dir.path().join("bank");
    assert_eq!(code(&run(&["train", p(&train), "--max-iter", "40", "--out", p(&bank)])), 0);
    let out = dir.path().join("pred");
    let o = run(&["classify", p(&bank), p(&test), "--out", p(&out)]);
    assert_eq!(code(&o), 0);
    let preds = fs::read_to_string(out.join("predictions.csv")).unwrap();
    let n_test = fs::read_to_string(&test).unwrap().lines().count() - 1;
    assert_eq!(preds.lines().count(), n_test + 1);
    for line in preds.lines().skip(1) {
        let flags: u32 = line.split(',').skip(3).map(|v| v.parse::<u32>().unwrap()).sum();
        assert_eq!(flags, 10);
    }

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "label,f01\nA,1\n").unwrap();
    assert_eq!(code(&run(&["classify", p(&bank), p(&bad)])), 5);
}

#[test]
fn compare_reads_config_and_flags_win() {
    let dir = TempDir::new().unwrap();
    let (train, test) = blob_csvs(dir.path(), 7);
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        format!("# compare run\ntrain = {}\ntest = {}\nkinds = fit,pattern\nmax-iter = 5\nseed = 1\n", p(&train), p(&test)),
    )
    .unwrap();
    let out = dir.path().join("cmp");
    let o = run(&["compare", "--config", p(&cfg), "--max-iter", "80", "--seed", "2", "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let table = String::from_utf8(o.stdout).unwrap();
    assert_eq!(table.lines().count(), 7);
    // cascade and feed-forward columns were not trained
    assert!(table.lines().nth(2).unwrap().starts_with("Arrhythmia\t-\t-\t-\t-\t"));
    let report = fs::read_to_string(out.join("report.json")).unwrap();
    assert!(report.contains("\"seed\": \"2\""));
    let baseline = fs::read_to_string(out.join("models/fit/baseline.json")).unwrap();
    assert!(baseline.contains("\"seed\": 2,"));

    fs::write(&cfg, "bogus = 1\n").unwrap();
    assert_eq!(code(&run(&["compare", "--config", p(&cfg)])), 5);
}
