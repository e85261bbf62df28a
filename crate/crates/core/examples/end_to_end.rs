//! Whole pipeline on synthetic recordings: one class per rhythm profile,
//! records written as CSV, then the features, train, evaluate and classify
//! commands exactly as the command-line tool runs them.

use ecg_ovo::eval::{
    cmd_classify, cmd_evaluate, cmd_features, cmd_train, ClassifyOptions, EvaluateOptions, FeaturesOptions,
    LabeledInput, TableKind, TrainMode, TrainOptions,
};
use ecg_ovo::neural::NetKind;
use ecg_ovo::ovo::{ClassSet, NetConfig};
use ecg_ovo::signal_io::{synthesize_ecg_with, write_csv_record, SynthParams};

/// (letter, bpm, rr jitter sd in s) per class.
const PROFILES: [(&str, f64, f64); 5] = [
    ("A", 88.0, 0.09),
    ("B", 58.0, 0.05),
    ("C", 128.0, 0.03),
    ("D", 105.0, 0.16),
    ("E", 72.0, 0.015),
];

fn main() -> ecg_ovo::Result<()> {
    let dir = tempfile::tempdir().expect("temp dir");
    let root = dir.path();

    let mut inputs = Vec::new();
    for (letter, bpm, rr_sd) in PROFILES {
        for rec in 0..4u64 {
            let mut params = SynthParams::new(bpm, 600.0, 0.03, rec * 10 + bpm as u64);
            params.rr_sd = rr_sd;
            let (record, _) = synthesize_ecg_with(&params)?;
            let path = root.join(format!("{letter}{rec}.csv"));
            write_csv_record(&record, &path)?;
            inputs.push(LabeledInput { label: letter.into(), path });
        }
    }

    let mut features = FeaturesOptions::new(inputs, root.join("features"));
    features.window_s = 60.0;
    features.hop_s = 60.0;
    features.split_seed = Some(1);
    let extracted = cmd_features(&features)?;
    let (train_csv, test_csv) = extracted.split_paths.expect("split requested");
    println!("{} feature rows, {} segments rejected", extracted.matrix.len(), extracted.rejections.len());

    let train = |mode, out: &str| {
        cmd_train(&TrainOptions {
            features: train_csv.clone(),
            class_names: ClassSet::default().names,
            mode,
            net: NetConfig::new(NetKind::Pattern),
            seed: 3,
            out: root.join(out),
        })
    };
    let bank = train(TrainMode::Pairwise, "bank")?;
    let baseline = train(TrainMode::Multiclass, "baseline")?;

    let eval = cmd_evaluate(&EvaluateOptions {
        models: vec![root.join("bank"), baseline.artifact.clone()],
        test: test_csv.clone(),
        table: TableKind::Comparison,
        include_normal: false,
        out: None,
    })?;
    print!("\n{}", eval.table);
    for r in &eval.reports {
        println!("{}: overall {:.2}%", r.model, r.report.overall_accuracy);
    }

    let rows = cmd_classify(&ClassifyOptions {
        model: bank.artifact,
        features: test_csv,
        out: None,
    })?;
    let ties = rows.iter().filter(|r| r.tie_broken).count();
    println!("classified {} test rows, {ties} decided by tie-break", rows.len());
    Ok(())
}
