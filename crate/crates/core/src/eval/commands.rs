use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use super::report::{evaluate_bank, evaluate_net, pair_rows, EvalReport};
use super::tables::{render_comparison_table, render_pairwise_table, ComparisonRow};
use crate::error::{Error, Result};
use crate::hrv::matrix::resolve_label;
use crate::hrv::{
    build_matrix, extract_features, read_feature_csv, read_feature_rows, rr_intervals, write_feature_csv,
    FeatureMatrix, FEATURE_VERSION,
};
use crate::neural::{load_model, save_model, split_70_30, Mlp, NetKind, TrainingHistory};
use crate::ovo::{
    load_bank, save_bank, train_bank, train_multiclass_baseline, ClassSet, NetConfig, PairNetBank, BANK_MANIFEST,
};
use crate::qrs::detect_resampled;
use crate::signal_io::{read_record, segment, DEFAULT_HOP_S, DEFAULT_WINDOW_S};

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("report serialises");
    text.push('\n');
    write_file(path, &text)
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "record".into(), |s| s.to_string_lossy().into_owned())
}

// ---------------------------------------------------------------- detect

#[derive(Debug, Clone)]
pub struct DetectOptions {
    pub inputs: Vec<PathBuf>,
    /// Sampling rate for CSV inputs without a `# fs=` header.
    pub fs: Option<f64>,
    /// Also write the per-stage waveforms.
    pub trace: bool,
    pub out: PathBuf,
}

#[derive(Debug, Clone)]
pub struct DetectOutput {
    /// (peak file, peak count) per input.
    pub records: Vec<(PathBuf, usize)>,
}

/// Writes `<stem>.peaks.csv` (`index,time_s`, index at 200 Hz) for every
/// input, plus `<stem>.trace.csv` when tracing.
pub fn cmd_detect(opts: &DetectOptions) -> Result<DetectOutput> {
    create_dir(&opts.out)?;
    let mut records = Vec::new();
    for input in &opts.inputs {
        let record = read_record(input, opts.fs)?;
        let (peaks, trace) = detect_resampled(&record)?;
        let name = stem(input);
        let mut text = String::from("index,time_s\n");
        for (i, t) in peaks.indices.iter().zip(&peaks.times) {
            writeln!(text, "{i},{t}").unwrap();
        }
        let path = opts.out.join(format!("{name}.peaks.csv"));
        write_file(&path, &text)?;
        if opts.trace {
            trace.write_csv(&peaks.indices, &opts.out.join(format!("{name}.trace.csv")))?;
        }
        records.push((path, peaks.len()));
    }
    Ok(DetectOutput { records })
}

// -------------------------------------------------------------- features

/// A `LABEL=PATH` input argument.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledInput {
    pub label: String,
    pub path: PathBuf,
}

impl FromStr for LabeledInput {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.split_once('=') {
            Some((label, path)) if !label.trim().is_empty() && !path.is_empty() => Ok(LabeledInput {
                label: label.trim().to_string(),
                path: PathBuf::from(path),
            }),
            _ => Err(format!("expected LABEL=PATH, got {s:?}")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FeaturesOptions {
    pub inputs: Vec<LabeledInput>,
    pub class_names: Vec<String>,
    pub window_s: f64,
    pub hop_s: f64,
    pub fs: Option<f64>,
    pub out: PathBuf,
    /// Also write a stratified 70/30 `train.csv`/`test.csv` split.
    pub split_seed: Option<u64>,
}

impl FeaturesOptions {
    pub fn new(inputs: Vec<LabeledInput>, out: PathBuf) -> Self {
        FeaturesOptions {
            inputs,
            class_names: ClassSet::default().names,
            window_s: DEFAULT_WINDOW_S,
            hop_s: DEFAULT_HOP_S,
            fs: None,
            out,
            split_seed: None,
        }
    }
}

/// A segment that produced no feature row.
#[derive(Debug, Clone, PartialEq)]
pub struct Rejection {
    pub source: String,
    pub segment: usize,
    pub start_s: f64,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct FeaturesOutput {
    pub matrix: FeatureMatrix,
    pub rejections: Vec<Rejection>,
    pub features_path: PathBuf,
    pub split_paths: Option<(PathBuf, PathBuf)>,
}

/// Segments every input, detects beats per segment and extracts one
/// feature row per usable segment, in input then time order. Writes
/// `features.csv` and `rejected.csv`.
pub fn cmd_features(opts: &FeaturesOptions) -> Result<FeaturesOutput> {
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    let mut rejections = Vec::new();
    for input in &opts.inputs {
        let label = resolve_label(&input.label, &opts.class_names)
            .ok_or_else(|| Error::invalid(format!("unknown class label {:?}", input.label)))?;
        let record = read_record(&input.path, opts.fs)?;
        let source = input.path.display().to_string();
        let set = match segment(&record, opts.window_s, opts.hop_s) {
            Ok(set) => set,
            Err(e @ Error::Coverage(_)) => {
                rejections.push(Rejection {
                    source,
                    segment: 0,
                    start_s: 0.0,
                    reason: e.to_string(),
                });
                continue;
            }
            Err(e) => return Err(e),
        };
        for (i, seg) in set.segments.iter().enumerate() {
            let features = detect_resampled(seg)
                .and_then(|(peaks, _)| rr_intervals(&peaks))
                .and_then(|rr| extract_features(&rr));
            match features {
                Ok(f) => {
                    rows.push(f);
                    labels.push(label);
                }
                Err(e) => rejections.push(Rejection {
                    source: source.clone(),
                    segment: i,
                    start_s: i as f64 * set.hop_s,
                    reason: e.to_string(),
                }),
            }
        }
    }
    create_dir(&opts.out)?;
    let mut log = String::from("source,segment,start_s,reason\n");
    for r in &rejections {
        writeln!(log, "{},{},{},{}", r.source, r.segment, r.start_s, r.reason.replace(',', ";")).unwrap();
    }
    write_file(&opts.out.join("rejected.csv"), &log)?;
    if rows.is_empty() {
        return Err(Error::Coverage("no segment produced a feature row".into()));
    }
    let matrix = build_matrix(rows, labels, opts.class_names.clone())?;
    let features_path = opts.out.join("features.csv");
    write_feature_csv(&matrix, &features_path)?;
    let split_paths = match opts.split_seed {
        Some(seed) => {
            let (train, test) = split_70_30(&matrix, seed)?;
            let paths = (opts.out.join("train.csv"), opts.out.join("test.csv"));
            write_feature_csv(&train, &paths.0)?;
            write_feature_csv(&test, &paths.1)?;
            Some(paths)
        }
        None => None,
    };
    Ok(FeaturesOutput {
        matrix,
        rejections,
        features_path,
        split_paths,
    })
}

// ----------------------------------------------------------------- train

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrainMode {
    Pairwise,
    Multiclass,
}

impl FromStr for TrainMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "pairwise" => Ok(TrainMode::Pairwise),
            "multiclass" => Ok(TrainMode::Multiclass),
            _ => Err(format!("unknown mode {s:?} (expected pairwise or multiclass)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainOptions {
    pub features: PathBuf,
    pub class_names: Vec<String>,
    pub mode: TrainMode,
    pub net: NetConfig,
    pub seed: u64,
    pub out: PathBuf,
}

#[derive(Debug, Clone)]
pub struct TrainOutput {
    /// Bank manifest or single model file.
    pub artifact: PathBuf,
    pub history: PathBuf,
}

fn history_csv(entries: &[(String, &TrainingHistory)]) -> String {
    let mut out = String::from("net,iteration,loss,val_loss\n");
    for (name, h) in entries {
        for (i, loss) in h.loss.iter().enumerate() {
            let val = h.val_loss.get(i).map_or(String::new(), |v| v.to_string());
            writeln!(out, "{name},{i},{loss},{val}").unwrap();
        }
    }
    out
}

/// Pairwise mode writes `bank.json` and `net01.json`..`net10.json`;
/// multiclass mode writes `model.json`. Both write `history.csv`.
pub fn cmd_train(opts: &TrainOptions) -> Result<TrainOutput> {
    let train = read_feature_csv(&opts.features, &opts.class_names)?;
    create_dir(&opts.out)?;
    let history = opts.out.join("history.csv");
    let artifact = match opts.mode {
        TrainMode::Pairwise => {
            let (bank, hist) = train_bank(&train, &opts.net, opts.seed)?;
            let entries: Vec<_> = hist.iter().enumerate().map(|(r, h)| (format!("net{:02}", r + 1), h)).collect();
            write_file(&history, &history_csv(&entries))?;
            save_bank(&bank, &opts.out)?
        }
        TrainMode::Multiclass => {
            let (net, hist) = train_multiclass_baseline(&train, &opts.net, opts.seed)?;
            write_file(&history, &history_csv(&[("baseline".into(), &hist)]))?;
            let path = opts.out.join("model.json");
            save_model(&net, &path)?;
            path
        }
    };
    Ok(TrainOutput { artifact, history })
}

// -------------------------------------------------------------- evaluate

/// A saved pair bank or single network.
#[derive(Debug, Clone)]
pub enum LoadedModel {
    Bank(PairNetBank),
    Net(Mlp),
}

impl LoadedModel {
    /// Directories and `bank.json` load as banks, anything else as a model.
    pub fn load(path: &Path) -> Result<Self> {
        let is_manifest = path.file_name().is_some_and(|n| n == BANK_MANIFEST);
        if path.is_dir() || is_manifest {
            load_bank(path).map(LoadedModel::Bank)
        } else {
            load_model(path).map(LoadedModel::Net)
        }
    }

    pub fn kind(&self) -> NetKind {
        match self {
            LoadedModel::Bank(b) => b.kind,
            LoadedModel::Net(n) => n.topology.kind,
        }
    }

    pub fn class_names(&self) -> &[String] {
        match self {
            LoadedModel::Bank(b) => &b.classes.names,
            LoadedModel::Net(n) => &n.class_names,
        }
    }

    fn evaluate(&self, test: &FeatureMatrix, config: BTreeMap<String, String>) -> Result<EvalReport> {
        match self {
            LoadedModel::Bank(b) => evaluate_bank(b, test, config),
            LoadedModel::Net(n) => evaluate_net(n, test, config),
        }
    }

    fn config(&self, source: &str) -> BTreeMap<String, String> {
        match self {
            LoadedModel::Bank(b) => report_config(source, "proposed", b.kind, b.master_seed, &b.nets[0].topology.hidden),
            LoadedModel::Net(n) => report_config(source, "normal", n.topology.kind, n.seed, &n.topology.hidden),
        }
    }
}

fn report_config(source: &str, method: &str, kind: NetKind, seed: u64, hidden: &[usize]) -> BTreeMap<String, String> {
    BTreeMap::from([
        ("model".into(), source.to_string()),
        ("method".into(), method.into()),
        ("kind".into(), kind.to_string()),
        ("hidden".into(), format!("{hidden:?}")),
        ("seed".into(), seed.to_string()),
        ("feature_version".into(), FEATURE_VERSION.into()),
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    Pairwise,
    Comparison,
}

impl FromStr for TableKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "pairwise" => Ok(TableKind::Pairwise),
            "comparison" => Ok(TableKind::Comparison),
            _ => Err(format!("unknown table {s:?} (expected pairwise or comparison)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EvaluateOptions {
    /// Banks and/or five-output models, at most one of each per kind.
    pub models: Vec<PathBuf>,
    pub test: PathBuf,
    pub table: TableKind,
    /// Keep pairs involving the normal class in the pairwise table.
    pub include_normal: bool,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct NamedReport {
    pub model: String,
    pub report: EvalReport,
}

#[derive(Debug, Clone)]
pub struct EvaluateOutput {
    pub reports: Vec<NamedReport>,
    pub table: String,
}

#[derive(Default)]
struct ByKind<'a> {
    banks: [Option<&'a PairNetBank>; 4],
    nets: [Option<&'a Mlp>; 4],
}

fn kind_index(kind: NetKind) -> usize {
    NetKind::ALL.iter().position(|&k| k == kind).unwrap()
}

fn comparison_rows(names: &[String], normal: &[Option<&EvalReport>; 4], proposed: &[Option<&EvalReport>; 4]) -> Vec<ComparisonRow> {
    (0..names.len())
        .map(|c| ComparisonRow {
            class: names[c].clone(),
            normal: normal.map(|r| r.and_then(|r| r.per_class_accuracy[c])),
            proposed: proposed.map(|r| r.and_then(|r| r.per_class_accuracy[c])),
        })
        .collect()
}

/// Evaluates every model on the test CSV and renders the requested table.
/// With `out`, writes `report.json` and `table.txt` there.
pub fn cmd_evaluate(opts: &EvaluateOptions) -> Result<EvaluateOutput> {
    if opts.models.is_empty() {
        return Err(Error::invalid("no models given"));
    }
    let models = opts.models.iter().map(|p| LoadedModel::load(p)).collect::<Result<Vec<_>>>()?;
    let names = models[0].class_names().to_vec();
    if models.iter().any(|m| m.class_names() != names.as_slice()) {
        return Err(Error::invalid("models were trained on different class sets"));
    }
    let test = read_feature_csv(&opts.test, &names)?;

    let mut by_kind = ByKind::default();
    for m in &models {
        let k = kind_index(m.kind());
        let taken = match m {
            LoadedModel::Bank(b) => by_kind.banks[k].replace(b).is_some(),
            LoadedModel::Net(n) => by_kind.nets[k].replace(n).is_some(),
        };
        if taken {
            return Err(Error::invalid(format!("more than one {} model of the same method", m.kind())));
        }
    }

    let reports = models
        .iter()
        .zip(&opts.models)
        .map(|(m, p)| {
            let source = p.display().to_string();
            Ok(NamedReport {
                report: m.evaluate(&test, m.config(&source))?,
                model: source,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let table = match opts.table {
        TableKind::Pairwise => render_pairwise_table(&pair_rows(&by_kind.banks, &test, opts.include_normal)?),
        TableKind::Comparison => {
            let mut normal = [None; 4];
            let mut proposed = [None; 4];
            for (m, r) in models.iter().zip(&reports) {
                let slot = match m {
                    LoadedModel::Bank(_) => &mut proposed,
                    LoadedModel::Net(_) => &mut normal,
                };
                slot[kind_index(m.kind())] = Some(&r.report);
            }
            render_comparison_table(&comparison_rows(&names, &normal, &proposed))
        }
    };
    if let Some(out) = &opts.out {
        create_dir(out)?;
        write_json(&out.join("report.json"), &reports)?;
        write_file(&out.join("table.txt"), &table)?;
    }
    Ok(EvaluateOutput { reports, table })
}

// -------------------------------------------------------------- classify

#[derive(Debug, Clone)]
pub struct ClassifyOptions {
    pub model: PathBuf,
    /// Feature CSV; label cells may be empty or `?`.
    pub features: PathBuf,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifiedRow {
    pub class: String,
    pub tie_broken: bool,
    /// Vote counts FA..FE for banks; `None` for single networks.
    pub flags: Option<[u8; 5]>,
}

/// Classifies each feature row; with `out`, writes `predictions.csv`.
pub fn cmd_classify(opts: &ClassifyOptions) -> Result<Vec<ClassifiedRow>> {
    let model = LoadedModel::load(&opts.model)?;
    let names = model.class_names().to_vec();
    let (rows, _) = read_feature_rows(&opts.features, &names)?;
    let classified = rows
        .iter()
        .map(|x| match &model {
            LoadedModel::Bank(b) => b.classify(x).map(|d| ClassifiedRow {
                class: names[d.class].clone(),
                tie_broken: d.tie_broken,
                flags: Some(d.flags.counts),
            }),
            LoadedModel::Net(n) => n.predict(x).map(|p| ClassifiedRow {
                class: names[p.class].clone(),
                tie_broken: false,
                flags: None,
            }),
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some(out) = &opts.out {
        create_dir(out)?;
        let mut text = String::from("row,class,tie_broken,fa,fb,fc,fd,fe\n");
        for (i, r) in classified.iter().enumerate() {
            write!(text, "{},{},{}", i + 1, r.class, r.tie_broken).unwrap();
            match r.flags {
                Some(f) => f.iter().for_each(|v| write!(text, ",{v}").unwrap()),
                None => text.push_str(",,,,,"),
            }
            text.push('\n');
        }
        write_file(&out.join("predictions.csv"), &text)?;
    }
    Ok(classified)
}

// --------------------------------------------------------------- compare

#[derive(Debug, Clone)]
pub struct CompareOptions {
    pub kinds: Vec<NetKind>,
    /// Hidden sizes and optimiser settings; the kind field is ignored.
    pub net: NetConfig,
    pub seed: u64,
    pub include_normal: bool,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions {
            kinds: NetKind::ALL.to_vec(),
            net: NetConfig::new(NetKind::Pattern),
            seed: 0,
            include_normal: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CompareOutput {
    pub baselines: Vec<(NetKind, Mlp, EvalReport)>,
    pub banks: Vec<(NetKind, PairNetBank, EvalReport)>,
    pub comparison_table: String,
    pub pairwise_table: String,
}

enum Trained {
    Net(Mlp),
    Bank(PairNetBank),
}

impl CompareOutput {
    /// Trains a baseline and a bank per kind, all concurrently, and
    /// evaluates both on `test`. Each uses `opts.seed` directly, so the
    /// artifacts equal those of `train` run with the same seed.
    pub fn run(train: &FeatureMatrix, test: &FeatureMatrix, opts: &CompareOptions) -> Result<Self> {
        if opts.kinds.is_empty() {
            return Err(Error::invalid("no topology kinds selected"));
        }
        let mut kinds = opts.kinds.clone();
        kinds.sort_by_key(|&k| kind_index(k));
        kinds.dedup();
        let jobs: Vec<(NetKind, bool)> = kinds.iter().flat_map(|&k| [(k, false), (k, true)]).collect();
        let trained = jobs
            .par_iter()
            .map(|&(kind, pairwise)| {
                let cfg = NetConfig { kind, ..opts.net.clone() };
                if pairwise {
                    train_bank(train, &cfg, opts.seed).map(|(b, _)| Trained::Bank(b))
                } else {
                    train_multiclass_baseline(train, &cfg, opts.seed).map(|(n, _)| Trained::Net(n))
                }
            })
            .collect::<Result<Vec<_>>>()?;

        let mut baselines = Vec::new();
        let mut banks = Vec::new();
        for ((kind, _), t) in jobs.into_iter().zip(trained) {
            match t {
                Trained::Net(n) => {
                    let cfg = report_config("compare", "normal", kind, opts.seed, &n.topology.hidden);
                    let report = evaluate_net(&n, test, cfg)?;
                    baselines.push((kind, n, report));
                }
                Trained::Bank(b) => {
                    let cfg = report_config("compare", "proposed", kind, opts.seed, &b.nets[0].topology.hidden);
                    let report = evaluate_bank(&b, test, cfg)?;
                    banks.push((kind, b, report));
                }
            }
        }

        let mut normal = [None; 4];
        let mut proposed = [None; 4];
        let mut bank_refs = [None; 4];
        for (k, _, r) in &baselines {
            normal[kind_index(*k)] = Some(r);
        }
        for (k, b, r) in &banks {
            proposed[kind_index(*k)] = Some(r);
            bank_refs[kind_index(*k)] = Some(b);
        }
        let comparison_table = render_comparison_table(&comparison_rows(&test.class_names, &normal, &proposed));
        let pairwise_table = render_pairwise_table(&pair_rows(&bank_refs, test, opts.include_normal)?);
        Ok(CompareOutput {
            baselines,
            banks,
            comparison_table,
            pairwise_table,
        })
    }

    /// Writes `comparison.txt`, `pairwise.txt`, `report.json` and every
    /// model under `models/<kind>/`.
    pub fn write(&self, out: &Path) -> Result<()> {
        create_dir(out)?;
        write_file(&out.join("comparison.txt"), &self.comparison_table)?;
        write_file(&out.join("pairwise.txt"), &self.pairwise_table)?;
        let mut reports = Vec::new();
        for (kind, net, report) in &self.baselines {
            let dir = out.join("models").join(kind.as_str());
            create_dir(&dir)?;
            save_model(net, &dir.join("baseline.json"))?;
            reports.push(NamedReport {
                model: format!("{kind}/baseline"),
                report: report.clone(),
            });
        }
        for (kind, bank, report) in &self.banks {
            save_bank(bank, &out.join("models").join(kind.as_str()).join("bank"))?;
            reports.push(NamedReport {
                model: format!("{kind}/bank"),
                report: report.clone(),
            });
        }
        write_json(&out.join("report.json"), &reports)
    }
}

/// `CompareOutput::run` on two feature CSVs; writes results when `out` is set.
pub fn cmd_compare(
    train_csv: &Path,
    test_csv: &Path,
    class_names: &[String],
    opts: &CompareOptions,
    out: Option<&Path>,
) -> Result<CompareOutput> {
    let train = read_feature_csv(train_csv, class_names)?;
    let test = read_feature_csv(test_csv, class_names)?;
    let result = CompareOutput::run(&train, &test, opts)?;
    if let Some(out) = out {
        result.write(out)?;
    }
    Ok(result)
}
