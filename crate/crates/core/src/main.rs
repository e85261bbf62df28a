use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use ecg_ovo::eval::{
    cmd_classify, cmd_compare, cmd_detect, cmd_evaluate, cmd_features, cmd_train, ClassifyOptions, CompareOptions,
    Config, DetectOptions, EvaluateOptions, FeaturesOptions, LabeledInput, TableKind, TrainMode, TrainOptions,
};
use ecg_ovo::neural::{NetKind, ScgParams, DEFAULT_HIDDEN};
use ecg_ovo::ovo::{ClassSet, NetConfig};
use ecg_ovo::signal_io::{DEFAULT_HOP_S, DEFAULT_WINDOW_S};
use ecg_ovo::{Error, Result};

/// QRS detection, HRV features and one-vs-one neural ECG classification.
#[derive(Parser)]
#[command(name = "ecg-ovo", version)]
struct Cli {
    /// Master seed for splits and network initialisation.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Flat key = value file; every flag below has a same-named key and
    /// flags given on the command line win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detect R peaks in CSV or WFDB records.
    Detect(DetectArgs),
    /// Extract HRV feature rows from labelled records.
    Features(FeaturesArgs),
    /// Train a pair bank or a five-class baseline.
    Train(TrainArgs),
    /// Evaluate models on a test feature file and print a table.
    Evaluate(EvaluateArgs),
    /// Classify feature rows with a saved bank or model.
    Classify(ClassifyArgs),
    /// Train and compare baselines and banks for every topology kind.
    Compare(CompareArgs),
}

#[derive(Args)]
struct DetectArgs {
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Sampling rate for CSV files without an fs header.
    #[arg(long)]
    fs: Option<f64>,
    /// Also write per-stage waveforms.
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct FeaturesArgs {
    /// Inputs as LABEL=PATH; labels are class names or letters A..E.
    #[arg(required = true)]
    inputs: Vec<LabeledInput>,
    #[arg(long)]
    window: Option<f64>,
    #[arg(long)]
    hop: Option<f64>,
    #[arg(long)]
    fs: Option<f64>,
    /// Also write a 70/30 train/test split using --seed.
    #[arg(long)]
    split: bool,
    #[command(flatten)]
    classes: ClassArgs,
}

#[derive(Args)]
struct ClassArgs {
    /// Five comma-separated class names in A..E order.
    #[arg(long)]
    classes: Option<String>,
}

#[derive(Args)]
struct NetArgs {
    /// cascade, feedforward, fit or pattern.
    #[arg(long)]
    kind: Option<NetKind>,
    /// Hidden layer sizes, comma-separated.
    #[arg(long)]
    hidden: Option<String>,
    #[arg(long)]
    max_iter: Option<usize>,
}

#[derive(Args)]
struct TrainArgs {
    features: PathBuf,
    /// pairwise or multiclass.
    #[arg(long)]
    mode: Option<TrainMode>,
    #[command(flatten)]
    net: NetArgs,
    #[command(flatten)]
    classes: ClassArgs,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Bank directories or model files.
    #[arg(required = true)]
    models: Vec<PathBuf>,
    #[arg(long)]
    test: Option<PathBuf>,
    /// pairwise or comparison.
    #[arg(long)]
    table: Option<TableKind>,
    /// Keep pairs involving the normal class in the pairwise table.
    #[arg(long)]
    include_normal: bool,
}

#[derive(Args)]
struct ClassifyArgs {
    model: PathBuf,
    features: PathBuf,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    train: Option<PathBuf>,
    #[arg(long)]
    test: Option<PathBuf>,
    /// Comma-separated kinds, or `all`.
    #[arg(long)]
    kinds: Option<String>,
    #[command(flatten)]
    net: NetArgs,
    #[command(flatten)]
    classes: ClassArgs,
    #[arg(long)]
    include_normal: bool,
}

const CONFIG_KEYS: &[&str] = &[
    "seed",
    "out",
    "fs",
    "trace",
    "window",
    "hop",
    "split",
    "classes",
    "mode",
    "kind",
    "hidden",
    "max_iter",
    "test",
    "train",
    "table",
    "include_normal",
    "kinds",
];

/// Flag value if given, else the config value, else `None`.
fn pick<T: FromStr>(flag: Option<T>, config: &Config, key: &str) -> Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    match flag {
        Some(v) => Ok(Some(v)),
        None => config.parsed(key),
    }
}

fn pick_bool(flag: bool, config: &Config, key: &str) -> Result<bool> {
    Ok(flag || config.parsed::<bool>(key)?.unwrap_or(false))
}

fn required<T>(value: Option<T>, what: &str) -> Result<T> {
    value.ok_or_else(|| Error::InvalidInput(format!("--{what} is required (flag or config key)")))
}

fn parse_list<T: FromStr>(text: &str, what: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    text.split(',')
        .map(|s| s.trim().parse().map_err(|e| Error::InvalidInput(format!("{what}: {e}"))))
        .collect()
}

fn class_names(args: &ClassArgs, config: &Config) -> Result<Vec<String>> {
    match pick(args.classes.clone(), config, "classes")? {
        Some(list) => Ok(ClassSet::from_names(parse_list(&list, "classes")?)?.names),
        None => Ok(ClassSet::default().names),
    }
}

fn net_config(args: &NetArgs, config: &Config) -> Result<NetConfig> {
    let kind = pick(args.kind, config, "kind")?.unwrap_or(NetKind::Pattern);
    let hidden = match pick(args.hidden.clone(), config, "hidden")? {
        Some(h) => parse_list(&h, "hidden")?,
        None => vec![DEFAULT_HIDDEN],
    };
    let mut scg = ScgParams::default();
    if let Some(n) = pick(args.max_iter, config, "max_iter")? {
        scg.max_iter = n;
    }
    Ok(NetConfig { kind, hidden, scg })
}

fn run(cli: Cli) -> Result<()> {
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    config.check_keys(CONFIG_KEYS)?;
    let seed = pick(cli.seed, &config, "seed")?.unwrap_or(0);
    let out = pick(cli.out, &config, "out")?;
    let out_or_default = || out.clone().unwrap_or_else(|| PathBuf::from("out"));

    match cli.command {
        Command::Detect(a) => {
            let result = cmd_detect(&DetectOptions {
                inputs: a.inputs,
                fs: pick(a.fs, &config, "fs")?,
                trace: pick_bool(a.trace, &config, "trace")?,
                out: out_or_default(),
            })?;
            for (path, n) in result.records {
                println!("{}\t{n} peaks", path.display());
            }
        }
        Command::Features(a) => {
            let mut opts = FeaturesOptions::new(a.inputs, out_or_default());
            opts.class_names = class_names(&a.classes, &config)?;
            opts.window_s = pick(a.window, &config, "window")?.unwrap_or(DEFAULT_WINDOW_S);
            opts.hop_s = pick(a.hop, &config, "hop")?.unwrap_or(DEFAULT_HOP_S);
            opts.fs = pick(a.fs, &config, "fs")?;
            opts.split_seed = pick_bool(a.split, &config, "split")?.then_some(seed);
            let result = cmd_features(&opts)?;
            for r in &result.rejections {
                eprintln!("rejected {} segment {} at {} s: {}", r.source, r.segment, r.start_s, r.reason);
            }
            println!("{}\t{} rows", result.features_path.display(), result.matrix.len());
        }
        Command::Train(a) => {
            let result = cmd_train(&TrainOptions {
                features: a.features,
                class_names: class_names(&a.classes, &config)?,
                mode: pick(a.mode, &config, "mode")?.unwrap_or(TrainMode::Pairwise),
                net: net_config(&a.net, &config)?,
                seed,
                out: out_or_default(),
            })?;
            println!("{}", result.artifact.display());
        }
        Command::Evaluate(a) => {
            let result = cmd_evaluate(&EvaluateOptions {
                models: a.models,
                test: required(pick(a.test, &config, "test")?, "test")?,
                table: pick(a.table, &config, "table")?.unwrap_or(TableKind::Pairwise),
                include_normal: pick_bool(a.include_normal, &config, "include_normal")?,
                out,
            })?;
            print!("{}", result.table);
        }
        Command::Classify(a) => {
            let rows = cmd_classify(&ClassifyOptions {
                model: a.model,
                features: a.features,
                out,
            })?;
            for (i, r) in rows.iter().enumerate() {
                let tie = if r.tie_broken { "\ttie" } else { "" };
                println!("{}\t{}{tie}", i + 1, r.class);
            }
        }
        Command::Compare(a) => {
            let kinds = match pick(a.kinds.clone(), &config, "kinds")? {
                None => NetKind::ALL.to_vec(),
                Some(k) if k.trim().eq_ignore_ascii_case("all") => NetKind::ALL.to_vec(),
                Some(k) => parse_list(&k, "kinds")?,
            };
            let opts = CompareOptions {
                kinds,
                net: net_config(&a.net, &config)?,
                seed,
                include_normal: pick_bool(a.include_normal, &config, "include_normal")?,
            };
            let train = required(pick(a.train, &config, "train")?, "train")?;
            let test = required(pick(a.test, &config, "test")?, "test")?;
            let names = class_names(&a.classes, &config)?;
            let result = cmd_compare(&train, &test, &names, &opts, out.as_deref().map(Path::new))?;
            print!("{}", result.comparison_table);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
