use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::classes::{ClassSet, ConditionTable, N_CLASSES, N_PAIRS, PAIRS};
use super::flags::{compute_flags, decide, Decision, PairOutcome};
use crate::error::{Error, Result};
use crate::hrv::{FeatureMatrix, FeatureVector, FEATURE_VERSION, N_FEATURES};
use crate::neural::{
    init_network, load_model, save_model, scg_train, Mlp, NetKind, ScgParams, Topology, TrainingHistory,
    DEFAULT_HIDDEN,
};
use crate::rng::derive_seed;

pub const BANK_FORMAT: &str = "ecg-ovo/pair-bank";
const BANK_FORMAT_VERSION: u32 = 1;
pub const BANK_MANIFEST: &str = "bank.json";

/// Topology kind, hidden sizes and optimiser settings shared by every net
/// of a bank or baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetConfig {
    pub kind: NetKind,
    pub hidden: Vec<usize>,
    pub scg: ScgParams,
}

impl NetConfig {
    pub fn new(kind: NetKind) -> Self {
        NetConfig {
            kind,
            hidden: vec![DEFAULT_HIDDEN],
            scg: ScgParams::default(),
        }
    }

    fn topology(&self, output_dim: usize) -> Result<Topology> {
        Topology::new(self.kind, N_FEATURES, self.hidden.clone(), output_dim)
    }
}

/// Ten trained two-output nets; net r separates `PAIRS[r]` with the
/// pair's first class on output 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PairNetBank {
    pub classes: ClassSet,
    pub kind: NetKind,
    pub master_seed: u64,
    pub nets: Vec<Mlp>,
    table: ConditionTable,
}

impl PairNetBank {
    pub fn new(classes: ClassSet, master_seed: u64, nets: Vec<Mlp>) -> Result<Self> {
        if nets.len() != N_PAIRS {
            return Err(Error::invalid(format!("a bank holds {N_PAIRS} nets, got {}", nets.len())));
        }
        let kind = nets[0].topology.kind;
        for (r, net) in nets.iter().enumerate() {
            let (a, b) = PAIRS[r];
            if net.topology.kind != kind {
                return Err(Error::invalid("all nets in a bank must share one topology kind"));
            }
            if net.topology.output_dim != 2 || net.topology.input_dim != N_FEATURES {
                return Err(Error::invalid(format!("net {} is not a {N_FEATURES}-in, 2-out network", r + 1)));
            }
            if net.class_names != [classes.names[a].clone(), classes.names[b].clone()] {
                return Err(Error::invalid(format!(
                    "net {} classes {:?} do not match pair ({}, {})",
                    r + 1,
                    net.class_names,
                    classes.names[a],
                    classes.names[b]
                )));
            }
        }
        Ok(PairNetBank {
            classes,
            kind,
            master_seed,
            nets,
            table: ConditionTable::standard(),
        })
    }

    pub fn is_trained(&self) -> bool {
        self.nets.iter().all(Mlp::is_trained)
    }

    /// Winner and winning score of each net, in table order.
    pub fn outcomes(&self, x: &FeatureVector) -> Result<Vec<PairOutcome>> {
        self.nets
            .iter()
            .map(|net| {
                let p = net.predict(x)?;
                Ok(PairOutcome {
                    winner: p.class as u8 + 1,
                    score: p.scores[p.class],
                })
            })
            .collect()
    }

    pub fn classify(&self, x: &FeatureVector) -> Result<Decision> {
        if !self.is_trained() {
            return Err(Error::Untrained);
        }
        let outcomes = self.outcomes(x)?;
        Ok(decide(compute_flags(&self.table, &outcomes)?))
    }
}

fn require_all_classes(train: &FeatureMatrix, what: &str) -> Result<ClassSet> {
    if train.class_names.len() != N_CLASSES {
        return Err(Error::invalid(format!(
            "{what} needs {N_CLASSES} classes, data declares {}",
            train.class_names.len()
        )));
    }
    let counts = train.class_counts();
    if let Some(c) = counts.iter().position(|&n| n == 0) {
        return Err(Error::Coverage(format!("no training rows for class {:?}", train.class_names[c])));
    }
    ClassSet::from_names(train.class_names.clone())
}

/// Rows of classes `a` and `b` relabelled 0 and 1.
pub(crate) fn pair_subset(m: &FeatureMatrix, a: usize, b: usize) -> FeatureMatrix {
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (x, &l) in m.rows.iter().zip(&m.labels) {
        if l == a || l == b {
            rows.push(*x);
            labels.push(usize::from(l == b));
        }
    }
    FeatureMatrix {
        rows,
        labels,
        class_names: vec![m.class_names[a].clone(), m.class_names[b].clone()],
    }
}

/// Trains the ten pair nets concurrently. Net r is seeded from
/// `derive_seed(master_seed, r)` and fits its own normaliser on its two
/// classes, so the result does not depend on scheduling.
pub fn train_bank(
    train: &FeatureMatrix,
    cfg: &NetConfig,
    master_seed: u64,
) -> Result<(PairNetBank, Vec<TrainingHistory>)> {
    let classes = require_all_classes(train, "pairwise training")?;
    let topology = cfg.topology(2)?;
    let trained: Vec<(Mlp, TrainingHistory)> = (0..N_PAIRS)
        .into_par_iter()
        .map(|r| {
            let (a, b) = PAIRS[r];
            let subset = pair_subset(train, a, b);
            let net = init_network(
                topology.clone(),
                subset.class_names.clone(),
                derive_seed(master_seed, r as u64),
            );
            scg_train(&net, &subset, None, &cfg.scg)
        })
        .collect::<Result<_>>()?;
    let (nets, histories): (Vec<_>, Vec<_>) = trained.into_iter().unzip();
    Ok((PairNetBank::new(classes, master_seed, nets)?, histories))
}

/// One five-output net trained on every class, with the same features,
/// normalisation policy and topology kind as the pair nets.
pub fn train_multiclass_baseline(train: &FeatureMatrix, cfg: &NetConfig, seed: u64) -> Result<(Mlp, TrainingHistory)> {
    require_all_classes(train, "multiclass training")?;
    let net = init_network(cfg.topology(N_CLASSES)?, train.class_names.clone(), seed);
    scg_train(&net, train, None, &cfg.scg)
}

#[derive(Serialize, Deserialize)]
struct ManifestEntry {
    net: usize,
    pair: [String; 2],
    file: String,
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    format: String,
    format_version: u32,
    feature_version: String,
    kind: NetKind,
    master_seed: u64,
    classes: ClassSet,
    nets: Vec<ManifestEntry>,
}

fn net_file(r: usize) -> String {
    format!("net{:02}.json", r + 1)
}

/// Writes `bank.json` plus `net01.json`..`net10.json` into `dir`.
/// Returns the manifest path.
pub fn save_bank(bank: &PairNetBank, dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut entries = Vec::with_capacity(N_PAIRS);
    for (r, net) in bank.nets.iter().enumerate() {
        let file = net_file(r);
        save_model(net, &dir.join(&file))?;
        let (a, b) = PAIRS[r];
        entries.push(ManifestEntry {
            net: r + 1,
            pair: [bank.classes.names[a].clone(), bank.classes.names[b].clone()],
            file,
        });
    }
    let manifest = Manifest {
        format: BANK_FORMAT.into(),
        format_version: BANK_FORMAT_VERSION,
        feature_version: FEATURE_VERSION.into(),
        kind: bank.kind,
        master_seed: bank.master_seed,
        classes: bank.classes.clone(),
        nets: entries,
    };
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serialises");
    text.push('\n');
    let path = dir.join(BANK_MANIFEST);
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Loads a bank from its directory or manifest path.
pub fn load_bank(path: &Path) -> Result<PairNetBank> {
    let manifest_path = if path.is_dir() { path.join(BANK_MANIFEST) } else { path.to_path_buf() };
    let dir = manifest_path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let text = fs::read_to_string(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
    let m: Manifest =
        serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", manifest_path.display())))?;
    if m.format != BANK_FORMAT {
        return Err(Error::Format(format!("not a bank manifest: format {:?}", m.format)));
    }
    if m.format_version != BANK_FORMAT_VERSION {
        return Err(Error::VersionMismatch {
            expected: BANK_FORMAT_VERSION.to_string(),
            found: m.format_version.to_string(),
        });
    }
    if m.feature_version != FEATURE_VERSION {
        return Err(Error::VersionMismatch {
            expected: FEATURE_VERSION.into(),
            found: m.feature_version,
        });
    }
    let classes = ClassSet::new(m.classes.names, m.classes.normal)?;
    if m.nets.len() != N_PAIRS {
        return Err(Error::Format(format!("manifest lists {} nets, expected {N_PAIRS}", m.nets.len())));
    }
    let mut nets = Vec::with_capacity(N_PAIRS);
    for (r, entry) in m.nets.iter().enumerate() {
        if entry.net != r + 1 {
            return Err(Error::Format(format!("manifest entry {} is out of order", entry.net)));
        }
        let file = Path::new(&entry.file);
        if file.components().count() != 1 {
            return Err(Error::Format(format!("model file {:?} must sit beside the manifest", entry.file)));
        }
        nets.push(load_model(&dir.join(file))?);
    }
    let bank = PairNetBank::new(classes, m.master_seed, nets)?;
    if bank.kind != m.kind {
        return Err(Error::Format("manifest kind disagrees with its models".into()));
    }
    Ok(bank)
}
