use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::tables::{PairRow, Star};
use crate::error::{Error, Result};
use crate::hrv::FeatureMatrix;
use crate::neural::{Mlp, NetKind};
use crate::ovo::{PairNetBank, PAIRS};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub class_names: Vec<String>,
    /// `confusion[truth][predicted]`.
    pub confusion: Vec<Vec<usize>>,
    pub counts: Vec<usize>,
    /// Percent correct per class; `None` for classes absent from the test set.
    pub per_class_accuracy: Vec<Option<f64>>,
    pub overall_accuracy: f64,
    /// Decisions where the highest vote count was shared.
    pub ties: usize,
    pub config: BTreeMap<String, String>,
}

impl EvalReport {
    pub fn from_predictions(
        class_names: Vec<String>,
        truth: &[usize],
        predicted: &[usize],
        ties: usize,
        config: BTreeMap<String, String>,
    ) -> Result<Self> {
        let k = class_names.len();
        if truth.len() != predicted.len() {
            return Err(Error::invalid("truth and prediction lengths differ"));
        }
        if truth.is_empty() {
            return Err(Error::Coverage("no test rows to evaluate".into()));
        }
        if truth.iter().chain(predicted).any(|&c| c >= k) {
            return Err(Error::invalid("class index out of range"));
        }
        let mut confusion = vec![vec![0usize; k]; k];
        let mut correct = 0usize;
        for (&t, &p) in truth.iter().zip(predicted) {
            confusion[t][p] += 1;
            correct += usize::from(t == p);
        }
        let counts: Vec<usize> = confusion.iter().map(|row| row.iter().sum()).collect();
        let diagonal: usize = (0..k).map(|c| confusion[c][c]).sum();
        assert_eq!(diagonal, correct, "confusion diagonal disagrees with direct count");
        let per_class_accuracy = (0..k)
            .map(|c| (counts[c] > 0).then(|| 100.0 * confusion[c][c] as f64 / counts[c] as f64))
            .collect();
        Ok(EvalReport {
            class_names,
            confusion,
            counts,
            per_class_accuracy,
            overall_accuracy: 100.0 * correct as f64 / truth.len() as f64,
            ties,
            config,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (key, value) in &self.config {
            writeln!(out, "# {key} = {value}").unwrap();
        }
        out.push_str("class\tn\taccuracy");
        for i in 0..self.class_names.len() {
            write!(out, "\tpred_{}", (b'A' + i as u8) as char).unwrap();
        }
        out.push('\n');
        for (c, name) in self.class_names.iter().enumerate() {
            let acc = self.per_class_accuracy[c].map_or("-".to_string(), |a| format!("{a:.2}"));
            write!(out, "{name}\t{}\t{acc}", self.counts[c]).unwrap();
            for v in &self.confusion[c] {
                write!(out, "\t{v}").unwrap();
            }
            out.push('\n');
        }
        writeln!(out, "overall\t{}\t{:.2}", self.counts.iter().sum::<usize>(), self.overall_accuracy).unwrap();
        writeln!(out, "ties\t{}", self.ties).unwrap();
        out
    }
}

fn check_classes(model: &[String], test: &FeatureMatrix) -> Result<()> {
    if model != test.class_names.as_slice() {
        return Err(Error::invalid(format!(
            "model classes {model:?} differ from test classes {:?}",
            test.class_names
        )));
    }
    Ok(())
}

pub fn evaluate_net(net: &Mlp, test: &FeatureMatrix, config: BTreeMap<String, String>) -> Result<EvalReport> {
    check_classes(&net.class_names, test)?;
    let predicted = test
        .rows
        .iter()
        .map(|x| net.predict(x).map(|p| p.class))
        .collect::<Result<Vec<_>>>()?;
    EvalReport::from_predictions(test.class_names.clone(), &test.labels, &predicted, 0, config)
}

pub fn evaluate_bank(bank: &PairNetBank, test: &FeatureMatrix, config: BTreeMap<String, String>) -> Result<EvalReport> {
    check_classes(&bank.classes.names, test)?;
    let decisions = test
        .rows
        .iter()
        .map(|x| bank.classify(x))
        .collect::<Result<Vec<_>>>()?;
    let predicted: Vec<usize> = decisions.iter().map(|d| d.class).collect();
    let ties = decisions.iter().filter(|d| d.tie_broken).count();
    EvalReport::from_predictions(test.class_names.clone(), &test.labels, &predicted, ties, config)
}

/// Pair-net accuracy on each class of each pair: two rows per pair, in
/// pair order, skipping pairs that involve the normal class unless
/// `include_normal`. `banks` is indexed like `NetKind::ALL`.
pub fn pair_rows(banks: &[Option<&PairNetBank>; 4], test: &FeatureMatrix, include_normal: bool) -> Result<Vec<PairRow>> {
    let Some(reference) = banks.iter().flatten().next() else {
        return Err(Error::invalid("pairwise table needs at least one bank"));
    };
    for (k, bank) in banks.iter().enumerate() {
        if let Some(b) = bank {
            check_classes(&b.classes.names, test)?;
            if b.kind != NetKind::ALL[k] {
                return Err(Error::invalid("bank placed in the wrong topology column"));
            }
        }
    }
    let names = &reference.classes.names;
    let mut rows = Vec::new();
    for (r, &(a, b)) in PAIRS.iter().enumerate() {
        if !include_normal && (a == reference.classes.normal || b == reference.classes.normal) {
            continue;
        }
        for (star, class, output) in [(Star::First, a, 0), (Star::Second, b, 1)] {
            let mut cells = [None; 4];
            for (k, bank) in banks.iter().enumerate() {
                let Some(bank) = bank else { continue };
                let mut n = 0usize;
                let mut hit = 0usize;
                for (x, _) in test.rows.iter().zip(&test.labels).filter(|(_, &l)| l == class) {
                    n += 1;
                    hit += usize::from(bank.nets[r].predict(x)?.class == output);
                }
                cells[k] = (n > 0).then(|| 100.0 * hit as f64 / n as f64);
            }
            rows.push(PairRow {
                first: names[a].clone(),
                second: names[b].clone(),
                star,
                cells,
            });
        }
    }
    Ok(rows)
}
