use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::features::{FeatureVector, N_FEATURES};
use crate::error::{Error, Result};

/// Labelled feature rows; labels index into `class_names`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    pub rows: Vec<FeatureVector>,
    pub labels: Vec<usize>,
    pub class_names: Vec<String>,
}

impl FeatureMatrix {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Rows at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            rows: indices.iter().map(|&i| self.rows[i]).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            class_names: self.class_names.clone(),
        }
    }

    pub fn with_class_names(mut self, class_names: Vec<String>) -> Result<Self> {
        if self.labels.iter().any(|&l| l >= class_names.len()) {
            return Err(Error::invalid("label out of range for the new class names"));
        }
        self.class_names = class_names;
        Ok(self)
    }
}

pub fn build_matrix(
    vectors: Vec<FeatureVector>,
    labels: Vec<usize>,
    class_names: Vec<String>,
) -> Result<FeatureMatrix> {
    if vectors.len() != labels.len() {
        return Err(Error::invalid(format!(
            "{} feature rows but {} labels",
            vectors.len(),
            labels.len()
        )));
    }
    if let Some(&bad) = labels.iter().find(|&&l| l >= class_names.len()) {
        return Err(Error::invalid(format!(
            "label {bad} out of range for {} classes",
            class_names.len()
        )));
    }
    Ok(FeatureMatrix {
        rows: vectors,
        labels,
        class_names,
    })
}

fn header() -> String {
    let mut h = String::from("label");
    for i in 1..=N_FEATURES {
        write!(h, ",f{i:02}").unwrap();
    }
    h
}

/// Writes `label,f01..f15` rows; the label column holds the class name.
pub fn write_feature_csv(matrix: &FeatureMatrix, path: &Path) -> Result<()> {
    let mut out = header();
    out.push('\n');
    for (row, &label) in matrix.rows.iter().zip(&matrix.labels) {
        out.push_str(&matrix.class_names[label]);
        for v in row.as_slice() {
            write!(out, ",{v}").unwrap();
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Resolves a label cell given as class name, letter (A, B, ...) or index.
pub(crate) fn resolve_label(cell: &str, class_names: &[String]) -> Option<usize> {
    if let Some(i) = class_names.iter().position(|n| n.eq_ignore_ascii_case(cell)) {
        return Some(i);
    }
    let mut chars = cell.chars();
    if let (Some(c), None) = (chars.next(), chars.next()) {
        if c.is_ascii_alphabetic() {
            let i = (c.to_ascii_uppercase() as u8 - b'A') as usize;
            return (i < class_names.len()).then_some(i);
        }
    }
    cell.parse::<usize>().ok().filter(|&i| i < class_names.len())
}

/// Reads feature rows whose label cells may be empty (unlabelled input).
pub fn read_feature_rows(path: &Path, class_names: &[String]) -> Result<(Vec<FeatureVector>, Vec<Option<usize>>)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == header() => {}
        Some((_, h)) => return Err(err(1, format!("expected header `{}`, found `{}`", header(), h.trim()))),
        None => return Err(err(1, "empty feature file".into())),
    }
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (i, line) in lines {
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != N_FEATURES + 1 {
            return Err(err(lineno, format!("expected {} columns, found {}", N_FEATURES + 1, cells.len())));
        }
        let label = if cells[0].is_empty() || cells[0] == "?" {
            None
        } else {
            Some(
                resolve_label(cells[0], class_names)
                    .ok_or_else(|| err(lineno, format!("unknown class label {:?}", cells[0])))?,
            )
        };
        let mut x = [0.0; N_FEATURES];
        for (slot, cell) in x.iter_mut().zip(&cells[1..]) {
            *slot = cell
                .parse()
                .map_err(|_| err(lineno, format!("non-numeric feature {cell:?}")))?;
        }
        rows.push(FeatureVector(x));
        labels.push(label);
    }
    Ok((rows, labels))
}

/// Reads a fully labelled feature CSV.
pub fn read_feature_csv(path: &Path, class_names: &[String]) -> Result<FeatureMatrix> {
    let (rows, labels) = read_feature_rows(path, class_names)?;
    let labels = labels
        .into_iter()
        .enumerate()
        .map(|(i, l)| {
            l.ok_or_else(|| Error::Parse {
                path: path.to_path_buf(),
                line: i + 2,
                message: "missing class label".into(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    build_matrix(rows, labels, class_names.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names() -> Vec<String> {
        ["Alpha", "Beta", "Gamma"].iter().map(|s| s.to_string()).collect()
    }

    fn fv(v: f64) -> FeatureVector {
        FeatureVector([v; N_FEATURES])
    }

    #[test]
    fn build_cases() {
        let m = build_matrix(vec![], vec![], names()).unwrap();
        assert!(m.is_empty());
        let m = build_matrix(vec![fv(1.0), fv(2.0), fv(3.0)], vec![0, 2, 1], names()).unwrap();
        assert_eq!(m.len(), 3);
        assert_eq!(m.rows[1], fv(2.0));
        assert!(build_matrix(vec![fv(1.0)], vec![0, 1], names()).is_err());
        assert!(build_matrix(vec![fv(1.0)], vec![3], names()).is_err());
    }

    #[test]
    fn csv_round_trip_and_label_forms() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.csv");
        let m = build_matrix(vec![fv(0.1), fv(1.0 / 3.0)], vec![1, 2], names()).unwrap();
        write_feature_csv(&m, &p).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("label,f01,f02,"));
        assert!(text.lines().next().unwrap().ends_with(",f15"));
        assert_eq!(read_feature_csv(&p, &names()).unwrap(), m);

        let row = vec!["0.5"; N_FEATURES].join(",");
        fs::write(&p, format!("{}\nB,{row}\n2,{row}\ngamma,{row}\n,{row}\n", header())).unwrap();
        let (_, labels) = read_feature_rows(&p, &names()).unwrap();
        assert_eq!(labels, vec![Some(1), Some(2), Some(2), None]);
        assert!(matches!(read_feature_csv(&p, &names()), Err(Error::Parse { line: 5, .. })));
    }
}
