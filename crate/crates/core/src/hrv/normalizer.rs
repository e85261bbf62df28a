use serde::{Deserialize, Serialize};

use super::features::{FeatureVector, N_FEATURES};
use super::matrix::FeatureMatrix;
use crate::error::{Error, Result};

/// Columns with a standard deviation below this are treated as constant.
const MIN_SD: f64 = 1e-12;

/// Per-feature z-score statistics, fitted on training rows only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    pub mean: Vec<f64>,
    pub sd: Vec<f64>,
}

impl Normalizer {
    pub fn identity() -> Self {
        Normalizer {
            mean: vec![0.0; N_FEATURES],
            sd: vec![1.0; N_FEATURES],
        }
    }

    pub fn apply(&self, x: &FeatureVector) -> FeatureVector {
        let mut out = [0.0; N_FEATURES];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (x.0[i] - self.mean[i]) / self.sd[i];
        }
        FeatureVector(out)
    }
}

pub fn fit_normalizer(train: &FeatureMatrix) -> Result<Normalizer> {
    if train.is_empty() {
        return Err(Error::Coverage("cannot fit a normaliser on zero rows".into()));
    }
    let n = train.len() as f64;
    let mut mean = vec![0.0; N_FEATURES];
    for row in &train.rows {
        for (m, v) in mean.iter_mut().zip(row.as_slice()) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut sd = vec![0.0; N_FEATURES];
    for row in &train.rows {
        for i in 0..N_FEATURES {
            let d = row.0[i] - mean[i];
            sd[i] += d * d;
        }
    }
    for s in &mut sd {
        *s = (*s / n).sqrt();
        if !(*s > MIN_SD) {
            *s = 1.0;
        }
    }
    Ok(Normalizer { mean, sd })
}

pub fn apply_normalizer(nz: &Normalizer, matrix: &FeatureMatrix) -> FeatureMatrix {
    FeatureMatrix {
        rows: matrix.rows.iter().map(|r| nz.apply(r)).collect(),
        labels: matrix.labels.clone(),
        class_names: matrix.class_names.clone(),
    }
}
