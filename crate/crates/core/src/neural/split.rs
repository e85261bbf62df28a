use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::hrv::FeatureMatrix;
use crate::rng;

const TRAIN_FRACTION: f64 = 0.7;

/// Stratified 70/30 split. Each class keeps round(0.7 n_c) rows for
/// training, chosen by a seeded shuffle; both halves preserve the original
/// row order.
pub fn split_70_30(matrix: &FeatureMatrix, seed: u64) -> Result<(FeatureMatrix, FeatureMatrix)> {
    let mut train_idx = Vec::new();
    let mut test_idx = Vec::new();
    for class in 0..matrix.n_classes() {
        let mut idx: Vec<usize> = (0..matrix.len()).filter(|&i| matrix.labels[i] == class).collect();
        match idx.len() {
            0 => continue,
            1 => {
                return Err(Error::Coverage(format!(
                    "class {} has a single row; a split needs at least 2",
                    matrix.class_names[class]
                )))
            }
            _ => {}
        }
        idx.shuffle(&mut rng::stream(rng::derive_seed(seed, class as u64)));
        let n_train = (TRAIN_FRACTION * idx.len() as f64).round() as usize;
        train_idx.extend_from_slice(&idx[..n_train]);
        test_idx.extend_from_slice(&idx[n_train..]);
    }
    train_idx.sort_unstable();
    test_idx.sort_unstable();
    Ok((matrix.select(&train_idx), matrix.select(&test_idx)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hrv::{build_matrix, FeatureVector};

    fn matrix(labels: Vec<usize>) -> FeatureMatrix {
        let rows = (0..labels.len()).map(|i| FeatureVector([i as f64; 15])).collect();
        build_matrix(rows, labels, vec!["a".into(), "b".into()]).unwrap()
    }

    #[test]
    fn proportions() {
        let (tr, te) = split_70_30(&matrix(vec![0; 10]), 1).unwrap();
        assert_eq!((tr.len(), te.len()), (7, 3));
        let labels: Vec<usize> = (0..100).map(|i| i % 2).collect();
        let (tr, te) = split_70_30(&matrix(labels), 1).unwrap();
        assert_eq!(tr.class_counts(), vec![35, 35]);
        assert_eq!(te.class_counts(), vec![15, 15]);
    }

    #[test]
    fn seeded_and_disjoint() {
        let labels: Vec<usize> = (0..40).map(|i| i % 2).collect();
        let m = matrix(labels);
        let (a, b) = split_70_30(&m, 5).unwrap();
        assert_eq!(split_70_30(&m, 5).unwrap(), (a.clone(), b.clone()));
        assert_ne!(split_70_30(&m, 6).unwrap().0, a);
        let mut ids: Vec<u64> = a.rows.iter().chain(&b.rows).map(|r| r.0[0] as u64).collect();
        ids.sort_unstable();
        assert_eq!(ids, (0..40).collect::<Vec<_>>());
    }

    #[test]
    fn singleton_class_errors() {
        assert!(matches!(split_70_30(&matrix(vec![0, 0, 1]), 0), Err(Error::Coverage(_))));
    }
}
