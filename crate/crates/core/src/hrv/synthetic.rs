//! Seeded, linearly separable class blobs in feature space, used by the
//! examples and the capability checks.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::features::{FeatureVector, N_FEATURES};
use super::matrix::FeatureMatrix;
use crate::rng;

/// `n_per_class` rows for each class. Feature scales differ by orders of
/// magnitude so that training depends on normalisation.
pub fn separable_blobs(class_names: &[String], n_per_class: usize, seed: u64) -> FeatureMatrix {
    let mut layout = rng::stream(rng::derive_seed(seed, 0x6c61_796f));
    let scales: Vec<f64> = (0..N_FEATURES).map(|j| 10f64.powi(j as i32 % 4 - 2)).collect();
    let centres: Vec<Vec<f64>> = (0..class_names.len())
        .map(|_| {
            (0..N_FEATURES)
                .map(|j| scales[j] * (5.0 + 3.0 * layout.random_range(-1.0..1.0)))
                .collect()
        })
        .collect();

    let mut draw = rng::stream(rng::derive_seed(seed, 0x726f_7773));
    let unit = Normal::new(0.0, 0.35).expect("finite sd");
    let mut rows = Vec::with_capacity(class_names.len() * n_per_class);
    let mut labels = Vec::with_capacity(rows.capacity());
    for _ in 0..n_per_class {
        for (c, centre) in centres.iter().enumerate() {
            let mut x = [0.0; N_FEATURES];
            for j in 0..N_FEATURES {
                x[j] = centre[j] + scales[j] * unit.sample(&mut draw);
            }
            rows.push(FeatureVector(x));
            labels.push(c);
        }
    }
    FeatureMatrix {
        rows,
        labels,
        class_names: class_names.to_vec(),
    }
}
