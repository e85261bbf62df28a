/// Matching window used for sensitivity / positive predictivity.
pub const DEFAULT_MATCH_TOLERANCE_S: f64 = 0.040;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BeatMatch {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
}

impl BeatMatch {
    pub fn sensitivity(&self) -> f64 {
        let d = self.true_positives + self.false_negatives;
        if d == 0 {
            1.0
        } else {
            self.true_positives as f64 / d as f64
        }
    }

    pub fn positive_predictivity(&self) -> f64 {
        let d = self.true_positives + self.false_positives;
        if d == 0 {
            1.0
        } else {
            self.true_positives as f64 / d as f64
        }
    }
}

/// One-to-one matching of sorted beat times within `tolerance` seconds.
pub fn match_beats(detected: &[f64], truth: &[f64], tolerance: f64) -> BeatMatch {
    let (mut i, mut j) = (0, 0);
    let mut m = BeatMatch::default();
    while i < detected.len() && j < truth.len() {
        let d = detected[i] - truth[j];
        if d.abs() <= tolerance {
            m.true_positives += 1;
            i += 1;
            j += 1;
        } else if d < 0.0 {
            m.false_positives += 1;
            i += 1;
        } else {
            m.false_negatives += 1;
            j += 1;
        }
    }
    m.false_positives += detected.len() - i;
    m.false_negatives += truth.len() - j;
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        let m = match_beats(&[1.0, 2.01, 2.5, 4.0], &[1.02, 2.0, 3.0, 4.05], 0.04);
        assert_eq!(m.true_positives, 2);
        assert_eq!(m.false_positives, 2);
        assert_eq!(m.false_negatives, 2);
        assert_eq!(match_beats(&[], &[], 0.04).sensitivity(), 1.0);
    }
}
