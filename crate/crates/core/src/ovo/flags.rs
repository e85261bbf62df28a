use serde::{Deserialize, Serialize};

use super::classes::{ConditionTable, N_CLASSES, N_PAIRS};
use crate::error::{Error, Result};

/// Result of one pair net: `winner` is 1 for the pair's first class and 2
/// for its second; `score` is the winning output's score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairOutcome {
    pub winner: u8,
    pub score: f64,
}

/// Per-class vote counts FA..FE and the summed winning scores used to
/// break ties.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlagVector {
    pub counts: [u8; N_CLASSES],
    pub tie_scores: [f64; N_CLASSES],
}

impl FlagVector {
    pub fn total(&self) -> u32 {
        self.counts.iter().map(|&c| c as u32).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub class: usize,
    pub flags: FlagVector,
    /// The maximum flag count was shared by more than one class.
    pub tie_broken: bool,
}

/// Counts, for each class, the nets it won: net r credits its first class
/// when the winner is 1 and its second class when the winner is 2.
pub fn compute_flags(table: &ConditionTable, outcomes: &[PairOutcome]) -> Result<FlagVector> {
    if outcomes.len() != N_PAIRS {
        return Err(Error::invalid(format!("expected {N_PAIRS} outcomes, got {}", outcomes.len())));
    }
    let mut counts = [0u8; N_CLASSES];
    let mut tie_scores = [0.0; N_CLASSES];
    for (row, o) in table.rows().iter().zip(outcomes) {
        if o.winner != 1 && o.winner != 2 {
            return Err(Error::invalid(format!("pair winner must be 1 or 2, got {}", o.winner)));
        }
        let class = row.iter().position(|&v| v == o.winner).expect("validated table row");
        counts[class] += 1;
        tie_scores[class] += o.score;
    }
    Ok(FlagVector { counts, tie_scores })
}

/// Highest flag count wins; ties go to the larger summed score, then to
/// the lower class index.
pub fn decide(flags: FlagVector) -> Decision {
    let max = *flags.counts.iter().max().unwrap();
    let tied: Vec<usize> = (0..N_CLASSES).filter(|&c| flags.counts[c] == max).collect();
    let mut class = tied[0];
    for &c in &tied[1..] {
        if flags.tie_scores[c] > flags.tie_scores[class] {
            class = c;
        }
    }
    Decision {
        class,
        flags,
        tie_broken: tied.len() > 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn outcomes(winners: [u8; N_PAIRS]) -> Vec<PairOutcome> {
        winners.iter().map(|&w| PairOutcome { winner: w, score: 0.9 }).collect()
    }

    #[test]
    fn a_sweeps_then_b_c_d() {
        // nets 1-4 to A; BC->B, BD->B, BE->B, CD->C, CE->C, DE->D
        let t = ConditionTable::standard();
        let f = compute_flags(&t, &outcomes([1, 1, 1, 1, 1, 1, 1, 1, 1, 1])).unwrap();
        assert_eq!(f.counts, [4, 3, 2, 1, 0]);
        let d = decide(f);
        assert_eq!(d.class, 0);
        assert!(!d.tie_broken);
    }

    #[test]
    fn three_three_tie_uses_scores() {
        // A wins AC, AD, AE; B wins AB, BC, BD; E wins BE; C wins CD; E wins CE; E wins DE
        let t = ConditionTable::standard();
        let winners = [2, 1, 1, 1, 1, 1, 2, 1, 2, 2];
        let mut o = outcomes(winners);
        o[0].score = 0.99; // B's win over A is confident
        let f = compute_flags(&t, &o).unwrap();
        assert_eq!(f.counts, [3, 3, 1, 0, 3]);
        let d = decide(f);
        assert!(d.tie_broken);
        assert_eq!(d.class, 1);
    }

    #[test]
    fn exact_tie_goes_to_lower_index() {
        let f = FlagVector {
            counts: [3, 3, 2, 1, 1],
            tie_scores: [2.0, 2.0, 1.0, 0.5, 0.5],
        };
        let d = decide(f);
        assert_eq!(d.class, 0);
        assert!(d.tie_broken);
    }

    #[test]
    fn malformed_outcomes() {
        let t = ConditionTable::standard();
        assert!(compute_flags(&t, &outcomes([1; 10])[..9]).is_err());
        let mut o = outcomes([1; 10]);
        o[4].winner = 3;
        assert!(compute_flags(&t, &o).is_err());
    }
}
