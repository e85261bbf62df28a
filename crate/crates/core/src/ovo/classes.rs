use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const N_CLASSES: usize = 5;
pub const N_PAIRS: usize = 10;

/// Net 1..10 in table order: AB, AC, AD, AE, BC, BD, BE, CD, CE, DE.
pub const PAIRS: [(usize, usize); N_PAIRS] = [
    (0, 1),
    (0, 2),
    (0, 3),
    (0, 4),
    (1, 2),
    (1, 3),
    (1, 4),
    (2, 3),
    (2, 4),
    (3, 4),
];

pub fn enumerate_pairs() -> [(usize, usize); N_PAIRS] {
    PAIRS
}

/// Five named classes bound to letters A..E (indices 0..4).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassSet {
    pub names: Vec<String>,
    /// Index of the normal-rhythm class; pair tables leave its nets out.
    pub normal: usize,
}

impl Default for ClassSet {
    fn default() -> Self {
        ClassSet {
            names: [
                "Arrhythmia",
                "Sleep Apnea",
                "Supraventricular Arrhythmia",
                "Long Term AF",
                "Normal",
            ]
            .iter()
            .map(|s| s.to_string())
            .collect(),
            normal: 4,
        }
    }
}

impl ClassSet {
    pub fn new(names: Vec<String>, normal: usize) -> Result<Self> {
        if names.len() != N_CLASSES {
            return Err(Error::invalid(format!("exactly {N_CLASSES} classes required, got {}", names.len())));
        }
        for (i, n) in names.iter().enumerate() {
            if n.trim().is_empty() || n.contains(',') {
                return Err(Error::invalid(format!("class name {n:?} must be non-empty and comma-free")));
            }
            if names[..i].iter().any(|m| m.eq_ignore_ascii_case(n)) {
                return Err(Error::invalid(format!("duplicate class name {n:?}")));
            }
        }
        if normal >= N_CLASSES {
            return Err(Error::invalid("normal class index out of range"));
        }
        Ok(ClassSet { names, normal })
    }

    /// Class set for `names`, treating the one called "Normal" (any case)
    /// as the normal class, or the last one when none is.
    pub fn from_names(names: Vec<String>) -> Result<Self> {
        let normal = names
            .iter()
            .position(|n| n.eq_ignore_ascii_case("normal"))
            .unwrap_or(N_CLASSES - 1);
        Self::new(names, normal)
    }

    pub fn letter(index: usize) -> char {
        (b'A' + index as u8) as char
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }
}

/// 10x5 table: 1 marks a net's first class, 2 its second, 0 not involved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionTable {
    entries: [[u8; N_CLASSES]; N_PAIRS],
}

impl ConditionTable {
    pub fn from_pairs(pairs: &[(usize, usize); N_PAIRS]) -> Result<Self> {
        let mut entries = [[0u8; N_CLASSES]; N_PAIRS];
        for (row, &(a, b)) in pairs.iter().enumerate() {
            if a >= N_CLASSES || b >= N_CLASSES || a == b {
                return Err(Error::invalid(format!("invalid pair ({a}, {b})")));
            }
            entries[row][a] = 1;
            entries[row][b] = 2;
        }
        let table = ConditionTable { entries };
        table.check()?;
        Ok(table)
    }

    pub fn standard() -> Self {
        Self::from_pairs(&PAIRS).expect("standard pair order is a valid condition table")
    }

    fn check(&self) -> Result<()> {
        for row in &self.entries {
            let ones = row.iter().filter(|&&v| v == 1).count();
            let twos = row.iter().filter(|&&v| v == 2).count();
            let zeros = row.iter().filter(|&&v| v == 0).count();
            if (ones, twos, zeros) != (1, 1, N_CLASSES - 2) {
                return Err(Error::invalid("each row needs one 1, one 2 and three 0s"));
            }
        }
        for c in 0..N_CLASSES {
            if self.entries.iter().filter(|r| r[c] != 0).count() != N_CLASSES - 1 {
                return Err(Error::invalid("each class must appear in exactly four rows"));
            }
        }
        for i in 0..N_PAIRS {
            for j in i + 1..N_PAIRS {
                let same = (0..N_CLASSES).all(|c| (self.entries[i][c] != 0) == (self.entries[j][c] != 0));
                if same {
                    return Err(Error::invalid("duplicate pair in condition table"));
                }
            }
        }
        Ok(())
    }

    /// Entry for net `net` (1-based) and class index.
    pub fn get(&self, net: usize, class: usize) -> Result<u8> {
        if !(1..=N_PAIRS).contains(&net) || class >= N_CLASSES {
            return Err(Error::invalid(format!("no entry for net {net}, class {class}")));
        }
        Ok(self.entries[net - 1][class])
    }

    pub fn rows(&self) -> &[[u8; N_CLASSES]; N_PAIRS] {
        &self.entries
    }
}

pub fn condition_lookup(net: usize, class: usize) -> Result<u8> {
    ConditionTable::standard().get(net, class)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_order() {
        let p = enumerate_pairs();
        assert_eq!(p[0], (0, 1));
        assert_eq!(p[7], (2, 3));
        assert_eq!(p.len(), 10);
    }

    #[test]
    fn lookups() {
        assert_eq!(condition_lookup(1, 0).unwrap(), 1);
        assert_eq!(condition_lookup(1, 2).unwrap(), 0);
        assert_eq!(condition_lookup(10, 4).unwrap(), 2);
        assert!(condition_lookup(0, 0).is_err());
        assert!(condition_lookup(11, 0).is_err());
        assert!(condition_lookup(1, 5).is_err());
    }

    #[test]
    fn structural_checks() {
        let mut bad = PAIRS;
        bad[9] = (0, 1);
        assert!(ConditionTable::from_pairs(&bad).is_err());
        let mut bad = PAIRS;
        bad[0] = (1, 1);
        assert!(ConditionTable::from_pairs(&bad).is_err());
        // swapping the order inside a pair is still a valid table
        let mut swapped = PAIRS;
        swapped[3] = (4, 0);
        assert!(ConditionTable::from_pairs(&swapped).is_ok());
    }

    #[test]
    fn class_set_validation() {
        assert!(ClassSet::new(vec!["a".into(); 5], 4).is_err());
        assert!(ClassSet::new(vec!["a".into(), "b".into()], 0).is_err());
        let names: Vec<String> = "vwxyz".chars().map(String::from).collect();
        assert!(ClassSet::new(names.clone(), 5).is_err());
        assert!(ClassSet::new(names, 0).is_ok());
        assert_eq!(ClassSet::letter(3), 'D');
    }
}
