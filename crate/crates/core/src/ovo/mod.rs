//! One-vs-one ensemble: ten pair networks, the condition table mapping
//! their winners onto five classes, per-class flag counts and the argmax
//! decision, plus the five-output baseline it is compared against.

mod bank;
mod classes;
mod flags;

pub use bank::{
    load_bank, save_bank, train_bank, train_multiclass_baseline, NetConfig, PairNetBank, BANK_FORMAT,
    BANK_MANIFEST,
};
pub use classes::{condition_lookup, enumerate_pairs, ClassSet, ConditionTable, N_CLASSES, N_PAIRS, PAIRS};
pub use flags::{compute_flags, decide, Decision, FlagVector, PairOutcome};
