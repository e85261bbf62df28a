//! Accuracy reports, the pairwise and comparison tables, flat config files
//! and the library side of every command-line subcommand.

mod commands;
mod config;
mod report;
mod tables;

pub use commands::{
    cmd_classify, cmd_compare, cmd_detect, cmd_evaluate, cmd_features, cmd_train, ClassifiedRow, ClassifyOptions,
    CompareOptions, CompareOutput, DetectOptions, DetectOutput, EvaluateOptions, EvaluateOutput, FeaturesOptions,
    FeaturesOutput, LabeledInput, LoadedModel, NamedReport, Rejection, TableKind, TrainMode, TrainOptions, TrainOutput,
};
pub use config::Config;
pub use report::{evaluate_bank, evaluate_net, pair_rows, EvalReport};
pub use tables::{format_accuracy, render_comparison_table, render_pairwise_table, ComparisonRow, PairRow, Star};
