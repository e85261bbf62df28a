//! Small multilayer perceptrons in four topology kinds, trained full-batch
//! with Møller's scaled conjugate gradient.

mod mlp;
mod model_file;
mod scg;
mod split;
mod topology;

pub use mlp::{
    init_network, loss_and_gradient, Batch, Mlp, Prediction, TrainingInfo,
};
pub use model_file::{load_model, save_model, MODEL_FORMAT, MODEL_FORMAT_VERSION};
pub use scg::{scg_minimize, scg_train, Objective, ScgParams, ScgOutcome, StepControl, StopReason, TrainingHistory};
pub use split::split_70_30;
pub use topology::{LayerLayout, NetKind, Topology, DEFAULT_HIDDEN};
