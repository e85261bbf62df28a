//! Versioned JSON model documents. Floats are written in shortest
//! round-trip form, so read-then-write reproduces a file byte for byte.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::mlp::{Mlp, TrainingInfo};
use super::topology::Topology;
use crate::error::{Error, Result};
use crate::hrv::{Normalizer, FEATURE_VERSION};

pub const MODEL_FORMAT: &str = "ecg-ovo/mlp";
pub const MODEL_FORMAT_VERSION: u32 = 1;
const PARAM_LAYOUT: &str =
    "per layer: weights row-major [out][in], biases [out], cascade input skips row-major [out][input] for layers after the first";

#[derive(Serialize, Deserialize)]
struct ModelDoc {
    format: String,
    format_version: u32,
    feature_version: String,
    topology: Topology,
    class_names: Vec<String>,
    seed: u64,
    normalizer: Option<Normalizer>,
    training: Option<TrainingInfo>,
    param_layout: String,
    params: Vec<f64>,
}

impl Mlp {
    pub fn to_json(&self) -> String {
        let doc = ModelDoc {
            format: MODEL_FORMAT.into(),
            format_version: MODEL_FORMAT_VERSION,
            feature_version: FEATURE_VERSION.into(),
            topology: self.topology.clone(),
            class_names: self.class_names.clone(),
            seed: self.seed,
            normalizer: self.normalizer.clone(),
            training: self.training.clone(),
            param_layout: PARAM_LAYOUT.into(),
            params: self.params.clone(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("model serialises");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ModelDoc = serde_json::from_str(text).map_err(|e| Error::Format(format!("model document: {e}")))?;
        if doc.format != MODEL_FORMAT {
            return Err(Error::Format(format!("not a model document: format {:?}", doc.format)));
        }
        if doc.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::VersionMismatch {
                expected: MODEL_FORMAT_VERSION.to_string(),
                found: doc.format_version.to_string(),
            });
        }
        if doc.feature_version != FEATURE_VERSION {
            return Err(Error::VersionMismatch {
                expected: FEATURE_VERSION.into(),
                found: doc.feature_version,
            });
        }
        let topology = Topology::new(
            doc.topology.kind,
            doc.topology.input_dim,
            doc.topology.hidden,
            doc.topology.output_dim,
        )?;
        if doc.params.len() != topology.n_params() {
            return Err(Error::Format(format!(
                "expected {} parameters, found {}",
                topology.n_params(),
                doc.params.len()
            )));
        }
        if let Some(nz) = &doc.normalizer {
            if nz.mean.len() != topology.input_dim || nz.sd.len() != topology.input_dim {
                return Err(Error::Format("normaliser width does not match the input layer".into()));
            }
        }
        Ok(Mlp {
            topology,
            params: doc.params,
            normalizer: doc.normalizer,
            class_names: doc.class_names,
            seed: doc.seed,
            training: doc.training,
        })
    }
}

pub fn save_model(net: &Mlp, path: &Path) -> Result<()> {
    fs::write(path, net.to_json()).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: &Path) -> Result<Mlp> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Mlp::from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neural::{init_network, NetKind};

    fn net() -> Mlp {
        let t = Topology::new(NetKind::Cascade, 15, vec![7], 2).unwrap();
        let mut n = init_network(t, vec!["x".into(), "y".into()], 77);
        n.normalizer = Some(Normalizer {
            mean: (0..15).map(|i| i as f64 / 3.0).collect(),
            sd: vec![0.1; 15],
        });
        n.training = Some(TrainingInfo {
            iterations: 3,
            final_loss: 0.123456789,
            stop_reason: "max_iterations".into(),
        });
        n
    }

    #[test]
    fn byte_identical_rewrite() {
        let n = net();
        let text = n.to_json();
        let back = Mlp::from_json(&text).unwrap();
        assert_eq!(back, n);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn refuses_other_feature_versions() {
        let text = net().to_json().replace(FEATURE_VERSION, "hrv-td15-v0");
        assert!(matches!(Mlp::from_json(&text), Err(Error::VersionMismatch { .. })));
    }

    #[test]
    fn refuses_wrong_param_count() {
        let mut n = net();
        n.params.pop();
        assert!(matches!(Mlp::from_json(&n.to_json()), Err(Error::Format(_))));
    }
}
