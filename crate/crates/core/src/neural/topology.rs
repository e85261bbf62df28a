use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One hidden layer of seven units.
pub const DEFAULT_HIDDEN: usize = 7;

/// Network family. Hidden layers always use tanh; the kind fixes the output
/// activation, the loss and the connectivity:
///
/// | kind        | output  | loss          | input skips |
/// |-------------|---------|---------------|-------------|
/// | feedforward | linear  | MSE           | no          |
/// | fit         | linear  | MSE           | no          |
/// | pattern     | softmax | cross-entropy | no          |
/// | cascade     | linear  | MSE           | every layer after the first |
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NetKind {
    Cascade,
    Feedforward,
    Fit,
    Pattern,
}

impl NetKind {
    /// Table column order.
    pub const ALL: [NetKind; 4] = [NetKind::Cascade, NetKind::Feedforward, NetKind::Fit, NetKind::Pattern];

    pub fn as_str(self) -> &'static str {
        match self {
            NetKind::Cascade => "cascade",
            NetKind::Feedforward => "feedforward",
            NetKind::Fit => "fit",
            NetKind::Pattern => "pattern",
        }
    }

    pub fn uses_softmax(self) -> bool {
        self == NetKind::Pattern
    }

    pub fn has_input_skips(self) -> bool {
        self == NetKind::Cascade
    }
}

impl fmt::Display for NetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for NetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cascade" | "cascadeforward" => Ok(NetKind::Cascade),
            "feedforward" | "ff" => Ok(NetKind::Feedforward),
            "fit" => Ok(NetKind::Fit),
            "pattern" => Ok(NetKind::Pattern),
            other => Err(Error::invalid(format!("unknown network kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Topology {
    pub kind: NetKind,
    pub input_dim: usize,
    pub hidden: Vec<usize>,
    pub output_dim: usize,
}

/// Offsets of one layer's parameters in the flat parameter vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayerLayout {
    pub in_dim: usize,
    pub out_dim: usize,
    pub weights: usize,
    pub biases: usize,
    /// Input-to-layer weights, cascade kind only.
    pub skips: Option<usize>,
}

impl Topology {
    pub fn new(kind: NetKind, input_dim: usize, hidden: Vec<usize>, output_dim: usize) -> Result<Self> {
        if input_dim == 0 || output_dim == 0 || hidden.contains(&0) {
            return Err(Error::invalid("layer sizes must be at least 1"));
        }
        if kind.uses_softmax() && output_dim < 2 {
            return Err(Error::invalid("softmax output needs at least two units"));
        }
        Ok(Topology {
            kind,
            input_dim,
            hidden,
            output_dim,
        })
    }

    pub fn n_layers(&self) -> usize {
        self.hidden.len() + 1
    }

    /// Parameter layout. Per layer, in order: weights row-major
    /// `[out][in]`, biases `[out]`, then for cascade layers after the first
    /// the input skip weights row-major `[out][input_dim]`.
    pub fn layout(&self) -> Vec<LayerLayout> {
        let widths: Vec<usize> = std::iter::once(self.input_dim)
            .chain(self.hidden.iter().copied())
            .chain(std::iter::once(self.output_dim))
            .collect();
        let mut offset = 0;
        let mut out = Vec::with_capacity(self.n_layers());
        for l in 0..self.n_layers() {
            let (in_dim, out_dim) = (widths[l], widths[l + 1]);
            let weights = offset;
            offset += in_dim * out_dim;
            let biases = offset;
            offset += out_dim;
            let skips = if self.kind.has_input_skips() && l > 0 {
                let s = offset;
                offset += out_dim * self.input_dim;
                Some(s)
            } else {
                None
            };
            out.push(LayerLayout {
                in_dim,
                out_dim,
                weights,
                biases,
                skips,
            });
        }
        out
    }

    pub fn n_params(&self) -> usize {
        self.layout()
            .iter()
            .map(|l| l.in_dim * l.out_dim + l.out_dim + l.skips.map_or(0, |_| l.out_dim * self.input_dim))
            .sum()
    }
}
