//! How two child signals merge under a nuclearity label, and the distance
//! of a root aggregate to the document's gold polarity.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tree::{NodeSignal, NuclearityLabel};

/// Weights applied to nucleus and satellite children.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregationConfig {
    pub w_nucleus: f64,
    pub w_satellite: f64,
}

impl Default for AggregationConfig {
    fn default() -> Self {
        AggregationConfig {
            w_nucleus: 1.0,
            w_satellite: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AggregationError {
    #[error("invalid weights: need 0 < w_satellite ({w_satellite}) <= w_nucleus ({w_nucleus})")]
    InvalidWeights { w_nucleus: f64, w_satellite: f64 },
    #[error("combined attention underflowed to zero")]
    DegenerateAttention,
}

impl AggregationConfig {
    pub fn new(w_nucleus: f64, w_satellite: f64) -> Result<Self, AggregationError> {
        let cfg = AggregationConfig { w_nucleus, w_satellite };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), AggregationError> {
        let ok = self.w_satellite > 0.0 && self.w_satellite <= self.w_nucleus && self.w_nucleus.is_finite();
        if ok {
            Ok(())
        } else {
            Err(AggregationError::InvalidWeights {
                w_nucleus: self.w_nucleus,
                w_satellite: self.w_satellite,
            })
        }
    }
}

/// `(left, right)` child weights for a label.
pub fn nuclearity_weights(label: NuclearityLabel, cfg: &AggregationConfig) -> (f64, f64) {
    match label {
        NuclearityLabel::NN => (cfg.w_nucleus, cfg.w_nucleus),
        NuclearityLabel::NS => (cfg.w_nucleus, cfg.w_satellite),
        NuclearityLabel::SN => (cfg.w_satellite, cfg.w_nucleus),
    }
}

/// Parent sentiment is the weighted mean of child sentiments, with weights
/// `nuclearity * attention`; parent attention is the sum of those weights.
pub fn combine_node(
    left: NodeSignal,
    right: NodeSignal,
    label: NuclearityLabel,
    cfg: &AggregationConfig,
) -> Result<NodeSignal, AggregationError> {
    let signal = combine_weighted(left, right, nuclearity_weights(label, cfg));
    if signal.attention <= 0.0 || !signal.attention.is_finite() {
        return Err(AggregationError::DegenerateAttention);
    }
    Ok(signal)
}

/// [`combine_node`] with the nuclearity weights already resolved and no
/// attention check.
#[inline(always)]
pub(crate) fn combine_weighted(left: NodeSignal, right: NodeSignal, (lw, rw): (f64, f64)) -> NodeSignal {
    let wl = lw * left.attention;
    let wr = rw * right.attention;
    let attention = wl + wr;
    let mean = (wl * left.sentiment + wr * right.sentiment) / attention;
    // the mean is convex in exact arithmetic; keep rounding from leaking out
    let lo = left.sentiment.min(right.sentiment);
    let hi = left.sentiment.max(right.sentiment);
    NodeSignal {
        sentiment: mean.clamp(lo, hi),
        attention,
    }
}

/// Distance objective between gold polarity and a root aggregate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceKind {
    #[default]
    Absolute,
    Squared,
}

impl DistanceKind {
    #[inline]
    pub fn measure(self, gold_polarity: f64, sentiment: f64) -> f64 {
        let d = gold_polarity - sentiment;
        match self {
            DistanceKind::Absolute => d.abs(),
            DistanceKind::Squared => d * d,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DistanceKind::Absolute => "absolute",
            DistanceKind::Squared => "squared",
        }
    }
}

impl std::str::FromStr for DistanceKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "absolute" => Ok(DistanceKind::Absolute),
            "squared" => Ok(DistanceKind::Squared),
            other => Err(format!(
                "unknown distance kind '{other}' (expected absolute or squared)"
            )),
        }
    }
}

/// `|gold - sentiment|`, in `[0, 2]`.
pub fn root_distance(gold_polarity: f64, signal: NodeSignal) -> f64 {
    DistanceKind::Absolute.measure(gold_polarity, signal.sentiment)
}
