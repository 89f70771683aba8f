//! Beam-pruned CKY over EDU spans, plus the exhaustive enumerator used as
//! its oracle.

mod chart;
mod corpus;
mod exhaustive;
mod explore;

pub use chart::{
    beam_chart, beam_generate, beam_generate_with_rng, build_chart, cell_candidates, prune_beam, Chart, ChartCell,
};
pub use corpus::{doc_rng, generate_corpus, CorpusResult};
pub use exhaustive::{exhaustive_best, exhaustive_best_with_limit, DEFAULT_ORACLE_LIMIT};
pub use explore::{exploration_rate, sample_without_replacement, RankOrder};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aggregation::{AggregationConfig, AggregationError, DistanceKind};
use crate::tree::DocumentError;

/// Knobs of the generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerationConfig {
    /// Trees kept per chart cell.
    pub beam_size: usize,
    /// Exploration probability of the lowest (two-EDU) cells.
    pub epsilon_max: f64,
    /// Softmax temperature used when a cell explores.
    pub temperature: f64,
    pub seed: u64,
    #[serde(flatten)]
    pub aggregation: AggregationConfig,
    #[serde(rename = "distance")]
    pub distance_kind: DistanceKind,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        GenerationConfig {
            beam_size: 10,
            epsilon_max: 0.5,
            temperature: 0.1,
            seed: 0,
            aggregation: AggregationConfig::default(),
            distance_kind: DistanceKind::Absolute,
        }
    }
}

impl GenerationConfig {
    pub fn validate(&self) -> Result<(), GenerateError> {
        if self.beam_size == 0 {
            return Err(GenerateError::InvalidConfig("beam_size must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.epsilon_max) {
            return Err(GenerateError::InvalidConfig(format!(
                "epsilon_max {} outside [0, 1]",
                self.epsilon_max
            )));
        }
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return Err(GenerateError::InvalidConfig(format!(
                "temperature {} must be positive",
                self.temperature
            )));
        }
        self.aggregation.validate()?;
        Ok(())
    }

    /// Pure exploitation with a beam wide enough to keep every labeled tree
    /// over `n` EDUs. Beam search under this config is exact.
    pub fn full_width(n: usize, base: &GenerationConfig) -> Result<Self, GenerateError> {
        let width = count_labeled_trees(n)?;
        Ok(GenerationConfig {
            beam_size: usize::try_from(width).map_err(|_| GenerateError::Overflow {
                n,
                max_n: max_countable_n(),
            })?,
            epsilon_max: 0.0,
            ..*base
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenerateError {
    #[error("document has no EDUs")]
    EmptyDocument,
    #[error("invalid document: {0}")]
    InvalidDocument(#[from] DocumentError),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Aggregation(#[from] AggregationError),
    #[error("{count} labeled trees over {n} EDUs exceeds the enumeration limit {limit}")]
    TooLarge { n: usize, count: u128, limit: u128 },
    #[error("labeled tree count overflows for n = {n} (largest countable n is {max_n})")]
    Overflow { n: usize, max_n: usize },
    #[error("duplicate document id '{0}'")]
    DuplicateDocId(String),
}

/// `Catalan(n - 1) * 3^(n - 1)`: binary trees with ternary nuclearity over `n` leaves.
pub fn count_labeled_trees(n: usize) -> Result<u128, GenerateError> {
    if n == 0 {
        return Err(GenerateError::EmptyDocument);
    }
    checked_labeled_count(n).ok_or(GenerateError::Overflow {
        n,
        max_n: max_countable_n(),
    })
}

fn checked_labeled_count(n: usize) -> Option<u128> {
    // Catalan(k + 1) = Catalan(k) * 2(2k + 1) / (k + 2), exact at every step
    let mut catalan: u128 = 1;
    let mut labels: u128 = 1;
    for k in 0..(n - 1) as u128 {
        let num = catalan.checked_mul(2 * (2 * k + 1))?;
        catalan = num / (k + 2);
        labels = labels.checked_mul(3)?;
    }
    catalan.checked_mul(labels)
}

/// Largest `n` for which [`count_labeled_trees`] is representable.
pub fn max_countable_n() -> usize {
    let mut n = 1;
    while checked_labeled_count(n + 1).is_some() {
        n += 1;
    }
    n
}
