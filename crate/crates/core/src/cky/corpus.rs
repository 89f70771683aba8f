use std::collections::HashSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use super::{beam_generate, GenerateError, GenerationConfig};
use crate::tree::{Document, ScoredTree};

/// Random stream of one document: ChaCha8 keyed by SHA-256 of the run seed
/// and the document id.
pub fn doc_rng(seed: u64, doc_id: &str) -> ChaCha8Rng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(doc_id.as_bytes());
    let digest = hasher.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(key)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusResult {
    pub doc_id: String,
    pub outcome: Result<ScoredTree, GenerateError>,
}

/// Runs [`beam_generate`] over a corpus on `jobs` worker threads.
///
/// Results come back in input order. A repeated document id is reported as
/// an error on every occurrence after the first.
pub fn generate_corpus(docs: &[Document], cfg: &GenerationConfig, jobs: usize) -> Vec<CorpusResult> {
    let mut seen = HashSet::new();
    let duplicate: Vec<bool> = docs.iter().map(|d| !seen.insert(d.doc_id.as_str())).collect();
    let run = |(doc, dup): (&Document, &bool)| CorpusResult {
        doc_id: doc.doc_id.clone(),
        outcome: if *dup {
            Err(GenerateError::DuplicateDocId(doc.doc_id.clone()))
        } else {
            beam_generate(doc, cfg)
        },
    };
    let jobs = jobs.max(1);
    if jobs == 1 {
        return docs.iter().zip(&duplicate).map(run).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(|| docs.par_iter().zip(&duplicate).map(run).collect()),
        Err(_) => docs.iter().zip(&duplicate).map(run).collect(),
    }
}
