//! Synthetic documents for benchmarks, fuzzing and demos.

use rand::Rng;

use crate::tree::{Document, Edu};

/// Gold labels of a five-star scale mapped onto `[-1, 1]`.
pub const STAR_POLARITIES: [f64; 5] = [-1.0, -0.5, 0.0, 0.5, 1.0];

/// `n` EDUs with sentiments uniform on `[-1, 1]`, attentions drawn uniform on
/// `[0.05, 1]` and normalized to sum to one, and a gold label drawn from
/// [`STAR_POLARITIES`].
pub fn synthetic_document<R: Rng + ?Sized>(doc_id: impl Into<String>, n: usize, rng: &mut R) -> Document {
    assert!(n >= 1, "a document needs at least one EDU");
    let sentiments: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..=1.0)).collect();
    let total: f64 = raw.iter().sum();
    let gold = STAR_POLARITIES[rng.gen_range(0..STAR_POLARITIES.len())];
    let edus = sentiments
        .into_iter()
        .zip(raw)
        .enumerate()
        .map(|(i, (sentiment, a))| Edu {
            index: i + 1,
            text: String::new(),
            sentiment,
            attention: a / total,
        })
        .collect();
    Document::new(doc_id, gold, edus).expect("synthetic documents are valid by construction")
}
