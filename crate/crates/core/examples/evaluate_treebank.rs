//! Scores generated trees and baselines against a reference treebank.
//!
//! The reference here is the exact optimum of each document, so the numbers
//! show how much of the optimal structure each generator recovers.
//!
//! cargo run --release --example evaluate_treebank

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use silva::cky::{beam_generate, exhaustive_best, GenerationConfig};
use silva::eval::{left_branching, micro_precision, random_tree, right_branching, EvalMode, EvalOptions, LabelPolicy};
use silva::synth::synthetic_document;
use silva::tree::{DiscourseTree, NodeSignal, ScoredTree};
use silva::treebank::TreebankRecord;

fn record(id: &str, tree: DiscourseTree) -> TreebankRecord {
    let scored = ScoredTree {
        tree,
        signal: NodeSignal::new(0.0, 1.0).unwrap(),
        distance: 0.0,
    };
    TreebankRecord::new(id, &scored)
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let docs: Vec<_> = (0..200)
        .map(|i| synthetic_document(format!("d{i}"), 7, &mut rng))
        .collect();
    let cfg = GenerationConfig::default();
    let exact_cfg = GenerationConfig::full_width(7, &cfg).unwrap();

    let reference: Vec<_> = docs
        .iter()
        .map(|d| TreebankRecord::from_result(d, &exhaustive_best(d, &exact_cfg).unwrap()))
        .collect();
    let beam: Vec<_> = docs
        .iter()
        .map(|d| TreebankRecord::from_result(d, &beam_generate(d, &cfg).unwrap()))
        .collect();
    let right: Vec<_> = docs
        .iter()
        .map(|d| record(&d.doc_id, right_branching(d.len())))
        .collect();
    let left: Vec<_> = docs
        .iter()
        .map(|d| record(&d.doc_id, left_branching(d.len())))
        .collect();
    let random: Vec<_> = docs
        .iter()
        .map(|d| record(&d.doc_id, random_tree(d.len(), &mut rng, LabelPolicy::Uniform)))
        .collect();

    println!(
        "{:<16} {:>10} {:>11} {:>16}",
        "generator", "structure", "nuclearity", "structure-noroot"
    );
    for (name, pred) in [
        ("beam search", &beam),
        ("right-branching", &right),
        ("left-branching", &left),
        ("random", &random),
    ] {
        let score = |mode, exclude_root| {
            let opts = EvalOptions {
                exclude_root,
                ..EvalOptions::new(mode)
            };
            micro_precision(pred, &reference, &opts).unwrap().precision
        };
        println!(
            "{name:<16} {:>10.2} {:>11.2} {:>16.2}",
            score(EvalMode::Structure, false),
            score(EvalMode::Nuclearity, false),
            score(EvalMode::Structure, true)
        );
    }
}
