//! Compares beam search with exhaustive enumeration on short documents.
//!
//! A full-width beam without exploration is exact; a beam of 10 is usually
//! close.
//!
//! cargo run --release --example exhaustive_oracle

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use silva::cky::{beam_generate, count_labeled_trees, exhaustive_best, GenerationConfig};
use silva::synth::synthetic_document;
use silva::treebank::serialize_tree;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let narrow = GenerationConfig {
        epsilon_max: 0.0,
        ..GenerationConfig::default()
    };
    println!(
        "{:>2} {:>8} {:>10} {:>10} {:>10}",
        "n", "trees", "exact", "full beam", "beam 10"
    );
    for n in 2..=8 {
        let doc = synthetic_document(format!("toy-{n}"), n, &mut rng);
        let full = GenerationConfig::full_width(n, &narrow).expect("small n");
        let exact = exhaustive_best(&doc, &full).expect("within the enumeration limit");
        let wide = beam_generate(&doc, &full).expect("beam");
        let ten = beam_generate(&doc, &narrow).expect("beam");
        println!(
            "{n:>2} {:>8} {:>10.6} {:>10.6} {:>10.6}",
            count_labeled_trees(n).unwrap(),
            exact.distance,
            wide.distance,
            ten.distance
        );
        assert_eq!(wide.distance, exact.distance);
        if n == 8 {
            println!("\nbest tree over 8 EDUs: {}", serialize_tree(&exact.tree));
        }
    }
}
