//! Builds the best discourse tree for one hand-scored review.
//!
//! cargo run --example generate_tree

use silva::cky::{beam_generate, GenerationConfig};
use silva::tree::{tree_stats, Document};
use silva::treebank::serialize_tree;

fn main() {
    let edus = [
        ("The staff were friendly", 0.6, 0.30),
        ("and the pasta was great,", 0.9, 0.40),
        ("although parking was a pain.", -0.4, 0.10),
        ("We will be back.", 0.7, 0.20),
    ];
    let sentiments: Vec<f64> = edus.iter().map(|e| e.1).collect();
    let attentions: Vec<f64> = edus.iter().map(|e| e.2).collect();
    let doc = Document::from_scores("review-001", 1.0, &sentiments, &attentions).expect("valid scores");

    let cfg = GenerationConfig::default();
    let best = beam_generate(&doc, &cfg).expect("generation succeeds");
    let stats = tree_stats(&best.tree);

    for (i, (text, s, a)) in edus.iter().enumerate() {
        println!("EDU {}: {text:<30} sentiment {s:+.2} attention {a:.2}", i + 1);
    }
    println!();
    println!("tree:           {}", serialize_tree(&best.tree));
    println!("root sentiment: {:+.4}", best.signal.sentiment);
    println!("distance:       {:.4}", best.distance);
    println!("height:         {} (balance {:.3})", stats.height, stats.balance);
}
