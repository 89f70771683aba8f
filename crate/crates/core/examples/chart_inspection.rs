//! Looks inside a filled chart: beam sizes, candidate counts and which
//! cells explored.
//!
//! cargo run --example chart_inspection

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use silva::cky::{beam_chart, GenerationConfig};
use silva::synth::synthetic_document;
use silva::treebank::serialize_tree;

fn main() {
    let doc = synthetic_document("inspect", 8, &mut ChaCha8Rng::seed_from_u64(5));
    let cfg = GenerationConfig {
        beam_size: 4,
        epsilon_max: 0.8,
        seed: 2,
        ..GenerationConfig::default()
    };
    let chart = beam_chart(&doc, &cfg).expect("valid document");
    let n = chart.n_edus();

    println!("cells as beam/candidates, * marks an exploring cell");
    for start in 1..=n {
        let row: Vec<String> = (1..=n)
            .map(|end| {
                if end < start {
                    String::from("      .")
                } else {
                    let mark = if chart.explored(start, end) { '*' } else { ' ' };
                    format!(
                        "{:>2}/{:<3}{mark}",
                        chart.beam_len(start, end),
                        chart.candidate_count(start, end)
                    )
                }
            })
            .collect();
        println!("{start:>2}: {}", row.join(" "));
    }

    println!("\nroot beam:");
    for t in chart.cell(1, n).beam {
        println!("  {:.5}  {}", t.distance, serialize_tree(&t.tree));
    }
}
