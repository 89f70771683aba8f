//! Reads the demo corpus, fills unscored EDUs from the lexicon and prints
//! the normalized documents with their trees.
//!
//! cargo run --example lexicon_ingest

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use silva::cky::{beam_generate, GenerationConfig};
use silva::ingest::{normalize_document, read_records, SentimentLexicon};
use silva::treebank::serialize_tree;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let lexicon = SentimentLexicon::read(BufReader::new(File::open(data.join("demo_lexicon.tsv"))?))?;
    println!("lexicon: {} tokens", lexicon.len());

    let cfg = GenerationConfig::default();
    for line in read_records(BufReader::new(File::open(data.join("demo_corpus.jsonl"))?))? {
        let record = line.record.map_err(|e| format!("line {}: {e}", line.line))?;
        let doc = normalize_document(&record, Some(&lexicon))?;
        println!("\n{} (gold {:+.2})", doc.doc_id, doc.gold_polarity);
        for (raw, edu) in record.edus.iter().zip(&doc.edus) {
            let source = if raw.sentiment.is_some() { "given" } else { "lexicon" };
            println!(
                "  {:+.3} {:.3} [{source:<7}] {}",
                edu.sentiment, edu.attention, edu.text
            );
        }
        let best = beam_generate(&doc, &cfg)?;
        println!("  -> {} (distance {:.4})", serialize_tree(&best.tree), best.distance);
    }
    Ok(())
}
