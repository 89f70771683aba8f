//! Generates a synthetic corpus on several threads and writes a treebank to
//! stdout. The bytes do not depend on the thread count.
//!
//! cargo run --release --example parallel_corpus -- [docs] [jobs]

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use silva::cky::{generate_corpus, GenerationConfig};
use silva::synth::synthetic_document;
use silva::treebank::{write_treebank, TreebankRecord};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let docs: usize = args.next().map(|a| a.parse()).transpose()?.unwrap_or(16);
    let jobs: usize = args.next().map(|a| a.parse()).transpose()?.unwrap_or(4);

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let corpus: Vec<_> = (0..docs)
        .map(|i| {
            let n = rng.gen_range(5..=40);
            synthetic_document(format!("synthetic-{i:04}"), n, &mut rng)
        })
        .collect();
    let cfg = GenerationConfig {
        seed: 42,
        ..GenerationConfig::default()
    };

    let render = |jobs: usize| -> Result<Vec<u8>, Box<dyn std::error::Error>> {
        let mut records = Vec::with_capacity(corpus.len());
        for (doc, result) in corpus.iter().zip(generate_corpus(&corpus, &cfg, jobs)) {
            records.push(TreebankRecord::from_result(doc, &result.outcome?));
        }
        let mut buf = Vec::new();
        write_treebank(&mut buf, &records)?;
        Ok(buf)
    };
    let parallel = render(jobs)?;
    assert_eq!(parallel, render(1)?, "thread count changed the output");

    io::stdout().write_all(&parallel)?;
    eprintln!("{docs} documents on {jobs} threads; identical to the serial run");
    Ok(())
}
