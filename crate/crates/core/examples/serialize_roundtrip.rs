//! Writes trees in the bracketed format, parses them back and shows the
//! errors reported for malformed input.
//!
//! cargo run --example serialize_roundtrip

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use silva::eval::{random_tree, LabelPolicy};
use silva::treebank::{parse_tree, serialize_tree};

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in [1, 2, 5, 9] {
        let tree = random_tree(n, &mut rng, LabelPolicy::Uniform);
        let text = serialize_tree(&tree);
        let back = parse_tree(&text).expect("serialized trees parse");
        assert_eq!(back, tree);
        println!("{n:>2} EDUs: {text}");
    }

    println!();
    for bad in [
        "(NN (leaf 2) (leaf 1))",
        "(XX (leaf 1) (leaf 2))",
        "(NN (leaf 1) (leaf 3))",
        "(NS (leaf 1) (leaf 2)",
        "(SN (leaf 1))",
    ] {
        match parse_tree(bad) {
            Ok(t) => println!("{bad:<26} parsed as {}", serialize_tree(&t)),
            Err(e) => println!("{bad:<26} {e}"),
        }
    }
}
