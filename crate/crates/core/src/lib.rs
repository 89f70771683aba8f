//! Silver-standard discourse treebanks from document-level sentiment.
//!
//! Each document is a sequence of EDUs carrying a sentiment and an attention
//! score, plus a gold polarity for the whole document. A beam-pruned CKY
//! search builds the binary, nuclearity-labeled tree whose aggregated root
//! sentiment lands closest to the gold polarity. Low chart cells
//! occasionally explore by softmax sampling so that deep subtrees stay
//! diverse.
//!
//! ```
//! use silva::cky::{beam_generate, GenerationConfig};
//! use silva::tree::Document;
//! use silva::treebank::serialize_tree;
//!
//! let doc = Document::from_scores("r1", 1.0, &[0.9, -0.4, 0.6], &[0.5, 0.2, 0.3]).unwrap();
//! let best = beam_generate(&doc, &GenerationConfig::default()).unwrap();
//! assert!(best.distance < 0.5);
//! println!("{}", serialize_tree(&best.tree));
//! ```

pub mod aggregation;
pub mod bench;
pub mod cky;
pub mod cli;
pub mod eval;
pub mod ingest;
pub mod synth;
pub mod tree;
pub mod treebank;
