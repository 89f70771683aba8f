//! Bracketed tree format and newline-delimited treebank files.
//!
//! Tree grammar:
//!
//! ```text
//! TREE  := "(leaf " INDEX ")" | "(" LABEL " " TREE " " TREE ")"
//! LABEL := "NN" | "NS" | "SN"
//! ```
//!
//! A treebank file holds one JSON record per line. Lines starting with `#`
//! carry run metadata and are skipped by readers.

use std::fmt::Write as _;
use std::io::{self, BufRead, Write};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::tree::{tree_stats, validate_tree, DiscourseTree, Document, NuclearityLabel, ScoredTree, TreeError};

pub fn serialize_tree(tree: &DiscourseTree) -> String {
    let mut out = String::new();
    write_tree(tree, &mut out);
    out
}

fn write_tree(tree: &DiscourseTree, out: &mut String) {
    match tree {
        DiscourseTree::Leaf(i) => {
            let _ = write!(out, "(leaf {i})");
        }
        DiscourseTree::Internal { label, left, right } => {
            out.push('(');
            out.push_str(label.as_str());
            out.push(' ');
            write_tree(left, out);
            out.push(' ');
            write_tree(right, out);
            out.push(')');
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("invalid tree: {0}")]
    Validation(#[from] TreeError),
}

/// Parses the bracketed form. Any ASCII whitespace may separate tokens.
pub fn parse_tree(text: &str) -> Result<DiscourseTree, ParseError> {
    let mut p = TreeParser {
        src: text.as_bytes(),
        pos: 0,
    };
    let tree = p.tree()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("trailing input after tree"));
    }
    validate_tree(&tree, tree.leaf_count())?;
    Ok(tree)
}

struct TreeParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl TreeParser<'_> {
    fn error(&self, message: &str) -> ParseError {
        ParseError::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn expect(&mut self, byte: u8) -> Result<(), ParseError> {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", byte as char)))
        }
    }

    fn atom(&mut self) -> Result<(usize, &str), ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() {
            let b = self.src[self.pos];
            if b.is_ascii_whitespace() || b == b'(' || b == b')' {
                break;
            }
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a token"));
        }
        let token = std::str::from_utf8(&self.src[start..self.pos]).map_err(|_| ParseError::Syntax {
            offset: start,
            message: "token is not valid UTF-8".into(),
        })?;
        Ok((start, token))
    }

    fn tree(&mut self) -> Result<DiscourseTree, ParseError> {
        self.expect(b'(')?;
        let (at, head) = self.atom()?;
        let tree = if head == "leaf" {
            let (at, index) = self.atom()?;
            let index = index.parse::<usize>().map_err(|_| ParseError::Syntax {
                offset: at,
                message: format!("invalid leaf index '{index}'"),
            })?;
            DiscourseTree::Leaf(index)
        } else if let Some(label) = NuclearityLabel::parse(head) {
            let left = self.tree()?;
            let right = self.tree()?;
            DiscourseTree::internal(label, left, right)
        } else {
            return Err(ParseError::Syntax {
                offset: at,
                message: format!("unknown node head '{head}'"),
            });
        };
        self.expect(b')')?;
        Ok(tree)
    }
}

/// Rounds to 9 significant digits, the precision of treebank files.
pub fn round_sig9(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.8e}").parse().unwrap_or(x)
}

/// One line of a treebank file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreebankRecord {
    pub doc_id: String,
    pub n_edus: usize,
    #[serde(serialize_with = "tree_to_text", deserialize_with = "tree_from_text")]
    pub tree: DiscourseTree,
    pub root_sentiment: f64,
    pub root_attention: f64,
    pub distance: f64,
    pub height: usize,
    pub balance: f64,
}

fn tree_to_text<S: Serializer>(tree: &DiscourseTree, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&serialize_tree(tree))
}

fn tree_from_text<'de, D: Deserializer<'de>>(d: D) -> Result<DiscourseTree, D::Error> {
    let text = String::deserialize(d)?;
    parse_tree(&text).map_err(serde::de::Error::custom)
}

impl TreebankRecord {
    pub fn new(doc_id: impl Into<String>, result: &ScoredTree) -> Self {
        let stats = tree_stats(&result.tree);
        TreebankRecord {
            doc_id: doc_id.into(),
            n_edus: stats.n_edus,
            tree: result.tree.clone(),
            root_sentiment: round_sig9(result.signal.sentiment),
            root_attention: round_sig9(result.signal.attention),
            distance: round_sig9(result.distance),
            height: stats.height,
            balance: round_sig9(stats.balance),
        }
    }

    pub fn from_result(doc: &Document, result: &ScoredTree) -> Self {
        TreebankRecord::new(doc.doc_id.clone(), result)
    }

    fn normalized(&self) -> Self {
        TreebankRecord {
            root_sentiment: round_sig9(self.root_sentiment),
            root_attention: round_sig9(self.root_attention),
            distance: round_sig9(self.distance),
            balance: round_sig9(self.balance),
            ..self.clone()
        }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(&self.normalized()).expect("treebank records always serialize")
    }
}

#[derive(Debug, Error)]
pub enum TreebankError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
}

pub fn write_treebank<'a, W: Write>(
    out: &mut W,
    records: impl IntoIterator<Item = &'a TreebankRecord>,
) -> Result<(), TreebankError> {
    for r in records {
        out.write_all(r.to_line().as_bytes())?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Writes `# <json>` as a metadata line.
pub fn write_header<W: Write>(out: &mut W, metadata: &serde_json::Value) -> Result<(), TreebankError> {
    writeln!(out, "# {metadata}")?;
    Ok(())
}

/// The JSON payload of the first `#` line, if any.
pub fn read_header<R: BufRead>(input: R) -> Result<Option<serde_json::Value>, TreebankError> {
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if let Some(rest) = line.strip_prefix('#') {
            return serde_json::from_str(rest.trim())
                .map(Some)
                .map_err(|e| TreebankError::Line {
                    line: i + 1,
                    message: format!("metadata is not JSON: {e}"),
                });
        }
        if !line.trim().is_empty() {
            break;
        }
    }
    Ok(None)
}

pub fn read_treebank<R: BufRead>(input: R) -> Result<Vec<TreebankRecord>, TreebankError> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let err = |message: String| TreebankError::Line { line: i + 1, message };
        let record: TreebankRecord = serde_json::from_str(&line).map_err(|e| err(e.to_string()))?;
        if record.tree.leaf_count() != record.n_edus {
            return Err(err(format!(
                "n_edus is {} but the tree has {} leaves",
                record.n_edus,
                record.tree.leaf_count()
            )));
        }
        out.push(record);
    }
    Ok(out)
}
