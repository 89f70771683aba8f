//! Discourse units, documents and binary discourse trees with nuclearity.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Closed interval of 1-based EDU indices.
pub type Span = (usize, usize);

/// Ternary nuclearity of an internal node. The derived order `NN < NS < SN`
/// is the last structural tie-breaker when ranking candidate trees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NuclearityLabel {
    /// nucleus-nucleus
    NN,
    /// nucleus-satellite (left child is the nucleus)
    NS,
    /// satellite-nucleus (right child is the nucleus)
    SN,
}

impl NuclearityLabel {
    pub const ALL: [NuclearityLabel; 3] = [NuclearityLabel::NN, NuclearityLabel::NS, NuclearityLabel::SN];

    pub fn as_str(self) -> &'static str {
        match self {
            NuclearityLabel::NN => "NN",
            NuclearityLabel::NS => "NS",
            NuclearityLabel::SN => "SN",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "NN" => Some(NuclearityLabel::NN),
            "NS" => Some(NuclearityLabel::NS),
            "SN" => Some(NuclearityLabel::SN),
            _ => None,
        }
    }
}

impl fmt::Display for NuclearityLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Elementary discourse unit with its (precomputed or annotated) scores.
#[derive(Debug, Clone, PartialEq)]
pub struct Edu {
    /// 1-based position in the containing document.
    pub index: usize,
    pub text: String,
    /// Polarity in `[-1, 1]`.
    pub sentiment: f64,
    /// Attention weight in `(0, 1]`.
    pub attention: f64,
}

impl Edu {
    pub fn signal(&self) -> NodeSignal {
        NodeSignal {
            sentiment: self.sentiment,
            attention: self.attention,
        }
    }
}

/// The `(sentiment, attention)` pair carried by every tree node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeSignal {
    pub sentiment: f64,
    pub attention: f64,
}

impl NodeSignal {
    pub fn new(sentiment: f64, attention: f64) -> Result<Self, SignalError> {
        if !(-1.0..=1.0).contains(&sentiment) {
            return Err(SignalError::Sentiment(sentiment));
        }
        if !(attention > 0.0 && attention.is_finite()) {
            return Err(SignalError::Attention(attention));
        }
        Ok(NodeSignal { sentiment, attention })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SignalError {
    #[error("sentiment {0} outside [-1, 1]")]
    Sentiment(f64),
    #[error("attention {0} is not a positive finite number")]
    Attention(f64),
}

/// A pre-segmented document with its gold polarity.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub doc_id: String,
    pub gold_polarity: f64,
    pub edus: Vec<Edu>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DocumentError {
    #[error("document has no EDUs")]
    Empty,
    #[error("document id is empty")]
    EmptyId,
    #[error("gold polarity {0} outside [-1, 1]")]
    Gold(f64),
    #[error("EDU at position {position} carries index {index}")]
    Index { position: usize, index: usize },
    #[error("EDU {index}: sentiment {value} outside [-1, 1]")]
    Sentiment { index: usize, value: f64 },
    #[error("EDU {index}: attention {value} outside (0, 1]")]
    Attention { index: usize, value: f64 },
}

impl Document {
    /// Builds a checked document.
    pub fn new(doc_id: impl Into<String>, gold_polarity: f64, edus: Vec<Edu>) -> Result<Self, DocumentError> {
        let doc = Document {
            doc_id: doc_id.into(),
            gold_polarity,
            edus,
        };
        doc.validate()?;
        Ok(doc)
    }

    /// Convenience constructor from parallel score slices; EDU texts are empty.
    pub fn from_scores(
        doc_id: impl Into<String>,
        gold_polarity: f64,
        sentiments: &[f64],
        attentions: &[f64],
    ) -> Result<Self, DocumentError> {
        assert_eq!(sentiments.len(), attentions.len(), "score slices differ in length");
        let edus = sentiments
            .iter()
            .zip(attentions)
            .enumerate()
            .map(|(i, (&sentiment, &attention))| Edu {
                index: i + 1,
                text: String::new(),
                sentiment,
                attention,
            })
            .collect();
        Document::new(doc_id, gold_polarity, edus)
    }

    pub fn validate(&self) -> Result<(), DocumentError> {
        if self.doc_id.is_empty() {
            return Err(DocumentError::EmptyId);
        }
        if self.edus.is_empty() {
            return Err(DocumentError::Empty);
        }
        if !(-1.0..=1.0).contains(&self.gold_polarity) {
            return Err(DocumentError::Gold(self.gold_polarity));
        }
        for (pos, edu) in self.edus.iter().enumerate() {
            if edu.index != pos + 1 {
                return Err(DocumentError::Index {
                    position: pos + 1,
                    index: edu.index,
                });
            }
            if !(-1.0..=1.0).contains(&edu.sentiment) {
                return Err(DocumentError::Sentiment {
                    index: edu.index,
                    value: edu.sentiment,
                });
            }
            if !(edu.attention > 0.0 && edu.attention <= 1.0) {
                return Err(DocumentError::Attention {
                    index: edu.index,
                    value: edu.attention,
                });
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.edus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edus.is_empty()
    }
}

/// Binary discourse tree over 1-based EDU indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DiscourseTree {
    Leaf(usize),
    Internal {
        label: NuclearityLabel,
        left: Box<DiscourseTree>,
        right: Box<DiscourseTree>,
    },
}

impl DiscourseTree {
    pub fn leaf(index: usize) -> Self {
        DiscourseTree::Leaf(index)
    }

    pub fn internal(label: NuclearityLabel, left: DiscourseTree, right: DiscourseTree) -> Self {
        DiscourseTree::Internal {
            label,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    /// `(first leaf, last leaf)` in left-to-right order.
    pub fn span(&self) -> Span {
        (self.first_leaf(), self.last_leaf())
    }

    fn first_leaf(&self) -> usize {
        let mut node = self;
        loop {
            match node {
                DiscourseTree::Leaf(i) => return *i,
                DiscourseTree::Internal { left, .. } => node = left,
            }
        }
    }

    fn last_leaf(&self) -> usize {
        let mut node = self;
        loop {
            match node {
                DiscourseTree::Leaf(i) => return *i,
                DiscourseTree::Internal { right, .. } => node = right,
            }
        }
    }

    pub fn label(&self) -> Option<NuclearityLabel> {
        match self {
            DiscourseTree::Leaf(_) => None,
            DiscourseTree::Internal { label, .. } => Some(*label),
        }
    }

    /// Index of the last leaf of the left child; `0` for a leaf.
    pub fn split(&self) -> usize {
        match self {
            DiscourseTree::Leaf(_) => 0,
            DiscourseTree::Internal { left, .. } => left.last_leaf(),
        }
    }

    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<usize>) {
        match self {
            DiscourseTree::Leaf(i) => out.push(*i),
            DiscourseTree::Internal { left, right, .. } => {
                left.collect_leaves(out);
                right.collect_leaves(out);
            }
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            DiscourseTree::Leaf(_) => 1,
            DiscourseTree::Internal { left, right, .. } => left.leaf_count() + right.leaf_count(),
        }
    }

    /// Longest root-to-leaf path, counted in edges.
    pub fn height(&self) -> usize {
        match self {
            DiscourseTree::Leaf(_) => 0,
            DiscourseTree::Internal { left, right, .. } => 1 + left.height().max(right.height()),
        }
    }

    /// Internal-node constituents as `(span, label)` pairs, in pre-order.
    pub fn labeled_spans(&self) -> Vec<(Span, NuclearityLabel)> {
        let mut out = Vec::new();
        self.collect_labeled(&mut out);
        out
    }

    fn collect_labeled(&self, out: &mut Vec<(Span, NuclearityLabel)>) -> Span {
        match self {
            DiscourseTree::Leaf(i) => (*i, *i),
            DiscourseTree::Internal { label, left, right } => {
                let slot = out.len();
                out.push(((0, 0), *label));
                let (start, _) = left.collect_labeled(out);
                let (_, end) = right.collect_labeled(out);
                out[slot].0 = (start, end);
                (start, end)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("tree has {found} leaves, expected {expected}")]
    LeafCountMismatch { expected: usize, found: usize },
    #[error("leaf index {index} outside 1..={n}")]
    LeafOutOfRange { index: usize, n: usize },
    #[error("leaf {index} occurs more than once (under span {}-{})", span.0, span.1)]
    DuplicateLeaf { index: usize, span: Span },
    #[error("children of node spanning {}-{} are not adjacent", span.0, span.1)]
    NonContiguousSpan { span: Span },
}

/// Checks binary structure, leaf coverage `1..=n` and span contiguity.
pub fn validate_tree(tree: &DiscourseTree, n: usize) -> Result<(), TreeError> {
    let mut seen = vec![false; n + 1];
    check_leaves(tree, n, &mut seen, tree.span())?;
    check_contiguous(tree)?;
    let found = seen.iter().filter(|&&s| s).count();
    if found != n {
        return Err(TreeError::LeafCountMismatch { expected: n, found });
    }
    Ok(())
}

fn check_leaves(tree: &DiscourseTree, n: usize, seen: &mut [bool], parent: Span) -> Result<(), TreeError> {
    match tree {
        DiscourseTree::Leaf(i) => {
            let i = *i;
            if i == 0 || i > n {
                return Err(TreeError::LeafOutOfRange { index: i, n });
            }
            if seen[i] {
                return Err(TreeError::DuplicateLeaf { index: i, span: parent });
            }
            seen[i] = true;
            Ok(())
        }
        DiscourseTree::Internal { left, right, .. } => {
            let span = tree.span();
            check_leaves(left, n, seen, span)?;
            check_leaves(right, n, seen, span)
        }
    }
}

fn check_contiguous(tree: &DiscourseTree) -> Result<Span, TreeError> {
    match tree {
        DiscourseTree::Leaf(i) => Ok((*i, *i)),
        DiscourseTree::Internal { left, right, .. } => {
            let (ls, le) = check_contiguous(left)?;
            let (rs, re) = check_contiguous(right)?;
            if le + 1 != rs {
                return Err(TreeError::NonContiguousSpan { span: (ls, re) });
            }
            Ok((ls, re))
        }
    }
}

/// Spans of all internal nodes, root included, leaves excluded.
pub fn internal_spans(tree: &DiscourseTree) -> BTreeSet<Span> {
    tree.labeled_spans().into_iter().map(|(span, _)| span).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeStats {
    pub n_edus: usize,
    pub height: usize,
    pub balance: f64,
}

/// `ceil(log2(n))` for `n >= 1`.
pub fn min_height(n: usize) -> usize {
    debug_assert!(n >= 1);
    (usize::BITS - (n - 1).leading_zeros()) as usize
}

/// Height relative to the minimum height possible over `n_edus` leaves.
/// Defined as `1.0` for a single leaf.
pub fn balance_ratio(height: usize, n_edus: usize) -> f64 {
    if n_edus < 2 {
        1.0
    } else {
        height as f64 / min_height(n_edus) as f64
    }
}

pub fn tree_stats(tree: &DiscourseTree) -> TreeStats {
    let n_edus = tree.leaf_count();
    let height = tree.height();
    TreeStats {
        n_edus,
        height,
        balance: balance_ratio(height, n_edus),
    }
}

/// Beam element: a tree with its root aggregate and distance to gold.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredTree {
    pub tree: DiscourseTree,
    pub signal: NodeSignal,
    pub distance: f64,
}

/// Deterministic ranking key for candidate trees over the same span:
/// distance, then balance, then root split position, then label.
/// Leaves carry split `0` and no label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TieKey {
    pub distance: f64,
    pub balance: f64,
    pub split: usize,
    pub label: Option<NuclearityLabel>,
}

impl TieKey {
    pub fn compare(&self, other: &TieKey) -> Ordering {
        self.distance
            .total_cmp(&other.distance)
            .then_with(|| self.balance.total_cmp(&other.balance))
            .then_with(|| self.split.cmp(&other.split))
            .then_with(|| self.label.cmp(&other.label))
    }
}

impl ScoredTree {
    pub fn tie_key(&self) -> TieKey {
        let stats = tree_stats(&self.tree);
        TieKey {
            distance: self.distance,
            balance: stats.balance,
            split: self.tree.split(),
            label: self.tree.label(),
        }
    }
}
