//! Micro-averaged constituent precision between treebanks, and baseline trees.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::tree::{DiscourseTree, NuclearityLabel, Span};
use crate::treebank::TreebankRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum EvalMode {
    /// Unlabeled spans.
    Structure,
    /// Spans together with their nuclearity.
    Nuclearity,
}

/// Where nuclearity lives when scoring in [`EvalMode::Nuclearity`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum NuclearityConvention {
    /// The ternary label of each internal span.
    #[default]
    Parent,
    /// An N/S mark on every non-root node, leaves included.
    Child,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalOptions {
    pub mode: EvalMode,
    pub exclude_root: bool,
    pub convention: NuclearityConvention,
}

impl EvalOptions {
    pub fn new(mode: EvalMode) -> Self {
        EvalOptions {
            mode,
            exclude_root: false,
            convention: NuclearityConvention::Parent,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("document '{0}' appears more than once in a treebank")]
    DuplicateDoc(String),
    #[error("corpora differ: {missing_in_pred} reference docs missing from prediction, {missing_in_ref} predicted docs missing from reference (e.g. '{example}')")]
    CorpusMismatch {
        missing_in_pred: usize,
        missing_in_ref: usize,
        example: String,
    },
    #[error("document '{doc_id}': prediction has {pred} EDUs, reference has {reference}")]
    EduCountMismatch {
        doc_id: String,
        pred: usize,
        reference: usize,
    },
}

/// Pooled counts. Only `mode`, `matched`, `total` and `precision` are
/// serialized.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub mode: EvalMode,
    pub matched: usize,
    pub total: usize,
    pub precision: f64,
    #[serde(skip)]
    pub reference_total: usize,
}

impl EvalReport {
    pub fn recall(&self) -> f64 {
        percentage(self.matched, self.reference_total)
    }

    pub fn to_table(&self) -> String {
        let mode = match self.mode {
            EvalMode::Structure => "structure",
            EvalMode::Nuclearity => "nuclearity",
        };
        format!(
            "{:<12} {:>10} {:>10} {:>10}\n{:<12} {:>10} {:>10} {:>10.2}\n",
            "mode", "matched", "total", "precision", mode, self.matched, self.total, self.precision
        )
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_table())
    }
}

// an empty pool is vacuously perfect
fn percentage(matched: usize, total: usize) -> f64 {
    if total == 0 {
        100.0
    } else {
        100.0 * matched as f64 / total as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Unit {
    Span(Span),
    Labeled(Span, NuclearityLabel),
    Marked(Span, bool),
}

fn units(tree: &DiscourseTree, opts: &EvalOptions) -> BTreeSet<Unit> {
    let root = tree.span();
    let mut out = BTreeSet::new();
    match (opts.mode, opts.convention) {
        (EvalMode::Structure, _) => {
            for (span, _) in tree.labeled_spans() {
                out.insert(Unit::Span(span));
            }
        }
        (EvalMode::Nuclearity, NuclearityConvention::Parent) => {
            for (span, label) in tree.labeled_spans() {
                out.insert(Unit::Labeled(span, label));
            }
        }
        (EvalMode::Nuclearity, NuclearityConvention::Child) => mark_children(tree, &mut out),
    }
    if opts.exclude_root {
        out.retain(|u| match *u {
            Unit::Span(s) | Unit::Labeled(s, _) => s != root,
            Unit::Marked(..) => true,
        });
    }
    out
}

fn mark_children(tree: &DiscourseTree, out: &mut BTreeSet<Unit>) {
    if let DiscourseTree::Internal { label, left, right } = tree {
        let (left_nucleus, right_nucleus) = match label {
            NuclearityLabel::NN => (true, true),
            NuclearityLabel::NS => (true, false),
            NuclearityLabel::SN => (false, true),
        };
        out.insert(Unit::Marked(left.span(), left_nucleus));
        out.insert(Unit::Marked(right.span(), right_nucleus));
        mark_children(left, out);
        mark_children(right, out);
    }
}

/// Pooled constituent precision (percent) of `pred` against `reference`.
/// Both treebanks must cover the same documents with the same EDU counts.
pub fn micro_precision(
    pred: &[TreebankRecord],
    reference: &[TreebankRecord],
    opts: &EvalOptions,
) -> Result<EvalReport, EvalError> {
    let index = |tb: &[TreebankRecord]| -> Result<HashMap<String, usize>, EvalError> {
        let mut map = HashMap::with_capacity(tb.len());
        for (i, r) in tb.iter().enumerate() {
            if map.insert(r.doc_id.clone(), i).is_some() {
                return Err(EvalError::DuplicateDoc(r.doc_id.clone()));
            }
        }
        Ok(map)
    };
    let pred_index = index(pred)?;
    let ref_index = index(reference)?;
    let missing_in_pred: Vec<&String> = ref_index.keys().filter(|k| !pred_index.contains_key(*k)).collect();
    let missing_in_ref: Vec<&String> = pred_index.keys().filter(|k| !ref_index.contains_key(*k)).collect();
    if !missing_in_pred.is_empty() || !missing_in_ref.is_empty() {
        let mut examples: Vec<&String> = missing_in_pred.iter().chain(&missing_in_ref).copied().collect();
        examples.sort();
        return Err(EvalError::CorpusMismatch {
            missing_in_pred: missing_in_pred.len(),
            missing_in_ref: missing_in_ref.len(),
            example: examples[0].clone(),
        });
    }

    let (mut matched, mut pred_total, mut ref_total) = (0, 0, 0);
    for r in reference {
        let p = &pred[pred_index[&r.doc_id]];
        if p.n_edus != r.n_edus {
            return Err(EvalError::EduCountMismatch {
                doc_id: r.doc_id.clone(),
                pred: p.n_edus,
                reference: r.n_edus,
            });
        }
        let pu = units(&p.tree, opts);
        let ru = units(&r.tree, opts);
        matched += pu.intersection(&ru).count();
        pred_total += pu.len();
        ref_total += ru.len();
    }
    Ok(EvalReport {
        mode: opts.mode,
        matched,
        total: pred_total,
        precision: percentage(matched, pred_total),
        reference_total: ref_total,
    })
}

/// How baseline generators label internal nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelPolicy {
    Fixed(NuclearityLabel),
    /// Uniform over the three labels (random trees only; chains use NN).
    Uniform,
}

fn pick_label<R: Rng + ?Sized>(policy: LabelPolicy, rng: &mut R) -> NuclearityLabel {
    match policy {
        LabelPolicy::Fixed(l) => l,
        LabelPolicy::Uniform => NuclearityLabel::ALL[rng.gen_range(0..3)],
    }
}

pub fn right_branching(n: usize) -> DiscourseTree {
    right_branching_with(n, NuclearityLabel::NN)
}

pub fn right_branching_with(n: usize, label: NuclearityLabel) -> DiscourseTree {
    assert!(n >= 1);
    let mut t = DiscourseTree::Leaf(n);
    for i in (1..n).rev() {
        t = DiscourseTree::internal(label, DiscourseTree::Leaf(i), t);
    }
    t
}

pub fn left_branching(n: usize) -> DiscourseTree {
    left_branching_with(n, NuclearityLabel::NN)
}

pub fn left_branching_with(n: usize, label: NuclearityLabel) -> DiscourseTree {
    assert!(n >= 1);
    let mut t = DiscourseTree::Leaf(1);
    for i in 2..=n {
        t = DiscourseTree::internal(label, t, DiscourseTree::Leaf(i));
    }
    t
}

/// `ln Catalan(k)` for `k < len`.
fn ln_catalan_table(len: usize) -> Vec<f64> {
    let mut t = Vec::with_capacity(len);
    let mut acc = 0.0f64;
    for k in 0..len {
        t.push(acc);
        acc += (2.0 * (2 * k + 1) as f64).ln() - ((k + 2) as f64).ln();
    }
    t
}

/// Tree over `1..=n` drawn uniformly among all binary shapes. The root split
/// is chosen with probability proportional to the number of shapes on each
/// side, then both sides recurse.
pub fn random_tree<R: Rng + ?Sized>(n: usize, rng: &mut R, policy: LabelPolicy) -> DiscourseTree {
    assert!(n >= 1);
    let table = ln_catalan_table(n);
    build_random(1, n, &table, rng, policy)
}

fn build_random<R: Rng + ?Sized>(
    start: usize,
    end: usize,
    table: &[f64],
    rng: &mut R,
    policy: LabelPolicy,
) -> DiscourseTree {
    if start == end {
        return DiscourseTree::Leaf(start);
    }
    let size = end - start + 1;
    // shapes over m leaves: Catalan(m - 1)
    let total = table[size - 1];
    let weights: Vec<f64> = (1..size)
        .map(|left| (table[left - 1] + table[size - left - 1] - total).exp())
        .collect();
    let mut u = rng.gen::<f64>() * weights.iter().sum::<f64>();
    let mut left = size - 1;
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            left = i + 1;
            break;
        }
        u -= w;
    }
    let label = pick_label(policy, rng);
    let split = start + left - 1;
    DiscourseTree::internal(
        label,
        build_random(start, split, table, rng, policy),
        build_random(split + 1, end, table, rng, policy),
    )
}
