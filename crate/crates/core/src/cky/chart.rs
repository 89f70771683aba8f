use rand::Rng;

use super::explore::{exploration_rate, Pruner, RankOrder};
use super::{doc_rng, GenerateError, GenerationConfig};
use crate::aggregation::{combine_node, combine_weighted, nuclearity_weights, AggregationError};
use crate::tree::{min_height, DiscourseTree, Document, NodeSignal, NuclearityLabel, ScoredTree, Span, TieKey};

/// One chart cell with its materialized beam.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartCell {
    pub span: Span,
    pub beam: Vec<ScoredTree>,
}

impl ChartCell {
    /// Singleton cell holding the leaf for EDU `index` (1-based).
    pub fn leaf(doc: &Document, index: usize, cfg: &GenerationConfig) -> ChartCell {
        let signal = doc.edus[index - 1].signal();
        ChartCell {
            span: (index, index),
            beam: vec![ScoredTree {
                tree: DiscourseTree::Leaf(index),
                signal,
                distance: cfg.distance_kind.measure(doc.gold_polarity, signal.sentiment),
            }],
        }
    }
}

/// Every pairing of a left-beam tree with a right-beam tree under every
/// nuclearity label, enumerated left tree, then right tree, then label.
pub fn cell_candidates(
    left: &ChartCell,
    right: &ChartCell,
    doc: &Document,
    cfg: &GenerationConfig,
) -> Result<Vec<ScoredTree>, GenerateError> {
    debug_assert_eq!(left.span.1 + 1, right.span.0, "cells are not adjacent");
    let mut out = Vec::with_capacity(left.beam.len() * right.beam.len() * 3);
    for l in &left.beam {
        for r in &right.beam {
            for label in NuclearityLabel::ALL {
                let signal = combine_node(l.signal, r.signal, label, &cfg.aggregation)?;
                out.push(ScoredTree {
                    tree: DiscourseTree::internal(label, l.tree.clone(), r.tree.clone()),
                    signal,
                    distance: cfg.distance_kind.measure(doc.gold_polarity, signal.sentiment),
                });
            }
        }
    }
    Ok(out)
}

/// Prunes the candidates of a cell spanning `span_len` of `n` EDUs down to
/// at most `beam_size` trees.
///
/// The cell exploits (keeps the best trees) unless a single coin with
/// probability [`exploration_rate`] says to explore, in which case the best
/// tree is kept and the other slots are filled by softmax sampling without
/// replacement. The result is sorted best first.
pub fn prune_beam<R: Rng + ?Sized>(
    candidates: Vec<ScoredTree>,
    span_len: usize,
    n: usize,
    cfg: &GenerationConfig,
    rng: &mut R,
) -> Vec<ScoredTree> {
    let epsilon = if span_len >= 2 {
        exploration_rate(span_len, n, cfg)
    } else {
        0.0
    };
    let mut pruner = Pruner::new(cfg.beam_size, epsilon, cfg.temperature, RankOrder::Standard, rng);
    for c in candidates {
        let key = c.tie_key();
        pruner.offer(key, c);
    }
    pruner.finish()
}

/// Compact beam entry: children are referenced by rank in their cells' beams.
#[derive(Debug, Clone, Copy)]
struct Entry {
    signal: NodeSignal,
    distance: f64,
    height: u32,
    /// Last EDU of the left child; 0 for a leaf.
    split: u32,
    label: Option<NuclearityLabel>,
    left: u32,
    right: u32,
}

/// A filled chart. Cells store backpointers; trees are rebuilt on demand.
#[derive(Debug, Clone)]
pub struct Chart {
    n: usize,
    cells: Vec<Vec<Entry>>,
    candidates: Vec<u64>,
    explored: Vec<bool>,
}

impl Chart {
    #[inline]
    fn idx(&self, start: usize, end: usize) -> usize {
        (start - 1) * self.n + (end - 1)
    }

    pub fn n_edus(&self) -> usize {
        self.n
    }

    pub fn beam_len(&self, start: usize, end: usize) -> usize {
        self.cells[self.idx(start, end)].len()
    }

    /// Candidates generated for the cell before pruning.
    pub fn candidate_count(&self, start: usize, end: usize) -> u64 {
        self.candidates[self.idx(start, end)]
    }

    /// Whether the cell's exploration coin came up.
    pub fn explored(&self, start: usize, end: usize) -> bool {
        self.explored[self.idx(start, end)]
    }

    pub fn cell(&self, start: usize, end: usize) -> ChartCell {
        let beam = (0..self.beam_len(start, end))
            .map(|rank| self.scored(start, end, rank))
            .collect();
        ChartCell {
            span: (start, end),
            beam,
        }
    }

    /// Best tree of the root cell.
    pub fn root(&self) -> ScoredTree {
        self.scored(1, self.n, 0)
    }

    fn scored(&self, start: usize, end: usize, rank: usize) -> ScoredTree {
        let e = &self.cells[self.idx(start, end)][rank];
        ScoredTree {
            tree: self.rebuild(start, end, rank),
            signal: e.signal,
            distance: e.distance,
        }
    }

    fn rebuild(&self, start: usize, end: usize, rank: usize) -> DiscourseTree {
        let e = &self.cells[self.idx(start, end)][rank];
        match e.label {
            None => DiscourseTree::Leaf(start),
            Some(label) => {
                let split = e.split as usize;
                DiscourseTree::internal(
                    label,
                    self.rebuild(start, split, e.left as usize),
                    self.rebuild(split + 1, end, e.right as usize),
                )
            }
        }
    }
}

/// Fills the chart bottom-up by increasing span length.
pub fn build_chart<R: Rng + ?Sized>(
    doc: &Document,
    cfg: &GenerationConfig,
    rng: &mut R,
    order: RankOrder,
) -> Result<Chart, GenerateError> {
    if doc.edus.is_empty() {
        return Err(GenerateError::EmptyDocument);
    }
    cfg.validate()?;
    doc.validate()?;
    let n = doc.len();
    let gold = doc.gold_polarity;
    let mut chart = Chart {
        n,
        cells: vec![Vec::new(); n * n],
        candidates: vec![0; n * n],
        explored: vec![false; n * n],
    };
    for (i, edu) in doc.edus.iter().enumerate() {
        let signal = edu.signal();
        let cell = chart.idx(i + 1, i + 1);
        chart.cells[cell] = vec![Entry {
            signal,
            distance: cfg.distance_kind.measure(gold, signal.sentiment),
            height: 0,
            split: 0,
            label: None,
            left: 0,
            right: 0,
        }];
        chart.candidates[cell] = 1;
    }

    // every label has a nucleus, so node attention stays within these bounds
    let w_n = cfg.aggregation.w_nucleus;
    let min_att = doc.edus.iter().map(|e| e.attention).fold(f64::INFINITY, f64::min);
    let sum_att: f64 = doc.edus.iter().map(|e| e.attention).sum();
    let depth = (n - 1) as i32;
    let checked = !(min_att * w_n.min(1.0).powi(depth) > 0.0 && (sum_att * w_n.max(1.0).powi(depth)).is_finite());
    let weights = NuclearityLabel::ALL.map(|label| nuclearity_weights(label, &cfg.aggregation));
    for span_len in 2..=n {
        let min_h = min_height(span_len) as f64;
        let epsilon = exploration_rate(span_len, n, cfg);
        for start in 1..=(n + 1 - span_len) {
            let end = start + span_len - 1;
            let mut pruner = Pruner::new(cfg.beam_size, epsilon, cfg.temperature, order, rng);
            for split in start..end {
                let left = &chart.cells[chart.idx(start, split)];
                let right = &chart.cells[chart.idx(split + 1, end)];
                for (li, l) in left.iter().enumerate() {
                    for (ri, r) in right.iter().enumerate() {
                        let height = 1 + l.height.max(r.height);
                        let balance = height as f64 / min_h;
                        // an index loop unrolls; zipping the label and weight arrays did not
                        #[allow(clippy::needless_range_loop)]
                        for k in 0..3 {
                            let label = NuclearityLabel::ALL[k];
                            let signal = combine_weighted(l.signal, r.signal, weights[k]);
                            if checked && !(signal.attention > 0.0 && signal.attention.is_finite()) {
                                return Err(AggregationError::DegenerateAttention.into());
                            }
                            let distance = cfg.distance_kind.measure(gold, signal.sentiment);
                            let Some(ticket) = pruner.screen(distance) else {
                                continue;
                            };
                            let key = TieKey {
                                distance,
                                balance,
                                split,
                                label: Some(label),
                            };
                            pruner.admit(
                                ticket,
                                key,
                                Entry {
                                    signal,
                                    distance,
                                    height,
                                    split: split as u32,
                                    label: Some(label),
                                    left: li as u32,
                                    right: ri as u32,
                                },
                            );
                        }
                    }
                }
            }
            let cell = chart.idx(start, end);
            chart.candidates[cell] = pruner.offered();
            chart.explored[cell] = pruner.explored();
            chart.cells[cell] = pruner.finish();
        }
    }
    Ok(chart)
}

/// Chart for `doc` using the document's own random stream.
pub fn beam_chart(doc: &Document, cfg: &GenerationConfig) -> Result<Chart, GenerateError> {
    build_chart(doc, cfg, &mut doc_rng(cfg.seed, &doc.doc_id), RankOrder::Standard)
}

/// Best tree found by beam search. The random stream is derived from
/// `cfg.seed` and the document id, so results do not depend on which other
/// documents are processed alongside.
pub fn beam_generate(doc: &Document, cfg: &GenerationConfig) -> Result<ScoredTree, GenerateError> {
    beam_chart(doc, cfg).map(|chart| chart.root())
}

pub fn beam_generate_with_rng<R: Rng + ?Sized>(
    doc: &Document,
    cfg: &GenerationConfig,
    rng: &mut R,
) -> Result<ScoredTree, GenerateError> {
    build_chart(doc, cfg, rng, RankOrder::Standard).map(|chart| chart.root())
}
