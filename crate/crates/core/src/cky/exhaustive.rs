use super::{count_labeled_trees, GenerateError, GenerationConfig};
use crate::aggregation::combine_node;
use crate::tree::{balance_ratio, DiscourseTree, Document, NodeSignal, NuclearityLabel, ScoredTree, TieKey};

/// Largest number of labeled trees [`exhaustive_best`] will enumerate.
pub const DEFAULT_ORACLE_LIMIT: u128 = 1_000_000;

#[derive(Clone, Copy)]
enum Node {
    Leaf(usize),
    Internal(NuclearityLabel, u32, u32),
}

#[derive(Clone, Copy)]
struct Item {
    signal: NodeSignal,
    height: u32,
    split: usize,
    label: Option<NuclearityLabel>,
    node: u32,
}

/// Globally optimal tree by brute force over every labeled binary tree.
pub fn exhaustive_best(doc: &Document, cfg: &GenerationConfig) -> Result<ScoredTree, GenerateError> {
    exhaustive_best_with_limit(doc, cfg, DEFAULT_ORACLE_LIMIT)
}

pub fn exhaustive_best_with_limit(
    doc: &Document,
    cfg: &GenerationConfig,
    limit: u128,
) -> Result<ScoredTree, GenerateError> {
    let n = doc.len();
    let count = count_labeled_trees(n)?;
    if count > limit {
        return Err(GenerateError::TooLarge { n, count, limit });
    }
    doc.validate()?;
    cfg.aggregation.validate()?;

    // all trees of every span, children shared through the arena
    let mut arena: Vec<Node> = Vec::new();
    let mut spans: Vec<Vec<Item>> = vec![Vec::new(); n * n];
    let at = |s: usize, e: usize| s * n + e;
    for (i, edu) in doc.edus.iter().enumerate() {
        arena.push(Node::Leaf(i + 1));
        spans[at(i, i)].push(Item {
            signal: edu.signal(),
            height: 0,
            split: 0,
            label: None,
            node: (arena.len() - 1) as u32,
        });
    }
    for len in 2..=n {
        for s in 0..=(n - len) {
            let e = s + len - 1;
            let mut items = Vec::new();
            for k in s..e {
                for l in &spans[at(s, k)] {
                    for r in &spans[at(k + 1, e)] {
                        for label in NuclearityLabel::ALL {
                            let signal = combine_node(l.signal, r.signal, label, &cfg.aggregation)?;
                            arena.push(Node::Internal(label, l.node, r.node));
                            items.push(Item {
                                signal,
                                height: 1 + l.height.max(r.height),
                                split: k + 1,
                                label: Some(label),
                                node: (arena.len() - 1) as u32,
                            });
                        }
                    }
                }
            }
            spans[at(s, e)] = items;
        }
    }

    let key = |it: &Item| TieKey {
        distance: cfg.distance_kind.measure(doc.gold_polarity, it.signal.sentiment),
        balance: balance_ratio(it.height as usize, n),
        split: it.split,
        label: it.label,
    };
    let roots = &spans[at(0, n - 1)];
    let mut best = &roots[0];
    let mut best_key = key(best);
    for it in &roots[1..] {
        let k = key(it);
        // strict: the earliest enumerated tree wins full ties
        if k.compare(&best_key).is_lt() {
            best = it;
            best_key = k;
        }
    }
    Ok(ScoredTree {
        tree: materialize(&arena, best.node),
        signal: best.signal,
        distance: best_key.distance,
    })
}

fn materialize(arena: &[Node], id: u32) -> DiscourseTree {
    match arena[id as usize] {
        Node::Leaf(i) => DiscourseTree::Leaf(i),
        Node::Internal(label, l, r) => DiscourseTree::internal(label, materialize(arena, l), materialize(arena, r)),
    }
}
