use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use silva::aggregation::{combine_node, AggregationConfig};
use silva::cky::{beam_generate, GenerationConfig};
use silva::eval::{micro_precision, random_tree, EvalMode, EvalOptions, LabelPolicy};
use silva::ingest::{
    document_to_record, normalize_document, read_records, write_records, GoldLabel, RawDocumentRecord, RawEdu,
};
use silva::synth::synthetic_document;
use silva::tree::{internal_spans, validate_tree, DiscourseTree, NodeSignal, NuclearityLabel, TreeError};
use silva::treebank::{parse_tree, read_treebank, serialize_tree, write_treebank, TreebankRecord};

fn tree_strategy(max_n: usize) -> impl Strategy<Value = DiscourseTree> {
    (1..=max_n, any::<u64>())
        .prop_map(|(n, seed)| random_tree(n, &mut ChaCha8Rng::seed_from_u64(seed), LabelPolicy::Uniform))
}

fn signal() -> impl Strategy<Value = NodeSignal> {
    (-1.0..=1.0f64, 1e-9..=10.0f64).prop_map(|(s, a)| NodeSignal::new(s, a).unwrap())
}

fn label() -> impl Strategy<Value = NuclearityLabel> {
    prop::sample::select(NuclearityLabel::ALL.to_vec())
}

fn weights() -> impl Strategy<Value = AggregationConfig> {
    (1e-3..=1.0f64, 1.0..=4.0f64).prop_map(|(frac, wn)| AggregationConfig::new(wn, wn * frac).unwrap())
}

fn renumber(tree: &DiscourseTree, f: &impl Fn(usize) -> usize) -> DiscourseTree {
    match tree {
        DiscourseTree::Leaf(i) => DiscourseTree::Leaf(f(*i)),
        DiscourseTree::Internal { label, left, right } => {
            DiscourseTree::internal(*label, renumber(left, f), renumber(right, f))
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn random_trees_are_valid(t in tree_strategy(60)) {
        let n = t.leaf_count();
        prop_assert!(validate_tree(&t, n).is_ok());
        prop_assert_eq!(internal_spans(&t).len(), n - 1);
        prop_assert_eq!(t.leaves(), (1..=n).collect::<Vec<_>>());
    }

    #[test]
    fn perturbed_leaves_are_rejected(t in tree_strategy(40), pick in any::<prop::sample::Index>()) {
        let n = t.leaf_count();
        prop_assume!(n >= 2);
        let victim = pick.index(n) + 1;
        let other = if victim == n { 1 } else { victim + 1 };
        // one leaf copied over a neighbour: a duplicate and a gap
        let dup = renumber(&t, &|i| if i == victim { other } else { i });
        let dup_err = matches!(validate_tree(&dup, n), Err(TreeError::DuplicateLeaf { .. }));
        prop_assert!(dup_err);
        let out = renumber(&t, &|i| if i == victim { n + 1 } else { i });
        let range_err = matches!(validate_tree(&out, n), Err(TreeError::LeafOutOfRange { .. }));
        prop_assert!(range_err);
        prop_assert!(validate_tree(&t, n + 1).is_err());
    }

    #[test]
    fn serialization_round_trips(t in tree_strategy(100)) {
        let text = serialize_tree(&t);
        prop_assert_eq!(parse_tree(&text).unwrap(), t);
    }

    #[test]
    fn combination_is_convex(a in signal(), b in signal(), l in label(), cfg in weights()) {
        let c = combine_node(a, b, l, &cfg).unwrap();
        prop_assert!(a.sentiment.min(b.sentiment) <= c.sentiment);
        prop_assert!(c.sentiment <= a.sentiment.max(b.sentiment));
        prop_assert!(c.attention > 0.0);
    }

    #[test]
    fn ns_and_sn_mirror(a in signal(), b in signal(), cfg in weights()) {
        let ns = combine_node(a, b, NuclearityLabel::NS, &cfg).unwrap();
        let sn = combine_node(b, a, NuclearityLabel::SN, &cfg).unwrap();
        prop_assert_eq!(ns, sn);
        let nn_ab = combine_node(a, b, NuclearityLabel::NN, &cfg).unwrap();
        let nn_ba = combine_node(b, a, NuclearityLabel::NN, &cfg).unwrap();
        prop_assert_eq!(nn_ab, nn_ba);
    }

    #[test]
    fn attention_scale_cancels(a in signal(), b in signal(), l in label(), cfg in weights(), c in 1e-3..=1.0f64) {
        let base = combine_node(a, b, l, &cfg).unwrap();
        let scaled = combine_node(
            NodeSignal::new(a.sentiment, a.attention * c).unwrap(),
            NodeSignal::new(b.sentiment, b.attention * c).unwrap(),
            l,
            &cfg,
        ).unwrap();
        prop_assert!((base.sentiment - scaled.sentiment).abs() <= 1e-12);
        prop_assert!((base.attention * c - scaled.attention).abs() <= 1e-12 * base.attention.max(1.0));
    }

    #[test]
    fn equal_weights_give_plain_weighted_mean(a in signal(), b in signal(), l in label()) {
        let cfg = AggregationConfig::new(1.0, 1.0).unwrap();
        let c = combine_node(a, b, l, &cfg).unwrap();
        let expected = (a.sentiment * a.attention + b.sentiment * b.attention) / (a.attention + b.attention);
        prop_assert!((c.sentiment - expected).abs() <= 1e-12);
    }

    #[test]
    fn normalization_is_idempotent(n in 1usize..60, seed in any::<u64>(), scale in -4i32..=4) {
        let doc = synthetic_document("x", n, &mut ChaCha8Rng::seed_from_u64(seed));
        let mut raw = document_to_record(&doc);
        for e in &mut raw.edus {
            e.attention = e.attention.map(|a| a * 10f64.powi(scale));
        }
        let once = normalize_document(&raw, None).unwrap();
        let sum: f64 = once.edus.iter().map(|e| e.attention).sum();
        prop_assert!((sum - 1.0).abs() <= 1e-9);
        let twice = normalize_document(&document_to_record(&once), None).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn records_round_trip_through_jsonl(n in 1usize..30, seed in any::<u64>()) {
        let doc = synthetic_document("round", n, &mut ChaCha8Rng::seed_from_u64(seed));
        let rec = document_to_record(&doc);
        let mut buf = Vec::new();
        write_records(&mut buf, [&rec]).unwrap();
        let back = read_records(&buf[..]).unwrap();
        prop_assert_eq!(back.len(), 1);
        let parsed = back[0].record.as_ref().unwrap();
        prop_assert_eq!(parsed, &rec);
        prop_assert_eq!(normalize_document(parsed, None).unwrap(), doc);
    }

    #[test]
    fn treebank_files_round_trip(docs in 0usize..12, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = GenerationConfig::default();
        let records: Vec<TreebankRecord> = (0..docs)
            .map(|i| {
                let doc = synthetic_document(format!("tb-{i}"), 1 + i * 3, &mut rng);
                TreebankRecord::from_result(&doc, &beam_generate(&doc, &cfg).unwrap())
            })
            .collect();
        let mut first = Vec::new();
        write_treebank(&mut first, &records).unwrap();
        let read = read_treebank(&first[..]).unwrap();
        prop_assert_eq!(&read, &records);
        let mut second = Vec::new();
        write_treebank(&mut second, &read).unwrap();
        prop_assert_eq!(first, second);
    }

    #[test]
    fn structure_precision_is_recall_and_bounds_nuclearity(seed in any::<u64>(), docs in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mk = |id: usize, t: DiscourseTree| TreebankRecord {
            doc_id: format!("d{id}"),
            n_edus: t.leaf_count(),
            tree: t,
            root_sentiment: 0.0,
            root_attention: 1.0,
            distance: 0.0,
            height: 0,
            balance: 1.0,
        };
        let mut pred = Vec::new();
        let mut reference = Vec::new();
        for d in 0..docs {
            let n = 1 + (seed as usize + d * 7) % 30;
            pred.push(mk(d, random_tree(n, &mut rng, LabelPolicy::Uniform)));
            reference.push(mk(d, random_tree(n, &mut rng, LabelPolicy::Uniform)));
        }
        let s = micro_precision(&pred, &reference, &EvalOptions::new(EvalMode::Structure)).unwrap();
        let nuc = micro_precision(&pred, &reference, &EvalOptions::new(EvalMode::Nuclearity)).unwrap();
        prop_assert_eq!(s.precision, s.recall());
        prop_assert!(nuc.precision <= s.precision);
        prop_assert!((0.0..=100.0).contains(&s.precision));
        prop_assert_eq!(micro_precision(&pred, &pred, &EvalOptions::new(EvalMode::Nuclearity)).unwrap().precision, 100.0);
    }
}

#[test]
fn stars_map_linearly_onto_polarity() {
    let rec = |stars| RawDocumentRecord {
        doc_id: "s".into(),
        gold: GoldLabel::Stars { stars, scale: (1, 5) },
        edus: vec![RawEdu {
            text: String::new(),
            sentiment: Some(0.0),
            attention: Some(1.0),
        }],
    };
    let gold: Vec<f64> = (1..=5)
        .map(|s| normalize_document(&rec(s), None).unwrap().gold_polarity)
        .collect();
    assert_eq!(gold, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    assert!(normalize_document(&rec(6), None).is_err());
}
