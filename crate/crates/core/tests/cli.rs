use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use silva::eval::{left_branching, right_branching};
use silva::tree::DiscourseTree;
use silva::treebank::{parse_tree, read_header, read_treebank, write_treebank, TreebankRecord};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn silva(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_silva"))
        .args(args)
        .env_remove("SILVA_SEED")
        .output()
        .expect("run silva")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn generate(out: &Path, extra: &[&str]) -> Output {
    let input = data("demo_corpus.jsonl");
    let lexicon = data("demo_lexicon.tsv");
    let mut args = vec![
        "generate",
        "--input",
        input.to_str().unwrap(),
        "--lexicon",
        lexicon.to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    silva(&args)
}

fn write_tb(path: &Path, trees: &[(&str, DiscourseTree)]) {
    let records: Vec<TreebankRecord> = trees
        .iter()
        .map(|(id, t)| TreebankRecord {
            doc_id: id.to_string(),
            n_edus: t.leaf_count(),
            tree: t.clone(),
            root_sentiment: 0.0,
            root_attention: 1.0,
            distance: 0.0,
            height: t.height(),
            balance: 1.0,
        })
        .collect();
    let mut f = std::fs::File::create(path).unwrap();
    write_treebank(&mut f, &records).unwrap();
}

fn precision(o: &Output) -> f64 {
    let first = stdout(o).lines().next().unwrap().to_string();
    let v: serde_json::Value = serde_json::from_str(&first).unwrap();
    v["precision"].as_f64().unwrap()
}

#[test]
fn demo_corpus_gives_one_tree_per_document() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("demo.tb");
    let o = generate(&out, &["--jobs", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let bytes = std::fs::read(&out).unwrap();
    let records = read_treebank(&bytes[..]).unwrap();
    assert_eq!(records.len(), 5);
    let header = read_header(&bytes[..]).unwrap().unwrap();
    assert_eq!(header["beam_size"], 10);
    assert_eq!(header["seed"], 0);
    assert!(header["lexicon_sha256"].is_string());
    assert!(header.get("jobs").is_none());
}

#[test]
fn invalid_generate_flags_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.tb");
    for extra in [
        &["--beam-size", "0"][..],
        &["--epsilon-max", "2"],
        &["--temperature", "0"],
        &["--distance", "cosine"],
    ] {
        let o = generate(&out, extra);
        assert_eq!(o.status.code(), Some(2), "{extra:?}");
    }
}

#[test]
fn missing_input_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.tb");
    let o = silva(&[
        "generate",
        "--input",
        "/nonexistent/in.jsonl",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bad_documents_are_logged_and_fail_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.jsonl");
    std::fs::write(
        &input,
        "{\"doc_id\":\"ok\",\"gold\":{\"polarity\":0.5},\"edus\":[{\"sentiment\":0.2,\"attention\":1}]}\n\
         {\"doc_id\":\"unscored\",\"gold\":{\"polarity\":0.5},\"edus\":[{\"text\":\"no scores\"}]}\n\
         not json\n",
    )
    .unwrap();
    let out = dir.path().join("x.tb");
    let o = silva(&[
        "generate",
        "--input",
        input.to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains(":2:") && err.contains(":3:"), "{err}");
    let records = read_treebank(&std::fs::read(&out).unwrap()[..]).unwrap();
    assert_eq!(records.len(), 1);
}

#[test]
fn seed_does_not_matter_without_exploration() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.tb");
    let b = dir.path().join("b.tb");
    assert!(generate(&a, &["--epsilon-max", "0", "--seed", "1"]).status.success());
    assert!(generate(&b, &["--epsilon-max", "0", "--seed", "99"]).status.success());
    let trees = |p: &Path| read_treebank(&std::fs::read(p).unwrap()[..]).unwrap();
    assert_eq!(trees(&a), trees(&b));
}

#[test]
fn header_replay_reproduces_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.tb");
    let args = [
        "--seed",
        "31",
        "--epsilon-max",
        "0.9",
        "--temperature",
        "0.5",
        "--beam-size",
        "3",
        "--w-satellite",
        "0.25",
    ];
    assert!(generate(&first, &args).status.success());
    let replay = dir.path().join("replay.tb");
    assert!(generate(&replay, &["--config", first.to_str().unwrap()])
        .status
        .success());
    assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&replay).unwrap());

    let defaults = dir.path().join("defaults.tb");
    assert!(generate(&defaults, &[]).status.success());
    assert_ne!(std::fs::read(&first).unwrap(), std::fs::read(&defaults).unwrap());
}

#[test]
fn seed_comes_from_flag_then_config_then_environment() {
    let dir = tempfile::tempdir().unwrap();
    let input = data("demo_corpus.jsonl");
    let lexicon = data("demo_lexicon.tsv");
    let out = dir.path().join("env.tb");
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, "{\"seed\": 8}").unwrap();
    let seed_of = |extra: &[&str], env: &str| {
        let mut args = vec![
            "generate",
            "--input",
            input.to_str().unwrap(),
            "--lexicon",
            lexicon.to_str().unwrap(),
            "--output",
            out.to_str().unwrap(),
        ];
        args.extend_from_slice(extra);
        let o = Command::new(env!("CARGO_BIN_EXE_silva"))
            .args(&args)
            .env("SILVA_SEED", env)
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        read_header(&std::fs::read(&out).unwrap()[..]).unwrap().unwrap()["seed"]
            .as_u64()
            .unwrap()
    };
    assert_eq!(seed_of(&[], "5"), 5);
    assert_eq!(seed_of(&["--config", cfg.to_str().unwrap()], "5"), 8);
    assert_eq!(seed_of(&["--config", cfg.to_str().unwrap(), "--seed", "2"], "5"), 2);

    let o = Command::new(env!("CARGO_BIN_EXE_silva"))
        .args(["oracle-check", "--trials", "1"])
        .env("SILVA_SEED", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn evaluate_reproduces_metric_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n);
    write_tb(&p("right.tb"), &[("a", right_branching(4))]);
    write_tb(&p("left.tb"), &[("a", left_branching(4))]);
    let args = |pred: &Path, reference: &Path, extra: &[&str]| {
        let mut v = vec![
            "evaluate".to_string(),
            "--pred".into(),
            pred.display().to_string(),
            "--ref".into(),
            reference.display().to_string(),
        ];
        v.extend(extra.iter().map(|s| s.to_string()));
        v
    };
    let run = |v: Vec<String>| {
        let refs: Vec<&str> = v.iter().map(String::as_str).collect();
        silva(&refs)
    };

    let o = run(args(&p("right.tb"), &p("right.tb"), &["--mode", "nuclearity"]));
    assert!(o.status.success());
    assert_eq!(precision(&o), 100.0);

    let o = run(args(&p("right.tb"), &p("left.tb"), &[]));
    assert!((precision(&o) - 100.0 / 3.0).abs() < 0.01);
    assert!(stdout(&o).contains("structure"));

    // the root is the only shared span
    let o = run(args(&p("right.tb"), &p("left.tb"), &["--exclude-root"]));
    assert_eq!(precision(&o), 0.0);

    write_tb(
        &p("pred2.tb"),
        &[
            ("x", parse_tree("(NN (leaf 1) (NN (leaf 2) (leaf 3)))").unwrap()),
            ("y", right_branching(5)),
        ],
    );
    write_tb(
        &p("ref2.tb"),
        &[
            ("x", parse_tree("(NS (leaf 1) (SN (leaf 2) (leaf 3)))").unwrap()),
            ("y", left_branching(5)),
        ],
    );
    let o = run(args(&p("pred2.tb"), &p("ref2.tb"), &[]));
    assert_eq!(precision(&o), 50.0);
    let o = run(args(&p("pred2.tb"), &p("ref2.tb"), &["--mode", "nuclearity"]));
    assert!(precision(&o) <= 50.0);
}

#[test]
fn evaluate_rejects_mismatched_corpora() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.tb");
    let b = dir.path().join("b.tb");
    let c = dir.path().join("c.tb");
    write_tb(&a, &[("a", right_branching(4))]);
    write_tb(&b, &[("b", right_branching(4))]);
    write_tb(&c, &[("a", right_branching(5))]);
    for other in [&b, &c] {
        let o = silva(&[
            "evaluate",
            "--pred",
            a.to_str().unwrap(),
            "--ref",
            other.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(1));
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn oracle_check_passes_and_detects_faults() {
    let o = silva(&["oracle-check", "--trials", "200", "--max-edus", "6", "--seed", "3"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("200 passed, 0 failed"), "{}", stdout(&o));

    let o = silva(&["oracle-check", "--trials", "20", "--max-edus", "1"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("20 passed, 0 failed"));

    let o = silva(&["oracle-check", "--trials", "50", "--max-edus", "5", "--inject-fault"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!stdout(&o).contains(" 0 failed"), "{}", stdout(&o));

    assert_eq!(silva(&["oracle-check", "--max-edus", "9"]).status.code(), Some(2));
}

#[test]
fn bench_prints_csv() {
    let o = silva(&["bench", "--sizes", "72", "--reps", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,mean_ms,stddev");
    assert!(lines[1].starts_with("72,"));
    assert_eq!(lines.len(), 3);
    assert!(lines[2].starts_with("# log-log slope"));

    assert_eq!(silva(&["bench", "--reps", "0"]).status.code(), Some(2));
    assert_eq!(silva(&["bench", "--sizes", "0"]).status.code(), Some(2));
    assert_eq!(silva(&["bench", "--beam-size", "0"]).status.code(), Some(2));
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    assert_eq!(silva(&["plant"]).status.code(), Some(2));
    assert!(silva(&["--version"]).status.success());
}
