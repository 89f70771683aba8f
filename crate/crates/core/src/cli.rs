//! `silva` command line: generate, evaluate, oracle-check and bench.
//!
//! Exit codes: 0 success, 1 I/O or data errors, 2 usage errors.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::aggregation::DistanceKind;
use crate::bench::run_bench;
use crate::cky::{build_chart, doc_rng, exhaustive_best, generate_corpus, GenerationConfig, RankOrder};
use crate::eval::{micro_precision, EvalMode, EvalOptions, NuclearityConvention};
use crate::ingest::{normalize_document, read_records, SentimentLexicon};
use crate::synth::synthetic_document;
use crate::treebank::{read_treebank, write_header, write_treebank, TreebankRecord};

/// Environment variable overriding the default seed.
pub const SEED_ENV: &str = "SILVA_SEED";

const EXIT_OK: i32 = 0;
const EXIT_FAILURE: i32 = 1;
const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "silva",
    version,
    about = "Silver-standard discourse trees from document sentiment"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a treebank from newline-delimited document records.
    Generate(GenerateArgs),
    /// Micro precision of a predicted treebank against a reference.
    Evaluate(EvaluateArgs),
    /// Check full-width beam search against exhaustive enumeration.
    OracleCheck(OracleArgs),
    /// Time generation across document lengths and fit the scaling exponent.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// Input records, one JSON object per line.
    #[arg(long)]
    input: PathBuf,
    /// Output treebank.
    #[arg(long)]
    output: PathBuf,
    /// JSON config, or a treebank whose metadata line should be replayed.
    /// Explicit flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Trees kept per chart cell [default: 10].
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    beam_size: Option<u64>,
    /// Exploration probability of the lowest cells [default: 0.5].
    #[arg(long)]
    epsilon_max: Option<f64>,
    /// Softmax temperature for exploration [default: 0.1].
    #[arg(long)]
    temperature: Option<f64>,
    /// Run seed [default: $SILVA_SEED or 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Nucleus weight [default: 1.0].
    #[arg(long)]
    w_nucleus: Option<f64>,
    /// Satellite weight [default: 0.5].
    #[arg(long)]
    w_satellite: Option<f64>,
    /// Distance between gold and root sentiment [default: absolute].
    #[arg(long)]
    distance: Option<DistanceKind>,
    /// Token polarities used for EDUs without scores.
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Worker threads [default: available parallelism].
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: Option<u64>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(long)]
    pred: PathBuf,
    #[arg(long = "ref")]
    reference: PathBuf,
    #[arg(long, value_enum, default_value = "structure")]
    mode: EvalMode,
    /// Do not count the root span as a constituent.
    #[arg(long)]
    exclude_root: bool,
    /// Where nuclearity is read from in nuclearity mode.
    #[arg(long, value_enum, default_value = "parent")]
    nuclearity_convention: NuclearityConvention,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Largest document length; exhaustive enumeration caps this at 8.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..=8))]
    max_edus: u64,
    /// [default: $SILVA_SEED or 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Rank beams by descending distance (negative control).
    #[arg(long, hide = true)]
    inject_fault: bool,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "20,40,80,160")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
    reps: u64,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    beam_size: u64,
    /// [default: $SILVA_SEED or 0]
    #[arg(long)]
    seed: Option<u64>,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Runtime(_) => EXIT_FAILURE,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Runtime(m) => m,
        }
    }
}

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Runtime(format!("{}: {e}", path.display()))
}

/// Runs the CLI against the process's stdout and stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(a, out, err),
        Command::Evaluate(a) => cmd_evaluate(a, out),
        Command::OracleCheck(a) => cmd_oracle_check(a, out, err),
        Command::Bench(a) => cmd_bench(a, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.code()
        }
    }
}

fn env_seed() -> Result<Option<u64>, Failure> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure::Usage(format!("{SEED_ENV}='{v}' is not an unsigned integer"))),
        Err(_) => Ok(None),
    }
}

/// Config fields that may come from a file; anything else in it is ignored.
#[derive(Debug, Default, Deserialize)]
struct ConfigOverlay {
    beam_size: Option<usize>,
    epsilon_max: Option<f64>,
    temperature: Option<f64>,
    seed: Option<u64>,
    w_nucleus: Option<f64>,
    w_satellite: Option<f64>,
    distance: Option<DistanceKind>,
    input_sha256: Option<String>,
}

fn read_overlay(path: &Path) -> Result<ConfigOverlay, Failure> {
    let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    let json = match first.strip_prefix('#') {
        Some(header) => header.trim().to_string(),
        None => text,
    };
    serde_json::from_str(&json).map_err(|e| Failure::Usage(format!("{}: invalid config: {e}", path.display())))
}

fn resolve_config(a: &GenerateArgs) -> Result<(GenerationConfig, Option<String>), Failure> {
    let mut cfg = GenerationConfig::default();
    if let Some(seed) = env_seed()? {
        cfg.seed = seed;
    }
    let overlay = match &a.config {
        Some(path) => read_overlay(path)?,
        None => ConfigOverlay::default(),
    };
    let pick = |flag: Option<f64>, file: Option<f64>, current: f64| flag.or(file).unwrap_or(current);
    cfg.beam_size = a
        .beam_size
        .map(|b| b as usize)
        .or(overlay.beam_size)
        .unwrap_or(cfg.beam_size);
    cfg.epsilon_max = pick(a.epsilon_max, overlay.epsilon_max, cfg.epsilon_max);
    cfg.temperature = pick(a.temperature, overlay.temperature, cfg.temperature);
    cfg.seed = a.seed.or(overlay.seed).unwrap_or(cfg.seed);
    cfg.aggregation.w_nucleus = pick(a.w_nucleus, overlay.w_nucleus, cfg.aggregation.w_nucleus);
    cfg.aggregation.w_satellite = pick(a.w_satellite, overlay.w_satellite, cfg.aggregation.w_satellite);
    cfg.distance_kind = a.distance.or(overlay.distance).unwrap_or(cfg.distance_kind);
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok((cfg, overlay.input_sha256))
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn cmd_generate(a: GenerateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let (cfg, expected_input) = resolve_config(&a)?;
    let jobs = a
        .jobs
        .map(|j| j as usize)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));

    let input = fs::read(&a.input).map_err(|e| io_failure(&a.input, e))?;
    let input_sha = sha256_hex(&input);
    if let Some(expected) = expected_input.filter(|h| *h != input_sha) {
        let _ = writeln!(
            err,
            "warning: input digest {input_sha} differs from configured {expected}"
        );
    }
    let (lexicon, lexicon_sha) = match &a.lexicon {
        Some(path) => {
            let bytes = fs::read(path).map_err(|e| io_failure(path, e))?;
            let lex = SentimentLexicon::read(&bytes[..]).map_err(|e| io_failure(path, e))?;
            (Some(lex), Some(sha256_hex(&bytes)))
        }
        None => (None, None),
    };

    let mut failures = 0usize;
    let mut docs = Vec::new();
    for line in read_records(&input[..]).map_err(|e| io_failure(&a.input, e))? {
        match line.record {
            Err(e) => {
                failures += 1;
                let _ = writeln!(err, "{}:{}: {e}", a.input.display(), line.line);
            }
            Ok(rec) => match normalize_document(&rec, lexicon.as_ref()) {
                Ok(doc) => docs.push(doc),
                Err(e) => {
                    failures += 1;
                    let _ = writeln!(
                        err,
                        "{}:{}: document '{}': {e}",
                        a.input.display(),
                        line.line,
                        rec.doc_id
                    );
                }
            },
        }
    }

    let results = generate_corpus(&docs, &cfg, jobs);
    let mut records = Vec::with_capacity(results.len());
    for (doc, res) in docs.iter().zip(results) {
        match res.outcome {
            Ok(tree) => records.push(TreebankRecord::from_result(doc, &tree)),
            Err(e) => {
                failures += 1;
                let _ = writeln!(err, "document '{}': {e}", res.doc_id);
            }
        }
    }

    let mut meta = serde_json::to_value(cfg).expect("config serializes");
    let extra = serde_json::json!({
        "tool": "silva",
        "version": env!("CARGO_PKG_VERSION"),
        "input_sha256": input_sha,
        "lexicon_sha256": lexicon_sha,
    });
    if let (Some(m), serde_json::Value::Object(e)) = (meta.as_object_mut(), extra) {
        m.extend(e);
    }
    let file = File::create(&a.output).map_err(|e| io_failure(&a.output, e))?;
    let mut w = BufWriter::new(file);
    write_header(&mut w, &meta).map_err(|e| io_failure(&a.output, e))?;
    write_treebank(&mut w, &records).map_err(|e| io_failure(&a.output, e))?;
    w.flush().map_err(|e| io_failure(&a.output, e))?;

    let _ = writeln!(
        out,
        "wrote {} trees to {} ({} failed)",
        records.len(),
        a.output.display(),
        failures
    );
    Ok(if failures == 0 { EXIT_OK } else { EXIT_FAILURE })
}

fn load_treebank(path: &Path) -> Result<Vec<TreebankRecord>, Failure> {
    let file = File::open(path).map_err(|e| io_failure(path, e))?;
    read_treebank(BufReader::new(file)).map_err(|e| io_failure(path, e))
}

fn cmd_evaluate(a: EvaluateArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let pred = load_treebank(&a.pred)?;
    let reference = load_treebank(&a.reference)?;
    let opts = EvalOptions {
        mode: a.mode,
        exclude_root: a.exclude_root,
        convention: a.nuclearity_convention,
    };
    let report = micro_precision(&pred, &reference, &opts).map_err(|e| Failure::Runtime(e.to_string()))?;
    let json = serde_json::to_string(&report).expect("report serializes");
    let _ = writeln!(out, "{json}");
    let _ = write!(out, "{}", report.to_table());
    Ok(EXIT_OK)
}

fn cmd_oracle_check(a: OracleArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let seed = match a.seed {
        Some(s) => s,
        None => env_seed()?.unwrap_or(0),
    };
    let max_edus = a.max_edus as usize;
    let order = if a.inject_fault {
        RankOrder::Reversed
    } else {
        RankOrder::Standard
    };
    let base = GenerationConfig {
        seed,
        ..GenerationConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut passed, mut failed) = (0usize, 0usize);
    for trial in 0..a.trials {
        let n = rng.gen_range(max_edus.min(2)..=max_edus);
        let doc = synthetic_document(format!("oracle-{trial}"), n, &mut rng);
        let cfg = GenerationConfig::full_width(n, &base).map_err(|e| Failure::Usage(e.to_string()))?;
        let beam = build_chart(&doc, &cfg, &mut doc_rng(seed, &doc.doc_id), order)
            .map(|c| c.root())
            .map_err(|e| Failure::Runtime(e.to_string()))?;
        let exact = exhaustive_best(&doc, &cfg).map_err(|e| Failure::Runtime(e.to_string()))?;
        if beam.distance == exact.distance {
            passed += 1;
        } else {
            failed += 1;
            if failed <= 5 {
                let _ = writeln!(
                    err,
                    "trial {trial} (n={n}): beam distance {} != exhaustive {}",
                    beam.distance, exact.distance
                );
            }
        }
    }
    let _ = writeln!(
        out,
        "oracle-check: {passed} passed, {failed} failed of {} trials",
        a.trials
    );
    Ok(if failed == 0 { EXIT_OK } else { EXIT_FAILURE })
}

fn cmd_bench(a: BenchArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    if a.sizes.is_empty() || a.sizes.contains(&0) {
        return Err(Failure::Usage("--sizes needs positive document lengths".into()));
    }
    let seed = match a.seed {
        Some(s) => s,
        None => env_seed()?.unwrap_or(0),
    };
    let cfg = GenerationConfig {
        beam_size: a.beam_size as usize,
        seed,
        ..GenerationConfig::default()
    };
    let report = run_bench(&a.sizes, a.reps as usize, &cfg).map_err(|e| Failure::Runtime(e.to_string()))?;
    let _ = write!(out, "{}", report.to_csv());
    Ok(EXIT_OK)
}
