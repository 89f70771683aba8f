//! Wall-clock scaling of beam generation with document length.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cky::{beam_generate, GenerateError, GenerationConfig};
use crate::synth::synthetic_document;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub mean_ms: f64,
    /// Sample standard deviation over repetitions (0 for a single rep).
    pub stddev: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    /// Least-squares slope of `ln(mean_ms)` against `ln(n)`; needs two sizes.
    pub slope: Option<f64>,
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,mean_ms,stddev\n");
        for r in &self.rows {
            out.push_str(&format!("{},{:.3},{:.3}\n", r.n, r.mean_ms, r.stddev));
        }
        match self.slope {
            Some(s) => out.push_str(&format!("# log-log slope: {s:.3}\n")),
            None => out.push_str("# log-log slope: n/a\n"),
        }
        out
    }
}

/// Ordinary least-squares slope of `ln y` on `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

/// Times [`beam_generate`] on one synthetic document per size, `reps` times
/// each after an untimed warm-up run.
pub fn run_bench(sizes: &[usize], reps: usize, cfg: &GenerationConfig) -> Result<BenchReport, GenerateError> {
    assert!(reps >= 1, "need at least one repetition");
    let mut rows = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ n as u64);
        let doc = synthetic_document(format!("bench-{n}"), n, &mut rng);
        beam_generate(&doc, cfg)?;
        let mut times = Vec::with_capacity(reps);
        for _ in 0..reps {
            let start = Instant::now();
            let out = beam_generate(&doc, cfg)?;
            times.push(start.elapsed().as_secs_f64() * 1e3);
            std::hint::black_box(out);
        }
        let mean = times.iter().sum::<f64>() / reps as f64;
        let stddev = if reps > 1 {
            (times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (reps - 1) as f64).sqrt()
        } else {
            0.0
        };
        rows.push(BenchRow {
            n,
            mean_ms: mean,
            stddev,
        });
    }
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.mean_ms)).collect();
    Ok(BenchReport {
        slope: loglog_slope(&points),
        rows,
    })
}
