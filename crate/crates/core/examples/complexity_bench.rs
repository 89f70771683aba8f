//! Times generation across document lengths and fits the scaling exponent.
//!
//! cargo run --release --example complexity_bench -- [sizes] [reps]

use silva::bench::run_bench;
use silva::cky::GenerationConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let sizes: Vec<usize> = match args.next() {
        Some(list) => list.split(',').map(str::parse).collect::<Result<_, _>>()?,
        None => vec![10, 20, 40, 80],
    };
    let reps: usize = args.next().map(|r| r.parse()).transpose()?.unwrap_or(3);

    for (label, epsilon_max) in [("greedy", 0.0), ("exploring", 0.5)] {
        let cfg = GenerationConfig {
            epsilon_max,
            ..GenerationConfig::default()
        };
        let report = run_bench(&sizes, reps, &cfg)?;
        println!("{label} (epsilon_max {epsilon_max})");
        print!("{}", report.to_csv());
        println!();
    }
    Ok(())
}
