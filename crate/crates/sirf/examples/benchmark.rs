//! Run the simulation benchmark programmatically and print per-replicate
//! AUC-PR values. Equivalent to `sirf simulate` without the CSV outputs.
//!
//! Usage: `cargo run --release --example benchmark -- [model] [replicates] [seed]`

use std::time::Instant;

use sirf::simbench::{run_benchmark, BenchmarkParams, SimModel};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let model = SimModel::parse(args.get(1).map(String::as_str).unwrap_or("single-and"))
        .expect("model name");
    let replicates: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(3);
    let seed: u64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(1);

    let start = Instant::now();
    let params = BenchmarkParams::new(model, 1000, 50, replicates, seed);
    let result = run_benchmark(&params).expect("benchmark");
    println!(
        "model {} replicates {replicates} seed {seed}: {:?}",
        model.as_str(),
        start.elapsed()
    );
    for rep in &result.replicates {
        println!(
            "  replicate {}: unsigned {:.4} signed {:.4} filtered {:.4}",
            rep.replicate, rep.auc.unsigned, rep.auc.signed, rep.auc.filtered
        );
    }
    println!(
        "  mean: unsigned {:.4} signed {:.4} filtered {:.4}",
        result.mean.unsigned, result.mean.signed, result.mean.filtered
    );
}
