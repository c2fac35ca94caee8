//! The built-in cross-domain benchmark: Source-only / DAFD / Target-only on
//! the 20-subject rotated corpus, median F1 over training seeds.
//!
//! ```bash
//! cargo run -p dafd --example cross_domain_benchmark           # 3 seeds
//! cargo run -p dafd --example cross_domain_benchmark -- 5      # full 5 seeds
//! ```

use dafd::dann::TrainMode;
use dafd::eval::benchmark::run_benchmark;

fn main() -> dafd::Result<()> {
    let seeds: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(3);
    let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
    let modes = [TrainMode::SourceOnly, TrainMode::Dafd, TrainMode::TargetOnly];
    println!("running {seeds} seeds on {jobs} workers...");
    let start = std::time::Instant::now();
    let outcome = run_benchmark(&modes, seeds, 7, jobs)?;
    for (i, per_mode) in outcome.per_seed.iter().enumerate() {
        println!(
            "seed {i}: source_only {:.3}  dafd {:.3}  target_only {:.3}",
            per_mode["source_only"], per_mode["dafd"], per_mode["target_only"]
        );
    }
    println!(
        "medians: source_only {:.3}  dafd {:.3}  target_only {:.3}  ({:.0?})",
        outcome.median_f1["source_only"],
        outcome.median_f1["dafd"],
        outcome.median_f1["target_only"],
        start.elapsed()
    );
    Ok(())
}
