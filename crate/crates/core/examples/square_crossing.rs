//! Left-right black crossing frequency of an `s × s` square at `p = 1/2`.
//!
//! cargo run --release --example square_crossing -- [s] [trials]

use confetti::experiments::{estimate_crossing, CrossingParams};

fn main() -> confetti::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let s = args.first().copied().unwrap_or(16.0);
    let trials = args.get(1).copied().unwrap_or(200.0) as u64;
    let est = estimate_crossing(&CrossingParams::new(0.5, 1.0, s, trials, 7), None)?;
    println!(
        "s={s} trials={} p_hat={:.4} ci=[{:.4}, {:.4}] uncovered={}",
        est.trials, est.p_hat, est.ci_low, est.ci_high, est.uncovered
    );
    Ok(())
}
