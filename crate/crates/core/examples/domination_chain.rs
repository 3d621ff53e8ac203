//! Checks `ψ_φ ≥ ψ_ω ≥ ψ_{φ^{2δ}}` on covered torus configurations.
//!
//! cargo run --release --example domination_chain -- [s] [configs] [points]

use confetti::experiments::domination_check;

fn main() -> confetti::Result<()> {
    let args: Vec<u64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let s = args.first().copied().unwrap_or(8);
    let configs = args.get(1).copied().unwrap_or(2);
    let points = args.get(2).copied().unwrap_or(10_000);
    let report = domination_check(s, 0.5, 0.5, configs, points, 1, None)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    println!("{}", if report.passed() { "chain holds" } else { "chain violated" });
    Ok(())
}
