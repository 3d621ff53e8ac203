//! Crossing of long `3s × s` rectangles at `p = 1/2`, plus the nested check
//! that longer rectangles are never crossed more often on the same field.
//!
//! cargo run --release --example rsw_floor -- [trials]

use confetti::experiments::{rsw_check, rsw_nested};

fn main() -> confetti::Result<()> {
    let trials = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(300);
    let report = rsw_check(3.0, &[8.0, 16.0, 32.0], trials, 1.0 / 16.0, 5, None)?;
    for e in &report.estimates {
        println!("rho=3 s={:>2}  f={:.4}  [{:.4}, {:.4}]", e.params["s"], e.p_hat, e.ci_low, e.ci_high);
    }
    println!("flagged: {}", report.flagged);

    let nested = rsw_nested(0.5, &[1.0, 1.5, 2.0, 3.0], 8.0, trials, 1.0 / 16.0, 5, None)?;
    for (rho, e) in nested.rho_values.iter().zip(&nested.estimates) {
        println!("s=8 rho={rho:<3}  f={:.4}", e.p_hat);
    }
    println!("nesting violations: {}", nested.violations);
    Ok(())
}
