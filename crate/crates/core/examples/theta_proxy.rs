//! Finite-box proxy for the percolation probability: does the origin's black
//! cluster reach the boundary of `Q_m(o)`?

use confetti::experiments::theta_profile;

fn main() -> confetti::Result<()> {
    let m = [4.0, 8.0, 16.0];
    for p in [0.4, 0.5, 0.6] {
        let prof = theta_profile(p, &m, 200, 1.0 / 8.0, 11, None)?;
        let f: Vec<String> = prof.estimates.iter().map(|e| format!("{:.3}", e.p_hat)).collect();
        println!("p={p}: m={m:?} -> {}  (nesting violations {})", f.join(" "), prof.violations);
    }
    Ok(())
}
