//! Positive correlation of two overlapping crossing events, and the product
//! rule for events in well-separated boxes.

use confetti::experiments::{fkg_check, fkg_independent};

fn main() -> confetti::Result<()> {
    let overlap = fkg_check(0.5, 12.0, 1000, 1.0 / 16.0, 1, None)?;
    println!(
        "overlapping: P(A∩B)={:.4}  P(A)P(B)={:.4}  excess={:+.4} ({:.1} sigma)",
        overlap.p_ab,
        overlap.product,
        overlap.excess(),
        overlap.excess() / overlap.sigma
    );
    let apart = fkg_independent(0.5, 6.0, 1000, 1.0 / 16.0, 1, None)?;
    println!(
        "separated:   P(A∩B)={:.4}  P(A)P(B)={:.4}  excess={:+.4} ({:.1} sigma)",
        apart.p_ab,
        apart.product,
        apart.excess(),
        apart.excess() / apart.sigma
    );
    Ok(())
}
