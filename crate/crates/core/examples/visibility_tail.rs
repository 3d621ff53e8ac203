//! Tail of the number of leaves boundary-visible through one corner and edge
//! of a probe leaf, against `9^n λ^n / (n!)^2`.

use confetti::diagnostics::boundary_visible_tail;

fn main() -> confetti::Result<()> {
    let rep = boundary_visible_tail(1.0, 20_000, 5, 9, None)?;
    print!("{}", rep.to_csv());
    Ok(())
}
