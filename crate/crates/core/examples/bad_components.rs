//! Components of the instability graph on a small torus.

use confetti::diagnostics::bad_components;
use confetti::geometry::WindowSpec;
use confetti::process::{sample_process, Horizon};

fn main() -> confetti::Result<()> {
    let proc = sample_process(WindowSpec::torus(20.0)?, 0.5, Horizon::fixed(1.0), 2)?;
    for delta0 in [0.02, 0.05, 0.125] {
        let rep = bad_components(&proc, delta0);
        let nontrivial = rep.components.iter().filter(|c| c.len() > 1).count();
        println!(
            "delta0={delta0}: {} leaves, {} pair edges, {} triples, {nontrivial} components of size > 1, largest {}",
            proc.len(),
            rep.pair_edges,
            rep.triple_edges,
            rep.max_size
        );
    }
    Ok(())
}
