//! Space-time cube states of a torus process against their closed forms.

use confetti::geometry::WindowSpec;
use confetti::process::{discretize, mesh_params, omega_process, sample_process, state_probabilities, Horizon};

fn main() -> confetti::Result<()> {
    let p = 0.3;
    let mesh = mesh_params(8, 0.5)?;
    let lambda = 40.0;
    let proc = sample_process(WindowSpec::torus(20.0)?, p, Horizon::fixed(lambda), 1)?;
    let cfg = discretize(&proc, &mesh, lambda)?;
    let (white, neutral, black) = cfg.counts();
    let n = cfg.states.len() as f64;
    let law = state_probabilities(p, mesh.delta);
    println!("delta={} cubes={}", mesh.delta, cfg.states.len());
    println!("white   {:.6} vs {:.6}", white as f64 / n, law.white);
    println!("black   {:.6} vs {:.6}", black as f64 / n, law.black);
    println!("neutral {:.6} vs {:.6}", neutral as f64 / n, law.neutral);
    println!("omega process has {} leaves", omega_process(&cfg).len());
    Ok(())
}
