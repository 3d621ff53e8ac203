//! Coverage of the torus of period `10 s` by unit leaves arriving before
//! `λ = 50⌊ln s⌋`, at pixel resolution 1/16.
//!
//! cargo run --release --example torus_coverage -- [s] [seeds]

use confetti::coloring::coverage;
use confetti::geometry::WindowSpec;
use confetti::process::{economical_horizon, EconomicalVariant, Horizon, SampleStatus, Sampler};
use confetti::rng::TrialKey;

fn main() -> confetti::Result<()> {
    let args: Vec<u64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let s = args.first().copied().unwrap_or(16);
    let seeds = args.get(1).copied().unwrap_or(5);
    let lambda = economical_horizon(s as f64, EconomicalVariant::Torus)?;
    let window = WindowSpec::torus(10.0 * s as f64)?;
    let h = 1.0 / 16.0;

    // Adaptive sampling stops at the first time the pixel grid is covered, so
    // a complete status before the cap is the same event as coverage at λ.
    let mut covered = 0;
    for seed in 0..seeds {
        let sample = Sampler::new(window, Horizon::Adaptive { cap: lambda, resolution: h }, TrialKey::new(seed, 0))
            .sample_sites()?;
        let ok = sample.status == SampleStatus::Complete;
        covered += usize::from(ok);
        println!("seed {seed}: covered={ok} at t={:.0}, {} leaves", sample.horizon_reached, sample.sites.len());
    }
    println!("{covered}/{seeds} covered by λ={lambda}");

    let full = Sampler::new(window, Horizon::fixed(lambda), TrialKey::new(0, 0)).sample(0.5)?;
    let report = coverage(&full, window.bounds(), h)?;
    println!("full process, seed 0: {} leaves, covered={}", full.len(), report.covered);
    Ok(())
}
