//! On a covered field exactly one of a black left-right crossing and a white
//! top-bottom crossing occurs.

use confetti::coloring::rasterize;
use confetti::connectivity::crossing_report;
use confetti::geometry::{Rect, WindowSpec};
use confetti::process::{Horizon, Sampler};
use confetti::rng::TrialKey;

fn main() -> confetti::Result<()> {
    let window = WindowSpec::rectangle(Rect::sized(10.0, 10.0)?);
    let mut exactly_one = 0;
    let trials = 100;
    for t in 0..trials {
        let proc = Sampler::new(window, Horizon::adaptive(100.0), TrialKey::new(4, t)).sample(0.5)?;
        let rep = crossing_report(&rasterize(&proc, window.bounds(), 1.0 / 16.0)?);
        exactly_one += usize::from(rep.black_horizontal != rep.white_vertical);
        if t < 5 {
            println!(
                "trial {t}: black horizontal={} white vertical={} largest black cluster={} pixels",
                rep.black_horizontal, rep.white_vertical, rep.largest_black
            );
        }
    }
    println!("exactly one crossing in {exactly_one}/{trials} trials");
    Ok(())
}
