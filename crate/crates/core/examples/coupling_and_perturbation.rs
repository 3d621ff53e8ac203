//! Two ways of making one coloring blacker than another: raising `p` under the
//! natural coupling, and perturbing leaves (delay and shrink black, advance
//! and grow white).

use confetti::coloring::{black_dominates, rasterize};
use confetti::geometry::{Rect, WindowSpec};
use confetti::process::{natural_coupling, perturb, Horizon, Tolerance};

fn main() -> confetti::Result<()> {
    let window = WindowSpec::rectangle(Rect::sized(8.0, 8.0)?);
    let region = window.bounds();
    let (low, high) = natural_coupling(window, 0.4, 0.6, Horizon::adaptive(100.0), 8)?;
    let (fl, fh) = (rasterize(&low, region, 0.125)?, rasterize(&high, region, 0.125)?);
    println!("black pixels at p=0.4: {}, at p=0.6: {}", fl.count(1), fh.count(1));
    println!("p=0.6 dominates p=0.4: {}", black_dominates(&fh, &fl)?);

    let shifted = perturb(&low, &Tolerance::Uniform(0.1))?;
    let fs = rasterize(&shifted, region, 0.125)?;
    println!("after perturbation: {} black pixels", fs.count(1));
    println!("original dominates perturbed: {}", black_dominates(&fl, &fs)?);
    Ok(())
}
