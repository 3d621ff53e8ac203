//! Rasterizes a covered square and writes a pixmap, an SVG of the leaves and
//! a text matrix into a temporary directory.

use std::fs::File;

use confetti::coloring::{coverage_of, rasterize, rasterize_by_query, write_matrix, write_ppm, write_svg};
use confetti::geometry::{Rect, WindowSpec};
use confetti::process::{Horizon, Sampler};
use confetti::rng::TrialKey;

fn main() -> confetti::Result<()> {
    let window = WindowSpec::rectangle(Rect::sized(8.0, 8.0)?);
    let proc = Sampler::new(window, Horizon::adaptive(100.0), TrialKey::new(1, 0)).sample(0.5)?;
    let field = rasterize(&proc, window.bounds(), 1.0 / 16.0)?;
    let cov = coverage_of(&field);
    println!("{} leaves, {}x{} pixels, covered={}", proc.len(), field.nx, field.ny, cov.covered);
    println!("black fraction {:.3}", field.count(1) as f64 / field.values.len() as f64);

    // Painter and per-pixel queries agree exactly.
    assert_eq!(rasterize_by_query(&proc, window.bounds(), 1.0 / 16.0)?.values, field.values);

    let dir = std::env::temp_dir().join("confetti-render");
    std::fs::create_dir_all(&dir)?;
    write_ppm(&field, File::create(dir.join("field.ppm"))?)?;
    write_svg(&proc, File::create(dir.join("leaves.svg"))?)?;
    write_matrix(&rasterize(&proc, window.bounds(), 0.5)?, File::create(dir.join("coarse.txt"))?)?;
    println!("wrote field.ppm, leaves.svg, coarse.txt to {}", dir.display());
    Ok(())
}
