//! Square crossing probability as a function of `p` for two box sizes. The
//! curves cross 1/2 near `p = 1/2` and steepen as `s` grows.

use confetti::experiments::critical_scan;

fn main() -> confetti::Result<()> {
    let p: Vec<f64> = (0..=10).map(|k| 0.3 + 0.04 * k as f64).collect();
    let sweep = critical_scan(&p, &[8.0, 16.0], 200, 1.0 / 16.0, 3, None)?;
    print!("{}", sweep.to_csv());
    for (s, c) in sweep.s_values.iter().zip(&sweep.crossing_points) {
        println!("s={s}: f = 1/2 at p ≈ {}", c.map_or("-".into(), |v| format!("{v:.3}")));
    }
    Ok(())
}
