//! Mean number of unstable pairs against the first-moment formula.

use confetti::diagnostics::{pair_count_stats, PairCountStats};

fn main() -> confetti::Result<()> {
    println!("{}", PairCountStats::CSV_HEADER);
    for delta0 in [0.02, 0.05, 0.1] {
        let st = pair_count_stats(4.0, 2.0, delta0, 2000, 9, None)?;
        println!("{}", st.csv_row());
    }
    Ok(())
}
