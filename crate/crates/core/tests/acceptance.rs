//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Runs with `harness = false` so the report is always printed.

use std::collections::{BTreeSet, VecDeque};
use std::time::Instant;

use confetti::coloring::{color_at, coverage, height_at, rasterize, ColorField};
use confetti::connectivity::{crossing_report, label_components, Adjacency, UnionFind};
use confetti::diagnostics::{
    bad_components, boundary_visible_tail, chain_bound, pair_count_stats, unstable_pair, unstable_triple,
};
use confetti::experiments::{
    critical_scan, crossing_outcomes, domination_check, estimate_crossing, fkg_check, rsw_check, CrossingParams,
    TrialField, DEFAULT_CAP,
};
use confetti::geometry::{Point2, Rect, WindowSpec};
use confetti::process::{
    discretize, mesh_params, sample_process, state_probabilities, Color, Horizon, Leaf, LeafProcess, SampleStatus,
    Sampler,
};
use confetti::rng::TrialKey;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const H: f64 = 1.0 / 16.0;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn c1_critical_square() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for s in [8.0, 16.0, 32.0] {
        let e = estimate_crossing(&CrossingParams::new(0.5, 1.0, s, 1000, 101), None).unwrap();
        pass &= (0.45..=0.55).contains(&e.p_hat) && e.uncovered == 0;
        parts.push(format!("s={s}: {:.3}", e.p_hat));
    }
    outcome(pass, format!("{} (want [0.45, 0.55])", parts.join(", ")))
}

fn c2_duality() -> Outcome {
    let (s, p_list) = (16.0, [0.4, 0.5, 0.6]);
    let region = Rect::sized(s, s).unwrap();
    let (mut covered, mut t) = (0u64, 0u64);
    let mut exactly_one = [0u64; 3];
    while covered < 1000 {
        let field = TrialField::sample(region, H, DEFAULT_CAP, TrialKey::new(202, t)).unwrap();
        t += 1;
        if !field.covered() {
            continue;
        }
        covered += 1;
        for (k, &p) in p_list.iter().enumerate() {
            let r = crossing_report(&field.colored(p));
            exactly_one[k] += u64::from(r.black_horizontal != r.white_vertical);
        }
    }
    let rates: Vec<f64> = exactly_one.iter().map(|&c| c as f64 / covered as f64).collect();
    outcome(
        rates.iter().all(|&r| r >= 0.995),
        format!("exactly-one rate at p=0.4/0.5/0.6: {rates:?} over {covered} covered trials (want >= 0.995)"),
    )
}

fn c3_critical_point() -> Outcome {
    let p: Vec<f64> = (0..=10).map(|k| (40 + 2 * k) as f64 / 100.0).collect();
    let sweep = critical_scan(&p, &[32.0], 2000, H, 303, None).unwrap();
    let c = sweep.crossing_points[0];
    outcome(
        c.is_some_and(|c| (0.47..=0.53).contains(&c)),
        format!("crossing point at s=32: {c:?} (want [0.47, 0.53])"),
    )
}

/// Per-trial difference of the crossing indicator between p = 0.55 and 0.45.
fn steepness(s: f64, trials: u64) -> (f64, f64) {
    let out = crossing_outcomes(&[0.45, 0.55], 1.0, s, trials, H, DEFAULT_CAP, 404, None).unwrap();
    let d: Vec<f64> = out.outcomes.iter().map(|o| f64::from(u8::from(o[1])) - f64::from(u8::from(o[0]))).collect();
    let n = d.len() as f64;
    let mean = d.iter().sum::<f64>() / n;
    let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var / n)
}

fn c4_sharp_threshold() -> Outcome {
    let (d16, v16) = steepness(16.0, 1000);
    let (d64, v64) = steepness(64.0, 1000);
    let sigma = (v16 + v64).sqrt();
    let z = (d64 - d16) / sigma;
    outcome(
        z >= 3.0,
        format!("steepness s=16: {d16:.3}, s=64: {d64:.3}, gap {:.3} = {z:.1} joint sigma (want >= 3)", d64 - d16),
    )
}

fn c5_rsw_floor() -> Outcome {
    let rep = rsw_check(3.0, &[8.0, 16.0, 32.0], 4000, H, 505, None).unwrap();
    let f: Vec<String> = rep.estimates.iter().map(|e| format!("{:.4}", e.p_hat)).collect();
    outcome(
        rep.estimates.iter().all(|e| e.p_hat >= 0.05),
        format!("f(3, s) for s=8,16,32: {} (want >= 0.05)", f.join(", ")),
    )
}

fn c6_fkg() -> Outcome {
    let r = fkg_check(0.5, 16.0, 5000, H, 606, None).unwrap();
    outcome(
        r.holds(3.0),
        format!(
            "P(A∩B)={:.4}, P(A)P(B)={:.4}, sigma={:.4} (want P(A∩B) >= P(A)P(B) - 3 sigma)",
            r.p_ab, r.product, r.sigma
        ),
    )
}

fn c7_discretization() -> Outcome {
    let p = 0.3;
    let mesh = mesh_params(8, 0.5).unwrap();
    assert_eq!(mesh.delta, 0.25);
    let (period, lambda) = (20.0, 40.0);
    let proc = sample_process(WindowSpec::torus(period).unwrap(), p, Horizon::fixed(lambda), 707).unwrap();
    let cfg = discretize(&proc, &mesh, lambda).unwrap();
    let n = cfg.states.len() as f64;
    let (white, neutral, black) = cfg.counts();
    let law = state_probabilities(p, mesh.delta);
    let sum_err = (law.white + law.black + law.neutral - 1.0).abs();
    let z = |count: usize, q: f64| (count as f64 / n - q).abs() / (q * (1.0 - q) / n).sqrt();
    let zs = [z(white, law.white), z(black, law.black), z(neutral, law.neutral)];
    outcome(
        n >= 1e6 && zs.iter().all(|&z| z <= 4.0) && sum_err <= 1e-12,
        format!(
            "{} cubes, |z| white/black/neutral = {:.2}/{:.2}/{:.2} (want <= 4), sum error {sum_err:.1e}",
            cfg.states.len(),
            zs[0],
            zs[1],
            zs[2]
        ),
    )
}

fn c8_tail_bound() -> Outcome {
    let rep = boundary_visible_tail(1.0, 100_000, 808, 8, None).unwrap();
    let (b7, b8) = (chain_bound(7, 1.0), chain_bound(8, 1.0));
    let ok7 = rep.empirical_tail[6] <= b7 + 3.0 * rep.sigma(6);
    let ok8 = rep.empirical_tail[7] <= b8 + 3.0 * rep.sigma(7);
    outcome(
        ok7 && ok8 && (b7 - 0.188).abs() < 5e-4 && (b8 - 0.0265).abs() < 5e-5,
        format!(
            "P(N'>=7)={:.5} vs {b7:.5}, P(N'>=8)={:.5} vs {b8:.5} (+3 sigma)",
            rep.empirical_tail[6], rep.empirical_tail[7]
        ),
    )
}

fn c9_pair_moment() -> Outcome {
    let st = pair_count_stats(4.0, 2.0, 0.05, 10_000, 909, None).unwrap();
    let z = (st.empirical_mean - st.analytic) / st.std_error;
    outcome(
        z.abs() <= 3.0,
        format!("mean {:.3} ± {:.3} vs oracle {:.3}, z={z:.2} (want |z| <= 3)", st.empirical_mean, st.std_error, st.analytic),
    )
}

fn c10_domination() -> Outcome {
    let r = domination_check(8, 0.5, 0.5, 50, 10_000, 1010, None).unwrap();
    outcome(
        r.configs_checked == 50 && r.points_checked + r.points_skipped == 500_000 && r.passed(),
        format!(
            "{} covered configs ({} skipped), {} points checked, {} skipped, violations {}/{}",
            r.configs_checked,
            r.skipped_uncovered,
            r.points_checked,
            r.points_skipped,
            r.violations_upper,
            r.violations_lower
        ),
    )
}

fn c11_coverage() -> Outcome {
    let window = WindowSpec::torus(160.0).unwrap();
    let lambda = 100.0;
    let mut covered = 0;
    let mut latest: f64 = 0.0;
    for seed in 0..100 {
        let horizon = Horizon::Adaptive { cap: lambda, resolution: H };
        let sample = Sampler::new(window, horizon, TrialKey::new(1111, seed)).sample_sites().unwrap();
        covered += usize::from(sample.status == SampleStatus::Complete);
        latest = latest.max(sample.horizon_reached);
    }
    // The full fixed-horizon process agrees on a few seeds.
    let full_ok = (0..2).all(|seed| {
        let proc = Sampler::new(window, Horizon::fixed(lambda), TrialKey::new(1111, seed)).sample(0.5).unwrap();
        coverage(&proc, window.bounds(), H).unwrap().covered
    });
    outcome(
        covered == 100 && full_ok,
        format!("{covered}/100 tori covered, latest cover batch ends at t={latest}, full-process check {full_ok}"),
    )
}

fn random_config(rng: &mut ChaCha8Rng, k: usize) -> (LeafProcess, Rect) {
    let window = if k % 2 == 0 {
        WindowSpec::rectangle(Rect::sized(5.0, 4.0).unwrap())
    } else {
        WindowSpec::torus(4.5).unwrap()
    };
    let n = rng.random_range(5..60);
    let b = window.bounds().expand(if window.is_torus() { 0.0 } else { 0.5 });
    let leaves = (0..n)
        .map(|i| {
            let c = Point2::new(b.x0 + b.width() * rng.random::<f64>(), b.y0 + b.height() * rng.random::<f64>());
            // A few repeated times exercise the tie rule.
            let t = if i % 7 == 3 { 0.25 } else { rng.random::<f64>() };
            let color = if rng.random::<bool>() { Color::Black } else { Color::White };
            Leaf::new(i as u32, window.wrap(c), t, color).with_half_side(rng.random_range(0.2..0.8))
        })
        .collect();
    (LeafProcess::from_leaves(window, leaves), window.bounds())
}

fn flood_fill_partition(field: &ColorField, color: i8, adj: Adjacency) -> Vec<usize> {
    let (nx, ny) = (field.nx as i64, field.ny as i64);
    let mut label = vec![usize::MAX; field.values.len()];
    let mut next = 0;
    let steps: &[(i64, i64)] = match adj {
        Adjacency::Four => &[(1, 0), (-1, 0), (0, 1), (0, -1)],
        Adjacency::Eight => &[(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)],
    };
    for start in 0..field.values.len() {
        if field.values[start] != color || label[start] != usize::MAX {
            continue;
        }
        label[start] = next;
        let mut q = VecDeque::from([start]);
        while let Some(k) = q.pop_front() {
            let (i, j) = ((k as i64) % nx, (k as i64) / nx);
            for (di, dj) in steps {
                let (a, b) = (i + di, j + dj);
                if a < 0 || b < 0 || a >= nx || b >= ny {
                    continue;
                }
                let m = (b * nx + a) as usize;
                if field.values[m] == color && label[m] == usize::MAX {
                    label[m] = next;
                    q.push_back(m);
                }
            }
        }
        next += 1;
    }
    label
}

fn same_partition(a: &[usize], b: &[usize]) -> bool {
    let mut fwd = std::collections::HashMap::new();
    let mut back = std::collections::HashMap::new();
    a.iter().zip(b).all(|(&x, &y)| *fwd.entry(x).or_insert(y) == y && *back.entry(y).or_insert(x) == x)
}

fn brute_bad_partition(proc: &LeafProcess, delta0: f64) -> BTreeSet<BTreeSet<u32>> {
    let l = &proc.leaves;
    let n = l.len();
    let mut uf = UnionFind::new(n);
    let unstable = |a: &Leaf, b: &Leaf| unstable_pair(a.into(), b.into(), delta0, &proc.window);
    for x in 0..n {
        for x1 in 0..n {
            if x1 == x || !unstable(&l[x], &l[x1]) {
                continue;
            }
            uf.union(x, x1);
            for x2 in 0..n {
                if unstable_triple(proc, &l[x], &l[x1], &l[x2], delta0) {
                    uf.union(x, x2);
                    uf.union(x1, x2);
                }
            }
        }
    }
    uf.blocks().into_iter().map(|b| b.into_iter().map(|k| l[k].id).collect()).collect()
}

fn c12_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1212);
    let mut pixel_mismatch = 0;
    for k in 0..20 {
        let (proc, region) = random_config(&mut rng, k);
        let field = rasterize(&proc, region, 0.05).unwrap();
        let heights = field.heights.as_ref().unwrap();
        for j in 0..field.ny {
            for i in 0..field.nx {
                let u = field.pixel_center(i, j);
                pixel_mismatch += usize::from(field.get(i, j) != color_at(&proc, u));
                pixel_mismatch += usize::from(heights[j * field.nx + i] != height_at(&proc, u));
            }
        }
    }

    let mut label_mismatch = 0;
    for k in 0..1000 {
        let (nx, ny) = (rng.random_range(1..30), rng.random_range(1..30));
        let density = rng.random::<f64>();
        let mut field = rasterize(
            &LeafProcess::from_leaves(WindowSpec::rectangle(Rect::sized(nx as f64, ny as f64).unwrap()), vec![]),
            Rect::sized(nx as f64, ny as f64).unwrap(),
            1.0,
        )
        .unwrap();
        field.values = (0..nx * ny)
            .map(|_| {
                let u = rng.random::<f64>();
                if k % 3 == 0 && u < 0.05 {
                    0
                } else if u < density {
                    1
                } else {
                    -1
                }
            })
            .collect();
        for (color, adj) in [(1, Adjacency::Four), (-1, Adjacency::Eight), (1, Adjacency::Eight)] {
            let labels = label_components(&field, color, adj);
            let ours: Vec<usize> = labels.labels.iter().map(|&l| l as usize).collect();
            let reference = flood_fill_partition(&field, color, adj);
            let ours_masked: Vec<usize> =
                ours.iter().zip(&reference).map(|(&o, &r)| if r == usize::MAX { usize::MAX } else { o }).collect();
            label_mismatch += usize::from(!same_partition(&ours_masked, &reference));
        }
    }

    let mut configs = Vec::new();
    for k in 0..8u64 {
        let (period, horizon) = [(6.0, 1.5), (8.0, 2.5), (5.0, 2.0), (7.0, 2.5)][(k % 4) as usize];
        let proc = sample_process(WindowSpec::torus(period).unwrap(), 0.5, Horizon::fixed(horizon), k).unwrap();
        configs.push(proc);
    }
    configs.push(LeafProcess::from_leaves(
        WindowSpec::rectangle(Rect::new(-3.0, 3.0, -3.0, 3.0).unwrap()),
        vec![
            Leaf::new(0, Point2::new(0.5, -0.5), 0.4, Color::Black),
            Leaf::new(1, Point2::new(-0.25, 0.0), 0.3, Color::White),
            Leaf::new(2, Point2::new(0.0, 0.25), 0.2, Color::White),
            Leaf::new(3, Point2::new(0.25, -0.25), 0.1, Color::White),
            Leaf::new(4, Point2::new(2.5, -0.5), 1.9, Color::White),
        ],
    ));
    let mut bad_mismatch = 0;
    let mut largest = 0;
    for proc in &configs {
        assert!(proc.len() <= 200);
        largest = largest.max(proc.len());
        for delta0 in [0.02, 0.05, 0.125] {
            let fast: BTreeSet<BTreeSet<u32>> =
                bad_components(proc, delta0).components.into_iter().map(|c| c.into_iter().collect()).collect();
            bad_mismatch += usize::from(fast != brute_bad_partition(proc, delta0));
        }
    }
    outcome(
        pixel_mismatch == 0 && label_mismatch == 0 && bad_mismatch == 0,
        format!(
            "pixel mismatches {pixel_mismatch} on 20 configs, labeling mismatches {label_mismatch} on 1000 fields, \
             bad-component mismatches {bad_mismatch} on {} configs (up to {largest} leaves) x 3 tolerances",
            configs.len()
        ),
    )
}

fn c13_determinism() -> Outcome {
    let p = [0.45, 0.5, 0.55];
    let s = [6.0, 10.0];
    let runs: Vec<String> = [Some(1), Some(2), Some(4), None]
        .into_iter()
        .map(|w| critical_scan(&p, &s, 60, 0.125, 1313, w).unwrap().to_csv())
        .collect();
    let lib_ok = runs.windows(2).all(|w| w[0] == w[1]);

    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_confetti");
    let cli_runs: Vec<Vec<u8>> = ["1", "3"]
        .iter()
        .map(|w| {
            let out = dir.path().join(format!("sweep{w}.csv"));
            let status = std::process::Command::new(bin)
                .args(["sweep", "--p-list", "0.45,0.55", "--s-list", "6", "--trials", "40", "--h", "0.125"])
                .args(["--seed", "9", "--workers", w, "--out"])
                .arg(&out)
                .status()
                .unwrap();
            assert!(status.success());
            std::fs::read(out).unwrap()
        })
        .collect();
    let cli_ok = cli_runs[0] == cli_runs[1];
    outcome(
        lib_ok && cli_ok,
        format!("library sweep identical across 1/2/4/default workers: {lib_ok}; CLI sweep identical for 1 vs 3 workers: {cli_ok}"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("C1 critical square crossing", c1_critical_square),
        ("C2 discrete duality", c2_duality),
        ("C3 critical point", c3_critical_point),
        ("C4 sharp-threshold trend", c4_sharp_threshold),
        ("C5 RSW floor", c5_rsw_floor),
        ("C6 Harris/FKG", c6_fkg),
        ("C7 discretization law", c7_discretization),
        ("C8 tail bound", c8_tail_bound),
        ("C9 unstable-pair first moment", c9_pair_moment),
        ("C10 domination chain", c10_domination),
        ("C11 coverage", c11_coverage),
        ("C12 oracle equivalence", c12_oracles),
        ("C13 determinism", c13_determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let o = check();
        println!(
            "[{}] {name}: {} ({:.1}s)",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
        failed += usize::from(!o.pass);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
