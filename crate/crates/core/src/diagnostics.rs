//! Instability machinery: unstable pairs and triples, stable neighborhoods,
//! bad components, and Monte Carlo checks of the associated bounds.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::coloring::{boundary_visible_among, boundary_visible_filtered, boundary_visible_via};
use crate::connectivity::UnionFind;
use crate::error::{invalid, Result};
use crate::geometry::{in_unstable_set, Point2, Rect, WindowSpec};
use crate::index::LeafIndex;
use crate::process::{Color, Horizon, Leaf, LeafProcess, MeshParams, Sampler};
use crate::rng::TrialKey;
use crate::trials::run_trials;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimePoint {
    pub z: Point2,
    pub t: f64,
}

impl SpaceTimePoint {
    pub fn new(z: Point2, t: f64) -> Self {
        Self { z, t }
    }
}

impl From<&Leaf> for SpaceTimePoint {
    fn from(l: &Leaf) -> Self {
        Self { z: l.center, t: l.time }
    }
}

pub fn temporally_unstable(t: f64, t2: f64, delta0: f64) -> bool {
    (t - t2).abs() < delta0
}

/// Within sup-distance `2 + δ0` in space-time, and spatially close to the
/// cross `A_δ0` or temporally closer than `δ0`.
pub fn unstable_pair(y: SpaceTimePoint, y2: SpaceTimePoint, delta0: f64, window: &WindowSpec) -> bool {
    let d = window.delta(y.z, y2.z);
    let dt = (y.t - y2.t).abs();
    d.sup_norm().max(dt) <= 2.0 + delta0 && (in_unstable_set(d, delta0) || dt < delta0)
}

fn leaves_unstable(a: &Leaf, b: &Leaf, delta0: f64, window: &WindowSpec) -> bool {
    unstable_pair(a.into(), b.into(), delta0, window)
}

/// Pair instability at the mesh tolerance used for δ1-cube configurations:
/// `A_δ2 ⊕ Q_2δ1(o) = A_{δ2+δ1}`, so center-level instability at `δ2 + δ1`
/// decides whether some pair of points in the two cubes is `δ2`-unstable.
pub fn potentially_unstable_pair(y: SpaceTimePoint, y2: SpaceTimePoint, mesh: &MeshParams, window: &WindowSpec) -> bool {
    unstable_pair(y, y2, mesh.delta2 + mesh.delta1, window)
}

/// Tolerance used for cube-level triples (a sufficient condition only).
pub fn potential_triple_tolerance(mesh: &MeshParams) -> f64 {
    mesh.delta2 + 2.0 * mesh.delta1
}

/// Leaves that do not form an unstable pair with `y`, together with `y`.
pub fn stable_neighborhood(proc: &LeafProcess, y: &Leaf, delta0: f64) -> Vec<Leaf> {
    proc.leaves
        .iter()
        .filter(|l| l.id == y.id || !leaves_unstable(y, l, delta0, &proc.window))
        .copied()
        .collect()
}

/// `{x, x'}` is unstable and `x''` is boundary-visible from `x` in the stable
/// neighborhood of `x`.
pub fn unstable_triple(proc: &LeafProcess, x: &Leaf, x1: &Leaf, x2: &Leaf, delta0: f64) -> bool {
    if x.id == x1.id || x.id == x2.id || x1.id == x2.id {
        return false;
    }
    if !leaves_unstable(x, x1, delta0, &proc.window) {
        return false;
    }
    let phi = stable_neighborhood(proc, x, delta0);
    boundary_visible_among(&proc.window, &phi, x2, x)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BadComponentReport {
    /// Blocks of leaf ids, each sorted by time order, blocks ordered by their first leaf.
    pub components: Vec<Vec<u32>>,
    pub max_size: usize,
    /// Unordered unstable pairs.
    pub pair_edges: usize,
    /// Triples `(x, x', x'')` found, counted once per unstable partner `x'`.
    pub triple_edges: usize,
}

/// Components of the graph joining unstable pairs and every two members of an unstable triple.
pub fn bad_components(proc: &LeafProcess, delta0: f64) -> BadComponentReport {
    let w = &proc.window;
    let leaves = &proc.leaves;
    let n = leaves.len();
    let index = LeafIndex::new(*w, leaves);
    let reach = proc.max_half_side();
    let partners: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            index
                .near(leaves[i].center, 2.0 + delta0)
                .into_iter()
                .filter(|&j| j != i && leaves_unstable(&leaves[i], &leaves[j], delta0, w))
                .collect()
        })
        .collect();
    let mut uf = UnionFind::new(n);
    let mut pair_edges = 0;
    for (i, ps) in partners.iter().enumerate() {
        for &j in ps {
            if j > i {
                pair_edges += 1;
            }
            uf.union(i, j);
        }
    }
    let mut triple_edges = 0;
    for (i, ps) in partners.iter().enumerate() {
        if ps.is_empty() {
            continue;
        }
        let y = &leaves[i];
        let stable = |l: &Leaf| l.id == y.id || !leaves_unstable(y, l, delta0, w);
        for c in index.near(y.center, y.half_side + reach) {
            if c == i || !stable(&leaves[c]) {
                continue;
            }
            if !boundary_visible_filtered(&index, w, &leaves[c], y, stable) {
                continue;
            }
            for &j in ps {
                if j == c {
                    continue;
                }
                uf.union(i, j);
                uf.union(i, c);
                triple_edges += 1;
            }
        }
    }
    report_from(&mut uf, leaves, pair_edges, triple_edges)
}

pub(crate) fn report_from(uf: &mut UnionFind, leaves: &[Leaf], pair_edges: usize, triple_edges: usize) -> BadComponentReport {
    let components: Vec<Vec<u32>> =
        uf.blocks().into_iter().map(|b| b.into_iter().map(|k| leaves[k].id).collect()).collect();
    let max_size = components.iter().map(Vec::len).max().unwrap_or(0);
    BadComponentReport { components, max_size, pair_edges, triple_edges }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairCountStats {
    pub side: f64,
    pub horizon: f64,
    pub delta0: f64,
    pub trials: u64,
    pub seed: u64,
    pub empirical_mean: f64,
    pub std_error: f64,
    pub analytic: f64,
}

impl PairCountStats {
    pub const CSV_HEADER: &'static str = "side,T,delta0,trials,seed,empirical_mean,std_error,analytic";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.side, self.horizon, self.delta0, self.trials, self.seed, self.empirical_mean, self.std_error, self.analytic
        )
    }
}

/// Number of unordered unstable pairs among leaves (rectangle or torus).
pub fn count_unstable_pairs(proc: &LeafProcess, delta0: f64) -> usize {
    let l = &proc.leaves;
    let mut count = 0;
    for i in 0..l.len() {
        for j in i + 1..l.len() {
            if l[j].time - l[i].time > 2.0 + delta0 {
                break;
            }
            count += usize::from(leaves_unstable(&l[i], &l[j], delta0, &proc.window));
        }
    }
    count
}

/// Empirical mean number of unstable pairs in `Q_side(o) × [0, T]` versus the
/// first moment `½ (side² T)² μ`, where `μ` is the probability that two
/// independent uniform space-time points form an unstable pair.
pub fn pair_count_stats(
    side: f64,
    horizon: f64,
    delta0: f64,
    trials: u64,
    seed: u64,
    workers: Option<usize>,
) -> Result<PairCountStats> {
    if !(side > 0.0 && horizon >= 0.0 && delta0 > 0.0 && trials >= 1) {
        return Err(invalid("pair statistics need side > 0, T >= 0, delta0 > 0, trials >= 1"));
    }
    let window = WindowSpec::rectangle(Rect::centered_square(Point2::ORIGIN, side)?);
    let counts = run_trials(workers, trials, |t| {
        let sampler = Sampler::new(window, Horizon::fixed(horizon), TrialKey::new(seed, t)).margin(0.0);
        let proc = sampler.sample(0.5).expect("validated parameters");
        count_unstable_pairs(&proc, delta0) as f64
    })?;
    let n = counts.len() as f64;
    let mean = counts.iter().sum::<f64>() / n;
    let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    Ok(PairCountStats {
        side,
        horizon,
        delta0,
        trials,
        seed,
        empirical_mean: mean,
        std_error: (var / n).sqrt(),
        analytic: pair_first_moment(side, horizon, delta0),
    })
}

/// `½ V² μ` with `V = side² T`.
pub fn pair_first_moment(side: f64, horizon: f64, delta0: f64) -> f64 {
    let v = side * side * horizon;
    0.5 * v * v * pair_probability(side, horizon, delta0)
}

/// Probability that two independent uniform points of `Q_side(o) × [0, T]` form an unstable pair.
///
/// Coordinate differences are independent with triangular densities. The
/// spatial cross event splits into a union of two product events, so only
/// one-dimensional integrals are needed; each is evaluated by a midpoint rule
/// with step at most `1e-3` on pieces where the density is linear.
pub fn pair_probability(side: f64, horizon: f64, delta0: f64) -> f64 {
    let c = 2.0 + delta0;
    let near_axis = merge(vec![(-1.0 - delta0, -1.0 + delta0), (-delta0, delta0), (1.0 - delta0, 1.0 + delta0)]);
    let px_cross: f64 = near_axis.iter().map(|&(a, b)| triangular_mass(side, a, b)).sum();
    let px_cap = triangular_mass(side, -c, c);
    let p_a = 2.0 * px_cross * px_cap - px_cross * px_cross;
    let p_box = px_cap * px_cap;
    let t_cap = triangular_mass(horizon, -c, c);
    let t_close = triangular_mass(horizon, -delta0, delta0);
    p_a * t_cap + (p_box - p_a) * t_close
}

fn merge(mut v: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    v.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (a, b) in v {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

/// Mass of `[a, b]` under the density of `U - U'` for independent uniforms on an interval of length `w`.
fn triangular_mass(w: f64, a: f64, b: f64) -> f64 {
    if w <= 0.0 {
        return f64::from(u8::from(a <= 0.0 && 0.0 <= b));
    }
    let (a, b) = (a.max(-w), b.min(w));
    if a >= b {
        return 0.0;
    }
    let density = |x: f64| (w - x.abs()) / (w * w);
    let mut cuts = vec![a, b];
    if a < 0.0 && 0.0 < b {
        cuts.insert(1, 0.0);
    }
    cuts.windows(2)
        .map(|p| {
            let n = ((p[1] - p[0]) / 1e-3).ceil().max(1.0) as usize;
            let step = (p[1] - p[0]) / n as f64;
            (0..n).map(|k| density(p[0] + (k as f64 + 0.5) * step)).sum::<f64>() * step
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub n_values: Vec<usize>,
    pub empirical_tail: Vec<f64>,
    pub analytic_bound: Vec<f64>,
    pub trials: u64,
    pub lambda: f64,
    pub seed: u64,
}

impl TailReport {
    pub const CSV_HEADER: &'static str = "n,empirical,bound,trials,lambda,seed";

    pub fn to_csv(&self) -> String {
        let mut s = format!("{}\n", Self::CSV_HEADER);
        for (k, n) in self.n_values.iter().enumerate() {
            let _ = writeln!(
                s,
                "{n},{},{},{},{},{}",
                self.empirical_tail[k], self.analytic_bound[k], self.trials, self.lambda, self.seed
            );
        }
        s
    }

    /// Binomial standard error of the empirical tail at the bound.
    pub fn sigma(&self, k: usize) -> f64 {
        let b = self.analytic_bound[k].min(1.0);
        (b * (1.0 - b) / self.trials as f64).sqrt()
    }
}

/// `9^n λ^n / (n!)^2`.
pub fn chain_bound(n: usize, lambda: f64) -> f64 {
    (1..=n).map(|k| 9.0 * lambda / (k * k) as f64).product()
}

/// Count of leaves boundary-visible from a probe leaf at the origin through
/// its bottom-left corner and bottom edge.
pub fn corner_visible_count(proc: &LeafProcess, probe_time: f64) -> usize {
    let probe = Leaf::new(u32::MAX, Point2::ORIGIN, probe_time, Color::Black);
    let mut leaves = proc.leaves.clone();
    leaves.push(probe);
    proc.leaves
        .iter()
        .filter(|x| boundary_visible_via(&proc.window, &leaves, x, &probe, 0, 0))
        .count()
}

/// Empirical tail of the corner-restricted boundary-visible count against
/// `9^n λ^n / (n!)^2`, with leaves on `Q_3(o) × [0, λ]` and the probe at `λ/2`.
pub fn boundary_visible_tail(
    lambda: f64,
    trials: u64,
    seed: u64,
    n_max: usize,
    workers: Option<usize>,
) -> Result<TailReport> {
    if !(lambda >= 0.0 && lambda.is_finite()) || trials == 0 {
        return Err(invalid("tail check needs lambda >= 0 and trials >= 1"));
    }
    let window = WindowSpec::rectangle(Rect::centered_square(Point2::ORIGIN, 3.0)?);
    let counts = run_trials(workers, trials, |t| {
        let sampler = Sampler::new(window, Horizon::fixed(lambda), TrialKey::new(seed, t)).margin(0.0);
        let proc = sampler.sample(0.5).expect("validated parameters");
        corner_visible_count(&proc, lambda / 2.0)
    })?;
    let n_values: Vec<usize> = (1..=n_max).collect();
    let empirical_tail = n_values
        .iter()
        .map(|&n| counts.iter().filter(|&&c| c >= n).count() as f64 / trials as f64)
        .collect();
    let analytic_bound = n_values.iter().map(|&n| chain_bound(n, lambda)).collect();
    Ok(TailReport { n_values, empirical_tail, analytic_bound, trials, lambda, seed })
}
