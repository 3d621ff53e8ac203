//! Marked space-time Poisson leaf processes.
//!
//! A process is a finite list of colored square leaves sorted by arrival time.
//! Leaves are drawn in unit-length time batches, each from its own keyed random
//! stream, so a fixed-horizon process and an adaptive one with the same key
//! agree on their common prefix.

mod discrete;
mod io;

pub use discrete::{
    discretize, mesh_params, omega_process, state_probabilities, CubeState, DiscreteConfig,
    MeshParams, StateProbabilities,
};
pub use io::{read_binary, read_text, write_binary, write_text};

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::coloring::Painter;
use crate::error::{invalid, Result};
use crate::geometry::{Point2, Rect, Square, WindowSpec};
use crate::rng::{tags, TrialKey};

/// Black leaves carry `+1`, white leaves `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Color {
    White,
    Black,
}

impl Color {
    pub fn sign(self) -> i8 {
        match self {
            Color::Black => 1,
            Color::White => -1,
        }
    }

    pub fn from_sign(s: i8) -> Option<Color> {
        match s {
            1 => Some(Color::Black),
            -1 => Some(Color::White),
            _ => None,
        }
    }

    pub fn flipped(self) -> Color {
        match self {
            Color::Black => Color::White,
            Color::White => Color::Black,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Leaf {
    pub id: u32,
    pub center: Point2,
    pub time: f64,
    pub color: Color,
    pub half_side: f64,
}

impl Leaf {
    pub fn new(id: u32, center: Point2, time: f64, color: Color) -> Self {
        Self { id, center, time, color, half_side: 0.5 }
    }

    pub fn with_half_side(mut self, half_side: f64) -> Self {
        self.half_side = half_side;
        self
    }

    pub fn square(&self) -> Square {
        Square::new(self.center, self.half_side)
    }

    pub fn sigma(&self) -> f64 {
        f64::from(self.color.sign())
    }
}

/// Default batch length for leaf generation, in time units.
pub const BATCH_LENGTH: f64 = 1.0;

/// Default rasterization step used for adaptive coverage checks.
pub const DEFAULT_RESOLUTION: f64 = 1.0 / 16.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum Horizon {
    /// All leaves with arrival time in `[0, T]`.
    Fixed { time: f64 },
    /// Batches until the window is covered at `resolution`, or `cap` is reached.
    Adaptive { cap: f64, resolution: f64 },
}

impl Horizon {
    pub fn fixed(time: f64) -> Self {
        Horizon::Fixed { time }
    }

    pub fn adaptive(cap: f64) -> Self {
        Horizon::Adaptive { cap, resolution: DEFAULT_RESOLUTION }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Horizon::Fixed { time } if !(time >= 0.0 && time.is_finite()) => {
                Err(invalid(format!("fixed horizon must be finite and >= 0, got {time}")))
            }
            Horizon::Adaptive { cap, resolution } => {
                if !(cap >= 0.0 && cap.is_finite()) {
                    return Err(invalid(format!("adaptive cap must be finite and >= 0, got {cap}")));
                }
                if !(resolution > 0.0) {
                    return Err(invalid(format!("resolution must be positive, got {resolution}")));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleStatus {
    /// Fixed horizon, or adaptive sampling that reached full coverage.
    Complete,
    /// Adaptive sampling hit its time cap before the window was covered.
    PossiblyUncovered,
    /// Built from explicit leaves or by transforming another process.
    Derived,
}

/// Unmarked space-time point plus the uniform variate that decides its color.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Site {
    pub center: Point2,
    pub time: f64,
    pub mark_variate: f64,
}

impl Site {
    /// Black iff the variate falls below `p`; monotone in `p` for a fixed site.
    #[inline]
    pub fn color(&self, p: f64) -> Color {
        if self.mark_variate < p {
            Color::Black
        } else {
            Color::White
        }
    }
}

/// Sites of one sampled realization, sorted by time, with coverage outcome.
#[derive(Debug, Clone)]
pub struct SiteSample {
    pub sites: Vec<Site>,
    pub status: SampleStatus,
    /// Upper end of the simulated time range.
    pub horizon_reached: f64,
}

impl SiteSample {
    pub fn leaves(&self, p: f64) -> Vec<Leaf> {
        self.sites
            .iter()
            .enumerate()
            .map(|(i, s)| Leaf::new(i as u32, s.center, s.time, s.color(p)))
            .collect()
    }

    /// Marks decided by `1 - u < p`: for `p -> 1 - p` this flips every mark.
    pub fn mirrored_leaves(&self, p: f64) -> Vec<Leaf> {
        self.sites
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let c = if 1.0 - s.mark_variate < p { Color::Black } else { Color::White };
                Leaf::new(i as u32, s.center, s.time, c)
            })
            .collect()
    }
}

/// Configures and draws leaf processes.
#[derive(Debug, Clone)]
pub struct Sampler {
    window: WindowSpec,
    margin: f64,
    horizon: Horizon,
    key: TrialKey,
}

impl Sampler {
    /// Margin defaults to the leaf half side on rectangles and 0 on tori.
    pub fn new(window: WindowSpec, horizon: Horizon, key: TrialKey) -> Self {
        let margin = if window.is_torus() { 0.0 } else { 0.5 };
        Self { window, margin, horizon, key }
    }

    pub fn margin(mut self, margin: f64) -> Self {
        self.margin = margin;
        self
    }

    /// Spatial domain that receives leaf centers.
    pub fn domain(&self) -> Rect {
        match self.window {
            WindowSpec::Rectangle(r) => r.expand(self.margin),
            WindowSpec::Torus { .. } => self.window.bounds(),
        }
    }

    pub fn sample_sites(&self) -> Result<SiteSample> {
        self.sample_sites_with(|_| {})
    }

    /// Samples sites; `on_painted` receives the coverage painter for adaptive runs.
    pub fn sample_sites_with(&self, on_painted: impl FnOnce(Painter)) -> Result<SiteSample> {
        self.horizon.validate()?;
        if !(self.margin >= 0.0) || (self.window.is_torus() && self.margin != 0.0) {
            return Err(invalid("margin must be >= 0 (and 0 on a torus)"));
        }
        let domain = self.domain();
        match self.horizon {
            Horizon::Fixed { time } => {
                let mut sites = Vec::new();
                let batches = (time / BATCH_LENGTH).ceil() as u64;
                for k in 0..batches {
                    let t0 = k as f64 * BATCH_LENGTH;
                    let t1 = (t0 + BATCH_LENGTH).min(time);
                    sites.extend(self.batch(k, &domain, t0, t1));
                }
                Ok(SiteSample { sites, status: SampleStatus::Complete, horizon_reached: time })
            }
            Horizon::Adaptive { cap, resolution } => {
                let mut painter = Painter::new(self.window, self.window.bounds(), resolution)?;
                let mut sites = Vec::new();
                let mut k = 0u64;
                let mut reached = 0.0;
                while !painter.is_complete() && reached < cap {
                    let t0 = k as f64 * BATCH_LENGTH;
                    let t1 = (t0 + BATCH_LENGTH).min(cap);
                    let batch = self.batch(k, &domain, t0, t1);
                    let first = sites.len() as u32;
                    for (i, s) in batch.iter().enumerate() {
                        if painter.is_complete() {
                            break;
                        }
                        painter.paint_single(first + i as u32, s.center, 0.5, 1, s.time);
                    }
                    sites.extend(batch);
                    reached = t1;
                    k += 1;
                }
                let status = if painter.is_complete() {
                    SampleStatus::Complete
                } else {
                    SampleStatus::PossiblyUncovered
                };
                on_painted(painter);
                Ok(SiteSample { sites, status, horizon_reached: reached })
            }
        }
    }

    fn batch(&self, k: u64, domain: &Rect, t0: f64, t1: f64) -> Vec<Site> {
        let mut rng = self.key.stream(tags::LEAF_BATCH + k);
        let mean = domain.area() * (t1 - t0);
        let n = if mean > 0.0 {
            Poisson::new(mean).expect("finite positive mean").sample(&mut rng) as usize
        } else {
            0
        };
        let (w, h, dt) = (domain.width(), domain.height(), t1 - t0);
        let mut sites: Vec<Site> = (0..n)
            .map(|_| {
                let x = domain.x0 + w * rng.random::<f64>();
                let y = domain.y0 + h * rng.random::<f64>();
                let t = t0 + dt * rng.random::<f64>();
                let u = rng.random::<f64>();
                Site { center: self.window.wrap(Point2::new(x, y)), time: t, mark_variate: u }
            })
            .collect();
        loop {
            sites.sort_by(|a, b| a.time.total_cmp(&b.time));
            let tie = sites.windows(2).position(|w| w[0].time == w[1].time);
            match tie {
                Some(i) => sites[i + 1].time = t0 + dt * rng.random::<f64>(),
                None => break,
            }
        }
        sites
    }

    pub fn sample(&self, p: f64) -> Result<LeafProcess> {
        check_probability(p)?;
        let sample = self.sample_sites()?;
        Ok(self.wrap_leaves(sample.leaves(p), p, sample.status))
    }

    fn wrap_leaves(&self, leaves: Vec<Leaf>, p: f64, status: SampleStatus) -> LeafProcess {
        LeafProcess {
            window: self.window,
            margin: self.margin,
            leaves,
            p: Some(p),
            horizon: self.horizon,
            seed: self.key.master,
            trial: self.key.trial,
            status,
        }
    }
}

pub(crate) fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(invalid(format!("probability must lie in [0, 1], got {p}")))
    }
}

/// A finite leaf configuration on a window with its sampling provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeafProcess {
    pub window: WindowSpec,
    pub margin: f64,
    /// Sorted by time ascending.
    pub leaves: Vec<Leaf>,
    /// Black probability used for the marks; `None` for hand-built processes.
    pub p: Option<f64>,
    pub horizon: Horizon,
    pub seed: u64,
    pub trial: u64,
    pub status: SampleStatus,
}

impl LeafProcess {
    /// Builds a process from explicit leaves (sorted by time, stable for ties).
    pub fn from_leaves(window: WindowSpec, mut leaves: Vec<Leaf>) -> Self {
        leaves.sort_by(|a, b| a.time.total_cmp(&b.time));
        let t_max = leaves.iter().map(|l| l.time).fold(0.0, f64::max);
        LeafProcess {
            window,
            margin: if window.is_torus() { 0.0 } else { 0.5 },
            leaves,
            p: None,
            horizon: Horizon::fixed(t_max),
            seed: 0,
            trial: 0,
            status: SampleStatus::Derived,
        }
    }

    pub fn len(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }

    pub fn leaf(&self, id: u32) -> Option<&Leaf> {
        self.leaves.iter().find(|l| l.id == id)
    }

    /// Largest half side present (0.5 for an empty process).
    pub fn max_half_side(&self) -> f64 {
        self.leaves.iter().map(|l| l.half_side).fold(0.5, f64::max)
    }

    /// Same process with every mark flipped.
    pub fn flip_marks(&self) -> Self {
        let mut out = self.clone();
        for l in &mut out.leaves {
            l.color = l.color.flipped();
        }
        out.p = self.p.map(|p| 1.0 - p);
        out
    }

    /// Same leaves with every half side replaced (used for shrunken coverage tests).
    pub fn with_half_side(&self, half_side: f64) -> Self {
        let mut out = self.clone();
        for l in &mut out.leaves {
            l.half_side = half_side;
        }
        out.status = SampleStatus::Derived;
        out
    }

    fn with_leaves(&self, mut leaves: Vec<Leaf>) -> Self {
        leaves.sort_by(|a, b| a.time.total_cmp(&b.time));
        LeafProcess { leaves, status: SampleStatus::Derived, ..self.clone() }
    }
}

/// Marked Poisson leaf process on `window` (margin 1/2 on rectangles, none on tori).
pub fn sample_process(window: WindowSpec, p: f64, horizon: Horizon, seed: u64) -> Result<LeafProcess> {
    Sampler::new(window, horizon, TrialKey::new(seed, 0)).sample(p)
}

/// Same positions and times as `sample_process(window, 1 - p, ..)` with the
/// marks decided by the reflected variate, so it equals that process with
/// every mark flipped.
pub fn sample_process_mirrored(window: WindowSpec, p: f64, horizon: Horizon, seed: u64) -> Result<LeafProcess> {
    check_probability(p)?;
    let sampler = Sampler::new(window, horizon, TrialKey::new(seed, 0));
    let sample = sampler.sample_sites()?;
    Ok(sampler.wrap_leaves(sample.mirrored_leaves(p), p, sample.status))
}

/// Which economical time horizon to use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EconomicalVariant {
    /// `c ln s`.
    Rectangle { c: f64 },
    /// `50 floor(ln s)`.
    Torus,
}

pub fn economical_horizon(s: f64, variant: EconomicalVariant) -> Result<f64> {
    if !(s >= 1.0) {
        return Err(invalid(format!("s must be >= 1, got {s}")));
    }
    Ok(match variant {
        EconomicalVariant::Rectangle { c } => c * s.ln(),
        EconomicalVariant::Torus => 50.0 * s.ln().floor(),
    })
}

/// Tolerances for [`perturb`].
#[derive(Debug, Clone, PartialEq)]
pub enum Tolerance {
    Uniform(f64),
    /// One tolerance per leaf, indexed by position in `LeafProcess::leaves`.
    PerLeaf(Vec<f64>),
}

/// Delays and shrinks black leaves, advances and enlarges white ones.
///
/// Leaf `n` moves to time `t + σ δ` and half side `h - σ δ`. Each `δ` must lie in
/// `[0, 1/4)`.
pub fn perturb(proc: &LeafProcess, tol: &Tolerance) -> Result<LeafProcess> {
    let check = |d: f64| {
        if (0.0..0.25).contains(&d) {
            Ok(())
        } else {
            Err(invalid(format!("perturbation tolerance must lie in [0, 1/4), got {d}")))
        }
    };
    match tol {
        Tolerance::Uniform(d) => check(*d)?,
        Tolerance::PerLeaf(ds) => {
            if ds.len() != proc.len() {
                return Err(invalid(format!(
                    "per-leaf tolerances: expected {} values, got {}",
                    proc.len(),
                    ds.len()
                )));
            }
            ds.iter().try_for_each(|d| check(*d))?;
        }
    }
    Ok(perturb_raw(proc, |i| match tol {
        Tolerance::Uniform(d) => *d,
        Tolerance::PerLeaf(ds) => ds[i],
    }))
}

/// Uniform perturbation allowing any `δ` up to the half side (sides may reach 0).
pub(crate) fn perturb_extended(proc: &LeafProcess, delta0: f64) -> Result<LeafProcess> {
    if !(delta0 >= 0.0 && delta0 <= proc.leaves.iter().map(|l| l.half_side).fold(0.5, f64::min)) {
        return Err(invalid(format!("perturbation {delta0} exceeds the leaf half side")));
    }
    Ok(perturb_raw(proc, |_| delta0))
}

fn perturb_raw(proc: &LeafProcess, delta_of: impl Fn(usize) -> f64) -> LeafProcess {
    let leaves = proc
        .leaves
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let shift = l.sigma() * delta_of(i);
            Leaf { time: l.time + shift, half_side: l.half_side - shift, ..*l }
        })
        .collect();
    let mut out = proc.with_leaves(leaves);
    if delta_of(0) == 0.0 && proc.leaves.iter().enumerate().all(|(i, _)| delta_of(i) == 0.0) {
        out.status = proc.status;
    }
    out
}

/// Two processes with common positions and times whose marks satisfy
/// `σ2 >= σ1` leafwise, with marginal black probabilities `p1` and `p2`.
///
/// Both marks threshold the same uniform variate `u`: black at `p1` iff `u < p1`,
/// black at `p2` iff `u < p2`. Given a white first mark, `u` is uniform on
/// `[p1, 1)` and the second mark is black with probability `(p2 - p1) / (1 - p1)`.
pub fn natural_coupling(
    window: WindowSpec,
    p1: f64,
    p2: f64,
    horizon: Horizon,
    seed: u64,
) -> Result<(LeafProcess, LeafProcess)> {
    check_probability(p1)?;
    check_probability(p2)?;
    if p1 > p2 {
        return Err(invalid(format!("natural coupling needs p1 <= p2, got {p1} > {p2}")));
    }
    let sampler = Sampler::new(window, horizon, TrialKey::new(seed, 0));
    let sample = sampler.sample_sites()?;
    Ok((
        sampler.wrap_leaves(sample.leaves(p1), p1, sample.status),
        sampler.wrap_leaves(sample.leaves(p2), p2, sample.status),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect(w: f64) -> WindowSpec {
        WindowSpec::rectangle(Rect::sized(w, w).unwrap())
    }

    #[test]
    fn zero_horizon_is_empty() {
        let proc = sample_process(rect(4.0), 0.5, Horizon::fixed(0.0), 1).unwrap();
        assert!(proc.is_empty());
        assert_eq!(proc.status, SampleStatus::Complete);
    }

    #[test]
    fn p_one_is_all_black() {
        let proc = sample_process(rect(4.0), 1.0, Horizon::fixed(2.0), 3).unwrap();
        assert!(!proc.is_empty());
        assert!(proc.leaves.iter().all(|l| l.color == Color::Black));
    }

    #[test]
    fn leaves_sorted_with_distinct_times_inside_halo() {
        let proc = sample_process(rect(4.0), 0.5, Horizon::fixed(3.5), 11).unwrap();
        assert!(proc.leaves.windows(2).all(|w| w[0].time < w[1].time));
        let dom = Rect::sized(4.0, 4.0).unwrap().expand(0.5);
        assert!(proc.leaves.iter().all(|l| dom.contains(l.center)));
        assert!(proc.leaves.iter().all(|l| (0.0..=3.5).contains(&l.time)));
        assert!(proc.leaves.iter().enumerate().all(|(i, l)| l.id == i as u32));
    }

    #[test]
    fn torus_centers_lie_in_fundamental_domain() {
        let w = WindowSpec::torus(5.0).unwrap();
        let proc = sample_process(w, 0.5, Horizon::fixed(2.0), 5).unwrap();
        assert_eq!(proc.margin, 0.0);
        assert!(proc
            .leaves
            .iter()
            .all(|l| (0.0..5.0).contains(&l.center.x) && (0.0..5.0).contains(&l.center.y)));
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = sample_process(rect(6.0), 0.4, Horizon::fixed(2.5), 99).unwrap();
        let b = sample_process(rect(6.0), 0.4, Horizon::fixed(2.5), 99).unwrap();
        assert_eq!(a, b);
        let c = sample_process(rect(6.0), 0.4, Horizon::fixed(2.5), 100).unwrap();
        assert_ne!(a.leaves, c.leaves);
    }

    #[test]
    fn adaptive_prefix_matches_fixed() {
        let w = rect(3.0);
        let a = sample_process(w, 0.5, Horizon::adaptive(50.0), 8).unwrap();
        assert_eq!(a.status, SampleStatus::Complete);
        let n_batches = a.leaves.last().unwrap().time.ceil();
        let f = sample_process(w, 0.5, Horizon::fixed(n_batches), 8).unwrap();
        assert_eq!(a.leaves, f.leaves);
    }

    #[test]
    fn adaptive_cap_flags_uncovered() {
        let a = sample_process(rect(8.0), 0.5, Horizon::adaptive(0.5), 2).unwrap();
        assert_eq!(a.status, SampleStatus::PossiblyUncovered);
    }

    #[test]
    fn mirrored_sampling_flips_marks() {
        for seed in 0..20 {
            let p = 0.05 * seed as f64;
            let direct = sample_process(rect(3.0), p, Horizon::fixed(2.0), seed).unwrap();
            let mirrored = sample_process_mirrored(rect(3.0), 1.0 - p, Horizon::fixed(2.0), seed).unwrap();
            let flipped = direct.flip_marks();
            assert_eq!(flipped.leaves, mirrored.leaves);
        }
    }

    #[test]
    fn economical_horizon_examples() {
        assert_eq!(economical_horizon(16.0, EconomicalVariant::Torus).unwrap(), 100.0);
        assert_eq!(economical_horizon(2.0, EconomicalVariant::Torus).unwrap(), 0.0);
        let e = std::f64::consts::E;
        let r = economical_horizon(e, EconomicalVariant::Rectangle { c: 50.0 }).unwrap();
        assert!((r - 50.0).abs() < 1e-12);
        assert!(economical_horizon(0.5, EconomicalVariant::Torus).is_err());
    }

    fn one_leaf(color: Color) -> LeafProcess {
        LeafProcess::from_leaves(rect(4.0), vec![Leaf::new(0, Point2::new(2.0, 2.0), 1.0, color)])
    }

    #[test]
    fn perturb_black_and_white() {
        let b = perturb(&one_leaf(Color::Black), &Tolerance::Uniform(0.1)).unwrap();
        assert!((b.leaves[0].time - 1.1).abs() < 1e-15);
        assert!((2.0 * b.leaves[0].half_side - 0.8).abs() < 1e-15);
        let w = perturb(&one_leaf(Color::White), &Tolerance::Uniform(0.1)).unwrap();
        assert!((w.leaves[0].time - 0.9).abs() < 1e-15);
        assert!((2.0 * w.leaves[0].half_side - 1.2).abs() < 1e-15);
    }

    #[test]
    fn perturb_zero_is_identity() {
        let proc = sample_process(rect(4.0), 0.5, Horizon::fixed(2.0), 4).unwrap();
        assert_eq!(perturb(&proc, &Tolerance::Uniform(0.0)).unwrap(), proc);
    }

    #[test]
    fn perturb_rejects_large_tolerance() {
        let proc = one_leaf(Color::Black);
        assert!(perturb(&proc, &Tolerance::Uniform(0.25)).is_err());
        assert!(perturb(&proc, &Tolerance::PerLeaf(vec![0.1, 0.1])).is_err());
        assert!(perturb(&proc, &Tolerance::PerLeaf(vec![-0.1])).is_err());
    }

    #[test]
    fn perturb_per_leaf_and_resort() {
        let leaves = vec![
            Leaf::new(0, Point2::new(1.0, 1.0), 1.0, Color::Black),
            Leaf::new(1, Point2::new(2.0, 1.0), 1.1, Color::White),
        ];
        let proc = LeafProcess::from_leaves(rect(4.0), leaves);
        let out = perturb(&proc, &Tolerance::PerLeaf(vec![0.2, 0.05])).unwrap();
        assert_eq!(out.leaves[0].id, 1);
        assert!((out.leaves[0].time - 1.05).abs() < 1e-15);
        assert!((out.leaves[1].time - 1.2).abs() < 1e-15);
    }

    #[test]
    fn coupling_examples() {
        let w = rect(4.0);
        let (a, b) = natural_coupling(w, 0.4, 0.4, Horizon::fixed(2.0), 1).unwrap();
        assert_eq!(a.leaves, b.leaves);
        let (a, b) = natural_coupling(w, 0.0, 1.0, Horizon::fixed(2.0), 1).unwrap();
        assert!(a.leaves.iter().all(|l| l.color == Color::White));
        assert!(b.leaves.iter().all(|l| l.color == Color::Black));
        assert!(natural_coupling(w, 0.6, 0.3, Horizon::fixed(1.0), 1).is_err());
    }

    #[test]
    fn coupling_is_ordered_and_has_right_marginal() {
        // 10^5 leaves: 10 x 10 window plus halo, horizon chosen for ~1e5 points.
        let w = rect(10.0);
        let (a, b) = natural_coupling(w, 0.3, 0.6, Horizon::fixed(1e5 / 121.0), 17).unwrap();
        let n = a.len();
        assert!(n > 90_000);
        for (x, y) in a.leaves.iter().zip(&b.leaves) {
            assert_eq!((x.center, x.time), (y.center, y.time));
            assert!(y.sigma() >= x.sigma());
        }
        let black = b.leaves.iter().filter(|l| l.color == Color::Black).count() as f64;
        let sd = (0.6 * 0.4 / n as f64).sqrt();
        assert!((black / n as f64 - 0.6).abs() < 3.0 * sd);
    }
}
