use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::coloring::rasterize;
use crate::error::{invalid, Result};
use crate::geometry::{Point2, WindowSpec};
use crate::index::{Hit, LeafIndex};
use crate::process::{
    check_probability, discretize, economical_horizon, mesh_params, omega_process, perturb_extended,
    EconomicalVariant, Horizon, LeafProcess, MeshParams, Sampler,
};
use crate::rng::{salt_of, tags, TrialKey};
use crate::trials::try_run_trials;

/// Distance below which a sample point counts as lying on a leaf boundary.
const GENERIC_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominationSetup {
    pub mesh: MeshParams,
    pub period: f64,
    pub lambda: f64,
    pub p: f64,
    pub configs: u64,
    pub points: u64,
    pub seed: u64,
    /// Pixel size of the coverage test with half-size leaves.
    pub coverage_h: f64,
}

impl DominationSetup {
    /// Torus of period `10 s` run to `λ = 50⌊ln s⌋`.
    pub fn standard(s: u64, gamma: f64, p: f64, configs: u64, points: u64, seed: u64) -> Result<Self> {
        Ok(DominationSetup {
            mesh: mesh_params(s, gamma)?,
            period: 10.0 * s as f64,
            lambda: economical_horizon(s as f64, EconomicalVariant::Torus)?,
            p,
            configs,
            points,
            seed,
            coverage_h: 1.0 / 16.0,
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DominationReport {
    pub configs_checked: u64,
    pub skipped_uncovered: u64,
    pub points_checked: u64,
    /// Sample points within the genericity margin of some leaf boundary.
    pub points_skipped: u64,
    /// Points with `ψ_φ < ψ_ω`.
    pub violations_upper: u64,
    /// Points with `ψ_ω < ψ_{φ^{2δ}}`.
    pub violations_lower: u64,
}

impl DominationReport {
    pub fn passed(&self) -> bool {
        self.violations_upper == 0 && self.violations_lower == 0
    }

    fn merge(mut self, o: &DominationReport) -> Self {
        self.configs_checked += o.configs_checked;
        self.skipped_uncovered += o.skipped_uncovered;
        self.points_checked += o.points_checked;
        self.points_skipped += o.points_skipped;
        self.violations_upper += o.violations_upper;
        self.violations_lower += o.violations_lower;
        self
    }
}

pub fn domination_check(
    s: u64,
    gamma: f64,
    p: f64,
    configs: u64,
    points: u64,
    seed: u64,
    workers: Option<usize>,
) -> Result<DominationReport> {
    domination_check_with(&DominationSetup::standard(s, gamma, p, configs, points, seed)?, workers)
}

pub fn domination_check_with(setup: &DominationSetup, workers: Option<usize>) -> Result<DominationReport> {
    check_probability(setup.p)?;
    if setup.configs == 0 {
        return Err(invalid("configs must be at least 1"));
    }
    let window = WindowSpec::torus(setup.period)?;
    let salt = salt_of(&[setup.period, setup.mesh.delta, setup.lambda]);
    let per_config = try_run_trials(workers, setup.configs, |c| {
        let key = TrialKey::new(setup.seed, c).with_salt(salt);
        let phi = Sampler::new(window, Horizon::fixed(setup.lambda), key).sample(setup.p)?;
        check_config(&phi, setup, key)
    })?;
    Ok(per_config.iter().fold(DominationReport::default(), DominationReport::merge))
}

/// Color at `u` (`0` when uncovered or tied), or `None` when `u` lies within
/// the genericity margin of the boundary of a leaf that is not occluded there.
fn generic_psi(index: &LeafIndex<'_>, u: Point2) -> Option<i8> {
    let (color, until) = match index.hit(u) {
        Hit::Leaf { index: k, time } => (index.leaves()[k].color.sign(), time),
        Hit::Conflict { time } => (0, time),
        Hit::Uncovered => (0, f64::INFINITY),
    };
    (!index.boundary_near(u, GENERIC_MARGIN, until)).then_some(color)
}

fn check_config(phi: &LeafProcess, setup: &DominationSetup, key: TrialKey) -> Result<DominationReport> {
    let window = phi.window;
    let mut report = DominationReport::default();
    let halves = phi.with_half_side(0.25);
    if !rasterize(&halves, window.bounds(), setup.coverage_h)?.values.iter().all(|&v| v != 0) {
        report.skipped_uncovered = 1;
        return Ok(report);
    }
    report.configs_checked = 1;
    let omega = omega_process(&discretize(phi, &setup.mesh, setup.lambda)?);
    let shifted = perturb_extended(phi, 2.0 * setup.mesh.delta)?;
    let procs = [phi, &omega, &shifted];
    let indexes: Vec<LeafIndex<'_>> = procs.iter().map(|p| LeafIndex::new(window, &p.leaves)).collect();
    let mut rng = key.stream(tags::SAMPLE_POINTS);
    for _ in 0..setup.points {
        let u = Point2::new(rng.random::<f64>() * setup.period, rng.random::<f64>() * setup.period);
        let psi = [0, 1, 2].map(|k| generic_psi(&indexes[k], u));
        let [Some(a), Some(b), Some(c)] = psi else {
            report.points_skipped += 1;
            continue;
        };
        report.points_checked += 1;
        report.violations_upper += u64::from(a < b);
        report.violations_lower += u64::from(b < c);
    }
    Ok(report)
}
