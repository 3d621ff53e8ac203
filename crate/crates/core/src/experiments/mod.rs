//! Monte Carlo estimators and sweep campaigns.
//!
//! Every trial draws its leaves from streams keyed by (seed, trial index,
//! geometry), never by `p`, so estimates at different `p` share their random
//! numbers and a sweep evaluates each sampled field at all requested `p`.

mod crossing;
mod domination;
mod fkg;
mod theta;

pub use crossing::{
    crossing_outcomes, crossing_point, critical_scan, estimate_crossing, rsw_check, rsw_nested,
    CrossingOutcomes, CrossingParams, NestedRsw, RswReport, SweepResult, SWEEP_CSV_HEADER,
};
pub use domination::{domination_check, domination_check_with, DominationReport, DominationSetup};
pub use fkg::{fkg_check, fkg_independent, FkgReport};
pub use theta::{estimate_theta_proxy, reaches_boundary, theta_profile, ThetaProfile};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::coloring::{ColorField, CONFLICT, NO_LEAF};
use crate::error::Result;
use crate::geometry::{Rect, WindowSpec};
use crate::process::{Horizon, SampleStatus, Sampler};
use crate::rng::TrialKey;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Default time cap for adaptive sampling in experiments.
pub const DEFAULT_CAP: f64 = 100.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub p_hat: f64,
    pub trials: u64,
    pub successes: u64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
    /// Trials whose sample hit the time cap before covering the window.
    pub uncovered: u64,
    pub params: BTreeMap<String, f64>,
}

impl Estimate {
    pub fn from_counts(successes: u64, trials: u64, seed: u64) -> Self {
        let (ci_low, ci_high) = wilson(successes, trials);
        Estimate {
            p_hat: if trials == 0 { 0.0 } else { successes as f64 / trials as f64 },
            trials,
            successes,
            ci_low,
            ci_high,
            seed,
            uncovered: 0,
            params: BTreeMap::new(),
        }
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    /// Binomial standard error `sqrt(p(1-p)/n)`.
    pub fn std_error(&self) -> f64 {
        (self.p_hat * (1.0 - self.p_hat) / self.trials.max(1) as f64).sqrt()
    }
}

/// Wilson score interval at 95%.
pub fn wilson(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).clamp(0.0, 1.0).min(p), (center + half).clamp(0.0, 1.0).max(p))
}

/// One sampled realization stored as winning leaf ids per pixel, ready to be
/// colored at any `p`.
#[derive(Debug, Clone)]
pub struct TrialField {
    pub ids: ColorField,
    /// Mark variate per leaf id; the leaf is black at `p` iff its variate is below `p`.
    pub marks: Vec<f64>,
    pub status: SampleStatus,
}

impl TrialField {
    /// Adaptive sample on `region` (margin 1/2) painted at resolution `h`.
    pub fn sample(region: Rect, h: f64, cap: f64, key: TrialKey) -> Result<TrialField> {
        let window = WindowSpec::rectangle(region);
        let sampler = Sampler::new(window, Horizon::Adaptive { cap, resolution: h }, key);
        let mut painter = None;
        let sample = sampler.sample_sites_with(|p| painter = Some(p))?;
        let ids = painter.expect("adaptive sampling yields a painter").into_field(false);
        Ok(TrialField { ids, marks: sample.sites.iter().map(|s| s.mark_variate).collect(), status: sample.status })
    }

    pub fn covered(&self) -> bool {
        self.status == SampleStatus::Complete
    }

    pub fn colored(&self, p: f64) -> ColorField {
        let signs: Vec<i8> = self.marks.iter().map(|&u| if u < p { 1 } else { -1 }).collect();
        let ids = self.ids.leaf_ids.as_ref().expect("trial fields carry leaf ids");
        ColorField {
            values: ids
                .iter()
                .map(|&id| if id == NO_LEAF || id == CONFLICT { 0 } else { signs[id as usize] })
                .collect(),
            heights: None,
            leaf_ids: None,
            ..self.ids.clone_header()
        }
    }
}

impl ColorField {
    /// Grid description without pixel data.
    pub(crate) fn clone_header(&self) -> ColorField {
        ColorField {
            region: self.region,
            h: self.h,
            nx: self.nx,
            ny: self.ny,
            values: Vec::new(),
            heights: None,
            leaf_ids: None,
        }
    }
}

pub(crate) fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        Err(crate::error::invalid("trials must be at least 1"))
    } else {
        Ok(())
    }
}

pub(crate) fn check_resolution(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(crate::error::invalid(format!("resolution must be positive, got {h}")))
    }
}
