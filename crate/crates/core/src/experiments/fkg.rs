use serde::{Deserialize, Serialize};

use super::{check_resolution, check_trials, TrialField, DEFAULT_CAP};
use crate::connectivity::{horizontal_crossing, Adjacency};
use crate::error::{invalid, Result};
use crate::geometry::Rect;
use crate::process::check_probability;
use crate::rng::{salt_of, TrialKey};
use crate::trials::try_run_trials;

/// Joint and marginal frequencies of two crossing events read from one field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FkgReport {
    pub p_ab: f64,
    pub p_a: f64,
    pub p_b: f64,
    pub product: f64,
    /// Standard error of `p_ab - product`.
    pub sigma: f64,
    pub trials: u64,
}

impl FkgReport {
    fn from_outcomes(outcomes: &[(bool, bool)]) -> Self {
        let n = outcomes.len() as f64;
        let freq = |f: &dyn Fn(&(bool, bool)) -> bool| outcomes.iter().filter(|o| f(o)).count() as f64 / n;
        let p_a = freq(&|o| o.0);
        let p_b = freq(&|o| o.1);
        let p_ab = freq(&|o| o.0 && o.1);
        let psi: Vec<f64> = outcomes
            .iter()
            .map(|&(a, b)| f64::from(u8::from(a && b)) - p_b * f64::from(u8::from(a)) - p_a * f64::from(u8::from(b)))
            .collect();
        let mean = psi.iter().sum::<f64>() / n;
        let var = psi.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        FkgReport { p_ab, p_a, p_b, product: p_a * p_b, sigma: (var / n).sqrt(), trials: outcomes.len() as u64 }
    }

    /// `p_ab - product`.
    pub fn excess(&self) -> f64 {
        self.p_ab - self.product
    }

    /// `P(A∩B) ≥ P(A)P(B) − kσ`.
    pub fn holds(&self, k: f64) -> bool {
        self.excess() >= -k * self.sigma
    }
}

fn paired(
    region: Rect,
    a: Rect,
    b: Rect,
    p: f64,
    trials: u64,
    h: f64,
    seed: u64,
    workers: Option<usize>,
) -> Result<FkgReport> {
    check_probability(p)?;
    check_trials(trials)?;
    check_resolution(h)?;
    let salt = salt_of(&[region.width(), region.height(), h]);
    let outcomes = try_run_trials(workers, trials, |t| {
        let field = TrialField::sample(region, h, DEFAULT_CAP, TrialKey::new(seed, t).with_salt(salt))?.colored(p);
        Ok((
            horizontal_crossing(&field.sub_field(a), 1, Adjacency::Four),
            horizontal_crossing(&field.sub_field(b), 1, Adjacency::Four),
        ))
    })?;
    Ok(FkgReport::from_outcomes(&outcomes))
}

fn check_side(s: f64) -> Result<()> {
    if s > 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("s must be positive, got {s}")))
    }
}

/// A: black crossing of `[0, 2s/3] × [0, s]`, B: of `[s/3, s] × [0, s]`, on one field over `[0, s]²`.
pub fn fkg_check(p: f64, s: f64, trials: u64, h: f64, seed: u64, workers: Option<usize>) -> Result<FkgReport> {
    check_side(s)?;
    let region = Rect::sized(s, s)?;
    let a = Rect { x0: 0.0, x1: 2.0 * s / 3.0, y0: 0.0, y1: s };
    let b = Rect { x0: s / 3.0, x1: s, y0: 0.0, y1: s };
    paired(region, a, b, p, trials, h, seed, workers)
}

/// Square crossings of `[0, s]²` and `[s+3, 2s+3] × [0, s]`, which are
/// independent since leaves have diameter below the gap.
pub fn fkg_independent(p: f64, s: f64, trials: u64, h: f64, seed: u64, workers: Option<usize>) -> Result<FkgReport> {
    check_side(s)?;
    let region = Rect::sized(2.0 * s + 3.0, s)?;
    let a = Rect { x0: 0.0, x1: s, y0: 0.0, y1: s };
    let b = Rect { x0: s + 3.0, x1: 2.0 * s + 3.0, y0: 0.0, y1: s };
    paired(region, a, b, p, trials, h, seed, workers)
}
