use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{check_resolution, check_trials, Estimate, TrialField, DEFAULT_CAP};
use crate::connectivity::{horizontal_crossing, Adjacency};
use crate::error::{invalid, Result};
use crate::geometry::Rect;
use crate::process::check_probability;
use crate::rng::{salt_of, TrialKey};
use crate::trials::try_run_trials;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingParams {
    pub p: f64,
    pub rho: f64,
    pub s: f64,
    pub trials: u64,
    pub h: f64,
    pub seed: u64,
    pub cap: f64,
}

impl CrossingParams {
    pub fn new(p: f64, rho: f64, s: f64, trials: u64, seed: u64) -> Self {
        Self { p, rho, s, trials, h: 1.0 / 16.0, seed, cap: DEFAULT_CAP }
    }

    pub fn with_resolution(mut self, h: f64) -> Self {
        self.h = h;
        self
    }
}

/// Per-trial black horizontal crossing indicators of `[0, ρs] × [0, s]` at several `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossingOutcomes {
    /// `outcomes[trial][k]` for the `k`-th requested `p`.
    pub outcomes: Vec<Vec<bool>>,
    pub uncovered: Vec<bool>,
}

impl CrossingOutcomes {
    pub fn successes(&self, k: usize) -> u64 {
        self.outcomes.iter().filter(|o| o[k]).count() as u64
    }

    pub fn uncovered_count(&self) -> u64 {
        self.uncovered.iter().filter(|&&u| u).count() as u64
    }
}

fn trial_key(seed: u64, trial: u64, rho: f64, s: f64, h: f64) -> TrialKey {
    TrialKey::new(seed, trial).with_salt(salt_of(&[s, rho, h]))
}

fn validate(p_list: &[f64], rho: f64, s: f64, trials: u64, h: f64) -> Result<()> {
    p_list.iter().try_for_each(|&p| check_probability(p))?;
    check_trials(trials)?;
    check_resolution(h)?;
    if !(rho > 0.0 && s > 0.0 && rho.is_finite() && s.is_finite()) {
        return Err(invalid(format!("rho and s must be positive, got rho={rho}, s={s}")));
    }
    Ok(())
}

/// Samples one field per trial and evaluates the crossing at every `p`.
pub fn crossing_outcomes(
    p_list: &[f64],
    rho: f64,
    s: f64,
    trials: u64,
    h: f64,
    cap: f64,
    seed: u64,
    workers: Option<usize>,
) -> Result<CrossingOutcomes> {
    validate(p_list, rho, s, trials, h)?;
    let region = Rect::sized(rho * s, s)?;
    let rows = try_run_trials(workers, trials, |t| {
        let field = TrialField::sample(region, h, cap, trial_key(seed, t, rho, s, h))?;
        let hits = p_list
            .iter()
            .map(|&p| horizontal_crossing(&field.colored(p), 1, Adjacency::Four))
            .collect::<Vec<_>>();
        Ok((hits, !field.covered()))
    })?;
    let (outcomes, uncovered) = rows.into_iter().unzip();
    Ok(CrossingOutcomes { outcomes, uncovered })
}

/// Fraction of trials with a black left-right crossing of `[0, ρs] × [0, s]`.
pub fn estimate_crossing(params: &CrossingParams, workers: Option<usize>) -> Result<Estimate> {
    let c = &params;
    let out = crossing_outcomes(&[c.p], c.rho, c.s, c.trials, c.h, c.cap, c.seed, workers)?;
    Ok(cell_estimate(&out, 0, c.p, c.rho, c.s, c.h, c.seed))
}

fn cell_estimate(out: &CrossingOutcomes, k: usize, p: f64, rho: f64, s: f64, h: f64, seed: u64) -> Estimate {
    let mut e = Estimate::from_counts(out.successes(k), out.outcomes.len() as u64, seed)
        .with_param("p", p)
        .with_param("rho", rho)
        .with_param("s", s)
        .with_param("h", h);
    e.uncovered = out.uncovered_count();
    e
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub p_values: Vec<f64>,
    pub s_values: Vec<f64>,
    pub rho: f64,
    pub h: f64,
    pub trials: u64,
    pub seed: u64,
    /// `table[i][k]` is the estimate at `s_values[i]`, `p_values[k]`.
    pub table: Vec<Vec<Estimate>>,
    /// Per `s`, where the interpolated estimate crosses 1/2.
    pub crossing_points: Vec<Option<f64>>,
    #[serde(skip)]
    pub outcomes: Vec<CrossingOutcomes>,
}

pub const SWEEP_CSV_HEADER: &str = "p,s,rho,h,trials,successes,p_hat,ci_low,ci_high,seed,uncovered_count";

impl SweepResult {
    pub fn to_csv(&self) -> String {
        let mut out = format!("{SWEEP_CSV_HEADER}\n");
        for (i, s) in self.s_values.iter().enumerate() {
            for (k, p) in self.p_values.iter().enumerate() {
                let e = &self.table[i][k];
                let _ = writeln!(
                    out,
                    "{p},{s},{},{},{},{},{},{},{},{},{}",
                    self.rho, self.h, e.trials, e.successes, e.p_hat, e.ci_low, e.ci_high, e.seed, e.uncovered
                );
            }
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Two-column blocks (`p p_hat`), one per `s`, separated by blank lines.
    pub fn plot_data(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.s_values.iter().enumerate() {
            let _ = writeln!(out, "# s={s}");
            for (k, p) in self.p_values.iter().enumerate() {
                let _ = writeln!(out, "{p} {}", self.table[i][k].p_hat);
            }
            out.push('\n');
        }
        out
    }
}

/// First `p` where the piecewise-linear interpolation of `f` reaches 1/2.
pub fn crossing_point(p: &[f64], f: &[f64]) -> Option<f64> {
    for k in 0..p.len().saturating_sub(1) {
        let (a, b) = (f[k] - 0.5, f[k + 1] - 0.5);
        if a == 0.0 {
            return Some(p[k]);
        }
        if a * b < 0.0 {
            return Some(p[k] + (p[k + 1] - p[k]) * a / (a - b));
        }
    }
    match (p.last(), f.last()) {
        (Some(&pl), Some(&fl)) if fl == 0.5 => Some(pl),
        _ => None,
    }
}

/// Square crossing estimates over a `p × s` grid with common random numbers across `p`.
pub fn critical_scan(
    p_list: &[f64],
    s_list: &[f64],
    trials: u64,
    h: f64,
    seed: u64,
    workers: Option<usize>,
) -> Result<SweepResult> {
    if p_list.windows(2).any(|w| w[0] > w[1]) {
        return Err(invalid("p values must be sorted"));
    }
    let rho = 1.0;
    let mut table = Vec::new();
    let mut points = Vec::new();
    let mut all = Vec::new();
    for &s in s_list {
        let out = crossing_outcomes(p_list, rho, s, trials, h, DEFAULT_CAP, seed, workers)?;
        let row: Vec<Estimate> =
            p_list.iter().enumerate().map(|(k, &p)| cell_estimate(&out, k, p, rho, s, h, seed)).collect();
        let f: Vec<f64> = row.iter().map(|e| e.p_hat).collect();
        points.push(crossing_point(p_list, &f));
        table.push(row);
        all.push(out);
    }
    Ok(SweepResult {
        p_values: p_list.to_vec(),
        s_values: s_list.to_vec(),
        rho,
        h,
        trials,
        seed,
        table,
        crossing_points: points,
        outcomes: all,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RswReport {
    pub rho: f64,
    pub estimates: Vec<Estimate>,
    /// Some estimate's upper confidence bound fell below 0.02.
    pub flagged: bool,
}

/// `f(ρ, s)` at `p = 1/2` for each `s`.
pub fn rsw_check(rho: f64, s_list: &[f64], trials: u64, h: f64, seed: u64, workers: Option<usize>) -> Result<RswReport> {
    if !(rho > 1.0) {
        return Err(invalid(format!("rsw check needs rho > 1, got {rho}")));
    }
    let estimates = s_list
        .iter()
        .map(|&s| estimate_crossing(&CrossingParams::new(0.5, rho, s, trials, seed).with_resolution(h), workers))
        .collect::<Result<Vec<_>>>()?;
    let flagged = estimates.iter().any(|e| e.ci_high < 0.02);
    Ok(RswReport { rho, estimates, flagged })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NestedRsw {
    pub rho_values: Vec<f64>,
    pub estimates: Vec<Estimate>,
    /// Trials where a longer rectangle was crossed but a shorter one was not.
    pub violations: u64,
}

/// Crossings of `[0, ρs] × [0, s]` for increasing `ρ`, all read from one
/// field on the longest rectangle per trial.
pub fn rsw_nested(
    p: f64,
    rho_list: &[f64],
    s: f64,
    trials: u64,
    h: f64,
    seed: u64,
    workers: Option<usize>,
) -> Result<NestedRsw> {
    if rho_list.is_empty() || rho_list.windows(2).any(|w| w[0] > w[1]) {
        return Err(invalid("rho values must be non-empty and sorted"));
    }
    let rho_max = *rho_list.last().unwrap();
    validate(&[p], rho_max, s, trials, h)?;
    let region = Rect::sized(rho_max * s, s)?;
    let rows = try_run_trials(workers, trials, |t| {
        let field = TrialField::sample(region, h, DEFAULT_CAP, trial_key(seed, t, rho_max, s, h))?.colored(p);
        Ok(rho_list
            .iter()
            .map(|&rho| {
                let sub = field.sub_field(Rect { x0: 0.0, x1: rho * s, y0: 0.0, y1: s });
                horizontal_crossing(&sub, 1, Adjacency::Four)
            })
            .collect::<Vec<bool>>())
    })?;
    let violations = rows.iter().filter(|r| r.windows(2).any(|w| w[1] && !w[0])).count() as u64;
    let estimates = (0..rho_list.len())
        .map(|k| {
            let hits = rows.iter().filter(|r| r[k]).count() as u64;
            Estimate::from_counts(hits, trials, seed).with_param("rho", rho_list[k]).with_param("s", s)
        })
        .collect();
    Ok(NestedRsw { rho_values: rho_list.to_vec(), estimates, violations })
}
