use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{check_resolution, check_trials, Estimate, TrialField, DEFAULT_CAP};
use crate::coloring::ColorField;
use crate::error::{invalid, Result};
use crate::geometry::{Point2, Rect};
use crate::process::check_probability;
use crate::rng::{salt_of, TrialKey};
use crate::trials::try_run_trials;

/// Pixel of `field` containing the point `u` (clamped to the grid).
fn pixel_of(field: &ColorField, u: Point2) -> (usize, usize) {
    let i = ((u.x - field.region.x0) / field.h).floor().max(0.0) as usize;
    let j = ((u.y - field.region.y0) / field.h).floor().max(0.0) as usize;
    (i.min(field.nx - 1), j.min(field.ny - 1))
}

/// Whether the black 4-connected component of the origin pixel touches the
/// outer ring of pixels of `field`.
pub fn reaches_boundary(field: &ColorField) -> bool {
    if field.nx == 0 || field.ny == 0 {
        return false;
    }
    let start = pixel_of(field, Point2::ORIGIN);
    if field.get(start.0, start.1) != 1 {
        return false;
    }
    let (nx, ny) = (field.nx, field.ny);
    let mut seen = vec![false; nx * ny];
    let mut queue = VecDeque::from([start]);
    seen[start.1 * nx + start.0] = true;
    while let Some((i, j)) = queue.pop_front() {
        if i == 0 || j == 0 || i + 1 == nx || j + 1 == ny {
            return true;
        }
        for (a, b) in [(i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)] {
            let k = b * nx + a;
            if !seen[k] && field.values[k] == 1 {
                seen[k] = true;
                queue.push_back((a, b));
            }
        }
    }
    false
}

fn check_m(m: f64) -> Result<()> {
    if m >= 2.0 && m.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("box side m must be at least 2, got {m}")))
    }
}

fn box_field(p: f64, m: f64, h: f64, key: TrialKey) -> Result<ColorField> {
    let region = Rect::centered_square(Point2::ORIGIN, m)?;
    Ok(TrialField::sample(region, h, DEFAULT_CAP, key)?.colored(p))
}

/// Fraction of trials in which the origin's black component reaches `∂Q_m(o)`.
pub fn estimate_theta_proxy(p: f64, m: f64, trials: u64, h: f64, seed: u64, workers: Option<usize>) -> Result<Estimate> {
    check_probability(p)?;
    check_m(m)?;
    check_trials(trials)?;
    check_resolution(h)?;
    let salt = salt_of(&[m, h]);
    let hits = try_run_trials(workers, trials, |t| {
        Ok(reaches_boundary(&box_field(p, m, h, TrialKey::new(seed, t).with_salt(salt))?))
    })?;
    let k = hits.iter().filter(|&&b| b).count() as u64;
    Ok(Estimate::from_counts(k, trials, seed).with_param("p", p).with_param("m", m).with_param("h", h))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaProfile {
    pub m_values: Vec<f64>,
    pub estimates: Vec<Estimate>,
    /// Trials where a larger box was reached but a smaller one was not.
    pub violations: u64,
}

/// Proxy estimates for increasing `m`, each trial reading all boxes from one
/// field on the largest box.
pub fn theta_profile(p: f64, m_list: &[f64], trials: u64, h: f64, seed: u64, workers: Option<usize>) -> Result<ThetaProfile> {
    check_probability(p)?;
    check_trials(trials)?;
    check_resolution(h)?;
    if m_list.is_empty() || m_list.windows(2).any(|w| w[0] > w[1]) {
        return Err(invalid("m values must be non-empty and sorted"));
    }
    m_list.iter().try_for_each(|&m| check_m(m))?;
    let m_max = *m_list.last().unwrap();
    let salt = salt_of(&[m_max, h]);
    let rows = try_run_trials(workers, trials, |t| {
        let field = box_field(p, m_max, h, TrialKey::new(seed, t).with_salt(salt))?;
        Ok(m_list
            .iter()
            .map(|&m| {
                let r = m / 2.0;
                reaches_boundary(&field.sub_field(Rect { x0: -r, x1: r, y0: -r, y1: r }))
            })
            .collect::<Vec<bool>>())
    })?;
    let violations = rows.iter().filter(|r| r.windows(2).any(|w| w[1] && !w[0])).count() as u64;
    let estimates = (0..m_list.len())
        .map(|k| {
            let hits = rows.iter().filter(|r| r[k]).count() as u64;
            Estimate::from_counts(hits, trials, seed).with_param("p", p).with_param("m", m_list[k])
        })
        .collect();
    Ok(ThetaProfile { m_values: m_list.to_vec(), estimates, violations })
}
