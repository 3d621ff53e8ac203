//! Space-time cube discretization on the torus and the associated ω-process.

use serde::{Deserialize, Serialize};

use super::{Color, Leaf, LeafProcess};
use crate::error::{invalid, Result};
use crate::geometry::{Point2, WindowSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeshParams {
    pub delta: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub gamma: f64,
    pub s: u64,
}

/// `δ = 1 / (4⌈s^γ/4⌉)`, `δ1 = 1 / ⌈δ^{-1/2}⌉`, `δ2 = √δ1`.
pub fn mesh_params(s: u64, gamma: f64) -> Result<MeshParams> {
    if s < 2 {
        return Err(invalid(format!("mesh parameters need s >= 2, got {s}")));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(invalid(format!("gamma must be positive, got {gamma}")));
    }
    let m = 4 * ((s as f64).powf(gamma) / 4.0).ceil() as u64;
    // ⌈√m⌉ with integer arithmetic so perfect squares are exact.
    let mut r = (m as f64).sqrt() as u64;
    while r * r > m {
        r -= 1;
    }
    if r * r < m {
        r += 1;
    }
    let delta1 = 1.0 / r as f64;
    Ok(MeshParams { delta: 1.0 / m as f64, delta1, delta2: delta1.sqrt(), gamma, s })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CubeState {
    White,
    Neutral,
    Black,
}

impl CubeState {
    pub fn from_i8(v: i8) -> CubeState {
        match v.signum() {
            1 => CubeState::Black,
            -1 => CubeState::White,
            _ => CubeState::Neutral,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateProbabilities {
    pub white: f64,
    pub black: f64,
    pub neutral: f64,
}

/// Cube-state law for a cube of volume `δ³` under unit-intensity marks.
pub fn state_probabilities(p: f64, delta: f64) -> StateProbabilities {
    let v = delta.powi(3);
    StateProbabilities {
        white: -(-v * (1.0 - p)).exp_m1(),
        black: (-v * (1.0 - p)).exp() * -(-v * p).exp_m1(),
        neutral: (-v).exp(),
    }
}

/// Cube states on a torus: `+1` black, `-1` white, `0` neutral.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteConfig {
    pub delta: f64,
    pub lambda: f64,
    pub period: f64,
    /// `(nx, ny, nt)`; cube `(i, j, k)` is `Q_δ((iδ, jδ)) × [kδ, (k+1)δ]`.
    pub grid_dims: (usize, usize, usize),
    /// Index `(k * ny + j) * nx + i`.
    pub states: Vec<i8>,
}

impl DiscreteConfig {
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        let (nx, ny, _) = self.grid_dims;
        (k * ny + j) * nx + i
    }

    pub fn state(&self, i: usize, j: usize, k: usize) -> CubeState {
        CubeState::from_i8(self.states[self.index(i, j, k)])
    }

    /// Counts of (white, neutral, black) cubes.
    pub fn counts(&self) -> (usize, usize, usize) {
        let mut c = (0, 0, 0);
        for &v in &self.states {
            match v {
                -1 => c.0 += 1,
                0 => c.1 += 1,
                _ => c.2 += 1,
            }
        }
        c
    }

    /// Cube containing a space-time point of the torus.
    pub fn cube_of(&self, z: Point2, t: f64) -> (usize, usize, usize) {
        let (nx, ny, nt) = self.grid_dims;
        let axis = |x: f64, n: usize| ((x / self.delta + 0.5).floor() as i64).rem_euclid(n as i64) as usize;
        let k = ((t / self.delta).ceil() as i64 - 1).clamp(0, nt as i64 - 1) as usize;
        (axis(z.x, nx), axis(z.y, ny), k)
    }
}

/// Assigns each δ-cube white if it holds a white leaf point, else black if it
/// holds a black one, else neutral.
pub fn discretize(proc: &LeafProcess, mesh: &MeshParams, lambda: f64) -> Result<DiscreteConfig> {
    let WindowSpec::Torus { period } = proc.window else {
        return Err(invalid("discretization needs a torus window"));
    };
    let delta = mesh.delta;
    let ratio = period / delta;
    if (ratio - ratio.round()).abs() > 1e-9 {
        return Err(invalid(format!("mesh {delta} does not divide the period {period}")));
    }
    if !(lambda > 0.0) {
        return Err(invalid(format!("lambda must be positive, got {lambda}")));
    }
    let n = ratio.round() as usize;
    let nt = ((lambda / delta) - 1e-9).ceil().max(1.0) as usize;
    let mut cfg = DiscreteConfig {
        delta,
        lambda,
        period,
        grid_dims: (n, n, nt),
        states: vec![0; n * n * nt],
    };
    for leaf in &proc.leaves {
        if !(0.0..=lambda).contains(&leaf.time) {
            return Err(invalid(format!("leaf {} at time {} lies outside [0, {lambda}]", leaf.id, leaf.time)));
        }
        let (i, j, k) = cfg.cube_of(leaf.center, leaf.time);
        let idx = cfg.index(i, j, k);
        let v = leaf.color.sign();
        if v < cfg.states[idx] || cfg.states[idx] == 0 {
            cfg.states[idx] = v;
        }
    }
    Ok(cfg)
}

/// One leaf per non-neutral cube, centered at the cube's grid point.
///
/// Black cubes give a leaf of side `1 - 2δ` at the upper time face; white cubes
/// give a leaf of side `1 + 2δ` one step earlier.
pub fn omega_process(cfg: &DiscreteConfig) -> LeafProcess {
    let (nx, ny, nt) = cfg.grid_dims;
    let d = cfg.delta;
    let mut leaves = Vec::new();
    for k in 0..nt {
        for j in 0..ny {
            for i in 0..nx {
                let w = cfg.states[cfg.index(i, j, k)];
                if w == 0 {
                    continue;
                }
                let wf = f64::from(w);
                let upper = (k + 1) as f64 * d;
                leaves.push(Leaf {
                    id: leaves.len() as u32,
                    center: Point2::new(i as f64 * d, j as f64 * d),
                    time: upper + (wf - 1.0) * d / 2.0,
                    color: if w > 0 { Color::Black } else { Color::White },
                    half_side: (1.0 - 2.0 * wf * d) / 2.0,
                });
            }
        }
    }
    LeafProcess::from_leaves(WindowSpec::Torus { period: cfg.period }, leaves)
}
