//! Uniform-grid spatial hash over leaf centers for point queries.

use crate::geometry::{Containment, Point2, WindowSpec};
use crate::process::Leaf;

/// Outcome of a visibility query at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Hit {
    Uncovered,
    /// Several leaves of different colors share the minimal time.
    Conflict { time: f64 },
    /// Position in the leaf slice of the earliest covering leaf.
    Leaf { index: usize, time: f64 },
}

impl Hit {
    pub fn height(&self) -> f64 {
        match *self {
            Hit::Uncovered | Hit::Conflict { .. } => crate::coloring::UNDEFINED_HEIGHT,
            Hit::Leaf { time, .. } => time,
        }
    }
}

/// Closed or open containment of `u` in a leaf, using the minimum image on a torus.
#[inline]
pub fn leaf_covers(window: &WindowSpec, leaf: &Leaf, u: Point2, mode: Containment) -> bool {
    let dx = window.axis_delta(u.x, leaf.center.x).abs();
    let dy = window.axis_delta(u.y, leaf.center.y).abs();
    match mode {
        Containment::Closed => dx <= leaf.half_side && dy <= leaf.half_side,
        Containment::Open => dx < leaf.half_side && dy < leaf.half_side,
    }
}

/// Earliest closed-covering leaf by linear scan (leaves sorted by time).
pub fn scan_hit(window: &WindowSpec, leaves: &[Leaf], u: Point2) -> Hit {
    let mut found: Option<(usize, f64)> = None;
    let mut conflict = false;
    for (i, l) in leaves.iter().enumerate() {
        if let Some((w, t)) = found {
            if l.time > t {
                break;
            }
            if leaf_covers(window, l, u, Containment::Closed) && l.color != leaves[w].color {
                conflict = true;
            }
        } else if leaf_covers(window, l, u, Containment::Closed) {
            found = Some((i, l.time));
        }
    }
    match found {
        None => Hit::Uncovered,
        Some((_, time)) if conflict => Hit::Conflict { time },
        Some((index, time)) => Hit::Leaf { index, time },
    }
}

pub struct LeafIndex<'a> {
    window: WindowSpec,
    leaves: &'a [Leaf],
    origin: Point2,
    cell: f64,
    nx: usize,
    ny: usize,
    reach: f64,
    reach_cells: i64,
    cells: Vec<Vec<u32>>,
}

impl<'a> LeafIndex<'a> {
    /// `leaves` must be sorted by time; each cell keeps them in that order.
    pub fn new(window: WindowSpec, leaves: &'a [Leaf]) -> Self {
        let reach = leaves.iter().map(|l| l.half_side).fold(0.5, f64::max);
        let min_cell = (2.0 * reach).max(1.0);
        let (origin, cell, nx, ny) = match window {
            WindowSpec::Torus { period } => {
                let n = ((period / min_cell).floor() as usize).max(1);
                (Point2::ORIGIN, period / n as f64, n, n)
            }
            WindowSpec::Rectangle(_) => {
                let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
                for l in leaves {
                    x0 = x0.min(l.center.x);
                    y0 = y0.min(l.center.y);
                    x1 = x1.max(l.center.x);
                    y1 = y1.max(l.center.y);
                }
                if leaves.is_empty() {
                    (x0, y0, x1, y1) = (0.0, 0.0, 0.0, 0.0);
                }
                let nx = ((x1 - x0) / min_cell).floor() as usize + 1;
                let ny = ((y1 - y0) / min_cell).floor() as usize + 1;
                (Point2::new(x0, y0), min_cell, nx, ny)
            }
        };
        let mut cells = vec![Vec::new(); nx * ny];
        let mut idx = Self {
            window,
            leaves,
            origin,
            cell,
            nx,
            ny,
            reach,
            reach_cells: (reach / cell).ceil() as i64,
            cells: Vec::new(),
        };
        for (i, l) in leaves.iter().enumerate() {
            let (cx, cy) = idx.cell_of(l.center);
            let (cx, cy) = (cx.clamp(0, nx as i64 - 1), cy.clamp(0, ny as i64 - 1));
            cells[cy as usize * nx + cx as usize].push(i as u32);
        }
        idx.cells = cells;
        idx
    }

    pub fn leaves(&self) -> &'a [Leaf] {
        self.leaves
    }

    fn cell_of(&self, u: Point2) -> (i64, i64) {
        let u = self.window.wrap(u);
        let cx = ((u.x - self.origin.x) / self.cell).floor() as i64;
        let cy = ((u.y - self.origin.y) / self.cell).floor() as i64;
        match self.window {
            WindowSpec::Torus { .. } => (cx.min(self.nx as i64 - 1), cy.min(self.ny as i64 - 1)),
            WindowSpec::Rectangle(_) => (cx, cy),
        }
    }

    /// Cells whose leaves can reach `u`, each listed once.
    fn neighborhood(&self, u: Point2, radius: f64) -> impl Iterator<Item = &[u32]> + '_ {
        let (cx, cy) = self.cell_of(u);
        let r = if radius <= self.reach { self.reach_cells } else { (radius / self.cell).ceil() as i64 };
        let torus = self.window.is_torus();
        let axis = move |c: i64, n: usize| -> Vec<usize> {
            let mut out: Vec<usize> = (c - r..=c + r)
                .filter_map(|k| {
                    if torus {
                        Some(k.rem_euclid(n as i64) as usize)
                    } else if (0..n as i64).contains(&k) {
                        Some(k as usize)
                    } else {
                        None
                    }
                })
                .collect();
            out.sort_unstable();
            out.dedup();
            out
        };
        let xs = axis(cx, self.nx);
        let ys = axis(cy, self.ny);
        ys.into_iter()
            .flat_map(move |j| xs.clone().into_iter().map(move |i| self.cells[j * self.nx + i].as_slice()))
    }

    /// Same result as [`scan_hit`] over all leaves.
    pub fn hit(&self, u: Point2) -> Hit {
        let mut best: Option<(usize, f64)> = None;
        let mut conflict = false;
        for cell in self.neighborhood(u, self.reach) {
            for &k in cell {
                let l = &self.leaves[k as usize];
                if matches!(best, Some((_, t)) if l.time > t) {
                    break;
                }
                if leaf_covers(&self.window, l, u, Containment::Closed) {
                    merge_hit(&mut best, &mut conflict, self.leaves, k as usize);
                }
            }
        }
        match best {
            None => Hit::Uncovered,
            Some((_, time)) if conflict => Hit::Conflict { time },
            Some((index, time)) => Hit::Leaf { index, time },
        }
    }

    /// Indices of all leaves containing `u`, in time order.
    pub fn covering(&self, u: Point2, mode: Containment) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .neighborhood(u, self.reach)
            .flat_map(|c| c.iter().map(|&k| k as usize))
            .filter(|&k| leaf_covers(&self.window, &self.leaves[k], u, mode))
            .collect();
        out.sort_unstable();
        out
    }

    /// Indices of leaves whose centers lie within sup-distance `r` of `u`, in time order.
    pub fn near(&self, u: Point2, r: f64) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .neighborhood(u, r)
            .flat_map(|c| c.iter().map(|&k| k as usize))
            .filter(|&k| self.window.delta(self.leaves[k].center, u).sup_norm() <= r)
            .collect();
        out.sort_unstable();
        out
    }
}

impl LeafIndex<'_> {
    /// Whether some leaf with time at most `until` has its boundary within
    /// sup-distance `eps` of `u`.
    pub fn boundary_near(&self, u: Point2, eps: f64, until: f64) -> bool {
        for cell in self.neighborhood(u, self.reach + eps) {
            for &k in cell {
                let l = &self.leaves[k as usize];
                if l.time > until {
                    break;
                }
                if (self.window.delta(u, l.center).sup_norm() - l.half_side).abs() <= eps {
                    return true;
                }
            }
        }
        false
    }
}

/// Merges a covering leaf found in another cell into the running minimum.
fn merge_hit(best: &mut Option<(usize, f64)>, conflict: &mut bool, leaves: &[Leaf], k: usize) {
    let l = &leaves[k];
    match *best {
        None => *best = Some((k, l.time)),
        Some((b, t)) => {
            if l.time < t {
                *best = Some((k, l.time));
                *conflict = false;
            } else if l.time == t && l.color != leaves[b].color {
                *conflict = true;
            }
        }
    }
}
