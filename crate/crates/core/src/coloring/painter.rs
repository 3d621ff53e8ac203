use crate::error::{invalid, Result};
use crate::geometry::{Point2, Rect, WindowSpec};

use super::{ColorField, CONFLICT, NO_LEAF, UNDEFINED_HEIGHT};

const UNPAINTED: u32 = u32::MAX;

/// First-write-wins rasterizer fed with leaves in increasing time.
///
/// Leaves arriving at the same time as the previous one form a tie group:
/// a pixel first written inside the group turns neutral if a later member of
/// the group with the other color also covers it.
pub struct Painter {
    window: WindowSpec,
    region: Rect,
    h: f64,
    nx: usize,
    ny: usize,
    xs: Vec<f64>,
    ys: Vec<f64>,
    values: Vec<i8>,
    winner: Vec<u32>,
    painted: Vec<(u32, f64)>,
    remaining: usize,
    row_remaining: Vec<u32>,
    last_time: f64,
    cols: Vec<usize>,
    rows: Vec<usize>,
}

impl Painter {
    pub fn new(window: WindowSpec, region: Rect, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(invalid(format!("resolution must be positive, got {h}")));
        }
        let bounds = window.bounds();
        if !bounds.contains_rect(&region) {
            return Err(invalid("region must lie inside the window"));
        }
        let nx = (region.width() / h).round() as usize;
        let ny = (region.height() / h).round() as usize;
        if nx == 0 || ny == 0 {
            return Err(invalid("region is smaller than one pixel"));
        }
        let xs = (0..nx).map(|i| region.x0 + (i as f64 + 0.5) * h).collect();
        let ys = (0..ny).map(|j| region.y0 + (j as f64 + 0.5) * h).collect();
        Ok(Self {
            window,
            region,
            h,
            nx,
            ny,
            xs,
            ys,
            values: vec![0; nx * ny],
            winner: vec![UNPAINTED; nx * ny],
            painted: Vec::new(),
            remaining: nx * ny,
            row_remaining: vec![nx as u32; ny],
            last_time: f64::NEG_INFINITY,
            cols: Vec::new(),
            rows: Vec::new(),
        })
    }

    pub fn is_complete(&self) -> bool {
        self.remaining == 0
    }

    pub fn remaining(&self) -> usize {
        self.remaining
    }

    /// Time of the most recently painted leaf.
    pub fn last_time(&self) -> f64 {
        self.last_time
    }

    /// Paints one leaf; `time` must not decrease between calls.
    pub fn paint_single(&mut self, id: u32, center: Point2, half: f64, sign: i8, time: f64) {
        debug_assert!(time >= self.last_time);
        let tie = time == self.last_time;
        self.last_time = time;
        let mut cols = std::mem::take(&mut self.cols);
        let mut rows = std::mem::take(&mut self.rows);
        select(&self.window, &self.xs, self.region.x0, self.h, center.x, half, &mut cols);
        select(&self.window, &self.ys, self.region.y0, self.h, center.y, half, &mut rows);
        if !cols.is_empty() && !rows.is_empty() {
            let seq = self.painted.len() as u32;
            self.painted.push((id, time));
            for &j in &rows {
                if !tie && self.row_remaining[j] == 0 {
                    continue;
                }
                let row = j * self.nx;
                for &i in &cols {
                    let p = row + i;
                    let w = self.winner[p];
                    if w == UNPAINTED {
                        self.winner[p] = seq;
                        self.values[p] = sign;
                        self.remaining -= 1;
                        self.row_remaining[j] -= 1;
                    } else if tie && self.values[p] != sign && self.painted[w as usize].1 == time {
                        self.values[p] = 0;
                    }
                }
            }
        }
        self.cols = cols;
        self.rows = rows;
    }

    pub fn into_field(self, with_heights: bool) -> ColorField {
        let leaf_ids: Vec<u32> = self
            .winner
            .iter()
            .zip(&self.values)
            .map(|(&w, &v)| match (w, v) {
                (UNPAINTED, _) => NO_LEAF,
                (_, 0) => CONFLICT,
                (w, _) => self.painted[w as usize].0,
            })
            .collect();
        let heights = with_heights.then(|| {
            self.winner
                .iter()
                .zip(&self.values)
                .map(|(&w, &v)| if w == UNPAINTED || v == 0 { UNDEFINED_HEIGHT } else { self.painted[w as usize].1 })
                .collect()
        });
        ColorField {
            region: self.region,
            h: self.h,
            nx: self.nx,
            ny: self.ny,
            values: self.values,
            heights,
            leaf_ids: Some(leaf_ids),
        }
    }
}

/// Pixel indices along one axis whose centers satisfy the closed covering test.
fn select(window: &WindowSpec, centers: &[f64], origin: f64, h: f64, c: f64, half: f64, out: &mut Vec<usize>) {
    out.clear();
    let n = centers.len() as i64;
    let images: &[f64] = match window {
        WindowSpec::Torus { period } => &[-*period, 0.0, *period],
        WindowSpec::Rectangle(_) => &[0.0],
    };
    for &shift in images {
        let cc = c + shift;
        let lo = (((cc - half - origin) / h - 0.5).floor() as i64 - 1).max(0);
        let hi = (((cc + half - origin) / h - 0.5).ceil() as i64 + 1).min(n - 1);
        for i in lo..=hi {
            if window.axis_delta(centers[i as usize], c).abs() <= half {
                out.push(i as usize);
            }
        }
    }
    if images.len() > 1 {
        out.sort_unstable();
        out.dedup();
    }
}
