//! The dead leaves coloring: point queries, rasterization and visibility.

mod export;
mod painter;
mod visibility;

pub use export::{write_matrix, write_ppm, write_svg};
pub use painter::Painter;
pub use visibility::{
    boundary_visible, boundary_visible_among, boundary_visible_filtered, boundary_visible_indexed,
    boundary_visible_via,
};

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point2, Rect};
use crate::index::{scan_hit, Hit, LeafIndex};
use crate::process::LeafProcess;

/// Height of an uncovered point or of a tie between colors.
pub const UNDEFINED_HEIGHT: f64 = -2.0;
/// Pixel id with no covering leaf.
pub const NO_LEAF: u32 = u32::MAX;
/// Pixel id where tied leaves of both colors meet.
pub const CONFLICT: u32 = u32::MAX - 1;

/// Coloring sampled at pixel centers `(x0 + (i + 1/2) h, y0 + (j + 1/2) h)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColorField {
    pub region: Rect,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
    /// Row-major from the bottom row: pixel `(i, j)` is at `j * nx + i`.
    pub values: Vec<i8>,
    pub heights: Option<Vec<f64>>,
    pub leaf_ids: Option<Vec<u32>>,
}

impl ColorField {
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.values[j * self.nx + i]
    }

    pub fn pixel_center(&self, i: usize, j: usize) -> Point2 {
        Point2::new(
            self.region.x0 + (i as f64 + 0.5) * self.h,
            self.region.y0 + (j as f64 + 0.5) * self.h,
        )
    }

    pub fn same_grid(&self, other: &ColorField) -> bool {
        self.region == other.region && self.h == other.h && self.nx == other.nx && self.ny == other.ny
    }

    /// Reassigns colors from the stored winning leaf ids (ties stay neutral).
    pub fn recolor(&self, color_of: impl Fn(u32) -> i8) -> ColorField {
        let ids = self.leaf_ids.as_ref().expect("recolor needs leaf ids");
        let values = ids
            .iter()
            .map(|&id| if id == NO_LEAF || id == CONFLICT { 0 } else { color_of(id) })
            .collect();
        ColorField {
            region: self.region,
            h: self.h,
            nx: self.nx,
            ny: self.ny,
            values,
            heights: self.heights.clone(),
            leaf_ids: self.leaf_ids.clone(),
        }
    }

    /// Pixels whose centers lie in the closed rectangle `r`, as a field of its own.
    pub fn sub_field(&self, r: Rect) -> ColorField {
        let cols: Vec<usize> = (0..self.nx).filter(|&i| {
            let x = self.pixel_center(i, 0).x;
            r.x0 <= x && x <= r.x1
        }).collect();
        let rows: Vec<usize> = (0..self.ny).filter(|&j| {
            let y = self.pixel_center(0, j).y;
            r.y0 <= y && y <= r.y1
        }).collect();
        fn pick<T: Copy>(v: &[T], rows: &[usize], cols: &[usize], nx: usize) -> Vec<T> {
            rows.iter().flat_map(|&j| cols.iter().map(move |&i| v[j * nx + i])).collect()
        }
        let (i0, j0) = (cols.first().copied().unwrap_or(0), rows.first().copied().unwrap_or(0));
        ColorField {
            region: Rect {
                x0: self.region.x0 + i0 as f64 * self.h,
                x1: self.region.x0 + (i0 + cols.len()) as f64 * self.h,
                y0: self.region.y0 + j0 as f64 * self.h,
                y1: self.region.y0 + (j0 + rows.len()) as f64 * self.h,
            },
            h: self.h,
            nx: cols.len(),
            ny: rows.len(),
            values: pick(&self.values, &rows, &cols, self.nx),
            heights: self.heights.as_ref().map(|v| pick(v, &rows, &cols, self.nx)),
            leaf_ids: self.leaf_ids.as_ref().map(|v| pick(v, &rows, &cols, self.nx)),
        }
    }

    /// Same grid with every color negated.
    pub fn negated(&self) -> ColorField {
        ColorField { values: self.values.iter().map(|v| -v).collect(), ..self.clone() }
    }

    pub fn count(&self, v: i8) -> usize {
        self.values.iter().filter(|&&x| x == v).count()
    }
}

/// Time of the first leaf whose closed square contains `u`, or `-2` if
/// uncovered or if the earliest covering leaves disagree in color.
pub fn height_at(proc: &LeafProcess, u: Point2) -> f64 {
    scan_hit(&proc.window, &proc.leaves, u).height()
}

/// `+1`/`-1` for the first covering leaf, `0` where the height is undefined.
pub fn color_at(proc: &LeafProcess, u: Point2) -> i8 {
    hit_color(proc, scan_hit(&proc.window, &proc.leaves, u))
}

fn hit_color(proc: &LeafProcess, hit: Hit) -> i8 {
    match hit {
        Hit::Leaf { index, .. } => proc.leaves[index].color.sign(),
        _ => 0,
    }
}

/// Painter's-algorithm rasterization; stops once every pixel is decided.
pub fn rasterize(proc: &LeafProcess, region: Rect, h: f64) -> Result<ColorField> {
    Ok(paint(proc, region, h)?.into_field(true))
}

pub(crate) fn paint(proc: &LeafProcess, region: Rect, h: f64) -> Result<Painter> {
    let mut painter = Painter::new(proc.window, region, h)?;
    for l in &proc.leaves {
        if painter.is_complete() && l.time > painter.last_time() {
            break;
        }
        painter.paint_single(l.id, l.center, l.half_side, l.color.sign(), l.time);
    }
    Ok(painter)
}

/// Pixel-by-pixel evaluation through the spatial index, parallel over rows.
pub fn rasterize_by_query(proc: &LeafProcess, region: Rect, h: f64) -> Result<ColorField> {
    let grid = Painter::new(proc.window, region, h)?.into_field(false);
    let index = LeafIndex::new(proc.window, &proc.leaves);
    let rows: Vec<Vec<(i8, u32, f64)>> = (0..grid.ny)
        .into_par_iter()
        .map(|j| {
            (0..grid.nx)
                .map(|i| {
                    let hit = index.hit(grid.pixel_center(i, j));
                    let id = match hit {
                        Hit::Uncovered => NO_LEAF,
                        Hit::Conflict { .. } => CONFLICT,
                        Hit::Leaf { index, .. } => proc.leaves[index].id,
                    };
                    (hit_color(proc, hit), id, hit.height())
                })
                .collect()
        })
        .collect();
    let flat: Vec<_> = rows.into_iter().flatten().collect();
    Ok(ColorField {
        values: flat.iter().map(|t| t.0).collect(),
        leaf_ids: Some(flat.iter().map(|t| t.1).collect()),
        heights: Some(flat.iter().map(|t| t.2).collect()),
        ..grid
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub covered: bool,
    pub uncovered_pixel_count: usize,
    /// `(i, j)` of the first neutral pixel in row-major order.
    pub first_uncovered: Option<(usize, usize)>,
}

pub fn coverage(proc: &LeafProcess, region: Rect, h: f64) -> Result<CoverageReport> {
    Ok(coverage_of(&rasterize(proc, region, h)?))
}

pub fn coverage_of(field: &ColorField) -> CoverageReport {
    let count = field.count(0);
    let first = field.values.iter().position(|&v| v == 0).map(|p| (p % field.nx, p / field.nx));
    CoverageReport { covered: count == 0, uncovered_pixel_count: count, first_uncovered: first }
}

/// Ids of leaves winning at least one pixel.
pub fn visible_leaves(proc: &LeafProcess, region: Rect, h: f64) -> Result<BTreeSet<u32>> {
    let field = rasterize(proc, region, h)?;
    Ok(field
        .leaf_ids
        .unwrap_or_default()
        .into_iter()
        .filter(|&id| id != NO_LEAF && id != CONFLICT)
        .collect())
}

/// Whether `a >= b` at every pixel.
pub fn black_dominates(a: &ColorField, b: &ColorField) -> Result<bool> {
    if !a.same_grid(b) {
        return Err(Error::GridMismatch(format!(
            "{}x{} at h={} vs {}x{} at h={}",
            a.nx, a.ny, a.h, b.nx, b.ny, b.h
        )));
    }
    Ok(a.values.iter().zip(&b.values).all(|(x, y)| x >= y))
}
