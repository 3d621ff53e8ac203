//! Component labeling of color fields and crossing detection.
//!
//! Black components use 4-adjacency and white ones 8-adjacency, so on a fully
//! two-colored rectangle exactly one of "black left-right crossing" and "white
//! bottom-top crossing" occurs. Neutral pixels belong to neither color.

use serde::{Deserialize, Serialize};

use crate::coloring::ColorField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Adjacency {
    Four,
    Eight,
}

impl Adjacency {
    /// Convention used for `color`: 4 for black, 8 for white.
    pub fn default_for(color: i8) -> Adjacency {
        if color > 0 {
            Adjacency::Four
        } else {
            Adjacency::Eight
        }
    }
}

#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n as u32).collect(), size: vec![1; n] }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn push(&mut self) -> usize {
        let k = self.parent.len();
        self.parent.push(k as u32);
        self.size.push(1);
        k
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let gp = self.parent[self.parent[x] as usize];
            self.parent[x] = gp;
            x = gp as usize;
        }
        x
    }

    /// Returns the surviving root.
    pub fn union(&mut self, a: usize, b: usize) -> usize {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return ra;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra as u32;
        self.size[ra] += self.size[rb];
        ra
    }

    /// Partition as sorted blocks, ordered by smallest member.
    pub fn blocks(&mut self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut slot = vec![usize::MAX; n];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for i in 0..n {
            let r = self.find(i);
            if slot[r] == usize::MAX {
                slot[r] = out.len();
                out.push(Vec::new());
            }
            out[slot[r]].push(i);
        }
        out
    }
}

/// Component labels: `0` off-color, `1..=n` numbered in row-major order of first pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelGrid {
    pub nx: usize,
    pub ny: usize,
    pub labels: Vec<u32>,
    /// `component_sizes[l - 1]` is the pixel count of label `l`.
    pub component_sizes: Vec<usize>,
}

impl LabelGrid {
    pub fn count(&self) -> usize {
        self.component_sizes.len()
    }

    pub fn largest(&self) -> usize {
        self.component_sizes.iter().copied().max().unwrap_or(0)
    }
}

/// Pixel-level union-find labeling.
pub fn label_components(field: &ColorField, color: i8, adjacency: Adjacency) -> LabelGrid {
    let (nx, ny) = (field.nx, field.ny);
    let mut uf = UnionFind::new(nx * ny);
    let on = |i: usize, j: usize| field.values[j * nx + i] == color;
    for j in 0..ny {
        for i in 0..nx {
            if !on(i, j) {
                continue;
            }
            let p = j * nx + i;
            if i > 0 && on(i - 1, j) {
                uf.union(p, p - 1);
            }
            if j > 0 {
                if on(i, j - 1) {
                    uf.union(p, p - nx);
                }
                if adjacency == Adjacency::Eight {
                    if i > 0 && on(i - 1, j - 1) {
                        uf.union(p, p - nx - 1);
                    }
                    if i + 1 < nx && on(i + 1, j - 1) {
                        uf.union(p, p - nx + 1);
                    }
                }
            }
        }
    }
    let mut labels = vec![0u32; nx * ny];
    let mut root_label = vec![0u32; nx * ny];
    let mut sizes = Vec::new();
    for p in 0..nx * ny {
        if field.values[p] != color {
            continue;
        }
        let r = uf.find(p);
        if root_label[r] == 0 {
            sizes.push(0);
            root_label[r] = sizes.len() as u32;
        }
        labels[p] = root_label[r];
        sizes[root_label[r] as usize - 1] += 1;
    }
    LabelGrid { nx, ny, labels, component_sizes: sizes }
}

/// Components of one color built from maximal horizontal runs.
#[derive(Debug, Clone)]
pub struct RunComponents {
    /// Per component: pixel count, touches left, right, bottom, top.
    pub components: Vec<RunComponent>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunComponent {
    pub size: usize,
    pub left: bool,
    pub right: bool,
    pub bottom: bool,
    pub top: bool,
}

impl RunComponents {
    pub fn new(field: &ColorField, color: i8, adjacency: Adjacency) -> Self {
        Self::from_rows(field.nx, field.ny, |j| &field.values[j * field.nx..(j + 1) * field.nx], color, adjacency)
    }

    fn from_rows<'a>(
        nx: usize,
        ny: usize,
        row: impl Fn(usize) -> &'a [i8],
        color: i8,
        adjacency: Adjacency,
    ) -> Self {
        let slack = usize::from(adjacency == Adjacency::Eight);
        let mut uf = UnionFind::new(0);
        // (start, end inclusive, run id)
        let mut prev: Vec<(usize, usize, usize)> = Vec::new();
        let mut cur: Vec<(usize, usize, usize)> = Vec::new();
        let mut info: Vec<RunComponent> = Vec::new();
        for j in 0..ny {
            let r = row(j);
            cur.clear();
            let mut i = 0;
            let mut k = 0;
            while i < nx {
                if r[i] != color {
                    i += 1;
                    continue;
                }
                let start = i;
                while i < nx && r[i] == color {
                    i += 1;
                }
                let end = i - 1;
                let id = uf.push();
                info.push(RunComponent {
                    size: end - start + 1,
                    left: start == 0,
                    right: end == nx - 1,
                    bottom: j == 0,
                    top: j == ny - 1,
                });
                // Runs of the previous row overlapping [start - slack, end + slack].
                while k < prev.len() && prev[k].1 + slack < start {
                    k += 1;
                }
                let mut m = k;
                while m < prev.len() && prev[m].0 <= end + slack {
                    uf.union(id, prev[m].2);
                    m += 1;
                }
                cur.push((start, end, id));
            }
            std::mem::swap(&mut prev, &mut cur);
        }
        let mut slot = vec![usize::MAX; uf.len()];
        let mut components: Vec<RunComponent> = Vec::new();
        for (id, run) in info.iter().enumerate() {
            let root = uf.find(id);
            if slot[root] == usize::MAX {
                slot[root] = components.len();
                components.push(RunComponent::default());
            }
            let c = &mut components[slot[root]];
            c.size += run.size;
            c.left |= run.left;
            c.right |= run.right;
            c.bottom |= run.bottom;
            c.top |= run.top;
        }
        RunComponents { components }
    }

    pub fn horizontal(&self) -> bool {
        self.components.iter().any(|c| c.left && c.right)
    }

    pub fn vertical(&self) -> bool {
        self.components.iter().any(|c| c.bottom && c.top)
    }

    pub fn largest(&self) -> usize {
        self.components.iter().map(|c| c.size).max().unwrap_or(0)
    }
}

/// Some component of `color` meets both the first and last pixel column.
pub fn horizontal_crossing(field: &ColorField, color: i8, adjacency: Adjacency) -> bool {
    RunComponents::new(field, color, adjacency).horizontal()
}

/// Some component of `color` meets both the bottom and top pixel row.
pub fn vertical_crossing(field: &ColorField, color: i8, adjacency: Adjacency) -> bool {
    RunComponents::new(field, color, adjacency).vertical()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossingReport {
    pub black_horizontal: bool,
    pub white_vertical: bool,
    pub black_components: usize,
    pub largest_black: usize,
}

pub const CROSSING_CSV_HEADER: &str =
    "trial_id,seed,p,s,rho,h,black_h,white_v,n_black_components,largest_black";

impl CrossingReport {
    pub fn csv_row(&self, trial_id: u64, seed: u64, p: f64, s: f64, rho: f64, h: f64) -> String {
        format!(
            "{trial_id},{seed},{p},{s},{rho},{h},{},{},{},{}",
            u8::from(self.black_horizontal),
            u8::from(self.white_vertical),
            self.black_components,
            self.largest_black
        )
    }
}

/// Black horizontal crossing (4-adjacency) and white vertical crossing (8-adjacency).
pub fn crossing_report(field: &ColorField) -> CrossingReport {
    crossing_report_with(field, Adjacency::Four, Adjacency::Eight)
}

pub fn crossing_report_with(field: &ColorField, black: Adjacency, white: Adjacency) -> CrossingReport {
    let b = RunComponents::new(field, 1, black);
    let w = RunComponents::new(field, -1, white);
    CrossingReport {
        black_horizontal: b.horizontal(),
        white_vertical: w.vertical(),
        black_components: b.components.len(),
        largest_black: b.largest(),
    }
}

/// Transposed copy: pixel `(i, j)` moves to `(j, i)`.
pub fn transpose(field: &ColorField) -> ColorField {
    let (nx, ny) = (field.nx, field.ny);
    let mut values = vec![0i8; nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            values[i * ny + j] = field.values[j * nx + i];
        }
    }
    let r = field.region;
    ColorField {
        region: crate::geometry::Rect { x0: r.y0, x1: r.y1, y0: r.x0, y1: r.x1 },
        h: field.h,
        nx: ny,
        ny: nx,
        values,
        heights: None,
        leaf_ids: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::rasterize;
    use crate::geometry::{Point2, Rect, WindowSpec};
    use crate::process::{Color, Leaf, LeafProcess};
    use proptest::prelude::*;

    pub(crate) fn field_of(nx: usize, ny: usize, values: Vec<i8>) -> ColorField {
        ColorField {
            region: Rect::sized(nx as f64, ny as f64).unwrap(),
            h: 1.0,
            nx,
            ny,
            values,
            heights: None,
            leaf_ids: None,
        }
    }

    fn flood_fill(field: &ColorField, color: i8, adj: Adjacency) -> Vec<u32> {
        let (nx, ny) = (field.nx as i64, field.ny as i64);
        let mut labels = vec![0u32; field.values.len()];
        let mut next = 0;
        let nbrs: &[(i64, i64)] = match adj {
            Adjacency::Four => &[(1, 0), (-1, 0), (0, 1), (0, -1)],
            Adjacency::Eight => &[(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)],
        };
        for start in 0..field.values.len() {
            if field.values[start] != color || labels[start] != 0 {
                continue;
            }
            next += 1;
            let mut stack = vec![start];
            labels[start] = next;
            while let Some(p) = stack.pop() {
                let (i, j) = ((p as i64) % nx, (p as i64) / nx);
                for (di, dj) in nbrs {
                    let (a, b) = (i + di, j + dj);
                    if a < 0 || b < 0 || a >= nx || b >= ny {
                        continue;
                    }
                    let q = (b * nx + a) as usize;
                    if field.values[q] == color && labels[q] == 0 {
                        labels[q] = next;
                        stack.push(q);
                    }
                }
            }
        }
        labels
    }

    #[test]
    fn uniform_and_checkerboard() {
        let all = field_of(6, 4, vec![1; 24]);
        let g = label_components(&all, 1, Adjacency::Four);
        assert_eq!(g.component_sizes, vec![24]);
        let checker: Vec<i8> = (0..64).map(|p| if (p % 8 + p / 8) % 2 == 0 { 1 } else { -1 }).collect();
        let f = field_of(8, 8, checker);
        let g = label_components(&f, 1, Adjacency::Four);
        assert_eq!(g.count(), 32);
        assert!(g.component_sizes.iter().all(|&s| s == 1));
        assert_eq!(label_components(&f, 1, Adjacency::Eight).count(), 1);
    }

    #[test]
    fn crossing_trivial_cases() {
        let black = field_of(5, 5, vec![1; 25]);
        assert!(horizontal_crossing(&black, 1, Adjacency::Four));
        let r = crossing_report(&black);
        assert!(r.black_horizontal && !r.white_vertical);
        assert_eq!((r.black_components, r.largest_black), (1, 25));
        let white = field_of(5, 5, vec![-1; 25]);
        assert!(!horizontal_crossing(&white, 1, Adjacency::Four));
        let r = crossing_report(&white);
        assert!(!r.black_horizontal && r.white_vertical);
    }

    #[test]
    fn chain_of_three_black_leaves_crosses() {
        let w = WindowSpec::rectangle(Rect::new(0.0, 2.0, 0.0, 1.0).unwrap());
        let leaves = [0.3, 1.0, 1.7]
            .iter()
            .enumerate()
            .map(|(i, &x)| Leaf::new(i as u32, Point2::new(x, 0.5), 0.1 * (i + 1) as f64, Color::Black))
            .collect();
        let proc = LeafProcess::from_leaves(w, leaves);
        let f = rasterize(&proc, w.bounds(), 1.0 / 16.0).unwrap();
        assert!(horizontal_crossing(&f, 1, Adjacency::Four));
    }

    #[test]
    fn csv_row_layout() {
        let r = CrossingReport { black_horizontal: true, white_vertical: false, black_components: 3, largest_black: 40 };
        assert_eq!(r.csv_row(7, 42, 0.5, 16.0, 1.0, 0.0625), "7,42,0.5,16,1,0.0625,1,0,3,40");
        assert_eq!(CROSSING_CSV_HEADER.split(',').count(), 10);
    }

    fn random_field() -> impl Strategy<Value = ColorField> {
        (1usize..14, 1usize..14).prop_flat_map(|(nx, ny)| {
            proptest::collection::vec(prop_oneof![4 => Just(1i8), 4 => Just(-1i8), 1 => Just(0i8)], nx * ny)
                .prop_map(move |v| field_of(nx, ny, v))
        })
    }

    fn covered_field() -> impl Strategy<Value = ColorField> {
        (1usize..14, 1usize..14).prop_flat_map(|(nx, ny)| {
            proptest::collection::vec(prop_oneof![Just(1i8), Just(-1i8)], nx * ny)
                .prop_map(move |v| field_of(nx, ny, v))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(400))]

        #[test]
        fn union_find_matches_flood_fill(f in random_field()) {
            for color in [1i8, -1] {
                for adj in [Adjacency::Four, Adjacency::Eight] {
                    let g = label_components(&f, color, adj);
                    prop_assert_eq!(&g.labels, &flood_fill(&f, color, adj));
                    let runs = RunComponents::new(&f, color, adj);
                    prop_assert_eq!(runs.components.len(), g.count());
                    prop_assert_eq!(runs.largest(), g.largest());
                    prop_assert_eq!(g.component_sizes.iter().sum::<usize>(), f.count(color));
                }
            }
        }

        #[test]
        fn duality_on_covered_fields(f in covered_field()) {
            let r = crossing_report(&f);
            prop_assert!(r.black_horizontal != r.white_vertical);
        }

        #[test]
        fn recoloring_to_target_is_monotone(f in random_field(), k in any::<prop::sample::Index>()) {
            let before = horizontal_crossing(&f, 1, Adjacency::Four);
            let mut g = f.clone();
            let p = k.index(g.values.len());
            g.values[p] = 1;
            prop_assert!(!before || horizontal_crossing(&g, 1, Adjacency::Four));
        }

        #[test]
        fn transpose_swaps_directions(f in random_field()) {
            let t = transpose(&f);
            for color in [1i8, -1] {
                for adj in [Adjacency::Four, Adjacency::Eight] {
                    prop_assert_eq!(horizontal_crossing(&f, color, adj), vertical_crossing(&t, color, adj));
                }
            }
        }

        #[test]
        fn negation_swaps_colors(f in random_field()) {
            let n = f.negated();
            prop_assert_eq!(
                horizontal_crossing(&f, 1, Adjacency::Four),
                horizontal_crossing(&n, -1, Adjacency::Four)
            );
            prop_assert_eq!(
                vertical_crossing(&f, -1, Adjacency::Eight),
                vertical_crossing(&n, 1, Adjacency::Eight)
            );
        }
    }
}
