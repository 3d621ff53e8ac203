//! Boundary visibility between two leaves.
//!
//! `x` is boundary-visible from `x'` when a corner `P0` of `Q(z')` lies in the
//! closed square `Q(z)` and some point `P` of `∂Q(z') ∩ ∂Q(z)` has height
//! `t_x` with respect to the leaves whose open squares contain `P0`. Along a
//! shared segment that height is piecewise constant with breakpoints at the
//! edges of those leaves, so breakpoints and the midpoints between them are
//! enough to decide the predicate.

use crate::geometry::{boundary_overlap, intersect_segments, Containment, Point2, Segment, Square, WindowSpec};
use crate::index::LeafIndex;
use crate::process::{Leaf, LeafProcess};

/// Evaluates the predicate with every leaf of `proc` as a candidate occluder.
pub fn boundary_visible(proc: &LeafProcess, x: &Leaf, xp: &Leaf) -> bool {
    boundary_visible_among(&proc.window, &proc.leaves, x, xp)
}

/// Evaluates the predicate in the configuration formed by `leaves`.
pub fn boundary_visible_among(window: &WindowSpec, leaves: &[Leaf], x: &Leaf, xp: &Leaf) -> bool {
    evaluate(window, x, xp, ALL_CORNERS, None, |_| leaves.iter())
}

/// Same as [`boundary_visible_among`] over the indexed leaves, touching only nearby ones.
pub fn boundary_visible_indexed(index: &LeafIndex<'_>, window: &WindowSpec, x: &Leaf, xp: &Leaf) -> bool {
    boundary_visible_filtered(index, window, x, xp, |_| true)
}

/// Indexed evaluation in the sub-configuration of leaves accepted by `keep`.
pub fn boundary_visible_filtered(
    index: &LeafIndex<'_>,
    window: &WindowSpec,
    x: &Leaf,
    xp: &Leaf,
    keep: impl Fn(&Leaf) -> bool,
) -> bool {
    let leaves = index.leaves();
    evaluate(window, x, xp, ALL_CORNERS, None, |p0| {
        index
            .covering(p0, Containment::Open)
            .into_iter()
            .map(move |k| &leaves[k])
            .filter(|l| keep(l))
    })
}

/// Restricted form: only corner `corner` of `Q(z')` (counter-clockwise from
/// bottom-left) and only points on edge `edge` of `Q(z')` (bottom, right, top, left).
pub fn boundary_visible_via(
    window: &WindowSpec,
    leaves: &[Leaf],
    x: &Leaf,
    xp: &Leaf,
    corner: usize,
    edge: usize,
) -> bool {
    evaluate(window, x, xp, &[corner], Some(edge), |_| leaves.iter())
}

const ALL_CORNERS: &[usize] = &[0, 1, 2, 3];

struct Occluder {
    square: Square,
    time: f64,
    sign: i8,
}

fn evaluate<'a, I>(
    window: &WindowSpec,
    x: &Leaf,
    xp: &Leaf,
    corners: &[usize],
    edge: Option<usize>,
    candidates: impl Fn(Point2) -> I,
) -> bool
where
    I: Iterator<Item = &'a Leaf>,
{
    // Coordinates relative to the center of x'.
    let local = |c: Point2| window.delta(c, xp.center);
    let qx = Square::new(local(x.center), x.half_side);
    let qxp = Square::new(Point2::ORIGIN, xp.half_side);
    let mut shared = boundary_overlap(&qx, &qxp);
    if let Some(e) = edge {
        let side = qxp.edges()[e];
        shared = shared.iter().filter_map(|s| intersect_segments(s, &side)).collect();
    }
    if shared.is_empty() {
        return false;
    }
    let all_corners = qxp.corners();
    for &c in corners {
        let p0 = all_corners[c];
        if !qx.contains(p0, Containment::Closed) {
            continue;
        }
        let p0_global = window.wrap(xp.center.add(p0));
        let phi: Vec<Occluder> = candidates(p0_global)
            .map(|l| Occluder { square: Square::new(local(l.center), l.half_side), time: l.time, sign: l.color.sign() })
            .filter(|o| o.square.contains(p0, Containment::Open))
            .collect();
        if shared.iter().any(|seg| probes(seg, &phi).into_iter().any(|p| height(&phi, p) == Some(x.time))) {
            return true;
        }
    }
    false
}

/// Earliest closed cover among the occluders, `None` when undefined.
fn height(phi: &[Occluder], p: Point2) -> Option<f64> {
    let mut best: Option<(f64, i8)> = None;
    let mut conflict = false;
    for o in phi.iter().filter(|o| o.square.contains(p, Containment::Closed)) {
        match best {
            Some((t, s)) if o.time == t => conflict |= o.sign != s,
            Some((t, _)) if o.time > t => {}
            _ => {
                best = Some((o.time, o.sign));
                conflict = false;
            }
        }
    }
    match best {
        Some((t, _)) if !conflict => Some(t),
        _ => None,
    }
}

/// Segment endpoints, occluder edge crossings, and midpoints between consecutive ones.
fn probes(seg: &Segment, phi: &[Occluder]) -> Vec<Point2> {
    if seg.is_point() {
        return vec![seg.a];
    }
    let horizontal = seg.is_horizontal();
    let (lo, hi) = if horizontal { (seg.a.x, seg.b.x) } else { (seg.a.y, seg.b.y) };
    let mut cuts = vec![lo, hi];
    for o in phi {
        let c = if horizontal { o.square.center.x } else { o.square.center.y };
        for e in [c - o.square.half_side, c + o.square.half_side] {
            if e > lo && e < hi {
                cuts.push(e);
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut params = cuts.clone();
    params.extend(cuts.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    params
        .into_iter()
        .map(|s| if horizontal { Point2::new(s, seg.a.y) } else { Point2::new(seg.a.x, s) })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Rect;
    use crate::process::Color;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn window() -> WindowSpec {
        WindowSpec::rectangle(Rect::new(-3.0, 3.0, -3.0, 3.0).unwrap())
    }

    fn leaf(id: u32, x: f64, y: f64, t: f64, c: Color) -> Leaf {
        Leaf::new(id, Point2::new(x, y), t, c)
    }

    /// One black square lower right and three overlapping white squares above
    /// it; only the earliest, right-most white square shows boundary to it.
    fn staircase() -> LeafProcess {
        LeafProcess::from_leaves(
            window(),
            vec![
                leaf(0, 0.5, -0.5, 0.4, Color::Black),
                leaf(1, -0.25, 0.0, 0.3, Color::White),
                leaf(2, 0.0, 0.25, 0.2, Color::White),
                leaf(3, 0.25, -0.25, 0.1, Color::White),
            ],
        )
    }

    #[test]
    fn staircase_exposes_only_the_rightmost_white() {
        let proc = staircase();
        let black = *proc.leaf(0).unwrap();
        let visible: Vec<u32> = (1..=3)
            .filter(|&id| boundary_visible(&proc, proc.leaf(id).unwrap(), &black))
            .collect();
        assert_eq!(visible, vec![3]);
    }

    #[test]
    fn distant_squares_are_never_visible() {
        let proc = LeafProcess::from_leaves(
            window(),
            vec![leaf(0, 0.0, 0.0, 0.1, Color::Black), leaf(1, 1.2, 0.3, 0.2, Color::White)],
        );
        assert!(!boundary_visible(&proc, &proc.leaves[0], &proc.leaves[1]));
        assert!(!boundary_visible(&proc, &proc.leaves[1], &proc.leaves[0]));
    }

    #[test]
    fn seam_contact_on_torus() {
        let w = WindowSpec::torus(5.0).unwrap();
        let proc = LeafProcess::from_leaves(
            w,
            vec![leaf(0, 0.2, 1.0, 0.1, Color::Black), leaf(1, 4.6, 1.3, 0.2, Color::White)],
        );
        // x at 0.2 covers the top-right corner region of x' at 4.6 ≡ -0.4.
        assert!(boundary_visible(&proc, &proc.leaves[0], &proc.leaves[1]));
    }

    /// Dense sampling of every shared segment against a brute-force height.
    fn oracle(window: &WindowSpec, leaves: &[Leaf], x: &Leaf, xp: &Leaf) -> bool {
        let local = |c: Point2| window.delta(c, xp.center);
        let qx = Square::new(local(x.center), x.half_side);
        let qxp = Square::new(Point2::ORIGIN, xp.half_side);
        let shared = boundary_overlap(&qx, &qxp);
        for p0 in qxp.corners().into_iter().filter(|p| qx.contains(*p, Containment::Closed)) {
            let phi: Vec<&Leaf> = leaves
                .iter()
                .filter(|l| Square::new(local(l.center), l.half_side).contains(p0, Containment::Open))
                .collect();
            for seg in &shared {
                let n = if seg.is_point() { 1 } else { 10_000 };
                for k in 0..n {
                    let p = if n == 1 { seg.a } else { seg.at(k as f64 / (n - 1) as f64) };
                    let covering: Vec<&&Leaf> = phi
                        .iter()
                        .filter(|l| Square::new(local(l.center), l.half_side).contains(p, Containment::Closed))
                        .collect();
                    let tmin = covering.iter().map(|l| l.time).fold(f64::INFINITY, f64::min);
                    let at_min: Vec<_> = covering.iter().filter(|l| l.time == tmin).collect();
                    if !at_min.is_empty()
                        && at_min.iter().all(|l| l.color == at_min[0].color)
                        && tmin == x.time
                    {
                        return true;
                    }
                }
            }
        }
        false
    }

    #[test]
    fn agrees_with_dense_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let w = window();
        let mut positives = 0;
        for _ in 0..60 {
            let leaves: Vec<Leaf> = (0..10)
                .map(|i| {
                    let c = if rng.random::<bool>() { Color::Black } else { Color::White };
                    leaf(i, 2.0 * rng.random::<f64>() - 1.0, 2.0 * rng.random::<f64>() - 1.0, rng.random(), c)
                })
                .collect();
            let proc = LeafProcess::from_leaves(w, leaves);
            for a in 0..3 {
                for b in 0..proc.len() {
                    if a == b {
                        continue;
                    }
                    let (x, xp) = (&proc.leaves[a], &proc.leaves[b]);
                    let fast = boundary_visible(&proc, x, xp);
                    assert_eq!(fast, oracle(&w, &proc.leaves, x, xp));
                    let idx = LeafIndex::new(w, &proc.leaves);
                    assert_eq!(fast, boundary_visible_indexed(&idx, &w, x, xp));
                    positives += fast as usize;
                }
            }
        }
        assert!(positives > 20);
    }
}
