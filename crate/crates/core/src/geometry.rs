//! Axis-aligned squares, windows (rectangles and flat tori) and the planar
//! predicates used by the coloring and instability code.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn sub(self, other: Point2) -> Point2 {
        Point2::new(self.x - other.x, self.y - other.y)
    }

    pub fn add(self, other: Point2) -> Point2 {
        Point2::new(self.x + other.x, self.y + other.y)
    }

    pub fn sup_norm(self) -> f64 {
        self.x.abs().max(self.y.abs())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Closed or open membership.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Containment {
    Closed,
    Open,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Square {
    pub center: Point2,
    pub half_side: f64,
}

impl Square {
    pub fn new(center: Point2, half_side: f64) -> Self {
        debug_assert!(half_side >= 0.0);
        Self { center, half_side }
    }

    /// Unit square centered at `center`.
    pub fn unit(center: Point2) -> Self {
        Self::new(center, 0.5)
    }

    pub fn contains(&self, u: Point2, mode: Containment) -> bool {
        square_contains(self, u, mode)
    }

    /// Corners in counter-clockwise order starting bottom-left.
    pub fn corners(&self) -> [Point2; 4] {
        let (c, a) = (self.center, self.half_side);
        [
            Point2::new(c.x - a, c.y - a),
            Point2::new(c.x + a, c.y - a),
            Point2::new(c.x + a, c.y + a),
            Point2::new(c.x - a, c.y + a),
        ]
    }

    /// The four edges as closed segments (bottom, right, top, left).
    pub fn edges(&self) -> [Segment; 4] {
        let [bl, br, tr, tl] = self.corners();
        [
            Segment::new(bl, br),
            Segment::new(br, tr),
            Segment::new(tl, tr),
            Segment::new(bl, tl),
        ]
    }
}

pub fn square_contains(sq: &Square, u: Point2, mode: Containment) -> bool {
    let dx = (u.x - sq.center.x).abs();
    let dy = (u.y - sq.center.y).abs();
    match mode {
        Containment::Closed => dx <= sq.half_side && dy <= sq.half_side,
        Containment::Open => dx < sq.half_side && dy < sq.half_side,
    }
}

/// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        let r = Self { x0, x1, y0, y1 };
        if !(x0.is_finite() && x1.is_finite() && y0.is_finite() && y1.is_finite()) {
            return Err(invalid("rectangle bounds must be finite"));
        }
        if !(x1 > x0 && y1 > y0) {
            return Err(invalid(format!("rectangle {r:?} has non-positive extent")));
        }
        Ok(r)
    }

    /// `[0, w] x [0, h]`.
    pub fn sized(w: f64, h: f64) -> Result<Self> {
        Self::new(0.0, w, 0.0, h)
    }

    /// The square `Q_side(center)`.
    pub fn centered_square(center: Point2, side: f64) -> Result<Self> {
        let a = side / 2.0;
        Self::new(center.x - a, center.x + a, center.y - a, center.y + a)
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn expand(&self, m: f64) -> Rect {
        Rect { x0: self.x0 - m, x1: self.x1 + m, y0: self.y0 - m, y1: self.y1 + m }
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        other.x0 >= self.x0 && other.x1 <= self.x1 && other.y0 >= self.y0 && other.y1 <= self.y1
    }

    pub fn contains(&self, u: Point2) -> bool {
        u.x >= self.x0 && u.x <= self.x1 && u.y >= self.y0 && u.y <= self.y1
    }
}

/// Observation window: a plane rectangle, or the flat torus `[0, period)^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WindowSpec {
    Rectangle(Rect),
    Torus { period: f64 },
}

impl WindowSpec {
    pub fn rectangle(rect: Rect) -> Self {
        WindowSpec::Rectangle(rect)
    }

    /// A torus must be wider than two leaf sides so no leaf meets its own image.
    pub fn torus(period: f64) -> Result<Self> {
        if !(period.is_finite() && period > 2.0) {
            return Err(invalid(format!("torus period must exceed 2, got {period}")));
        }
        Ok(WindowSpec::Torus { period })
    }

    pub fn is_torus(&self) -> bool {
        matches!(self, WindowSpec::Torus { .. })
    }

    pub fn period(&self) -> Option<f64> {
        match self {
            WindowSpec::Torus { period } => Some(*period),
            WindowSpec::Rectangle(_) => None,
        }
    }

    /// The fundamental domain as a rectangle.
    pub fn bounds(&self) -> Rect {
        match *self {
            WindowSpec::Rectangle(r) => r,
            WindowSpec::Torus { period } => Rect { x0: 0.0, x1: period, y0: 0.0, y1: period },
        }
    }

    pub fn area(&self) -> f64 {
        self.bounds().area()
    }

    /// One coordinate of `a - b`, reduced to `(-period/2, period/2]` on a torus.
    #[inline]
    pub fn axis_delta(&self, a: f64, b: f64) -> f64 {
        let d = a - b;
        match *self {
            WindowSpec::Rectangle(_) => d,
            WindowSpec::Torus { period } => wrap_delta(d, period),
        }
    }

    #[inline]
    pub fn delta(&self, u: Point2, v: Point2) -> Point2 {
        Point2::new(self.axis_delta(u.x, v.x), self.axis_delta(u.y, v.y))
    }

    /// Canonical representative of a point (identity on rectangles).
    pub fn wrap(&self, u: Point2) -> Point2 {
        match *self {
            WindowSpec::Rectangle(_) => u,
            WindowSpec::Torus { period } => {
                let r = |a: f64| {
                    let m = a.rem_euclid(period);
                    // rem_euclid rounds tiny negatives up to `period` itself
                    if m >= period { 0.0 } else { m }
                };
                Point2::new(r(u.x), r(u.y))
            }
        }
    }
}

#[inline]
fn wrap_delta(d: f64, period: f64) -> f64 {
    let half = period / 2.0;
    let mut r = d - period * (d / period).round();
    if r <= -half {
        r += period;
    } else if r > half {
        r -= period;
    }
    r
}

/// Componentwise difference `u - v`, minimum image on a torus.
pub fn min_image_delta(u: Point2, v: Point2, w: &WindowSpec) -> Point2 {
    w.delta(u, v)
}

/// Membership of a spatial offset in the instability region: the Minkowski sum of
/// `Q_{2 delta0}(o)` with the cross `({0,±1} x [-2,2]) ∪ ([-2,2] x {0,±1})`.
#[inline]
pub fn in_unstable_set(d: Point2, delta0: f64) -> bool {
    let reach = 2.0 + delta0;
    let near_line = |v: f64| v.abs() <= delta0 || (v - 1.0).abs() <= delta0 || (v + 1.0).abs() <= delta0;
    (near_line(d.x) && d.y.abs() <= reach) || (near_line(d.y) && d.x.abs() <= reach)
}

/// Closed axis-parallel segment; `a == b` encodes an isolated point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: Point2,
    pub b: Point2,
}

impl Segment {
    /// Endpoints are ordered so that `a <= b` coordinatewise.
    pub fn new(a: Point2, b: Point2) -> Self {
        if (a.x, a.y) <= (b.x, b.y) {
            Self { a, b }
        } else {
            Self { a: b, b: a }
        }
    }

    pub fn point(p: Point2) -> Self {
        Self { a: p, b: p }
    }

    pub fn is_point(&self) -> bool {
        self.a == self.b
    }

    pub fn is_horizontal(&self) -> bool {
        self.a.y == self.b.y
    }

    pub fn length(&self) -> f64 {
        (self.b.x - self.a.x) + (self.b.y - self.a.y)
    }

    /// Point at parameter `s` in `[0, 1]`.
    pub fn at(&self, s: f64) -> Point2 {
        Point2::new(self.a.x + s * (self.b.x - self.a.x), self.a.y + s * (self.b.y - self.a.y))
    }

    pub fn contains(&self, p: Point2) -> bool {
        p.x >= self.a.x && p.x <= self.b.x && p.y >= self.a.y && p.y <= self.b.y
    }
}

/// Intersection of two axis-parallel closed segments.
pub fn intersect_segments(s: &Segment, t: &Segment) -> Option<Segment> {
    let x0 = s.a.x.max(t.a.x);
    let x1 = s.b.x.min(t.b.x);
    let y0 = s.a.y.max(t.a.y);
    let y1 = s.b.y.min(t.b.y);
    if x0 > x1 || y0 > y1 {
        return None;
    }
    Some(Segment::new(Point2::new(x0, y0), Point2::new(x1, y1)))
}

/// `∂sq1 ∩ ∂sq2` as maximal segments plus isolated points, sorted.
pub fn boundary_overlap(sq1: &Square, sq2: &Square) -> Vec<Segment> {
    let mut pieces: Vec<Segment> = Vec::new();
    for e in sq1.edges() {
        for f in sq2.edges() {
            if let Some(piece) = intersect_segments(&e, &f) {
                pieces.push(piece);
            }
        }
    }
    let mut segments: Vec<Segment> = pieces.iter().copied().filter(|p| !p.is_point()).collect();
    sort_segments(&mut segments);
    segments.dedup();
    // Two edges of one square are never collinear, so each line carries at most
    // one overlap piece and no merging is needed.
    let mut points: Vec<Segment> = pieces
        .into_iter()
        .filter(|p| p.is_point() && !segments.iter().any(|s| s.contains(p.a)))
        .collect();
    sort_segments(&mut points);
    points.dedup();
    segments.extend(points);
    segments
}

fn sort_segments(v: &mut [Segment]) {
    v.sort_by(|s, t| {
        (s.a.x, s.a.y, s.b.x, s.b.y)
            .partial_cmp(&(t.a.x, t.a.y, t.b.x, t.b.y))
            .expect("finite coordinates")
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    fn torus10() -> WindowSpec {
        WindowSpec::torus(10.0).unwrap()
    }

    #[test]
    fn closed_and_open_membership() {
        let sq = Square::unit(Point2::ORIGIN);
        assert!(square_contains(&sq, Point2::new(0.5, 0.0), Containment::Closed));
        assert!(!square_contains(&sq, Point2::new(0.5, 0.0), Containment::Open));
        let far = Square::unit(Point2::new(1.0, 1.0));
        assert!(!square_contains(&far, Point2::ORIGIN, Containment::Closed));
    }

    #[test]
    fn min_image_examples() {
        let w = torus10();
        let d = min_image_delta(Point2::new(0.5, 0.0), Point2::new(9.5, 0.0), &w);
        assert_eq!(d, Point2::new(1.0, 0.0));
        let u = Point2::new(3.3, 7.1);
        assert_eq!(min_image_delta(u, u, &w), Point2::ORIGIN);
        let d = min_image_delta(Point2::new(3.0, 3.0), Point2::new(1.0, 1.0), &w);
        assert_eq!(d, Point2::new(2.0, 2.0));
        // half-open range (-P/2, P/2]
        assert_eq!(w.axis_delta(5.0, 0.0), 5.0);
        assert_eq!(w.axis_delta(0.0, 5.0), 5.0);
    }

    #[test]
    fn rectangle_window_uses_plain_difference() {
        let w = WindowSpec::rectangle(Rect::sized(10.0, 10.0).unwrap());
        let d = min_image_delta(Point2::new(0.5, 0.0), Point2::new(9.5, 0.0), &w);
        assert_eq!(d, Point2::new(-9.0, 0.0));
    }

    #[test]
    fn window_validation() {
        assert!(WindowSpec::torus(2.0).is_err());
        assert!(WindowSpec::torus(2.5).is_ok());
        assert!(Rect::new(0.0, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn unstable_set_examples() {
        assert!(in_unstable_set(Point2::new(1.0, 0.7), 0.1));
        assert!(!in_unstable_set(Point2::new(0.5, 0.5), 0.01));
        assert!(!in_unstable_set(Point2::new(2.2, 1.0), 0.05));
    }

    #[test]
    fn shared_edge_is_one_segment() {
        let a = Square::unit(Point2::ORIGIN);
        let b = Square::unit(Point2::new(1.0, 0.0));
        let ov = boundary_overlap(&a, &b);
        assert_eq!(ov.len(), 1);
        assert_eq!(ov[0], Segment::new(Point2::new(0.5, -0.5), Point2::new(0.5, 0.5)));
        assert_eq!(ov[0].length(), 1.0);
    }

    #[test]
    fn shifted_edge_is_half_segment() {
        let a = Square::unit(Point2::ORIGIN);
        let b = Square::unit(Point2::new(1.0, 0.5));
        let ov = boundary_overlap(&a, &b);
        assert_eq!(ov, vec![Segment::new(Point2::new(0.5, 0.0), Point2::new(0.5, 0.5))]);
    }

    #[test]
    fn distant_squares_share_nothing() {
        let a = Square::unit(Point2::ORIGIN);
        let b = Square::unit(Point2::new(3.0, 0.0));
        assert!(boundary_overlap(&a, &b).is_empty());
    }

    #[test]
    fn crossing_edges_give_two_points() {
        let a = Square::unit(Point2::ORIGIN);
        let b = Square::unit(Point2::new(0.3, 0.4));
        let ov = boundary_overlap(&a, &b);
        assert_eq!(ov.len(), 2);
        assert!(ov.iter().all(|s| s.is_point()));
        let near = |x: f64, y: f64| ov.iter().any(|s| (s.a.x - x).abs() < 1e-12 && (s.a.y - y).abs() < 1e-12);
        assert!(near(0.5, -0.1));
        assert!(near(-0.2, 0.5));
    }

    #[test]
    fn identical_squares_share_full_boundary() {
        let a = Square::unit(Point2::ORIGIN);
        let ov = boundary_overlap(&a, &a);
        assert_eq!(ov.len(), 4);
        let total: f64 = ov.iter().map(|s| s.length()).sum();
        assert_eq!(total, 4.0);
    }
}
