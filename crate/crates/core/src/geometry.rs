//! Planar predicates and circumdisk computations.
//!
//! Orientation and in-circle decisions go through Shewchuk's adaptive
//! predicates, so their signs are exact for any finite `f64` input. The one
//! predicate the `robust` crate does not cover (the sign of a dot product,
//! used to place a circumcenter relative to an edge) has a floating-point
//! filter with an exact rational fallback.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use robust::Coord;

use crate::error::{Error, Result};

/// Point index, equal to its timestamp. Indices start at 1.
pub type PointId = u32;

/// A point of the input sequence.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimedPoint {
    pub index: PointId,
    pub x: f64,
    pub y: f64,
}

impl TimedPoint {
    pub fn new(index: PointId, x: f64, y: f64) -> Self {
        TimedPoint { index, x, y }
    }

    #[inline]
    pub fn xy(&self) -> [f64; 2] {
        [self.x, self.y]
    }
}

/// Sign of a predicate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    #[inline]
    pub fn of(v: f64) -> Sign {
        if v > 0.0 {
            Sign::Positive
        } else if v < 0.0 {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    fn of_ordering(o: Ordering) -> Sign {
        match o {
            Ordering::Less => Sign::Negative,
            Ordering::Equal => Sign::Zero,
            Ordering::Greater => Sign::Positive,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }

    fn times(self, other: Sign) -> Sign {
        match (self, other) {
            (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
            (a, b) if a == b => Sign::Positive,
            _ => Sign::Negative,
        }
    }
}

/// One of the two sides of an edge. The front of edge `{a, b}` is the side to
/// the left of the segment directed from the lower-index endpoint to the
/// higher-index endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeSide {
    Front,
    Back,
}

impl EdgeSide {
    pub fn opposite(self) -> EdgeSide {
        match self {
            EdgeSide::Front => EdgeSide::Back,
            EdgeSide::Back => EdgeSide::Front,
        }
    }
}

/// Where a disk center lies relative to an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CenterSide {
    Front,
    Back,
    OnLine,
}

impl CenterSide {
    pub fn is(self, side: EdgeSide) -> bool {
        matches!(
            (self, side),
            (CenterSide::Front, EdgeSide::Front) | (CenterSide::Back, EdgeSide::Back)
        )
    }
}

/// Center of a disk: a finite point, or a direction for the halfplane
/// "disks" of convex hull facets.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Center {
    Finite([f64; 2]),
    AtInfinity([f64; 2]),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Disk {
    pub center: Center,
    /// `f64::INFINITY` exactly when the center is at infinity.
    pub radius: f64,
}

impl Disk {
    pub fn is_halfplane(&self) -> bool {
        matches!(self.center, Center::AtInfinity(_))
    }
}

#[inline]
fn c(p: [f64; 2]) -> Coord<f64> {
    Coord { x: p[0], y: p[1] }
}

/// Sign of twice the signed area of `pqr` (positive for counter-clockwise).
#[inline]
pub fn orient_xy(p: [f64; 2], q: [f64; 2], r: [f64; 2]) -> Sign {
    Sign::of(robust::orient2d(c(p), c(q), c(r)))
}

pub fn orient(p: &TimedPoint, q: &TimedPoint, r: &TimedPoint) -> Sign {
    orient_xy(p.xy(), q.xy(), r.xy())
}

/// Raw in-circle sign; positive iff `s` is inside the circle through `pqr`
/// when `pqr` is counter-clockwise.
#[inline]
pub fn in_circle_ccw_xy(p: [f64; 2], q: [f64; 2], r: [f64; 2], s: [f64; 2]) -> Sign {
    Sign::of(robust::incircle(c(p), c(q), c(r), c(s)))
}

/// Positive iff `s` lies strictly inside the circumcircle of `pqr`, whatever
/// the orientation of `pqr`.
pub fn in_circle(p: &TimedPoint, q: &TimedPoint, r: &TimedPoint, s: &TimedPoint) -> Result<Sign> {
    let o = orient(p, q, r);
    if o == Sign::Zero {
        return Err(Error::Degenerate("in_circle: collinear base triangle"));
    }
    let raw = in_circle_ccw_xy(p.xy(), q.xy(), r.xy(), s.xy());
    Ok(if o == Sign::Positive { raw } else { raw.flip() })
}

pub fn circumdisk_xy(a: [f64; 2], b: [f64; 2], cc: [f64; 2]) -> Result<Disk> {
    if orient_xy(a, b, cc) == Sign::Zero {
        return Err(Error::Degenerate("circumdisk: collinear points"));
    }
    // Fixed vertex order so every caller rounds the same way.
    let mut v = [a, b, cc];
    v.sort_by(|p, q| p[0].total_cmp(&q[0]).then(p[1].total_cmp(&q[1])));
    let [a, b, cc] = v;
    // Translate to `a` for accuracy.
    let bx = b[0] - a[0];
    let by = b[1] - a[1];
    let cx = cc[0] - a[0];
    let cy = cc[1] - a[1];
    let d = 2.0 * (bx * cy - by * cx);
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    let ux = (cy * b2 - by * c2) / d;
    let uy = (bx * c2 - cx * b2) / d;
    Ok(Disk {
        center: Center::Finite([a[0] + ux, a[1] + uy]),
        radius: ux.hypot(uy),
    })
}

pub fn circumdisk(p: &TimedPoint, q: &TimedPoint, r: &TimedPoint) -> Result<Disk> {
    circumdisk_xy(p.xy(), q.xy(), r.xy())
}

/// Degenerate circumdisk of a hull facet: the open halfplane on the
/// `outward` side of `pq`.
pub fn hull_halfplane_disk(p: &TimedPoint, q: &TimedPoint, outward: [f64; 2]) -> Disk {
    halfplane_disk_xy(p.xy(), q.xy(), outward)
}

pub(crate) fn halfplane_disk_xy(p: [f64; 2], q: [f64; 2], outward: [f64; 2]) -> Disk {
    // Normalise the direction to the unit normal of pq on the outward side.
    let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
    let len = dx.hypot(dy);
    let (mut nx, mut ny) = (-dy / len, dx / len);
    if nx * outward[0] + ny * outward[1] < 0.0 {
        nx = -nx;
        ny = -ny;
    }
    Disk {
        center: Center::AtInfinity([nx, ny]),
        radius: f64::INFINITY,
    }
}

/// Halfplane disk of the hull facet whose outer side is left of `p -> q`.
pub(crate) fn facet_disk_xy(p: [f64; 2], q: [f64; 2]) -> Disk {
    let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
    halfplane_disk_xy(p, q, [-dy, dx])
}

/// Radius of the smallest disk with both `p` and `q` on its boundary.
pub fn min_edge_radius(p: &TimedPoint, q: &TimedPoint) -> Result<f64> {
    if p.x == q.x && p.y == q.y {
        return Err(Error::Degenerate("min_edge_radius: coincident points"));
    }
    Ok(min_edge_radius_xy(p.xy(), q.xy()))
}

#[inline]
pub(crate) fn min_edge_radius_xy(p: [f64; 2], q: [f64; 2]) -> f64 {
    (q[0] - p[0]).hypot(q[1] - p[1]) / 2.0
}

/// Orders the endpoints of an edge by index, so the first one is the tail of
/// the directed segment that defines the front side.
#[inline]
pub fn edge_key(a: PointId, b: PointId) -> (PointId, PointId) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn side_of_sign(s: Sign) -> CenterSide {
    match s {
        Sign::Positive => CenterSide::Front,
        Sign::Negative => CenterSide::Back,
        Sign::Zero => CenterSide::OnLine,
    }
}

/// Classifies the center of `disk` relative to edge `{p, q}`. Finite centers
/// are classified exactly as stored, i.e. after rounding of the center.
pub fn center_side(p: &TimedPoint, q: &TimedPoint, disk: &Disk) -> CenterSide {
    let (lo, hi) = if p.index < q.index { (p, q) } else { (q, p) };
    match disk.center {
        Center::Finite(cen) => side_of_sign(orient_xy(lo.xy(), hi.xy(), cen)),
        Center::AtInfinity(dir) => {
            let (dx, dy) = (hi.x - lo.x, hi.y - lo.y);
            // Cross product of the edge direction with the center direction.
            side_of_sign(Sign::of(dx * dir[1] - dy * dir[0]))
        }
    }
}

/// Exact side of the circumcenter of triangle `(a, b, apex)` relative to the
/// directed line `a -> b`: `Positive` for left, `Negative` for right.
pub fn circumcenter_side_xy(a: [f64; 2], b: [f64; 2], apex: [f64; 2]) -> Sign {
    // The center lies on the apex side iff the angle at the apex is acute.
    orient_xy(a, b, apex).times(dot_sign(a, b, apex))
}

/// Exact sign of `(a - o) . (b - o)`.
pub fn dot_sign(a: [f64; 2], b: [f64; 2], o: [f64; 2]) -> Sign {
    let ax = a[0] - o[0];
    let ay = a[1] - o[1];
    let bx = b[0] - o[0];
    let by = b[1] - o[1];
    let d = ax * bx + ay * by;
    let mag = (ax * bx).abs() + (ay * by).abs();
    // Each difference carries relative error <= eps, each product and the
    // sum add one more rounding; 8 eps covers the lot with margin.
    let bound = 8.0 * f64::EPSILON * mag;
    if d > bound {
        return Sign::Positive;
    }
    if d < -bound {
        return Sign::Negative;
    }
    exact_dot_sign(a, b, o)
}

fn rat(v: f64) -> BigRational {
    BigRational::from_float(v).unwrap_or_else(|| BigRational::from_integer(BigInt::zero()))
}

fn exact_dot_sign(a: [f64; 2], b: [f64; 2], o: [f64; 2]) -> Sign {
    let (ox, oy) = (rat(o[0]), rat(o[1]));
    let ax = rat(a[0]) - &ox;
    let ay = rat(a[1]) - &oy;
    let bx = rat(b[0]) - &ox;
    let by = rat(b[1]) - &oy;
    let d = ax * bx + ay * by;
    if d.is_zero() {
        Sign::Zero
    } else if d.is_positive() {
        Sign::Positive
    } else {
        Sign::Negative
    }
}

/// Exact side of the circumcenter of `(e0, e1, apex)` relative to edge
/// `{e0, e1}` using the front/back convention.
pub fn circumcenter_side(e0: &TimedPoint, e1: &TimedPoint, apex: &TimedPoint) -> CenterSide {
    let (lo, hi) = if e0.index < e1.index { (e0, e1) } else { (e1, e0) };
    side_of_sign(circumcenter_side_xy(lo.xy(), hi.xy(), apex.xy()))
}

/// Side of point `r` relative to the edge `{p, q}` (front = left of the
/// lower-to-higher index direction).
pub fn point_side(p: &TimedPoint, q: &TimedPoint, r: [f64; 2]) -> CenterSide {
    let (lo, hi) = if p.index < q.index { (p, q) } else { (q, p) };
    side_of_sign(orient_xy(lo.xy(), hi.xy(), r))
}

#[allow(dead_code)]
pub(crate) fn cmp_f64(a: f64, b: f64) -> Sign {
    Sign::of_ordering(a.partial_cmp(&b).unwrap_or(Ordering::Equal))
}
