//! From coface lists to α-edge activity cuboids.
//!
//! For an edge `(a, b)` with `a < b` the windows where it is Delaunay form a
//! staircase in the `(i, j)` plane bounded by `i <= a` and `j >= b`. The
//! cofaces on either side tile that staircase with rectangles. For a focal
//! side `s` an α-ball centred on `s` exists iff the side-`s` coface is
//! centred on `s`, and then the admissible α form `[lo, r_s]` where `lo`
//! depends on the opposite coface. Intersecting the two tilings gives the
//! cuboids.

use web_time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{circumcenter_side_xy, min_edge_radius_xy, CenterSide, EdgeSide, PointId, Sign, TimedPoint};
use crate::registry::{CofaceList, EdgeCofaces, EdgeRegistry};
use crate::temporal::{enumerate_all, EnumStats, TriangleRecord};
use crate::delaunay::Tri;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    Record(u32),
    Dummy,
}

/// Inclusive window rectangle with the coface that owns it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub i_min: PointId,
    pub i_max: PointId,
    pub j_min: PointId,
    pub j_max: PointId,
    pub src: Source,
    /// Circumradius of the owning coface (+∞ for hull facets, unused for dummies).
    pub radius: f64,
    /// Side of the edge holding the coface's circumcenter.
    pub center: CenterSide,
}

impl Rect {
    pub fn intersect(&self, o: &Rect) -> Option<(PointId, PointId, PointId, PointId)> {
        let i0 = self.i_min.max(o.i_min);
        let i1 = self.i_max.min(o.i_max);
        let j0 = self.j_min.max(o.j_min);
        let j1 = self.j_max.min(o.j_max);
        (i0 <= i1 && j0 <= j1).then_some((i0, i1, j0, j1))
    }

}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct StairLists {
    /// Rectangles on the bottom boundary, left to right.
    pub bottom: Vec<Rect>,
    /// Remaining rectangles, all on the right boundary, bottom to top.
    pub right: Vec<Rect>,
    /// For each bottom rectangle, the right rectangle directly above it.
    pub above: Vec<Option<usize>>,
    /// For each right rectangle, the bottom rectangle directly to its left.
    pub left: Vec<Option<usize>>,
}

impl StairLists {
    pub fn len(&self) -> usize {
        self.bottom.len() + self.right.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = &Rect> {
        self.bottom.iter().chain(self.right.iter())
    }
}

/// One α-edge activity cuboid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cuboid {
    pub a: PointId,
    pub b: PointId,
    pub side: EdgeSide,
    pub i_min: PointId,
    pub i_max: PointId,
    pub j_min: PointId,
    pub j_max: PointId,
    pub alpha_lo: f64,
    /// `f64::INFINITY` for an unbounded range.
    pub alpha_hi: f64,
}

impl Cuboid {
    pub fn contains(&self, i: PointId, j: PointId, alpha: f64) -> bool {
        self.i_min <= i && i <= self.i_max && self.j_min <= j && j <= self.j_max && self.alpha_lo <= alpha && alpha <= self.alpha_hi
    }
}

/// Splits coface lists into the bottom and right lists of a staircase.
pub fn build_stair_lists(a: PointId, b: PointId, cll: &[Vec<Rect>]) -> Result<StairLists> {
    let corrupt = |m: &str| Err(Error::CorruptStaircase(format!("edge ({a}, {b}): {m}")));
    let mut bottom = Vec::new();
    let mut right = Vec::new();
    let (grounded, floating): (Vec<&Vec<Rect>>, Vec<&Vec<Rect>>) =
        cll.iter().filter(|l| !l.is_empty()).partition(|l| l[0].j_min == b);
    for l in &grounded {
        bottom.push(l[0]);
    }
    for l in grounded.iter().rev() {
        right.extend_from_slice(&l[1..]);
    }
    for l in &floating {
        right.extend_from_slice(l);
    }
    for w in bottom.windows(2) {
        if w[0].i_max >= w[1].i_min {
            return corrupt("bottom list not left to right");
        }
    }
    for w in right.windows(2) {
        if w[0].j_max >= w[1].j_min {
            return corrupt("right list not bottom to top");
        }
    }
    if right.iter().any(|r| r.i_max != a) {
        return corrupt("right-list rectangle off the right boundary");
    }
    if let (Some(last), Some(first)) = (bottom.last(), right.first()) {
        if last.i_max != a || first.j_min <= last.j_max {
            return corrupt("right list overlaps the bottom-right rectangle");
        }
    }
    Ok(StairLists { bottom, right, above: Vec::new(), left: Vec::new() })
}

/// Drops rectangles whose coface is not centred on `side`.
pub fn simplify_front(lists: &StairLists, side: EdgeSide) -> StairLists {
    StairLists {
        bottom: lists.bottom.iter().filter(|r| r.center.is(side)).copied().collect(),
        right: lists.right.iter().filter(|r| r.center.is(side)).copied().collect(),
        above: Vec::new(),
        left: Vec::new(),
    }
}

/// Merges the opposite-side rectangles centred away from the focal side
/// into one dummy anchored at the bottom-right corner; their lower α bound
/// is `r_min` regardless of the coface.
pub fn simplify_back(lists: &StairLists, focal: EdgeSide, a: PointId, b: PointId) -> Result<StairLists> {
    let behind = |r: &Rect| !r.center.is(focal);
    let nb = lists.bottom.iter().rev().take_while(|r| behind(r)).count();
    let nr = if nb > 0 { lists.right.iter().take_while(|r| behind(r)).count() } else { 0 };
    if nb + nr < 2 {
        return Ok(StairLists { bottom: lists.bottom.clone(), right: lists.right.clone(), ..Default::default() });
    }
    let keep_b = lists.bottom.len() - nb;
    let i_d = lists.bottom[keep_b].i_min;
    let j_d = if nr > 0 { lists.right[nr - 1].j_max } else { lists.bottom[keep_b..].iter().map(|r| r.j_max).max().unwrap() };
    let dummy = Rect { i_min: i_d, i_max: a, j_min: b, j_max: j_d, src: Source::Dummy, radius: f64::NAN, center: CenterSide::OnLine };
    for r in lists.bottom[..keep_b].iter().chain(lists.right[nr..].iter()) {
        if r.intersect(&dummy).is_some() {
            return Err(Error::CorruptStaircase(format!("edge ({a}, {b}): dummy partially covers {r:?}")));
        }
    }
    let mut bottom = lists.bottom[..keep_b].to_vec();
    bottom.push(dummy);
    Ok(StairLists { bottom, right: lists.right[nr..].to_vec(), ..Default::default() })
}

/// Fills the cross-list neighbour links.
pub fn link_neighbors(lists: &mut StairLists) {
    let right = &lists.right;
    let bottom = &lists.bottom;
    lists.above = bottom
        .iter()
        .map(|bt| {
            let row = bt.j_max + 1;
            let k = right.partition_point(|r| r.j_max < row);
            (k < right.len() && right[k].j_min <= row && right[k].i_min <= bt.i_max).then_some(k)
        })
        .collect();
    lists.left = right
        .iter()
        .map(|r| {
            let col = r.i_min.checked_sub(1)?;
            let k = bottom.partition_point(|bt| bt.i_max < col);
            (k < bottom.len() && bottom[k].i_min <= col && bottom[k].j_max >= r.j_min).then_some(k)
        })
        .collect();
}

/// α-range of an edge side for a focal coface and the opposite coface.
pub fn alpha_range(front: &Rect, back: &Rect, focal: EdgeSide, r_min: f64) -> Result<(f64, f64)> {
    if front.src == Source::Dummy || !front.center.is(focal) {
        return Err(Error::CorruptStaircase("focal coface not centred on its side".into()));
    }
    let lo = if back.src != Source::Dummy && back.center.is(focal) { back.radius } else { r_min };
    Ok((lo, front.radius))
}

/// Doubly linked order over front rectangles.
struct Chain {
    next: Vec<usize>,
    prev: Vec<usize>,
    head: usize,
}

const END: usize = usize::MAX;

impl Chain {
    fn new(order: Vec<usize>, m: usize) -> Chain {
        let mut next = vec![END; m];
        let mut prev = vec![END; m];
        for w in order.windows(2) {
            next[w[0]] = w[1];
            prev[w[1]] = w[0];
        }
        let head = order.first().copied().unwrap_or(END);
        Chain { next, prev, head }
    }

    fn remove(&mut self, x: usize) {
        let (p, n) = (self.prev[x], self.next[x]);
        if p == END {
            self.head = n;
        } else {
            self.next[p] = n;
        }
        if n != END {
            self.prev[n] = p;
        }
    }
}

/// Intersects the focal tiling with the opposite tiling by peeling the
/// opposite staircase one rectangle at a time from the left or the top.
pub fn intersect_to_cuboids(
    a: PointId,
    b: PointId,
    focal: EdgeSide,
    r_min: f64,
    front: &StairLists,
    back: &StairLists,
) -> Result<Vec<Cuboid>> {
    let fr: Vec<Rect> = front.iter().copied().collect();
    let m = fr.len();
    let mut out = Vec::new();
    if m == 0 {
        return Ok(out);
    }
    let mut by_i: Vec<usize> = (0..m).collect();
    by_i.sort_by_key(|&k| fr[k].i_min);
    let mut by_j: Vec<usize> = (0..m).collect();
    by_j.sort_by_key(|&k| std::cmp::Reverse(fr[k].j_max));
    let mut ci = Chain::new(by_i, m);
    let mut cj = Chain::new(by_j, m);
    let mut alive = m;
    let (mut lo_i, mut hi_j) = (1 as PointId, PointId::MAX);
    let (mut bl, mut rt) = (0usize, back.right.len());
    let mut gone_b = vec![false; back.bottom.len()];
    let mut gone_r = vec![false; back.right.len()];
    let corrupt = |m: String| Err(Error::CorruptStaircase(format!("edge ({a}, {b}): {m}")));
    while alive > 0 {
        let left_ok = bl < back.bottom.len() && back.above[bl].map_or(true, |k| gone_r[k]);
        let top_ok = rt > 0 && back.left[rt - 1].map_or(true, |k| gone_b[k]);
        if left_ok {
            let cut_rect = back.bottom[bl];
            let cut = cut_rect.i_max;
            let mut x = ci.head;
            while x != END && fr[x].i_min <= cut {
                let f = fr[x];
                let nx = ci.next[x];
                let piece = (f.i_min.max(lo_i), f.i_max.min(cut), f.j_min, f.j_max.min(hi_j));
                let (lo, hi) = alpha_range(&f, &cut_rect, focal, r_min)?;
                out.push(Cuboid { a, b, side: focal, i_min: piece.0, i_max: piece.1, j_min: piece.2, j_max: piece.3, alpha_lo: lo, alpha_hi: hi });
                if f.i_max <= cut {
                    ci.remove(x);
                    cj.remove(x);
                    alive -= 1;
                }
                x = nx;
            }
            gone_b[bl] = true;
            bl += 1;
            lo_i = cut + 1;
        } else if top_ok {
            let cut_rect = back.right[rt - 1];
            let cut = cut_rect.j_min;
            let mut x = cj.head;
            while x != END && fr[x].j_max >= cut {
                let f = fr[x];
                let nx = cj.next[x];
                let piece = (f.i_min.max(lo_i), f.i_max, f.j_min.max(cut), f.j_max.min(hi_j));
                let (lo, hi) = alpha_range(&f, &cut_rect, focal, r_min)?;
                out.push(Cuboid { a, b, side: focal, i_min: piece.0, i_max: piece.1, j_min: piece.2, j_max: piece.3, alpha_lo: lo, alpha_hi: hi });
                if f.j_min >= cut {
                    ci.remove(x);
                    cj.remove(x);
                    alive -= 1;
                }
                x = nx;
            }
            rt -= 1;
            gone_r[rt] = true;
            hi_j = cut - 1;
        } else {
            return corrupt(format!("no removable rectangle with {alive} front rectangles left"));
        }
    }
    for c in &out {
        if c.i_min > c.i_max || c.j_min > c.j_max {
            return corrupt(format!("empty piece {c:?}"));
        }
    }
    out.sort_by_key(|c| (c.i_min, c.j_min));
    Ok(out)
}

fn rect_of(rec: &TriangleRecord, id: u32, a: PointId, b: PointId, pts: &[TimedPoint], n: PointId) -> Rect {
    let (i_min, i_max, j_min, j_max) = rec.rect(n);
    let xy = |v: PointId| pts[(v - 1) as usize].xy();
    let center = match rec.tri {
        Tri::Hull([x, _]) => {
            if x == a {
                CenterSide::Front
            } else {
                CenterSide::Back
            }
        }
        Tri::Finite(v) => {
            let apex = *v.iter().find(|&&w| w != a && w != b).expect("coface has an apex");
            match circumcenter_side_xy(xy(a), xy(b), xy(apex)) {
                Sign::Positive => CenterSide::Front,
                Sign::Negative => CenterSide::Back,
                Sign::Zero => CenterSide::OnLine,
            }
        }
    };
    Rect { i_min, i_max, j_min, j_max, src: Source::Record(id), radius: rec.disk.radius, center }
}

/// Coface lists of one side as rectangle lists.
pub fn side_rects(edge: &EdgeCofaces, side: EdgeSide, records: &[TriangleRecord], pts: &[TimedPoint]) -> Vec<Vec<Rect>> {
    let n = pts.len() as PointId;
    edge.lists[side as usize]
        .iter()
        .map(|l: &CofaceList| l.records.iter().map(|&r| rect_of(&records[r as usize], r, edge.a, edge.b, pts, n)).collect())
        .collect()
}

/// All cuboids of one edge, both focal sides.
pub fn edge_cuboids(edge: &EdgeCofaces, records: &[TriangleRecord], pts: &[TimedPoint]) -> Result<Vec<Cuboid>> {
    let (a, b) = (edge.a, edge.b);
    let r_min = min_edge_radius_xy(pts[(a - 1) as usize].xy(), pts[(b - 1) as usize].xy());
    let stairs = [
        build_stair_lists(a, b, &side_rects(edge, EdgeSide::Front, records, pts))?,
        build_stair_lists(a, b, &side_rects(edge, EdgeSide::Back, records, pts))?,
    ];
    let mut out = Vec::new();
    for focal in [EdgeSide::Front, EdgeSide::Back] {
        let front = simplify_front(&stairs[focal as usize], focal);
        if front.is_empty() {
            continue;
        }
        let mut back = simplify_back(&stairs[focal.opposite() as usize], focal, a, b)?;
        link_neighbors(&mut back);
        out.extend(intersect_to_cuboids(a, b, focal, r_min, &front, &back)?);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ShapeStats {
    pub n: usize,
    pub triangles: usize,
    pub edges: usize,
    pub cuboids: usize,
    /// Largest number of cuboids on a single edge (both sides).
    pub peak_edge_cuboids: usize,
    pub enumeration: EnumStats,
    pub enumerate_secs: f64,
    pub registry_secs: f64,
    pub cuboid_secs: f64,
}

impl ShapeStats {
    /// The worst-case bound `3 (n - 1) |T|` on the cuboid count.
    pub fn within_bound(&self) -> bool {
        self.cuboids as u128 <= 3 * (self.n.saturating_sub(1) as u128) * self.triangles as u128
    }
}

/// α-edge activity cuboids of all edges over all windows.
#[derive(Clone, Debug)]
pub struct TemporalAlphaShape {
    pub points: Vec<TimedPoint>,
    /// Ordered by `(a, b, side, i_min, j_min)`.
    pub cuboids: Vec<Cuboid>,
    pub stats: ShapeStats,
}

impl TemporalAlphaShape {
    pub fn n(&self) -> PointId {
        self.points.len() as PointId
    }

    /// Linear scan over all cuboids; see the stab index for the fast path.
    pub fn edges_at(&self, i: PointId, j: PointId, alpha: f64) -> Vec<(PointId, PointId, EdgeSide)> {
        self.cuboids.iter().filter(|c| c.contains(i, j, alpha)).map(|c| (c.a, c.b, c.side)).collect()
    }

    /// `|α_T| / |T|`.
    pub fn ratio(&self) -> f64 {
        self.stats.cuboids as f64 / self.stats.triangles.max(1) as f64
    }
}

pub fn temporal_alpha_shape(points: &[TimedPoint]) -> Result<TemporalAlphaShape> {
    let clock = Instant::now();
    let en = enumerate_all(points)?;
    let enumerate_secs = clock.elapsed().as_secs_f64();
    let clock = Instant::now();
    let reg = EdgeRegistry::build(&en.records);
    let registry_secs = clock.elapsed().as_secs_f64();
    let clock = Instant::now();
    let per_edge: Vec<Vec<Cuboid>> =
        reg.edges().map(|e| edge_cuboids(&e, &en.records, points)).collect::<Result<_>>()?;
    let peak_edge_cuboids = per_edge.iter().map(Vec::len).max().unwrap_or(0);
    let cuboids: Vec<Cuboid> = per_edge.into_iter().flatten().collect();
    let stats = ShapeStats {
        n: points.len(),
        triangles: en.records.len(),
        edges: reg.edge_count(),
        cuboids: cuboids.len(),
        peak_edge_cuboids,
        enumeration: en.stats,
        enumerate_secs,
        registry_secs,
        cuboid_secs: clock.elapsed().as_secs_f64(),
    };
    Ok(TemporalAlphaShape { points: points.to_vec(), cuboids, stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delaunay::alpha_edges_of_window;
    use crate::temporal::enumerate_all;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rect(i0: u32, i1: u32, j0: u32, j1: u32, center: CenterSide, radius: f64) -> Rect {
        Rect { i_min: i0, i_max: i1, j_min: j0, j_max: j1, src: Source::Record(0), radius, center }
    }

    fn random_points(n: usize, seed: u64) -> Vec<TimedPoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (1..=n as u32).map(|i| TimedPoint::new(i, rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0))).collect()
    }

    const F: CenterSide = CenterSide::Front;
    const B: CenterSide = CenterSide::Back;

    #[test]
    fn stair_lists_single_and_stacked() {
        let one = build_stair_lists(5, 6, &[vec![rect(1, 5, 6, 9, F, 1.)]]).unwrap();
        assert_eq!((one.bottom.len(), one.right.len()), (1, 0));
        let three = build_stair_lists(
            5,
            6,
            &[vec![rect(1, 5, 6, 7, F, 1.), rect(1, 5, 8, 8, F, 1.), rect(1, 5, 9, 12, F, 1.)]],
        )
        .unwrap();
        assert_eq!(three.bottom, vec![rect(1, 5, 6, 7, F, 1.)]);
        assert_eq!(three.right, vec![rect(1, 5, 8, 8, F, 1.), rect(1, 5, 9, 12, F, 1.)]);
    }

    #[test]
    fn stair_lists_grounded_then_floating() {
        // Two grounded lists and one floating list on edge (5, 6):
        //   A: [1,3]x[6,8]
        //   B: [4,5]x[6,6], [4,5]x[7,8]
        //   C (floating): [4,5]x[9,10]
        let a = vec![rect(1, 3, 6, 8, F, 1.)];
        let bl = vec![rect(4, 5, 6, 6, F, 1.), rect(4, 5, 7, 8, F, 1.)];
        let c = vec![rect(4, 5, 9, 10, F, 1.)];
        let s = build_stair_lists(5, 6, &[a.clone(), bl.clone(), c.clone()]).unwrap();
        assert_eq!(s.bottom, vec![a[0], bl[0]]);
        assert_eq!(s.right, vec![bl[1], c[0]]);
        // a floating list without a bottom-right rectangle is incomplete
        assert!(build_stair_lists(5, 6, &[a.clone(), c]).is_err());
        // overlapping floating list is rejected
        assert!(build_stair_lists(5, 6, &[bl.clone(), vec![rect(3, 5, 8, 9, F, 1.)]]).is_err());
    }

    #[test]
    fn simplify_front_filters_centres() {
        let s = build_stair_lists(5, 6, &[vec![rect(1, 3, 6, 9, B, 1.)], vec![rect(4, 5, 6, 6, F, 1.), rect(4, 5, 7, 9, B, 1.)]]).unwrap();
        let f = simplify_front(&s, EdgeSide::Front);
        assert_eq!(f.bottom, vec![rect(4, 5, 6, 6, F, 1.)]);
        assert!(f.right.is_empty());
        assert!(simplify_front(&s, EdgeSide::Back).bottom.len() == 1);
    }

    #[test]
    fn simplify_back_merges_into_dummy() {
        let s = build_stair_lists(
            5,
            6,
            &[vec![rect(1, 2, 6, 9, F, 1.)], vec![rect(3, 5, 6, 6, B, 1.), rect(3, 5, 7, 7, B, 1.), rect(3, 5, 8, 9, F, 1.)]],
        )
        .unwrap();
        // focal front: rects centred on back are "behind"
        let d = simplify_back(&s, EdgeSide::Front, 5, 6).unwrap();
        assert_eq!(d.len(), s.len() - 1);
        let dummy = d.bottom.last().unwrap();
        assert_eq!((dummy.src, dummy.i_min, dummy.i_max, dummy.j_min, dummy.j_max), (Source::Dummy, 3, 5, 6, 7));
        // corner centred on the focal side: unchanged
        let u = simplify_back(&s, EdgeSide::Back, 5, 6).unwrap();
        assert_eq!((u.bottom.clone(), u.right.clone()), (s.bottom.clone(), s.right.clone()));
    }

    #[test]
    fn link_neighbors_small_cases() {
        let mut s = StairLists { bottom: vec![rect(1, 5, 6, 6, F, 1.)], right: vec![rect(1, 5, 7, 9, F, 1.)], ..Default::default() };
        link_neighbors(&mut s);
        assert_eq!(s.above, vec![Some(0)]);
        assert_eq!(s.left, vec![None]);
        let mut s = StairLists {
            bottom: vec![rect(1, 3, 6, 9, F, 1.), rect(4, 5, 6, 6, F, 1.)],
            right: vec![rect(4, 5, 7, 9, F, 1.)],
            ..Default::default()
        };
        link_neighbors(&mut s);
        assert_eq!(s.above, vec![None, Some(0)]);
        assert_eq!(s.left, vec![Some(0)]);
    }

    /// Random staircase with column heights `h[i - start]`, tiled by a
    /// random sequence of left and top cuts.
    fn random_tiling_of(rng: &mut ChaCha8Rng, start: u32, a: u32, b: u32, h: &[u32], focal_only: bool) -> StairLists {
        let (mut l, mut u) = (start, *h.last().unwrap());
        let clip = |i: u32, u: u32| h[(i - start) as usize].min(u);
        let mut bottom = Vec::new();
        let mut right = Vec::new();
        let center = |rng: &mut ChaCha8Rng| if focal_only || rng.gen_bool(0.5) { F } else { B };
        while l <= a {
            let top_possible = clip(a, u) == u && u > b;
            if top_possible && rng.gen_bool(0.5) {
                let x = (l..=a).find(|&i| clip(i, u) == u).unwrap();
                let y_low = if x > l { clip(x - 1, u) + 1 } else { b + 1 };
                if y_low <= u {
                    let y = rng.gen_range(y_low.max(b + 1)..=u);
                    right.push(rect(x, a, y, u, center(rng), rng.gen_range(1.0..2.0)));
                    u = y - 1;
                    continue;
                }
            }
            let hl = clip(l, u);
            let last = (l..=a).take_while(|&i| clip(i, u) == hl).last().unwrap();
            let x = rng.gen_range(l..=last);
            bottom.push(rect(l, x, b, hl, center(rng), rng.gen_range(1.0..2.0)));
            l = x + 1;
        }
        right.reverse();
        StairLists { bottom, right, ..Default::default() }
    }

    fn random_heights(rng: &mut ChaCha8Rng, cols: usize, b: u32) -> Vec<u32> {
        let mut h: Vec<u32> = (0..cols).map(|_| b + rng.gen_range(0..8)).collect();
        h.sort();
        h
    }

    fn cell_owner(rs: &[Rect], i: u32, j: u32) -> Option<usize> {
        rs.iter().position(|r| r.i_min <= i && i <= r.i_max && r.j_min <= j && j <= r.j_max)
    }

    #[test]
    fn link_neighbors_match_all_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..300 {
            let h = random_heights(&mut rng, 8, 20);
            let mut s = random_tiling_of(&mut rng, 3, 10, 20, &h, false);
            link_neighbors(&mut s);
            for (k, bt) in s.bottom.iter().enumerate() {
                assert_eq!(s.above[k], cell_owner(&s.right, bt.i_max, bt.j_max + 1));
            }
            for (k, r) in s.right.iter().enumerate() {
                assert_eq!(s.left[k], cell_owner(&s.bottom, r.i_min - 1, r.j_min));
            }
        }
    }

    #[test]
    fn alpha_range_rules() {
        let f = rect(1, 1, 2, 2, F, 2.0);
        assert_eq!(alpha_range(&f, &rect(1, 1, 2, 2, F, 1.0), EdgeSide::Front, 0.5).unwrap(), (1.0, 2.0));
        let dummy = Rect { src: Source::Dummy, ..rect(1, 1, 2, 2, B, 9.0) };
        let f5 = rect(1, 1, 2, 2, F, 5.0);
        assert_eq!(alpha_range(&f5, &dummy, EdgeSide::Front, 1.0).unwrap(), (1.0, 5.0));
        let hull = rect(1, 1, 2, 2, F, f64::INFINITY);
        assert_eq!(alpha_range(&hull, &rect(1, 1, 2, 2, B, 3.0), EdgeSide::Front, 1.0).unwrap(), (1.0, f64::INFINITY));
        assert!(alpha_range(&rect(1, 1, 2, 2, B, 1.0), &f, EdgeSide::Front, 0.5).is_err());
    }

    #[test]
    fn intersect_single_and_split() {
        let front = StairLists { bottom: vec![rect(1, 4, 5, 9, F, 3.0)], ..Default::default() };
        let mut back = front.clone();
        back.bottom[0].center = F;
        back.bottom[0].radius = 1.0;
        link_neighbors(&mut back);
        let c = intersect_to_cuboids(4, 5, EdgeSide::Front, 0.5, &front, &back).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!((c[0].i_min, c[0].i_max, c[0].j_min, c[0].j_max, c[0].alpha_lo, c[0].alpha_hi), (1, 4, 5, 9, 1.0, 3.0));
        let mut back = StairLists { bottom: vec![rect(1, 4, 5, 6, F, 1.0)], right: vec![rect(1, 4, 7, 9, F, 2.0)], ..Default::default() };
        link_neighbors(&mut back);
        let c = intersect_to_cuboids(4, 5, EdgeSide::Front, 0.5, &front, &back).unwrap();
        assert_eq!(c.len(), 2);
        assert_ne!(c[0].alpha_lo, c[1].alpha_lo);
    }

    #[test]
    fn intersect_matches_all_pairs_on_random_tilings() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..400 {
            let h = random_heights(&mut rng, 9, 20);
            let front = random_tiling_of(&mut rng, 2, 10, 20, &h, true);
            let mut back = random_tiling_of(&mut rng, 2, 10, 20, &h, false);
            link_neighbors(&mut back);
            let mut got = intersect_to_cuboids(10, 20, EdgeSide::Front, 0.1, &front, &back).unwrap();
            let mut want = Vec::new();
            for f in front.iter() {
                for bb in back.iter() {
                    if let Some(p) = f.intersect(bb) {
                        let (lo, hi) = alpha_range(f, bb, EdgeSide::Front, 0.1).unwrap();
                        want.push((p, lo.to_bits(), hi.to_bits()));
                    }
                }
            }
            want.sort();
            got.sort_by_key(|c| ((c.i_min, c.i_max, c.j_min, c.j_max), c.alpha_lo.to_bits(), c.alpha_hi.to_bits()));
            let got: Vec<_> =
                got.iter().map(|c| ((c.i_min, c.i_max, c.j_min, c.j_max), c.alpha_lo.to_bits(), c.alpha_hi.to_bits())).collect();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn two_points() {
        let pts = [TimedPoint::new(1, 0., 0.), TimedPoint::new(2, 2., 0.)];
        let s = temporal_alpha_shape(&pts).unwrap();
        assert_eq!(s.cuboids.len(), 2);
        for c in &s.cuboids {
            assert_eq!((c.i_min, c.i_max, c.j_min, c.j_max), (1, 1, 2, 2));
            assert_eq!((c.alpha_lo, c.alpha_hi), (1.0, f64::INFINITY));
        }
    }

    #[test]
    fn three_points() {
        let pts = [TimedPoint::new(1, 0., 0.), TimedPoint::new(2, 4., 0.), TimedPoint::new(3, 2., 3.)];
        let s = temporal_alpha_shape(&pts).unwrap();
        let full: Vec<&Cuboid> = s.cuboids.iter().filter(|c| c.i_min <= 1 && 1 <= c.i_max && c.j_min <= 3 && 3 <= c.j_max).collect();
        assert_eq!(full.len(), 6);
        let r = crate::geometry::circumdisk_xy(pts[0].xy(), pts[1].xy(), pts[2].xy()).unwrap().radius;
        assert_eq!(full.iter().filter(|c| c.alpha_hi.is_infinite()).count(), 3);
        assert!(full.iter().filter(|c| c.alpha_hi.is_finite()).all(|c| c.alpha_hi == r));
    }

    #[test]
    fn matches_naive_on_every_window() {
        for seed in 0..4 {
            let pts = random_points(18, seed);
            let s = temporal_alpha_shape(&pts).unwrap();
            let n = pts.len() as u32;
            for i in 1..n {
                for j in i + 1..=n {
                    let mut bounds: Vec<f64> = s
                        .cuboids
                        .iter()
                        .filter(|c| c.i_min <= i && i <= c.i_max && c.j_min <= j && j <= c.j_max)
                        .flat_map(|c| [c.alpha_lo, c.alpha_hi])
                        .filter(|x| x.is_finite())
                        .collect();
                    bounds.sort_by(|a, b| a.partial_cmp(b).unwrap());
                    bounds.dedup();
                    let mut probes: Vec<f64> = bounds.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
                    probes.push(bounds[0] * 0.5);
                    probes.push(bounds.last().unwrap() * 2.0);
                    for alpha in probes {
                        let mut got = s.edges_at(i, j, alpha);
                        got.sort();
                        let want: Vec<_> = alpha_edges_of_window(&pts, i, j, alpha).unwrap().into_iter().collect();
                        assert_eq!(got, want, "seed {seed} window ({i},{j}) alpha {alpha}");
                    }
                }
            }
        }
    }

    #[test]
    fn footprint_covers_staircase_and_sides_disjoint() {
        let pts = random_points(25, 42);
        let en = enumerate_all(&pts).unwrap();
        let s = temporal_alpha_shape(&pts).unwrap();
        let reg = EdgeRegistry::build(&en.records);
        let n = pts.len() as u32;
        for k in 0..reg.edge_count() {
            let e = reg.edge(k);
            let cubs: Vec<&Cuboid> = s.cuboids.iter().filter(|c| (c.a, c.b) == (e.a, e.b)).collect();
            for i in 1..=e.a {
                for j in e.b..=n {
                    let delaunay = e.lists[0].iter().flat_map(|l| &l.records).any(|&r| en.records[r as usize].active_in(i, j, n));
                    let covered = cubs.iter().any(|c| c.i_min <= i && i <= c.i_max && c.j_min <= j && j <= c.j_max);
                    assert_eq!(delaunay, covered, "edge ({},{}) window ({i},{j})", e.a, e.b);
                    for side in [EdgeSide::Front, EdgeSide::Back] {
                        let hits = cubs.iter().filter(|c| c.side == side && c.i_min <= i && i <= c.i_max && c.j_min <= j && j <= c.j_max).count();
                        assert!(hits <= 1);
                    }
                }
            }
        }
    }
}
