//! Enumeration of every triangle that is Delaunay in some window `[i, j]`.
//!
//! The work is organised as a matrix whose rows are suffix constructions:
//! row 1 is the full incremental construction of `p_1, p_2, ...`, and row
//! `r >= 2` holds only the triangles of `DT(P_{r,j})` that are not in
//! `DT(P_{r-1,j})`, i.e. the retriangulated hole left by removing `p_{r-1}`.
//! Columns are processed left to right as points are inserted and, within a
//! column, rows top to bottom. A row is only touched when a triangle incident
//! to `p_{r-1}` and `p_j` appears in a row above it.
//!
//! Row `r` keeps the cyclic link of `p_{r-1}` in `DT(P_{r-1,j})`. The hole
//! is the set of triangles of `DT(link vertices)` whose circumdisk contains
//! `p_{r-1}`, so each update re-triangulates the link and diffs the result
//! against the previous hole.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use crate::delaunay::{LocateMode, Tri, Triangulation};
use crate::error::{Error, Result};
use crate::geometry::{circumdisk_xy, facet_disk_xy, in_circle_ccw_xy, orient_xy, Disk, PointId, Sign, TimedPoint};

/// A triangle together with the rectangle of windows where it is Delaunay.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TriangleRecord {
    pub tri: Tri,
    /// Largest index below `i_lower` inside the circumdisk; `None` is −∞.
    pub i_before: Option<PointId>,
    /// Smallest index above `i_upper` inside the circumdisk; `None` is +∞.
    pub i_after: Option<PointId>,
    pub i_lower: PointId,
    pub i_upper: PointId,
    pub disk: Disk,
}

impl TriangleRecord {
    fn new(tri: Tri, i_before: Option<PointId>, disk: Disk) -> Self {
        TriangleRecord { tri, i_before, i_after: None, i_lower: tri.lowest(), i_upper: tri.highest(), disk }
    }

    /// Inclusive window rectangle `(i_min, i_max, j_min, j_max)` for a
    /// sequence of `n` points.
    pub fn rect(&self, n: PointId) -> (PointId, PointId, PointId, PointId) {
        (
            self.i_before.map_or(1, |b| b + 1),
            self.i_lower,
            self.i_upper,
            self.i_after.map_or(n, |a| a - 1),
        )
    }

    pub fn active_in(&self, i: PointId, j: PointId, n: PointId) -> bool {
        let (i0, i1, j0, j1) = self.rect(n);
        i0 <= i && i <= i1 && j0 <= j && j <= j1
    }
}

/// Counters collected while enumerating.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EnumStats {
    /// Triangles created in the full construction plus triangles added to holes.
    pub created: u64,
    /// Faces built in the scratch link triangulations.
    pub scratch_faces: u64,
    /// Hole updates performed.
    pub hole_updates: u64,
}

#[derive(Clone, Debug)]
pub struct Enumeration {
    pub n: PointId,
    pub records: Vec<TriangleRecord>,
    pub stats: EnumStats,
}

pub(crate) fn validate(points: &[TimedPoint]) -> Result<()> {
    if points.len() < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: points.len() });
    }
    for (k, p) in points.iter().enumerate() {
        if p.index as usize != k + 1 {
            return Err(Error::BadIndexing { position: k, found: p.index });
        }
    }
    Ok(())
}

struct Row {
    /// Counter-clockwise neighbours of `p_{r-1}`; 0 is the vertex at infinity.
    link: Vec<PointId>,
    hole: Vec<(Tri, usize)>,
}

struct Enumerator<'a> {
    pts: &'a [TimedPoint],
    records: Vec<TriangleRecord>,
    stats: EnumStats,
    heap: BinaryHeap<Reverse<PointId>>,
    queued: Vec<PointId>,
}

impl<'a> Enumerator<'a> {
    fn xy(&self, id: PointId) -> [f64; 2] {
        self.pts[(id - 1) as usize].xy()
    }

    fn disk_of(&self, tri: &Tri) -> Result<Disk> {
        match *tri {
            Tri::Finite([a, b, c]) => circumdisk_xy(self.xy(a), self.xy(b), self.xy(c)),
            Tri::Hull([a, b]) => Ok(facet_disk_xy(self.xy(a), self.xy(b))),
        }
    }

    fn push_record(&mut self, tri: Tri, i_before: Option<PointId>, column: PointId) -> Result<usize> {
        if tri.highest() != column {
            return Err(Error::Enumeration(format!("{tri:?} created at column {column} is not incident to it")));
        }
        let disk = self.disk_of(&tri)?;
        self.records.push(TriangleRecord::new(tri, i_before, disk));
        self.stats.created += 1;
        let id = self.records.len() - 1;
        self.trigger(tri.lowest() + 1, column);
        Ok(id)
    }

    fn trigger(&mut self, row: PointId, column: PointId) {
        if row >= column || row < 2 {
            return;
        }
        if self.queued[row as usize] != column {
            self.queued[row as usize] = column;
            self.heap.push(Reverse(row));
        }
    }

    /// Whether `q` is inside the circumdisk of star triangle `(p, x, y)`.
    fn star_conflict(&self, p: PointId, x: PointId, y: PointId, q: [f64; 2]) -> Result<bool> {
        let s = if x == 0 {
            orient_xy(self.xy(y), self.xy(p), q)
        } else if y == 0 {
            orient_xy(self.xy(p), self.xy(x), q)
        } else {
            in_circle_ccw_xy(self.xy(p), self.xy(x), self.xy(y), q)
        };
        match s {
            Sign::Positive => Ok(true),
            Sign::Negative => Ok(false),
            Sign::Zero => Err(Error::Degenerate("cocircular or collinear points in a star")),
        }
    }

    fn update_row(&mut self, r: PointId, row: &mut Row, j: PointId) -> Result<()> {
        self.stats.hole_updates += 1;
        let p = r - 1;
        let q = self.xy(j);
        let m = row.link.len();
        let mut hit = Vec::with_capacity(m);
        for k in 0..m {
            hit.push(self.star_conflict(p, row.link[k], row.link[(k + 1) % m], q)?);
        }
        let starts: Vec<usize> = (0..m).filter(|&k| hit[k] && !hit[(k + m - 1) % m]).collect();
        if starts.len() != 1 {
            return Err(Error::Enumeration(format!(
                "row {r} column {j}: star conflict is not one contiguous run ({} runs)",
                starts.len()
            )));
        }
        let s = starts[0];
        let mut t = s;
        while hit[(t + 1) % m] {
            t = (t + 1) % m;
        }
        let mut link = Vec::with_capacity(m + 1);
        let mut k = (t + 1) % m;
        loop {
            link.push(row.link[k]);
            if k == s {
                break;
            }
            k = (k + 1) % m;
        }
        link.push(j);
        row.link = link;

        let new_hole = self.hole_of(p, &row.link)?;
        let mut kept = Vec::with_capacity(new_hole.len());
        let mut old_left: HashMap<Tri, usize> = row.hole.drain(..).collect();
        for tri in new_hole {
            match old_left.remove(&tri) {
                Some(id) => kept.push((tri, id)),
                None => {
                    let id = self.push_record(tri, Some(p), j)?;
                    kept.push((tri, id));
                }
            }
        }
        for (_, id) in old_left {
            self.records[id].i_after = Some(j);
        }
        row.hole = kept;
        Ok(())
    }

    /// Triangles of `DT(link)` whose circumdisk contains `p`.
    fn hole_of(&mut self, p: PointId, link: &[PointId]) -> Result<Vec<Tri>> {
        let mut verts: Vec<PointId> = link.iter().copied().filter(|&v| v != 0).collect();
        if verts.len() < 2 {
            return Ok(vec![]);
        }
        verts.sort_unstable();
        let mut dt = Triangulation::new(LocateMode::Scan);
        for &v in &verts {
            dt.insert(&self.pts[(v - 1) as usize])?;
        }
        self.stats.scratch_faces += dt.face_count() as u64;
        let q = self.xy(p);
        let mut out = Vec::new();
        for f in dt.live_faces().collect::<Vec<_>>() {
            if dt.conflicts_with(f, q)? {
                out.push(dt.tri(f));
            }
        }
        Ok(out)
    }
}

/// Enumerates every triangle (hull facets included) that is Delaunay in at
/// least one window, each with its exact activity rectangle.
pub fn enumerate_all(points: &[TimedPoint]) -> Result<Enumeration> {
    validate(points)?;
    let n = points.len() as PointId;
    let mut en = Enumerator {
        pts: points,
        records: Vec::new(),
        stats: EnumStats::default(),
        heap: BinaryHeap::new(),
        queued: vec![0; n as usize + 2],
    };
    let mut full = Triangulation::new(LocateMode::History);
    let mut face_rec: Vec<usize> = Vec::new();
    let mut rows: Vec<Row> = (0..=n).map(|_| Row { link: Vec::new(), hole: Vec::new() }).collect();
    for j in 1..=n {
        let ins = full.insert(&points[(j - 1) as usize])?;
        for &f in &ins.destroyed {
            en.records[face_rec[f as usize]].i_after = Some(j);
        }
        face_rec.resize(full.face_count(), usize::MAX);
        for &f in &ins.created {
            face_rec[f as usize] = en.push_record(full.tri(f), None, j)?;
        }
        if j >= 2 {
            rows[j as usize].link = vec![j, 0];
        }
        while let Some(Reverse(r)) = en.heap.pop() {
            let mut row = std::mem::replace(&mut rows[r as usize], Row { link: Vec::new(), hole: Vec::new() });
            let res = en.update_row(r, &mut row, j);
            rows[r as usize] = row;
            res?;
        }
    }
    Ok(Enumeration { n, records: en.records, stats: en.stats })
}

/// Brute-force references for [`enumerate_all`].
pub mod oracle {
    use std::collections::BTreeSet;

    use super::*;
    use crate::delaunay::build_delaunay;
    use crate::geometry::Center;

    /// Comparable form of a record: `(tri, i_before, i_after)`.
    pub type RecordKey = (Tri, Option<PointId>, Option<PointId>);

    pub fn keys(records: &[TriangleRecord]) -> Vec<RecordKey> {
        let mut v: Vec<RecordKey> = records.iter().map(|r| (r.tri, r.i_before, r.i_after)).collect();
        v.sort();
        v
    }

    /// A fresh incremental construction per suffix `P_{i,n}`, keeping the
    /// triangles that are new relative to the previous suffix.
    pub fn enumerate_all_oracle(points: &[TimedPoint]) -> Result<Vec<RecordKey>> {
        validate(points)?;
        let mut out = BTreeSet::new();
        for i in 1..points.len() {
            let mut t = Triangulation::new(LocateMode::History);
            let mut rec: Vec<Option<(Tri, Option<PointId>)>> = Vec::new();
            let mut open: Vec<Option<PointId>> = Vec::new();
            let prev = (i >= 2).then(|| points[i - 2].xy());
            for p in &points[i - 1..] {
                let ins = t.insert(p)?;
                rec.resize(t.face_count(), None);
                open.resize(t.face_count(), None);
                for &f in &ins.destroyed {
                    open[f as usize] = Some(p.index);
                }
                for &f in &ins.created {
                    let keep = match prev {
                        None => true,
                        Some(q) => t.conflicts_with(f, q)?,
                    };
                    if keep {
                        rec[f as usize] = Some((t.tri(f), prev.map(|_| (i - 1) as PointId)));
                    }
                }
            }
            for (f, r) in rec.iter().enumerate() {
                if let Some((tri, before)) = r {
                    out.insert((*tri, *before, open[f]));
                }
            }
        }
        Ok(out.into_iter().collect())
    }

    fn inside(points: &[TimedPoint], tri: &Tri, disk: &Disk, k: usize) -> bool {
        let q = points[k].xy();
        match (*tri, disk.center) {
            (Tri::Finite([a, b, c]), _) => {
                let xy = |v: PointId| points[(v - 1) as usize].xy();
                in_circle_ccw_xy(xy(a), xy(b), xy(c), q) == Sign::Positive
            }
            (Tri::Hull([a, b]), Center::AtInfinity(_)) | (Tri::Hull([a, b]), Center::Finite(_)) => {
                let xy = |v: PointId| points[(v - 1) as usize].xy();
                orient_xy(xy(a), xy(b), q) == Sign::Positive
            }
        }
    }

    /// Records straight from the definition: triangulate every window and
    /// scan the whole sequence for the nearest conflicting indices.
    pub fn enumerate_by_definition(points: &[TimedPoint]) -> Result<Vec<RecordKey>> {
        validate(points)?;
        let n = points.len();
        let mut out = BTreeSet::new();
        for i in 1..n {
            for j in i + 1..=n {
                let t = build_delaunay(&points[i - 1..j])?;
                for f in t.live_faces() {
                    let tri = t.tri(f);
                    let disk = t.disk(f);
                    let lo = tri.lowest() as usize;
                    let hi = tri.highest() as usize;
                    let before = (1..lo).rev().find(|&k| inside(points, &tri, &disk, k - 1));
                    let after = (hi + 1..=n).find(|&k| inside(points, &tri, &disk, k - 1));
                    out.insert((tri, before.map(|b| b as PointId), after.map(|a| a as PointId)));
                }
            }
        }
        Ok(out.into_iter().collect())
    }

    /// Checks that the records active at each window are exactly that
    /// window's triangulation. Returns the first mismatching window.
    pub fn check_activity(points: &[TimedPoint], records: &[TriangleRecord]) -> Result<Option<(PointId, PointId)>> {
        let n = points.len() as PointId;
        for i in 1..n {
            for j in i + 1..=n {
                let t = build_delaunay(&points[(i - 1) as usize..j as usize])?;
                let mut want: Vec<Tri> = t.live_tris();
                want.sort();
                let mut got: Vec<Tri> = records.iter().filter(|r| r.active_in(i, j, n)).map(|r| r.tri).collect();
                got.sort();
                if want != got {
                    return Ok(Some((i, j)));
                }
            }
        }
        Ok(None)
    }
}
