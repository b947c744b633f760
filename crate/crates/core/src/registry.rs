//! Per-edge coface lists.
//!
//! Every record is a coface of each of its edges, on the side of the edge
//! where it lies. Records sharing an edge, a side and an `i_before` were all
//! created with the same instance of the edge in one suffix construction;
//! they form one coface list, ordered by `i_upper`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{edge_key, EdgeSide, PointId};
use crate::temporal::TriangleRecord;

#[derive(Clone, Copy, Debug)]
struct Entry {
    /// `lo << 33 | hi << 1 | side`
    key: u64,
    /// `i_before (0 for −∞) << 32 | i_upper`
    order: u64,
    rec: u32,
}

impl Entry {
    fn edge(&self) -> (PointId, PointId) {
        ((self.key >> 33) as PointId, ((self.key >> 1) & 0xFFFF_FFFF) as PointId)
    }

    fn side(&self) -> EdgeSide {
        if self.key & 1 == 0 {
            EdgeSide::Front
        } else {
            EdgeSide::Back
        }
    }

    fn i_before(&self) -> Option<PointId> {
        match (self.order >> 32) as PointId {
            0 => None,
            b => Some(b),
        }
    }
}

/// Records created on one side of one edge instance, stacked bottom-up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CofaceList {
    pub i_before: Option<PointId>,
    pub records: Vec<u32>,
}

/// Both sides of one edge: coface lists in suffix-construction order.
#[derive(Clone, Debug)]
pub struct EdgeCofaces {
    pub a: PointId,
    pub b: PointId,
    /// Indexed by `EdgeSide as usize`.
    pub lists: [Vec<CofaceList>; 2],
}

#[derive(Clone, Debug, Default)]
pub struct EdgeRegistry {
    entries: Vec<Entry>,
    /// Start offset of each edge's entries, plus a final sentinel.
    bounds: Vec<usize>,
}

impl EdgeRegistry {
    pub fn build(records: &[TriangleRecord]) -> EdgeRegistry {
        let mut entries: Vec<Entry> = records
            .par_iter()
            .enumerate()
            .flat_map_iter(|(id, r)| {
                let ib = r.i_before.unwrap_or(0) as u64;
                r.tri.edges().into_iter().map(move |(x, y, _)| {
                    let (lo, hi) = edge_key(x, y);
                    let side = u64::from(x > y);
                    Entry {
                        key: (lo as u64) << 33 | (hi as u64) << 1 | side,
                        order: ib << 32 | r.i_upper as u64,
                        rec: id as u32,
                    }
                })
            })
            .collect();
        entries.par_sort_unstable_by_key(|e| (e.key, e.order));
        let mut bounds = Vec::new();
        for (k, e) in entries.iter().enumerate() {
            if k == 0 || entries[k - 1].key >> 1 != e.key >> 1 {
                bounds.push(k);
            }
        }
        bounds.push(entries.len());
        EdgeRegistry { entries, bounds }
    }

    pub fn edge_count(&self) -> usize {
        self.bounds.len() - 1
    }

    pub fn edge(&self, k: usize) -> EdgeCofaces {
        let slice = &self.entries[self.bounds[k]..self.bounds[k + 1]];
        let (a, b) = slice[0].edge();
        let mut lists: [Vec<CofaceList>; 2] = [Vec::new(), Vec::new()];
        for e in slice {
            let side = &mut lists[e.side() as usize];
            match side.last_mut() {
                Some(l) if l.i_before == e.i_before() => l.records.push(e.rec),
                _ => side.push(CofaceList { i_before: e.i_before(), records: vec![e.rec] }),
            }
        }
        EdgeCofaces { a, b, lists }
    }

    pub fn find(&self, a: PointId, b: PointId) -> Option<EdgeCofaces> {
        let (lo, hi) = edge_key(a, b);
        let key = (lo as u64) << 32 | hi as u64;
        let k = self.bounds[..self.edge_count()]
            .binary_search_by_key(&key, |&s| self.entries[s].key >> 1)
            .ok()?;
        Some(self.edge(k))
    }

    pub fn edges(&self) -> impl IndexedParallelIterator<Item = EdgeCofaces> + '_ {
        (0..self.edge_count()).into_par_iter().map(move |k| self.edge(k))
    }
}

/// Verifies the structural lemmas on one edge's coface lists:
/// a list shares its left boundary, lists have distinct left boundaries,
/// rectangles in a list are stacked without gaps, every rectangle touches
/// the right or bottom boundary of the edge's staircase, and grounded lists
/// lie entirely below floating ones.
pub fn check_lemmas(edge: &EdgeCofaces, records: &[TriangleRecord], n: PointId) -> Result<()> {
    let fail = |msg: String| Err(Error::CorruptStaircase(format!("edge ({}, {}): {msg}", edge.a, edge.b)));
    for (s, lists) in edge.lists.iter().enumerate() {
        let mut grounded_top = 0;
        let mut floating_bottom = PointId::MAX;
        for (k, list) in lists.iter().enumerate() {
            if k > 0 && lists[k - 1].i_before >= list.i_before {
                return fail(format!("side {s}: lists out of order"));
            }
            let rects: Vec<_> = list.records.iter().map(|&r| records[r as usize].rect(n)).collect();
            let i_min = rects[0].0;
            for w in rects.windows(2) {
                if w[0].3 + 1 != w[1].2 {
                    return fail(format!("side {s}: list {:?} not stacked", list.i_before));
                }
            }
            for r in &rects {
                if r.0 != i_min {
                    return fail(format!("side {s}: list {:?} has mixed left boundaries", list.i_before));
                }
                if r.1 != edge.a && r.2 != edge.b {
                    return fail(format!("side {s}: rect {r:?} touches neither boundary"));
                }
                if r.1 > edge.a || r.2 < edge.b {
                    return fail(format!("side {s}: rect {r:?} outside the staircase"));
                }
            }
            if rects[0].2 == edge.b {
                grounded_top = grounded_top.max(rects.last().unwrap().3);
            } else {
                floating_bottom = floating_bottom.min(rects[0].2);
            }
        }
        if grounded_top >= floating_bottom {
            return fail(format!("side {s}: floating list reaches below a grounded list"));
        }
    }
    Ok(())
}
