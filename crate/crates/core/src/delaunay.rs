//! Incremental Delaunay triangulation with history-based point location.
//!
//! Convex hull facets are kept as degenerate triangles joined to a virtual
//! vertex at infinity, so the triangulation is a closed surface and every
//! edge has exactly two cofaces. Points are inserted in the order given;
//! insertion order carries the temporal meaning of the sequence and is never
//! shuffled.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use crate::error::{Error, Result};
use crate::geometry::{
    circumcenter_side_xy, circumdisk_xy, edge_key, facet_disk_xy, in_circle_ccw_xy,
    min_edge_radius_xy, orient_xy, CenterSide, Disk, EdgeSide, PointId, Sign, TimedPoint,
};

/// Local vertex number of the vertex at infinity.
const INF: u32 = u32::MAX;
const NONE: u32 = u32::MAX;

pub type FaceId = u32;

/// A Delaunay triangle or a degenerate hull facet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tri {
    /// Counter-clockwise, rotated so the smallest index comes first.
    Finite([PointId; 3]),
    /// Hull facet on edge `(a, b)`; its outer halfplane is left of `a -> b`.
    Hull([PointId; 2]),
}

impl Tri {
    pub fn finite(a: PointId, b: PointId, c: PointId) -> Tri {
        let v = [a, b, c];
        let m = (0..3).min_by_key(|&k| v[k]).unwrap();
        Tri::Finite([v[m], v[(m + 1) % 3], v[(m + 2) % 3]])
    }

    pub fn vertices(&self) -> &[PointId] {
        match self {
            Tri::Finite(v) => v,
            Tri::Hull(v) => v,
        }
    }

    pub fn lowest(&self) -> PointId {
        *self.vertices().iter().min().unwrap()
    }

    pub fn highest(&self) -> PointId {
        *self.vertices().iter().max().unwrap()
    }

    pub fn is_hull(&self) -> bool {
        matches!(self, Tri::Hull(_))
    }

    pub fn contains_vertex(&self, v: PointId) -> bool {
        self.vertices().contains(&v)
    }

    /// Directed edges with this triangle on their left, each with the
    /// opposite vertex (`None` for hull facets).
    pub fn edges(&self) -> Vec<(PointId, PointId, Option<PointId>)> {
        match *self {
            Tri::Finite([a, b, c]) => vec![(a, b, Some(c)), (b, c, Some(a)), (c, a, Some(b))],
            Tri::Hull([a, b]) => vec![(a, b, None)],
        }
    }
}

/// How `insert` finds the first triangle in conflict with a new point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocateMode {
    /// Trace the point through the history of destroyed triangles.
    History,
    /// Scan live triangles; only sensible for a handful of points.
    Scan,
}

#[derive(Clone, Debug)]
struct Face {
    v: [u32; 3],
    /// `adj[k]` lies across the edge opposite `v[k]`.
    adj: [FaceId; 3],
    alive: bool,
    children: (FaceId, FaceId),
    mark: u32,
    conflict: bool,
}

impl Face {
    fn is_infinite(&self) -> bool {
        self.v[2] == INF
    }
}

/// Result of one insertion.
#[derive(Clone, Debug, Default)]
pub struct Insertion {
    pub created: Vec<FaceId>,
    pub destroyed: Vec<FaceId>,
}

#[derive(Clone, Debug)]
pub struct Triangulation {
    coords: Vec<[f64; 2]>,
    ids: Vec<PointId>,
    by_id: HashMap<PointId, u32>,
    by_xy: HashSet<(u64, u64)>,
    faces: Vec<Face>,
    vertex_face: Vec<FaceId>,
    roots: Vec<FaceId>,
    origin: Option<[f64; 2]>,
    mode: LocateMode,
    epoch: u32,
    keep_history: bool,
}

impl Triangulation {
    pub fn new(mode: LocateMode) -> Self {
        Triangulation {
            coords: Vec::new(),
            ids: Vec::new(),
            by_id: HashMap::new(),
            by_xy: HashSet::new(),
            faces: Vec::new(),
            vertex_face: Vec::new(),
            roots: Vec::new(),
            origin: None,
            mode,
            epoch: 0,
            keep_history: mode == LocateMode::History,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    #[inline]
    fn xy(&self, local: u32) -> [f64; 2] {
        self.coords[local as usize]
    }

    fn global(&self, local: u32) -> Option<PointId> {
        (local != INF).then(|| self.ids[local as usize])
    }

    pub fn is_alive(&self, f: FaceId) -> bool {
        self.faces[f as usize].alive
    }

    /// The triangle stored at face `f` (alive or not).
    pub fn tri(&self, f: FaceId) -> Tri {
        let face = &self.faces[f as usize];
        if face.is_infinite() {
            Tri::Hull([self.ids[face.v[0] as usize], self.ids[face.v[1] as usize]])
        } else {
            let g = |k: usize| self.ids[face.v[k] as usize];
            Tri::finite(g(0), g(1), g(2))
        }
    }

    pub fn disk(&self, f: FaceId) -> Disk {
        let face = &self.faces[f as usize];
        if face.is_infinite() {
            facet_disk_xy(self.xy(face.v[0]), self.xy(face.v[1]))
        } else {
            circumdisk_xy(self.xy(face.v[0]), self.xy(face.v[1]), self.xy(face.v[2]))
                .expect("live finite faces are non-degenerate")
        }
    }

    /// Neighbours of `f` as face ids, across the edges of its stored order.
    pub fn neighbors(&self, f: FaceId) -> [FaceId; 3] {
        self.faces[f as usize].adj
    }

    pub fn live_faces(&self) -> impl Iterator<Item = FaceId> + '_ {
        (0..self.faces.len() as FaceId).filter(move |&f| self.faces[f as usize].alive)
    }

    pub fn live_tris(&self) -> Vec<Tri> {
        self.live_faces().map(|f| self.tri(f)).collect()
    }

    pub fn coords_of(&self, id: PointId) -> Option<[f64; 2]> {
        self.by_id.get(&id).map(|&l| self.xy(l))
    }

    /// Whether `q` lies strictly inside the open circumdisk of face `f`.
    fn conflicts(&self, f: FaceId, q: [f64; 2]) -> Result<bool> {
        let face = &self.faces[f as usize];
        if face.is_infinite() {
            match orient_xy(self.xy(face.v[0]), self.xy(face.v[1]), q) {
                Sign::Positive => Ok(true),
                Sign::Negative => Ok(false),
                Sign::Zero => Err(Error::Degenerate("point collinear with a hull edge")),
            }
        } else {
            match in_circle_ccw_xy(self.xy(face.v[0]), self.xy(face.v[1]), self.xy(face.v[2]), q) {
                Sign::Positive => Ok(true),
                Sign::Negative => Ok(false),
                Sign::Zero => Err(Error::Degenerate("four cocircular points")),
            }
        }
    }

    pub fn conflicts_with(&self, f: FaceId, q: [f64; 2]) -> Result<bool> {
        self.conflicts(f, q)
    }

    /// Closed containment of `q` in the region of face `f`. Regions of
    /// infinite faces are the cones from an interior origin through their
    /// hull edge, beyond that edge.
    fn region_contains(&self, f: FaceId, q: [f64; 2]) -> bool {
        let face = &self.faces[f as usize];
        let a = self.xy(face.v[0]);
        let b = self.xy(face.v[1]);
        if face.is_infinite() {
            let o = self.origin.expect("origin set once a finite face exists");
            orient_xy(a, b, q) != Sign::Negative
                && orient_xy(o, a, q) != Sign::Positive
                && orient_xy(o, b, q) != Sign::Negative
        } else {
            let cc = self.xy(face.v[2]);
            orient_xy(a, b, q) != Sign::Negative
                && orient_xy(b, cc, q) != Sign::Negative
                && orient_xy(cc, a, q) != Sign::Negative
        }
    }

    /// Finds the live face whose region contains `q`, which is then also in
    /// conflict with `q`.
    fn locate_local(&self, q: [f64; 2]) -> Result<FaceId> {
        if self.faces.is_empty() {
            return Err(Error::TooFewPoints { needed: 2, got: self.ids.len() });
        }
        if self.origin.is_none() || self.mode == LocateMode::Scan {
            for f in self.live_faces() {
                if self.conflicts(f, q)? {
                    return Ok(f);
                }
            }
            return Err(Error::Degenerate("no face in conflict with point"));
        }
        let mut cur = *self
            .roots
            .iter()
            .find(|&&r| self.region_contains(r, q))
            .ok_or(Error::Degenerate("point outside every root region"))?;
        while !self.faces[cur as usize].alive {
            let (lo, hi) = self.faces[cur as usize].children;
            cur = (lo..hi)
                .find(|&ch| self.region_contains(ch, q))
                .ok_or(Error::Degenerate("history descent lost the point"))?;
        }
        Ok(cur)
    }

    /// The live triangle (or hull facet region) containing `p`.
    pub fn locate(&self, p: &TimedPoint) -> Result<FaceId> {
        let q = p.xy();
        let f = self.locate_local(q)?;
        for &v in &self.faces[f as usize].v {
            if v != INF && self.xy(v) == q {
                return Err(Error::DuplicatePoint(p.index));
            }
        }
        Ok(f)
    }

    fn push_face(&mut self, v: [u32; 3], adj: [FaceId; 3]) -> FaceId {
        let id = self.faces.len() as FaceId;
        self.faces.push(Face { v, adj, alive: true, children: (0, 0), mark: 0, conflict: false });
        for &x in &v {
            if x != INF {
                self.vertex_face[x as usize] = id;
            }
        }
        id
    }

    /// Inserts `p`, returning the faces it created and destroyed.
    pub fn insert(&mut self, p: &TimedPoint) -> Result<Insertion> {
        if !(p.x.is_finite() && p.y.is_finite()) {
            return Err(Error::Degenerate("non-finite coordinate"));
        }
        if self.by_id.contains_key(&p.index) || self.by_xy.contains(&xy_key(p.xy())) {
            return Err(Error::DuplicatePoint(p.index));
        }
        let q = p.xy();
        match self.ids.len() {
            0 => {
                self.add_vertex(p);
                return Ok(Insertion::default());
            }
            1 => {
                if self.coords[0] == q {
                    return Err(Error::DuplicatePoint(p.index));
                }
                let b = self.add_vertex(p);
                // Two facets glued along all three edges.
                let f0 = self.push_face([0, b, INF], [1, 1, 1]);
                let f1 = self.push_face([b, 0, INF], [0, 0, 0]);
                return Ok(Insertion { created: vec![f0, f1], destroyed: vec![] });
            }
            _ => {}
        }
        let start = self.locate_local(q)?;
        for &v in &self.faces[start as usize].v {
            if v != INF && self.xy(v) == q {
                return Err(Error::DuplicatePoint(p.index));
            }
        }
        self.epoch += 1;
        let epoch = self.epoch;
        // Grow the cavity of faces in conflict with q.
        let mut cavity = Vec::new();
        let mut stack = vec![start];
        self.faces[start as usize].mark = epoch;
        self.faces[start as usize].conflict = true;
        while let Some(f) = stack.pop() {
            cavity.push(f);
            for k in 0..3 {
                let g = self.faces[f as usize].adj[k];
                if self.faces[g as usize].mark == epoch {
                    continue;
                }
                let c = self.conflicts(g, q)?;
                let gf = &mut self.faces[g as usize];
                gf.mark = epoch;
                gf.conflict = c;
                if c {
                    stack.push(g);
                }
            }
        }
        if self.ids.len() == 2 && self.faces[cavity[0] as usize].is_infinite() && cavity.len() == 1 {
            let f = &self.faces[cavity[0] as usize];
            if orient_xy(self.xy(f.v[0]), self.xy(f.v[1]), q) == Sign::Zero {
                return Err(Error::Degenerate("three collinear points"));
            }
        }
        // Boundary edges (u, w) with the outside face and its edge slot.
        let mut boundary: Vec<(u32, u32, FaceId, usize)> = Vec::new();
        for &f in &cavity {
            let face = &self.faces[f as usize];
            for k in 0..3 {
                let g = face.adj[k];
                let gf = &self.faces[g as usize];
                if gf.conflict && gf.mark == epoch {
                    continue;
                }
                let u = face.v[(k + 1) % 3];
                let w = face.v[(k + 2) % 3];
                let gk = (0..3)
                    .find(|&s| gf.v[(s + 1) % 3] == w && gf.v[(s + 2) % 3] == u)
                    .expect("adjacent faces share the edge");
                boundary.push((u, w, g, gk));
            }
        }
        boundary.sort_unstable_by_key(|e| e.0);
        let local = self.add_vertex(p);
        let first = self.faces.len() as FaceId;
        let m = boundary.len();
        let by_start = |x: u32| -> FaceId {
            first + boundary.binary_search_by_key(&x, |e| e.0).expect("cavity boundary is a cycle") as FaceId
        };
        let mut by_end: HashMap<u32, FaceId> = HashMap::with_capacity(m);
        for (e, b) in boundary.iter().enumerate() {
            by_end.insert(b.1, first + e as FaceId);
        }
        for &(u, w, g, gk) in &boundary {
            let across_wp = by_start(w);
            let across_pu = by_end[&u];
            let tri = [u, w, local];
            let adj = [across_wp, across_pu, g];
            let (v, a) = if u == INF {
                ([tri[1], tri[2], tri[0]], [adj[1], adj[2], adj[0]])
            } else if w == INF {
                ([tri[2], tri[0], tri[1]], [adj[2], adj[0], adj[1]])
            } else {
                (tri, adj)
            };
            let id = self.push_face(v, a);
            self.faces[g as usize].adj[gk] = id;
        }
        let last = self.faces.len() as FaceId;
        for &f in &cavity {
            let face = &mut self.faces[f as usize];
            face.alive = false;
            face.conflict = false;
            if self.keep_history {
                face.children = (first, last);
            }
        }
        for &f in &cavity {
            for &x in &self.faces[f as usize].v.clone() {
                if x != INF && !self.faces[self.vertex_face[x as usize] as usize].alive {
                    // Re-point at a new face incident to x.
                    let nf = (first..last).find(|&n| self.faces[n as usize].v.contains(&x));
                    if let Some(nf) = nf {
                        self.vertex_face[x as usize] = nf;
                    }
                }
            }
        }
        if self.origin.is_none() && self.ids.len() == 3 {
            self.init_origin()?;
        }
        Ok(Insertion { created: (first..last).collect(), destroyed: cavity })
    }

    fn add_vertex(&mut self, p: &TimedPoint) -> u32 {
        let l = self.ids.len() as u32;
        self.ids.push(p.index);
        self.coords.push(p.xy());
        self.by_id.insert(p.index, l);
        self.by_xy.insert(xy_key(p.xy()));
        self.vertex_face.push(NONE);
        l
    }

    fn init_origin(&mut self) -> Result<()> {
        let f = self
            .live_faces()
            .find(|&f| !self.faces[f as usize].is_infinite())
            .ok_or(Error::Degenerate("three collinear points"))?;
        let v = self.faces[f as usize].v;
        let (a, b, c) = (self.xy(v[0]), self.xy(v[1]), self.xy(v[2]));
        let weights = [[1.0 / 3.0; 3], [0.5, 0.25, 0.25], [0.25, 0.5, 0.25], [0.25, 0.25, 0.5]];
        for w in weights {
            let o = [
                w[0] * a[0] + w[1] * b[0] + w[2] * c[0],
                w[0] * a[1] + w[1] * b[1] + w[2] * c[1],
            ];
            if orient_xy(a, b, o) == Sign::Positive
                && orient_xy(b, c, o) == Sign::Positive
                && orient_xy(c, a, o) == Sign::Positive
            {
                self.origin = Some(o);
                self.roots = self.live_faces().collect();
                return Ok(());
            }
        }
        Err(Error::Degenerate("first triangle too thin for an interior origin"))
    }

    /// Neighbours of vertex `id` in counter-clockwise order; `None` stands
    /// for the vertex at infinity.
    pub fn link_of(&self, id: PointId) -> Result<Vec<Option<PointId>>> {
        let &l = self.by_id.get(&id).ok_or(Error::DuplicatePoint(id))?;
        if self.ids.len() < 2 {
            return Ok(vec![]);
        }
        let start = self.vertex_face[l as usize];
        let mut out = Vec::new();
        let mut f = start;
        loop {
            let face = &self.faces[f as usize];
            let k = (0..3).find(|&k| face.v[k] == l).expect("vertex face is incident");
            let x = face.v[(k + 1) % 3];
            out.push(self.global(x));
            f = face.adj[(k + 1) % 3];
            if f == start || out.len() > self.faces.len() {
                break;
            }
        }
        Ok(out)
    }

    /// Empty-circumdisk check over all live faces and all vertices.
    pub fn is_delaunay(&self) -> bool {
        for f in self.live_faces() {
            for l in 0..self.ids.len() as u32 {
                if self.faces[f as usize].v.contains(&l) {
                    continue;
                }
                if self.conflicts(f, self.xy(l)).unwrap_or(true) {
                    return false;
                }
            }
        }
        true
    }
}

fn xy_key(q: [f64; 2]) -> (u64, u64) {
    // +0.0 folds -0.0 onto 0.0
    ((q[0] + 0.0).to_bits(), (q[1] + 0.0).to_bits())
}

pub fn link_edges_of(tri: &Triangulation, v: PointId) -> Result<Vec<(Option<PointId>, Option<PointId>)>> {
    let link = tri.link_of(v)?;
    let k = link.len();
    Ok((0..k).map(|i| (link[i], link[(i + 1) % k])).collect())
}

/// Delaunay triangulation of `points` built by sequential insertion.
pub fn build_delaunay(points: &[TimedPoint]) -> Result<Triangulation> {
    if points.len() < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: points.len() });
    }
    let mut t = Triangulation::new(LocateMode::History);
    for p in points {
        t.insert(p)?;
    }
    Ok(t)
}

/// Inserts `p` into `tri`.
pub fn insert_point(tri: &mut Triangulation, p: &TimedPoint) -> Result<Insertion> {
    tri.insert(p)
}

pub fn locate(tri: &Triangulation, p: &TimedPoint) -> Result<FaceId> {
    tri.locate(p)
}

/// One coface of an edge as seen by the α-range rule.
#[derive(Clone, Copy, Debug)]
pub struct Coface {
    pub radius: f64,
    pub center: CenterSide,
}

/// Both cofaces of every edge of a triangulation, keyed by `(lo, hi)`.
pub fn edge_cofaces(
    tri: &Triangulation,
    coords: impl Fn(PointId) -> [f64; 2],
) -> BTreeMap<(PointId, PointId), [Option<Coface>; 2]> {
    let mut map: BTreeMap<(PointId, PointId), [Option<Coface>; 2]> = BTreeMap::new();
    for f in tri.live_faces() {
        let t = tri.tri(f);
        let radius = tri.disk(f).radius;
        for (x, y, apex) in t.edges() {
            let key = edge_key(x, y);
            let side = if x < y { EdgeSide::Front } else { EdgeSide::Back };
            let center = match apex {
                None => match side {
                    EdgeSide::Front => CenterSide::Front,
                    EdgeSide::Back => CenterSide::Back,
                },
                Some(z) => match circumcenter_side_xy(coords(key.0), coords(key.1), coords(z)) {
                    Sign::Positive => CenterSide::Front,
                    Sign::Negative => CenterSide::Back,
                    Sign::Zero => CenterSide::OnLine,
                },
            };
            let slot = &mut map.entry(key).or_insert([None, None])[side as usize];
            *slot = Some(Coface { radius, center });
        }
    }
    map
}

fn check_window(points: &[TimedPoint], i: PointId, j: PointId) -> Result<()> {
    let n = points.len() as u32;
    if i < 1 || i >= j || j > n {
        return Err(Error::InvalidWindow { i, j, n });
    }
    Ok(())
}

/// Naive α-ranges of window `[i, j]`: triangulate the window and read
/// each edge side's closed range `[lo, hi]` off its two cofaces. Sides that
/// admit no empty α-ball are left out.
pub fn alpha_ranges_of_window(
    points: &[TimedPoint],
    i: PointId,
    j: PointId,
) -> Result<BTreeMap<(PointId, PointId, EdgeSide), (f64, f64)>> {
    check_window(points, i, j)?;
    let window = &points[(i - 1) as usize..j as usize];
    let tri = build_delaunay(window)?;
    let coord = |id: PointId| points[(id - 1) as usize].xy();
    let mut out = BTreeMap::new();
    for ((a, b), cof) in edge_cofaces(&tri, coord) {
        let r_min = min_edge_radius_xy(coord(a), coord(b));
        for side in [EdgeSide::Front, EdgeSide::Back] {
            let (Some(focal), Some(other)) = (cof[side as usize], cof[side.opposite() as usize]) else {
                continue;
            };
            if !focal.center.is(side) {
                continue;
            }
            let lo = if other.center.is(side) { other.radius } else { r_min };
            if lo <= focal.radius {
                out.insert((a, b, side), (lo, focal.radius));
            }
        }
    }
    Ok(out)
}

/// Edge sides of window `[i, j]` whose range contains `alpha`.
pub fn alpha_edges_of_window(
    points: &[TimedPoint],
    i: PointId,
    j: PointId,
    alpha: f64,
) -> Result<BTreeSet<(PointId, PointId, EdgeSide)>> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidAlpha(alpha));
    }
    Ok(alpha_ranges_of_window(points, i, j)?
        .into_iter()
        .filter(|(_, (lo, hi))| *lo <= alpha && alpha <= *hi)
        .map(|(k, _)| k)
        .collect())
}

/// All α-range bounds that occur in window `[i, j]`, sorted and deduplicated.
pub fn alpha_bounds_of_window(points: &[TimedPoint], i: PointId, j: PointId) -> Result<Vec<f64>> {
    check_window(points, i, j)?;
    let window = &points[(i - 1) as usize..j as usize];
    let tri = build_delaunay(window)?;
    let coord = |id: PointId| points[(id - 1) as usize].xy();
    let mut v = Vec::new();
    for ((a, b), cof) in edge_cofaces(&tri, coord) {
        v.push(min_edge_radius_xy(coord(a), coord(b)));
        for c in cof.iter().flatten() {
            if c.radius.is_finite() {
                v.push(c.radius);
            }
        }
    }
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v.dedup();
    Ok(v)
}
