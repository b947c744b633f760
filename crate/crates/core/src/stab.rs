//! Box-stabbing index over cuboids.
//!
//! A kd-tree over boxes lifted to 6-d points `(i_min, i_max, j_min, j_max,
//! alpha_lo, alpha_hi)`. A box contains a query `(i, j, α)` iff its lifted
//! point lies in the orthant `p0 <= i, p1 >= i, p2 <= j, p3 >= j, p4 <= α,
//! p5 >= α`. Each inner node first peels off six priority buckets holding
//! the boxes most extreme in each lifted coordinate, then splits the rest at
//! the median of a dimension that cycles with depth.

use crate::alpha::Cuboid;
use crate::geometry::PointId;

pub const BUCKET: usize = 8;
const NIL: u32 = u32::MAX;

/// One stored box with its id.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IndexedBox {
    pub id: u32,
    pub i_min: PointId,
    pub i_max: PointId,
    pub j_min: PointId,
    pub j_max: PointId,
    pub alpha_lo: f64,
    /// May be `f64::INFINITY`.
    pub alpha_hi: f64,
}

impl IndexedBox {
    pub fn from_cuboid(id: u32, c: &Cuboid) -> IndexedBox {
        IndexedBox { id, i_min: c.i_min, i_max: c.i_max, j_min: c.j_min, j_max: c.j_max, alpha_lo: c.alpha_lo, alpha_hi: c.alpha_hi }
    }

    pub fn contains(&self, i: PointId, j: PointId, alpha: f64) -> bool {
        self.i_min <= i && i <= self.i_max && self.j_min <= j && j <= self.j_max && self.alpha_lo <= alpha && alpha <= self.alpha_hi
    }

    fn lifted(&self, k: usize, top: f64) -> f64 {
        match k {
            0 => self.i_min as f64,
            1 => self.i_max as f64,
            2 => self.j_min as f64,
            3 => self.j_max as f64,
            4 => self.alpha_lo,
            _ => {
                if self.alpha_hi.is_infinite() {
                    top
                } else {
                    self.alpha_hi
                }
            }
        }
    }
}

/// Per-coordinate extremes of a set of lifted points: minima for even
/// coordinates, maxima for odd ones.
pub type Bound = [f64; 6];

fn empty_bound() -> Bound {
    [f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY]
}

fn grow(b: &mut Bound, x: &IndexedBox, top: f64) {
    for k in 0..6 {
        let v = x.lifted(k, top);
        if k % 2 == 0 {
            b[k] = b[k].min(v);
        } else {
            b[k] = b[k].max(v);
        }
    }
}

fn admits(b: &Bound, q: &[f64; 3]) -> bool {
    b[0] <= q[0] && b[1] >= q[0] && b[2] <= q[1] && b[3] >= q[1] && b[4] <= q[2] && b[5] >= q[2]
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bucket {
    pub bound: Bound,
    pub start: u32,
    pub end: u32,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Node {
    pub bound: Bound,
    pub first_bucket: u32,
    pub buckets: u32,
    pub children: [u32; 2],
}

/// The built index. Boxes are stored in traversal order.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxTree {
    pub nodes: Vec<Node>,
    pub buckets: Vec<Bucket>,
    pub boxes: Vec<IndexedBox>,
    /// Lifted value of unbounded α-tops.
    pub top: f64,
}

/// Orders boxes so that the most extreme in coordinate `k` come first.
fn extreme_cmp(k: usize, top: f64) -> impl Fn(&IndexedBox, &IndexedBox) -> std::cmp::Ordering {
    move |a, b| {
        let (va, vb) = (a.lifted(k, top), b.lifted(k, top));
        let o = if k % 2 == 0 { va.total_cmp(&vb) } else { vb.total_cmp(&va) };
        o.then(a.id.cmp(&b.id))
    }
}

impl BoxTree {
    pub fn build(mut boxes: Vec<IndexedBox>) -> BoxTree {
        let max_finite = boxes
            .iter()
            .flat_map(|b| [b.alpha_lo, b.alpha_hi])
            .filter(|v| v.is_finite())
            .fold(0.0f64, f64::max);
        let top = 2.0 * max_finite + 1.0;
        let mut t = BoxTree { nodes: Vec::new(), buckets: Vec::new(), boxes: Vec::with_capacity(boxes.len()), top };
        if !boxes.is_empty() {
            t.build_node(&mut boxes, 0);
        }
        t
    }

    pub fn from_cuboids(cuboids: &[Cuboid]) -> BoxTree {
        BoxTree::build(cuboids.iter().enumerate().map(|(k, c)| IndexedBox::from_cuboid(k as u32, c)).collect())
    }

    fn push_bucket(&mut self, items: &[IndexedBox]) -> Bound {
        let mut bound = empty_bound();
        let start = self.boxes.len() as u32;
        for x in items {
            grow(&mut bound, x, self.top);
            self.boxes.push(*x);
        }
        self.buckets.push(Bucket { bound, start, end: self.boxes.len() as u32 });
        bound
    }

    fn build_node(&mut self, items: &mut [IndexedBox], depth: usize) -> u32 {
        let id = self.nodes.len() as u32;
        self.nodes.push(Node { bound: empty_bound(), first_bucket: self.buckets.len() as u32, buckets: 0, children: [NIL, NIL] });
        let mut bound = empty_bound();
        let merge = |bound: &mut Bound, b: &Bound| {
            for k in 0..6 {
                bound[k] = if k % 2 == 0 { bound[k].min(b[k]) } else { bound[k].max(b[k]) };
            }
        };
        if items.len() <= BUCKET {
            let b = self.push_bucket(items);
            merge(&mut bound, &b);
            let node = &mut self.nodes[id as usize];
            node.buckets = 1;
            node.bound = bound;
            return id;
        }
        let mut rest: &mut [IndexedBox] = items;
        let mut nb = 0;
        for k in 0..6 {
            if rest.is_empty() {
                break;
            }
            let take = BUCKET.min(rest.len());
            let cmp = extreme_cmp(k, self.top);
            if take < rest.len() {
                rest.select_nth_unstable_by(take - 1, &cmp);
            }
            let (head, tail) = std::mem::take(&mut rest).split_at_mut(take);
            let b = self.push_bucket(head);
            merge(&mut bound, &b);
            nb += 1;
            rest = tail;
        }
        self.nodes[id as usize].buckets = nb;
        if !rest.is_empty() {
            let dim = depth % 6;
            let mid = rest.len() / 2;
            let top = self.top;
            rest.select_nth_unstable_by(mid, |a, b| a.lifted(dim, top).total_cmp(&b.lifted(dim, top)).then(a.id.cmp(&b.id)));
            let (lo, hi) = rest.split_at_mut(mid);
            let mut children = [NIL, NIL];
            for (slot, part) in [lo, hi].into_iter().enumerate() {
                if !part.is_empty() {
                    let c = self.build_node(part, depth + 1);
                    let cb = self.nodes[c as usize].bound;
                    merge(&mut bound, &cb);
                    children[slot] = c;
                }
            }
            self.nodes[id as usize].children = children;
        }
        self.nodes[id as usize].bound = bound;
        id
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    /// Calls `f` with the id of every box containing `(i, j, alpha)` and
    /// returns the number of nodes visited.
    pub fn stab_with(&self, i: PointId, j: PointId, alpha: f64, mut f: impl FnMut(u32)) -> usize {
        if self.nodes.is_empty() {
            return 0;
        }
        let q = [i as f64, j as f64, alpha.min(self.top)];
        let mut visited = 0;
        let mut stack = vec![0u32];
        while let Some(n) = stack.pop() {
            let node = &self.nodes[n as usize];
            visited += 1;
            if !admits(&node.bound, &q) {
                continue;
            }
            for b in &self.buckets[node.first_bucket as usize..(node.first_bucket + node.buckets) as usize] {
                if admits(&b.bound, &q) {
                    for x in &self.boxes[b.start as usize..b.end as usize] {
                        if x.contains(i, j, alpha) {
                            f(x.id);
                        }
                    }
                }
            }
            for &c in node.children.iter().rev() {
                if c != NIL {
                    stack.push(c);
                }
            }
        }
        visited
    }

    pub fn stab(&self, i: PointId, j: PointId, alpha: f64) -> Vec<u32> {
        let mut out = Vec::new();
        self.stab_with(i, j, alpha, |id| out.push(id));
        out.sort_unstable();
        out
    }

    /// Every stored id, found by walking the tree from the root.
    pub fn census(&self) -> Vec<u32> {
        let mut out = Vec::new();
        let mut stack = if self.nodes.is_empty() { vec![] } else { vec![0u32] };
        while let Some(n) = stack.pop() {
            let node = &self.nodes[n as usize];
            for b in &self.buckets[node.first_bucket as usize..(node.first_bucket + node.buckets) as usize] {
                out.extend(self.boxes[b.start as usize..b.end as usize].iter().map(|x| x.id));
            }
            stack.extend(node.children.iter().copied().filter(|&c| c != NIL));
        }
        out
    }

    /// Checks that each priority bucket holds the most extreme boxes in its
    /// coordinate among everything stored at or below its node.
    pub fn check_priority(&self) -> bool {
        fn subtree(t: &BoxTree, n: u32, out: &mut Vec<IndexedBox>) {
            let node = &t.nodes[n as usize];
            for b in &t.buckets[node.first_bucket as usize..(node.first_bucket + node.buckets) as usize] {
                out.extend_from_slice(&t.boxes[b.start as usize..b.end as usize]);
            }
            for &c in &node.children {
                if c != NIL {
                    subtree(t, c, out);
                }
            }
        }
        for n in 0..self.nodes.len() as u32 {
            let node = self.nodes[n as usize];
            if node.buckets < 6 {
                continue;
            }
            let mut all = Vec::new();
            subtree(self, n, &mut all);
            for k in 0..6 {
                let b = self.buckets[(node.first_bucket as usize) + k];
                let mut rest: Vec<IndexedBox> = all.clone();
                // boxes already taken by earlier priority buckets are excluded
                let earlier: Vec<u32> = (0..k)
                    .flat_map(|e| {
                        let eb = self.buckets[node.first_bucket as usize + e];
                        self.boxes[eb.start as usize..eb.end as usize].iter().map(|x| x.id).collect::<Vec<_>>()
                    })
                    .collect();
                rest.retain(|x| !earlier.contains(&x.id));
                rest.sort_by(extreme_cmp(k, self.top));
                let mut want: Vec<u32> = rest[..(b.end - b.start) as usize].iter().map(|x| x.id).collect();
                let mut got: Vec<u32> = self.boxes[b.start as usize..b.end as usize].iter().map(|x| x.id).collect();
                want.sort_unstable();
                got.sort_unstable();
                if want != got {
                    return false;
                }
            }
        }
        true
    }
}
