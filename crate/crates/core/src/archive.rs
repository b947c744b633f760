//! Binary container for a computed shape: points, cuboids and optionally
//! the stab index, so a service can load without recomputing.
//!
//! Layout (little-endian): magic `TASH`, `u32` version, `u32` flags (bit 0:
//! index present), `u32` name length and UTF-8 name, `u64` triangle count,
//! `u64` point count and points (`u32` index, `f64` x, `f64` y), `u64`
//! cuboid count and cuboids (`u32` a, `u32` b, `u8` side, four `u32`
//! window bounds, `f64` alpha_lo, `f64` alpha_hi with IEEE +∞), the index
//! section if flagged, and a trailing CRC-32 of all preceding bytes.

use std::path::Path;

use crate::alpha::{Cuboid, TemporalAlphaShape};
use crate::error::{Error, Result};
use crate::geometry::{EdgeSide, TimedPoint};
use crate::stab::{BoxTree, Bucket, IndexedBox, Node};

pub const MAGIC: &[u8; 4] = b"TASH";
pub const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct Archive {
    pub name: String,
    pub triangles: u64,
    pub points: Vec<TimedPoint>,
    pub cuboids: Vec<Cuboid>,
    pub index: Option<BoxTree>,
}

impl Archive {
    pub fn from_shape(name: &str, shape: &TemporalAlphaShape, with_index: bool) -> Archive {
        Archive {
            name: name.to_string(),
            triangles: shape.stats.triangles as u64,
            points: shape.points.clone(),
            cuboids: shape.cuboids.clone(),
            index: with_index.then(|| BoxTree::from_cuboids(&shape.cuboids)),
        }
    }

    /// The stored index, or one built on the spot.
    pub fn index_or_build(&mut self) -> &BoxTree {
        if self.index.is_none() {
            self.index = Some(BoxTree::from_cuboids(&self.cuboids));
        }
        self.index.as_ref().unwrap()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer(Vec::with_capacity(64 + self.points.len() * 20 + self.cuboids.len() * 41));
        w.0.extend_from_slice(MAGIC);
        w.u32(VERSION);
        w.u32(u32::from(self.index.is_some()));
        w.u32(self.name.len() as u32);
        w.0.extend_from_slice(self.name.as_bytes());
        w.u64(self.triangles);
        w.u64(self.points.len() as u64);
        for p in &self.points {
            w.u32(p.index);
            w.f64(p.x);
            w.f64(p.y);
        }
        w.u64(self.cuboids.len() as u64);
        for c in &self.cuboids {
            w.u32(c.a);
            w.u32(c.b);
            w.0.push(c.side as u8);
            for v in [c.i_min, c.i_max, c.j_min, c.j_max] {
                w.u32(v);
            }
            w.f64(c.alpha_lo);
            w.f64(c.alpha_hi);
        }
        if let Some(t) = &self.index {
            w.f64(t.top);
            w.u64(t.nodes.len() as u64);
            for n in &t.nodes {
                n.bound.iter().for_each(|&v| w.f64(v));
                for v in [n.first_bucket, n.buckets, n.children[0], n.children[1]] {
                    w.u32(v);
                }
            }
            w.u64(t.buckets.len() as u64);
            for b in &t.buckets {
                b.bound.iter().for_each(|&v| w.f64(v));
                w.u32(b.start);
                w.u32(b.end);
            }
            w.u64(t.boxes.len() as u64);
            for b in &t.boxes {
                w.u32(b.id);
            }
        }
        let crc = crc32fast::hash(&w.0);
        w.u32(crc);
        w.0
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Archive> {
        if bytes.len() < 12 || &bytes[..4] != MAGIC {
            return Err(Error::Archive("not an archive (bad magic)".into()));
        }
        let (body, tail) = bytes.split_at(bytes.len() - 4);
        let stored = u32::from_le_bytes(tail.try_into().unwrap());
        if crc32fast::hash(body) != stored {
            return Err(Error::Archive("checksum mismatch".into()));
        }
        let mut r = Reader { b: body, at: 4 };
        let version = r.u32()?;
        if version != VERSION {
            return Err(Error::Archive(format!("unsupported version {version}")));
        }
        let flags = r.u32()?;
        let name_len = r.u32()? as usize;
        let name = String::from_utf8(r.take(name_len)?.to_vec()).map_err(|_| Error::Archive("name is not UTF-8".into()))?;
        let triangles = r.u64()?;
        let np = r.len(20)?;
        let mut points = Vec::with_capacity(np);
        for _ in 0..np {
            points.push(TimedPoint::new(r.u32()?, r.f64()?, r.f64()?));
        }
        let nc = r.len(41)?;
        let mut cuboids = Vec::with_capacity(nc);
        for _ in 0..nc {
            let (a, b) = (r.u32()?, r.u32()?);
            let side = match r.take(1)?[0] {
                0 => EdgeSide::Front,
                1 => EdgeSide::Back,
                s => return Err(Error::Archive(format!("bad side flag {s}"))),
            };
            let (i_min, i_max, j_min, j_max) = (r.u32()?, r.u32()?, r.u32()?, r.u32()?);
            let (alpha_lo, alpha_hi) = (r.f64()?, r.f64()?);
            cuboids.push(Cuboid { a, b, side, i_min, i_max, j_min, j_max, alpha_lo, alpha_hi });
        }
        let index = if flags & 1 == 1 {
            let top = r.f64()?;
            let nn = r.len(64)?;
            let mut nodes = Vec::with_capacity(nn);
            for _ in 0..nn {
                let bound = r.bound()?;
                let (first_bucket, buckets, c0, c1) = (r.u32()?, r.u32()?, r.u32()?, r.u32()?);
                nodes.push(Node { bound, first_bucket, buckets, children: [c0, c1] });
            }
            let nbk = r.len(56)?;
            let mut buckets = Vec::with_capacity(nbk);
            for _ in 0..nbk {
                let bound = r.bound()?;
                buckets.push(Bucket { bound, start: r.u32()?, end: r.u32()? });
            }
            let nb = r.len(4)?;
            let mut boxes = Vec::with_capacity(nb);
            for _ in 0..nb {
                let id = r.u32()?;
                let c = cuboids.get(id as usize).ok_or_else(|| Error::Archive(format!("index refers to cuboid {id}")))?;
                boxes.push(IndexedBox::from_cuboid(id, c));
            }
            let tree = BoxTree { nodes, buckets, boxes, top };
            validate_tree(&tree)?;
            Some(tree)
        } else {
            None
        };
        if r.at != body.len() {
            return Err(Error::Archive("trailing bytes".into()));
        }
        Ok(Archive { name, triangles, points, cuboids, index })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Archive> {
        Archive::from_bytes(&std::fs::read(path)?)
    }
}

fn validate_tree(t: &BoxTree) -> Result<()> {
    let bad = |m: &str| Err(Error::Archive(format!("index: {m}")));
    for n in &t.nodes {
        if (n.first_bucket as usize + n.buckets as usize) > t.buckets.len() {
            return bad("bucket range out of bounds");
        }
        if n.children.iter().any(|&c| c != u32::MAX && c as usize >= t.nodes.len()) {
            return bad("child out of bounds");
        }
    }
    if t.buckets.iter().any(|b| b.start > b.end || b.end as usize > t.boxes.len()) {
        return bad("box range out of bounds");
    }
    Ok(())
}

struct Writer(Vec<u8>);

impl Writer {
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
}

struct Reader<'a> {
    b: &'a [u8],
    at: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, k: usize) -> Result<&'a [u8]> {
        if self.b.len() - self.at < k {
            return Err(Error::Archive("truncated".into()));
        }
        let s = &self.b[self.at..self.at + k];
        self.at += k;
        Ok(s)
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn bound(&mut self) -> Result<[f64; 6]> {
        let mut b = [0.0; 6];
        for v in &mut b {
            *v = self.f64()?;
        }
        Ok(b)
    }
    /// Reads a count and checks that many records of `size` bytes remain.
    fn len(&mut self, size: usize) -> Result<usize> {
        let n = self.u64()? as usize;
        if n.checked_mul(size).map_or(true, |need| need > self.b.len() - self.at) {
            return Err(Error::Archive("truncated".into()));
        }
        Ok(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alpha::temporal_alpha_shape;
    use crate::dataset::gen_swarm;

    #[test]
    fn round_trip_with_and_without_index() {
        let d = gen_swarm(5, 2, 6, 1).unwrap();
        let shape = temporal_alpha_shape(&d.points).unwrap();
        for with in [false, true] {
            let a = Archive::from_shape(&d.name, &shape, with);
            let bytes = a.to_bytes();
            let b = Archive::from_bytes(&bytes).unwrap();
            assert_eq!(a, b);
            assert_eq!(b.to_bytes(), bytes);
        }
    }

    #[test]
    fn detects_corruption() {
        let d = gen_swarm(3, 2, 3, 1).unwrap();
        let shape = temporal_alpha_shape(&d.points).unwrap();
        let mut bytes = Archive::from_shape("x", &shape, true).to_bytes();
        let mid = bytes.len() / 2;
        bytes[mid] ^= 0x10;
        assert!(matches!(Archive::from_bytes(&bytes), Err(Error::Archive(_))));
        assert!(Archive::from_bytes(b"nope").is_err());
        assert!(Archive::from_bytes(&bytes[..bytes.len() - 9]).is_err());
    }
}
