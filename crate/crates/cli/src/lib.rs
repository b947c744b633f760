//! Library half of the `tempalpha` command: the HTTP service and the
//! pieces of each subcommand that are worth testing without a process.

pub mod service;

use std::io::Write;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use tempalpha::alpha::ShapeStats;
use tempalpha::{BoxTree, Cuboid, PointId, TimedPoint};

/// Writes points as `t,x,y` rows with a header, using the 1-based index as time.
pub fn write_csv<W: Write>(mut w: W, points: &[TimedPoint]) -> std::io::Result<()> {
    writeln!(w, "t,x,y")?;
    for p in points {
        writeln!(w, "{},{:?},{:?}", p.index, p.x, p.y)?;
    }
    w.flush()
}

/// `key=value` lines describing a computed shape.
pub fn shape_report(s: &ShapeStats) -> Vec<(String, String)> {
    let ratio = s.cuboids as f64 / s.triangles.max(1) as f64;
    [
        ("n", s.n.to_string()),
        ("triangles", s.triangles.to_string()),
        ("edges", s.edges.to_string()),
        ("cuboids", s.cuboids.to_string()),
        ("ratio", format!("{ratio:.4}")),
        ("bound_ok", s.within_bound().to_string()),
        ("peak_edge_cuboids", s.peak_edge_cuboids.to_string()),
        ("scratch_faces", s.enumeration.scratch_faces.to_string()),
        ("enumerate_seconds", format!("{:.3}", s.enumerate_secs)),
        ("registry_seconds", format!("{:.3}", s.registry_secs)),
        ("cuboid_seconds", format!("{:.3}", s.cuboid_secs)),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchResult {
    pub queries: usize,
    pub hits: usize,
    pub indexed_secs: f64,
    pub naive_secs: f64,
    pub mismatches: usize,
}

impl BenchResult {
    pub fn speedup(&self) -> f64 {
        self.naive_secs / self.indexed_secs.max(1e-12)
    }
}

/// Random windows of at least `min_len` points with α drawn between the
/// smallest and largest finite α values seen in the cuboids.
pub fn random_queries(cuboids: &[Cuboid], n: PointId, min_len: PointId, count: usize, seed: u64) -> Vec<(PointId, PointId, f64)> {
    let mut rng = StdRng::seed_from_u64(seed);
    let lo = cuboids.iter().map(|c| c.alpha_lo).fold(f64::INFINITY, f64::min);
    let hi = cuboids.iter().flat_map(|c| [c.alpha_lo, c.alpha_hi]).filter(|v| v.is_finite()).fold(0.0, f64::max);
    let (lo, hi) = if lo.is_finite() && hi > lo { (lo, hi) } else { (1.0, 2.0) };
    let min_len = min_len.clamp(2, n.max(2));
    (0..count)
        .map(|_| {
            let len = rng.gen_range(min_len..=n.max(min_len));
            let i = rng.gen_range(1..=n + 1 - len);
            (i, i + len - 1, rng.gen_range(lo..=hi))
        })
        .collect()
}

/// Times the stab index against a linear scan on the same queries and
/// counts queries where the two disagree.
pub fn bench(tree: &BoxTree, cuboids: &[Cuboid], queries: &[(PointId, PointId, f64)]) -> BenchResult {
    let clock = Instant::now();
    let indexed: Vec<Vec<u32>> = queries.iter().map(|&(i, j, a)| tree.stab(i, j, a)).collect();
    let indexed_secs = clock.elapsed().as_secs_f64();
    let clock = Instant::now();
    let naive: Vec<Vec<u32>> = queries
        .iter()
        .map(|&(i, j, a)| (0..cuboids.len() as u32).filter(|&k| cuboids[k as usize].contains(i, j, a)).collect())
        .collect();
    let naive_secs = clock.elapsed().as_secs_f64();
    let mismatches = indexed.iter().zip(&naive).filter(|(x, y)| x != y).count();
    BenchResult { queries: queries.len(), hits: indexed.iter().map(Vec::len).sum(), indexed_secs, naive_secs, mismatches }
}
