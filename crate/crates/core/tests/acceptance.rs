//! Acceptance checks. Each criterion prints one PASS or FAIL line; the
//! process exits nonzero if any criterion fails.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempalpha::alpha::ShapeStats;
use tempalpha::dataset::{gen_swarm, Dataset};
use tempalpha::delaunay::alpha_bounds_of_window;
use tempalpha::registry::{check_lemmas, EdgeRegistry};
use tempalpha::stab::IndexedBox;
use tempalpha::temporal::oracle;
use tempalpha::{
    alpha_edges_of_window, alpha_ranges_of_window, build_delaunay, count_restricted, enumerate_all,
    temporal_alpha_shape, Archive, BoxTree, Cuboid, EdgeSide, PointId, TemporalAlphaShape, TimedPoint,
};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn uniform(n: usize, seed: u64) -> Vec<TimedPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (1..=n as u32).map(|i| TimedPoint::new(i, rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0))).collect()
}

/// Uniform sequences plus a few small swarms, all with `n <= max_n`.
fn datasets(count: usize, max_n: usize, seed: u64) -> Vec<(String, Vec<TimedPoint>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| {
            if k % 5 == 4 {
                let steps = (max_n / 6) as u32;
                let d = gen_swarm(4, 2, steps, seed + k as u64).unwrap();
                (d.name, d.points)
            } else {
                let n = rng.gen_range(3..=max_n);
                let s = rng.gen();
                (format!("uniform-{n}-{s}"), uniform(n, s))
            }
        })
        .collect()
}

fn dedup_sides(tree: &BoxTree, cuboids: &[Cuboid], i: PointId, j: PointId, alpha: f64) -> BTreeSet<(PointId, PointId, EdgeSide)> {
    let mut out = BTreeSet::new();
    tree.stab_with(i, j, alpha, |k| {
        let c = &cuboids[k as usize];
        out.insert((c.a, c.b, c.side));
    });
    out
}

fn size_law() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for round in 0..50 {
        let m = if round == 0 { 4 } else if round == 1 { 256 } else { rng.gen_range(4..=256) };
        let pts = uniform(m, rng.gen());
        let t = build_delaunay(&pts).map_err(|e| e.to_string())?;
        let got = t.live_tris().len();
        ensure!(got == 2 * m - 2, "window of {m} points has {got} triangles, expected {}", 2 * m - 2);
    }
    Ok("50 windows, every count equals 2m - 2".into())
}

fn enumeration_oracle(sets: &[(String, Vec<TimedPoint>)]) -> Outcome {
    let mut total = 0;
    for (name, pts) in sets {
        let en = enumerate_all(pts).map_err(|e| format!("{name}: {e}"))?;
        let want = oracle::enumerate_by_definition(pts).map_err(|e| format!("{name}: {e}"))?;
        let got = oracle::keys(&en.records);
        ensure!(got.len() == en.records.len(), "{name}: duplicate records");
        ensure!(got == want, "{name}: {} records vs {} from the definition", got.len(), want.len());
        let bad = oracle::check_activity(pts, &en.records).map_err(|e| e.to_string())?;
        ensure!(bad.is_none(), "{name}: active records differ from the triangulation of window {bad:?}");
        total += got.len();
    }
    Ok(format!("{} datasets, {total} records equal the per-window union", sets.len()))
}

fn end_to_end(shapes: &[(String, TemporalAlphaShape)]) -> Outcome {
    let mut probes = 0usize;
    for (name, shape) in shapes {
        let tree = BoxTree::from_cuboids(&shape.cuboids);
        let n = shape.n();
        for i in 1..n {
            for j in i + 1..=n {
                let ranges = alpha_ranges_of_window(&shape.points, i, j).map_err(|e| e.to_string())?;
                let bounds = alpha_bounds_of_window(&shape.points, i, j).map_err(|e| e.to_string())?;
                let mut alphas: Vec<f64> = bounds.clone();
                alphas.extend(bounds.windows(2).map(|w| 0.5 * (w[0] + w[1])));
                if let (Some(lo), Some(hi)) = (bounds.first(), bounds.last()) {
                    alphas.push(0.5 * lo);
                    alphas.push(2.0 * hi);
                }
                for alpha in alphas {
                    let want: BTreeSet<_> =
                        ranges.iter().filter(|(_, r)| r.0 <= alpha && alpha <= r.1).map(|(k, _)| *k).collect();
                    let got = dedup_sides(&tree, &shape.cuboids, i, j, alpha);
                    ensure!(got == want, "{name}: window [{i},{j}] alpha {alpha}: {} edges vs {} naive", got.len(), want.len());
                    probes += 1;
                }
            }
        }
        // spot check that the range map agrees with the public naive query
        let (i, j) = (1, n);
        let mid = shape.cuboids.iter().map(|c| c.alpha_lo).sum::<f64>() / shape.cuboids.len().max(1) as f64;
        let naive = alpha_edges_of_window(&shape.points, i, j, mid.max(1e-9)).map_err(|e| e.to_string())?;
        ensure!(naive == dedup_sides(&tree, &shape.cuboids, i, j, mid.max(1e-9)), "{name}: full window disagrees");
    }
    Ok(format!("{} datasets, {probes} window/alpha probes match", shapes.len()))
}

fn stackable(x: &Cuboid, y: &Cuboid) -> bool {
    let same_i = x.i_min == y.i_min && x.i_max == y.i_max;
    let same_j = x.j_min == y.j_min && x.j_max == y.j_max;
    let adj_j = x.j_max + 1 == y.j_min || y.j_max + 1 == x.j_min;
    let adj_i = x.i_max + 1 == y.i_min || y.i_max + 1 == x.i_min;
    (same_i && adj_j) || (same_j && adj_i)
}

fn minimality(shapes: &[(String, TemporalAlphaShape)]) -> Outcome {
    let mut pairs = 0usize;
    for (name, shape) in shapes {
        let mut groups: HashMap<(PointId, PointId, EdgeSide, u64, u64), Vec<&Cuboid>> = HashMap::new();
        for c in &shape.cuboids {
            groups.entry((c.a, c.b, c.side, c.alpha_lo.to_bits(), c.alpha_hi.to_bits())).or_default().push(c);
        }
        for g in groups.values() {
            for (k, x) in g.iter().enumerate() {
                for y in &g[k + 1..] {
                    pairs += 1;
                    ensure!(!stackable(x, y), "{name}: mergeable cuboids {x:?} and {y:?}");
                }
            }
        }
    }
    Ok(format!("{} datasets, {pairs} equal-range pairs, none mergeable", shapes.len()))
}

fn lemmas(sets: &[(String, Vec<TimedPoint>)]) -> Outcome {
    let mut edges = 0;
    for (name, pts) in sets {
        let en = enumerate_all(pts).map_err(|e| e.to_string())?;
        let reg = EdgeRegistry::build(&en.records);
        for k in 0..reg.edge_count() {
            let e = reg.edge(k);
            check_lemmas(&e, &en.records, pts.len() as PointId).map_err(|err| format!("{name}: edge ({}, {}): {err}", e.a, e.b))?;
            edges += 1;
        }
    }
    Ok(format!("{} datasets, {edges} edges checked", sets.len()))
}

fn size_bound(all: &[ShapeStats], swarm: &ShapeStats) -> Outcome {
    for s in all.iter().chain([swarm]) {
        ensure!(s.within_bound(), "n={} |T|={} has {} cuboids", s.n, s.triangles, s.cuboids);
    }
    let ratio = swarm.cuboids as f64 / swarm.triangles as f64;
    ensure!(ratio.is_finite(), "swarm ratio is not finite");
    Ok(format!(
        "{} shapes within bound; swarm n={} |T|={} cuboids={} ratio={ratio:.3}",
        all.len() + 1,
        swarm.n,
        swarm.triangles,
        swarm.cuboids
    ))
}

/// `k` points below the edge `(-1, 0)(1, 0)` come closer as their index
/// falls, then the edge itself, then `k` points above that come closer as
/// their index rises.
fn quadratic_fixture(k: usize) -> Vec<TimedPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(k as u64);
    let mut jitter = || rng.gen_range(-0.01..0.01);
    let mut pts = Vec::new();
    for m in 1..=k {
        pts.push((jitter(), -(0.3 + 0.4 * m as f64 / k as f64)));
    }
    pts.push((-1.0, 0.0));
    pts.push((1.0, 0.0));
    for m in 1..=k {
        pts.push((jitter(), 3.5 + 0.5 * (k - m) as f64));
    }
    pts.into_iter().enumerate().map(|(i, (x, y))| TimedPoint::new(i as u32 + 1, x, y)).collect()
}

fn quadratic_edge() -> Outcome {
    let mut report = Vec::new();
    for k in [3usize, 5, 8] {
        let pts = quadratic_fixture(k);
        let n = pts.len() as PointId;
        let (a, b) = (k as PointId + 1, k as PointId + 2);
        let shape = temporal_alpha_shape(&pts).map_err(|e| e.to_string())?;
        let mine: Vec<&Cuboid> = shape.cuboids.iter().filter(|c| (c.a, c.b, c.side) == (a, b, EdgeSide::Front)).collect();
        let mut naive: BTreeMap<(PointId, PointId), (f64, f64)> = BTreeMap::new();
        for i in 1..=a {
            for j in b..=n {
                let r = alpha_ranges_of_window(&pts, i, j).map_err(|e| e.to_string())?;
                if let Some(&range) = r.get(&(a, b, EdgeSide::Front)) {
                    naive.insert((i, j), range);
                }
            }
        }
        let distinct: BTreeSet<(u64, u64)> = naive.values().map(|r| (r.0.to_bits(), r.1.to_bits())).collect();
        for (&(i, j), r) in &naive {
            let hits: Vec<_> = mine.iter().filter(|c| c.i_min <= i && i <= c.i_max && c.j_min <= j && j <= c.j_max).collect();
            ensure!(hits.len() == 1, "k={k}: window [{i},{j}] lies in {} cuboids", hits.len());
            ensure!((hits[0].alpha_lo, hits[0].alpha_hi) == *r, "k={k}: window [{i},{j}] range differs");
        }
        let covered: usize = mine.iter().map(|c| ((c.i_max - c.i_min + 1) * (c.j_max - c.j_min + 1)) as usize).sum();
        ensure!(covered == naive.len(), "k={k}: cuboids cover {covered} windows, naive has {}", naive.len());
        ensure!(mine.len() == distinct.len(), "k={k}: {} cuboids vs {} distinct naive ranges", mine.len(), distinct.len());
        ensure!(mine.len() >= k * k, "k={k}: only {} cuboids", mine.len());
        report.push(format!("k={k}: {} cuboids, |T|={}", mine.len(), shape.stats.triangles));
    }
    Ok(report.join("; "))
}

fn stabbing() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let n = 1000u32;
    let boxes: Vec<IndexedBox> = (0..100_000u32)
        .map(|id| {
            let (i0, i1) = { let a = rng.gen_range(1..n); (a, rng.gen_range(a..n)) };
            let j0 = rng.gen_range(i1 + 1..=n);
            let j1 = rng.gen_range(j0..=n);
            let lo: f64 = rng.gen_range(0.0..10.0);
            let hi = if rng.gen_bool(0.1) { f64::INFINITY } else { lo + rng.gen_range(0.0..5.0) };
            IndexedBox { id, i_min: i0, i_max: i1, j_min: j0, j_max: j1, alpha_lo: lo, alpha_hi: hi }
        })
        .collect();
    let tree = BoxTree::build(boxes.clone());
    ensure!(tree.check_priority(), "priority invariant broken");
    let mut hits = 0;
    for _ in 0..1000 {
        let i = rng.gen_range(1..n);
        let j = rng.gen_range(i + 1..=n);
        let alpha = if rng.gen_bool(0.05) { 1e12 } else { rng.gen_range(0.0..16.0) };
        let got = tree.stab(i, j, alpha);
        let mut want: Vec<u32> = boxes.iter().filter(|b| b.contains(i, j, alpha)).map(|b| b.id).collect();
        want.sort_unstable();
        ensure!(got == want, "stab ({i},{j},{alpha}) returned {} boxes, scan {}", got.len(), want.len());
        hits += got.len();
    }
    Ok(format!("100000 boxes, 1000 stabs, {hits} hits all equal the scan"))
}

fn non_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] <= w[0])
}

fn restricted_monotone(swarm: &TemporalAlphaShape, stride: u32) -> Outcome {
    let steps: Vec<u32> = (0..=6).map(|k| 1 << k).collect();
    let alphas = [0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0];
    let mut lines = Vec::new();
    for &min_alpha in &[0.0, 1.0, 4.0] {
        let f: Vec<f64> = steps.iter().map(|&s| count_restricted(&swarm.cuboids, stride, s, min_alpha).1).collect();
        ensure!(non_increasing(&f), "min_alpha={min_alpha}: fractions over min_steps {f:?}");
        if min_alpha == 0.0 {
            lines.push(format!("by steps {:?}", f.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>()));
        }
    }
    for &min_steps in &[1, 8, 32] {
        let f: Vec<f64> = alphas.iter().map(|&a| count_restricted(&swarm.cuboids, stride, min_steps, a).1).collect();
        ensure!(non_increasing(&f), "min_steps={min_steps}: fractions over min_alpha {f:?}");
        if min_steps == 1 {
            lines.push(format!("by alpha {:?}", f.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>()));
        }
    }
    Ok(lines.join("; "))
}

fn archive_round_trip(name: &str, swarm: &TemporalAlphaShape) -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("swarm.tash");
    let original = Archive::from_shape(name, swarm, true);
    original.save(&path).map_err(|e| e.to_string())?;
    let loaded = Archive::load(&path).map_err(|e| e.to_string())?;
    ensure!(loaded == original, "loaded archive differs");
    let (t0, t1) = (original.index.as_ref().unwrap(), loaded.index.as_ref().unwrap());
    let rebuilt = BoxTree::from_cuboids(&loaded.cuboids);
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let n = swarm.n();
    let bits = |cs: &[Cuboid], ids: &[u32]| -> Vec<[u64; 2]> {
        ids.iter().map(|&k| [cs[k as usize].alpha_lo.to_bits(), cs[k as usize].alpha_hi.to_bits()]).collect()
    };
    for _ in 0..100 {
        let i = rng.gen_range(1..n);
        let j = rng.gen_range(i + 1..=n);
        let alpha = rng.gen_range(0.05..8.0);
        let a = t0.stab(i, j, alpha);
        ensure!(a == t1.stab(i, j, alpha) && a == rebuilt.stab(i, j, alpha), "query ({i},{j},{alpha}) differs");
        ensure!(bits(&original.cuboids, &a) == bits(&loaded.cuboids, &a), "alpha bits differ");
    }
    let bytes = std::fs::metadata(&path).map_err(|e| e.to_string())?.len();
    Ok(format!("{bytes} bytes, 100 queries identical"))
}

fn relative_speed() -> Outcome {
    let d: Dataset = gen_swarm(198, 2, 100, 1).map_err(|e| e.to_string())?;
    let clock = Instant::now();
    let shape = temporal_alpha_shape(&d.points).map_err(|e| e.to_string())?;
    let build = clock.elapsed().as_secs_f64();
    let tree = BoxTree::from_cuboids(&shape.cuboids);
    let n = shape.n();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut fast, mut slow) = (0.0, 0.0);
    let rounds = 20;
    for _ in 0..rounds {
        let len = rng.gen_range(4096..=n);
        let i = rng.gen_range(1..=n - len + 1);
        let j = i + len - 1;
        let alpha = rng.gen_range(0.2..3.0);
        let t = Instant::now();
        let got = dedup_sides(&tree, &shape.cuboids, i, j, alpha);
        fast += t.elapsed().as_secs_f64();
        let t = Instant::now();
        let want = alpha_edges_of_window(&shape.points, i, j, alpha).map_err(|e| e.to_string())?;
        slow += t.elapsed().as_secs_f64();
        ensure!(got == want, "window [{i},{j}] alpha {alpha}: results differ");
    }
    let speedup = slow / fast.max(1e-12);
    ensure!(speedup >= 10.0, "indexed is only {speedup:.1}x faster");
    Ok(format!(
        "n={n}, build {build:.1}s, {} cuboids; mean indexed {:.3} ms vs naive {:.3} ms ({speedup:.0}x)",
        shape.cuboids.len(),
        1e3 * fast / rounds as f64,
        1e3 * slow / rounds as f64
    ))
}

fn main() {
    let started = Instant::now();
    let mut failures = 0;
    let mut run = |name: &str, f: &mut dyn FnMut() -> Outcome| {
        let clock = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = clock.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {name} ({secs:.1}s): {detail}"),
            Err(why) => {
                failures += 1;
                println!("FAIL {name} ({secs:.1}s): {why}");
            }
        }
    };

    let small = datasets(20, 40, 2);
    let tiny = datasets(10, 30, 3);
    let tiny_shapes: Vec<(String, TemporalAlphaShape)> =
        tiny.iter().filter_map(|(n, p)| temporal_alpha_shape(p).ok().map(|s| (n.clone(), s))).collect();
    let swarm_data = gen_swarm(38, 2, 100, 1).unwrap();
    let swarm = temporal_alpha_shape(&swarm_data.points);

    let needs_shapes = |shapes: &[(String, TemporalAlphaShape)]| -> Result<(), String> {
        ensure!(shapes.len() == tiny.len(), "only {} of {} test shapes computed", shapes.len(), tiny.len());
        Ok(())
    };
    let swarm_ref = || swarm.as_ref().map_err(|e| format!("swarm computation failed: {e}"));

    run("triangulation size law", &mut size_law);
    run("enumeration equals per-window oracle", &mut || enumeration_oracle(&small));
    run("stab queries equal naive alpha edges", &mut || {
        needs_shapes(&tiny_shapes)?;
        end_to_end(&tiny_shapes)
    });
    run("cuboids are minimal", &mut || {
        needs_shapes(&tiny_shapes)?;
        let tiny_report = minimality(&tiny_shapes)?;
        let swarm_report = minimality(&[(swarm_data.name.clone(), swarm_ref()?.clone())])?;
        Ok(format!("{tiny_report}; swarm: {swarm_report}"))
    });
    run("staircase lemmas", &mut || {
        let all: Vec<_> = small.iter().chain(&tiny).cloned().collect();
        lemmas(&all)
    });
    run("cuboid count bound", &mut || {
        needs_shapes(&tiny_shapes)?;
        let mut stats: Vec<ShapeStats> = tiny_shapes.iter().map(|(_, s)| s.stats).collect();
        for (_, p) in &small {
            stats.push(temporal_alpha_shape(p).map_err(|e| e.to_string())?.stats);
        }
        size_bound(&stats, &swarm_ref()?.stats)
    });
    run("quadratic edge construction", &mut quadratic_edge);
    run("stab tree equals linear scan", &mut stabbing);
    run("restricted counts are monotone", &mut || restricted_monotone(swarm_ref()?, swarm_data.meta.stride.unwrap()));
    run("archive round trip", &mut || archive_round_trip(&swarm_data.name, swarm_ref()?));
    run("indexed queries beat naive", &mut relative_speed);

    println!("{} criteria failed, total {:.1}s", failures, started.elapsed().as_secs_f64());
    if failures > 0 {
        std::process::exit(1);
    }
}
