//! Point sequences: CSV ingestion and the synthetic leader/follower swarm.

use std::collections::HashSet;
use std::io::Read;
use std::path::Path;

use chrono::{DateTime, NaiveDate, NaiveDateTime};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::TimedPoint;

/// Side length of the swarm canvas.
pub const SWARM_CANVAS: f64 = 40.0;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Provenance {
    pub source: Option<String>,
    pub dropped_same_time: usize,
    pub dropped_same_place: usize,
    pub perturb_radius: f64,
    /// Points per movement step for generated swarms.
    pub stride: Option<u32>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub points: Vec<TimedPoint>,
    pub meta: Provenance,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IngestOptions {
    pub dedup: bool,
    pub perturb_radius: f64,
    pub seed: u64,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions { dedup: true, perturb_radius: 0.0, seed: 0 }
    }
}

/// Parses a timestamp as a number or an ISO-8601 date/time; the result is
/// only used for ordering and equality.
fn parse_time(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Ok(v) = s.parse::<f64>() {
        return v.is_finite().then_some(v);
    }
    let secs = |dt: NaiveDateTime| {
        let u = dt.and_utc();
        u.timestamp() as f64 + f64::from(u.timestamp_subsec_nanos()) * 1e-9
    };
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(secs(dt.naive_utc()));
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f", "%Y-%m-%dT%H:%M", "%Y-%m-%d %H:%M"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(secs(dt));
        }
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d").ok().map(|d| secs(d.and_hms_opt(0, 0, 0).unwrap()))
}

/// Reads `t,x,y` rows (header optional) from any reader.
pub fn ingest_reader<R: Read>(reader: R, name: &str, opts: &IngestOptions) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).flexible(true).from_reader(reader);
    let mut rows: Vec<(f64, f64, f64)> = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let line = k + 1;
        let rec = rec.map_err(|e| Error::Parse { line, msg: e.to_string() })?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        if rec.len() < 3 {
            return Err(Error::Parse { line, msg: format!("expected 3 columns, found {}", rec.len()) });
        }
        let num = |f: &str| f.parse::<f64>().ok().filter(|v| v.is_finite());
        let (t, x, y) = (parse_time(&rec[0]), num(&rec[1]), num(&rec[2]));
        match (t, x, y) {
            (Some(t), Some(x), Some(y)) => rows.push((t, x, y)),
            _ if line == 1 && x.is_none() && y.is_none() => continue, // header
            _ => return Err(Error::Parse { line, msg: format!("cannot parse row {:?}", rec.iter().collect::<Vec<_>>()) }),
        }
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut meta = Provenance { source: Some(name.to_string()), perturb_radius: opts.perturb_radius, ..Default::default() };
    if opts.dedup {
        let mut kept = Vec::with_capacity(rows.len());
        let mut seen = HashSet::new();
        for r in rows {
            if kept.last().is_some_and(|l: &(f64, f64, f64)| l.0 == r.0) {
                meta.dropped_same_time += 1;
            } else if !seen.insert(((r.1 + 0.0).to_bits(), (r.2 + 0.0).to_bits())) {
                meta.dropped_same_place += 1;
            } else {
                kept.push(r);
            }
        }
        rows = kept;
    }
    if rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut points: Vec<TimedPoint> =
        rows.iter().enumerate().map(|(k, r)| TimedPoint::new(k as u32 + 1, r.1, r.2)).collect();
    if opts.perturb_radius > 0.0 {
        perturb(&mut points, opts.perturb_radius, opts.seed);
    }
    Ok(Dataset { name: name.to_string(), points, meta })
}

pub fn ingest_csv(path: impl AsRef<Path>, opts: &IngestOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let f = std::fs::File::open(path)?;
    let name = path.file_stem().map_or_else(|| "dataset".to_string(), |s| s.to_string_lossy().into_owned());
    let mut d = ingest_reader(std::io::BufReader::new(f), &name, opts)?;
    d.meta.source = Some(path.display().to_string());
    Ok(d)
}

/// Moves every point uniformly within a disk of `radius`, redrawing any
/// point that would land on an earlier one.
pub fn perturb(points: &mut [TimedPoint], radius: f64, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut seen = HashSet::with_capacity(points.len());
    for p in points.iter_mut() {
        let (x0, y0) = (p.x, p.y);
        loop {
            let r = radius * rng.gen::<f64>().sqrt();
            let th = rng.gen_range(0.0..std::f64::consts::TAU);
            p.x = x0 + r * th.cos();
            p.y = y0 + r * th.sin();
            if seen.insert(((p.x + 0.0).to_bits(), (p.y + 0.0).to_bits())) {
                break;
            }
        }
    }
}

/// Default perturbation radius for data spanning `extent`.
pub fn default_perturb_radius(extent: f64) -> f64 {
    1e-7 * extent
}

/// Followers chase the nearest of a few leaders that wander smoothly over
/// a square canvas; every particle is emitted once per step.
pub fn gen_swarm(followers: u32, leaders: u32, steps: u32, seed: u64) -> Result<Dataset> {
    if followers < 1 || leaders < 1 || steps < 1 {
        return Err(Error::Degenerate("a swarm needs at least one follower, one leader and one step"));
    }
    const STEP: f64 = 0.25;
    const LEADER_SPEED: f64 = 0.3;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pos = |rng: &mut ChaCha8Rng| [rng.gen_range(0.0..SWARM_CANVAS), rng.gen_range(0.0..SWARM_CANVAS)];
    let mut lead: Vec<([f64; 2], f64)> =
        (0..leaders).map(|_| (pos(&mut rng), rng.gen_range(0.0..std::f64::consts::TAU))).collect();
    let mut fol: Vec<[f64; 2]> = (0..followers).map(|_| pos(&mut rng)).collect();
    let stride = followers + leaders;
    let mut points = Vec::with_capacity((stride * steps) as usize);
    let mut next = 1u32;
    for _ in 0..steps {
        for (p, heading) in lead.iter_mut() {
            *heading += rng.gen_range(-0.3..0.3);
            let mut q = [p[0] + LEADER_SPEED * heading.cos(), p[1] + LEADER_SPEED * heading.sin()];
            for d in 0..2 {
                if !(0.0..=SWARM_CANVAS).contains(&q[d]) {
                    q[d] = q[d].clamp(0.0, SWARM_CANVAS);
                    *heading = if d == 0 { std::f64::consts::PI - *heading } else { -*heading };
                }
            }
            *p = q;
        }
        for f in fol.iter_mut() {
            let (target, dist) = lead
                .iter()
                .map(|(l, _)| (*l, (l[0] - f[0]).hypot(l[1] - f[1])))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            if dist > STEP {
                f[0] += STEP * (target[0] - f[0]) / dist;
                f[1] += STEP * (target[1] - f[1]) / dist;
            }
        }
        for q in fol.iter().chain(lead.iter().map(|(l, _)| l)) {
            points.push(TimedPoint::new(next, q[0], q[1]));
            next += 1;
        }
    }
    let radius = default_perturb_radius(SWARM_CANVAS);
    perturb(&mut points, radius, seed);
    Ok(Dataset {
        name: format!("swarm-{followers}-{leaders}-{steps}-{seed}"),
        points,
        meta: Provenance { perturb_radius: radius, stride: Some(stride), ..Default::default() },
    })
}
