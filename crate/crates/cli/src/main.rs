use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use tempalpha::dataset::{gen_swarm, ingest_csv, IngestOptions};
use tempalpha::{count_restricted, enumerate_all, temporal_alpha_shape, Archive};
use tempalpha_cli::service::{self, DEFAULT_EDGE_CAP};
use tempalpha_cli::{bench, random_queries, shape_report, write_csv};

#[derive(Parser)]
#[command(name = "tempalpha", version, about = "Temporal alpha shapes of time-ordered point sequences")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Clean a raw `t,x,y` CSV: sort by time, drop repeats, reindex 1..n.
    Ingest {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Keep rows that repeat a timestamp or a location.
        #[arg(long)]
        keep_duplicates: bool,
        /// Jitter every point within this radius.
        #[arg(long, default_value_t = 0.0)]
        perturb: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write a synthetic leader/follower swarm as CSV.
    GenSwarm {
        #[arg(long, default_value_t = 38)]
        followers: u32,
        #[arg(long, default_value_t = 2)]
        leaders: u32,
        #[arg(long, default_value_t = 100)]
        steps: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Compute all cuboids of a cleaned CSV and store them in an archive.
    Compute {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Stop after triangle enumeration and report its size.
        #[arg(long)]
        enumerate_only: bool,
        /// Leave the stab index out of the archive.
        #[arg(long)]
        no_index: bool,
    },
    /// Summarize an archive.
    Stats { archive: PathBuf },
    /// Count cuboids needed for step-aligned windows.
    CountRestricted {
        archive: PathBuf,
        #[arg(long)]
        stride: u32,
        #[arg(long, default_value_t = 1)]
        min_steps: u32,
        #[arg(long, default_value_t = 0.0)]
        min_alpha: f64,
    },
    /// Print the α-edges of one window.
    Query {
        archive: PathBuf,
        #[arg(long)]
        i: u32,
        #[arg(long)]
        j: u32,
        #[arg(long)]
        alpha: f64,
    },
    /// Serve `/meta`, `/query` and `/points` over HTTP.
    Serve {
        archive: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value_t = DEFAULT_EDGE_CAP)]
        edge_cap: usize,
    },
    /// Time the stab index against a linear scan.
    Bench {
        archive: PathBuf,
        #[arg(long, default_value_t = 1000)]
        queries: usize,
        #[arg(long, default_value_t = 2)]
        min_len: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn print_kv(pairs: &[(String, String)]) {
    for (k, v) in pairs {
        println!("{k}={v}");
    }
}

fn load(path: &PathBuf) -> Result<Archive> {
    Archive::load(path).with_context(|| format!("load: {}", path.display()))
}

fn main() -> Result<()> {
    match Cli::parse().cmd {
        Cmd::Ingest { input, output, keep_duplicates, perturb, seed } => {
            let opts = IngestOptions { dedup: !keep_duplicates, perturb_radius: perturb, seed };
            let d = ingest_csv(&input, &opts).with_context(|| format!("ingest: {}", input.display()))?;
            write_csv(BufWriter::new(File::create(&output)?), &d.points)?;
            println!("points={}", d.points.len());
            println!("dropped_same_time={}", d.meta.dropped_same_time);
            println!("dropped_same_place={}", d.meta.dropped_same_place);
        }
        Cmd::GenSwarm { followers, leaders, steps, seed, output } => {
            let d = gen_swarm(followers, leaders, steps, seed).context("gen-swarm")?;
            write_csv(BufWriter::new(File::create(&output)?), &d.points)?;
            println!("name={}", d.name);
            println!("points={}", d.points.len());
            println!("stride={}", followers + leaders);
        }
        Cmd::Compute { input, output, enumerate_only, no_index } => {
            let d = ingest_csv(&input, &IngestOptions::default()).with_context(|| format!("ingest: {}", input.display()))?;
            if enumerate_only {
                let clock = std::time::Instant::now();
                let en = enumerate_all(&d.points).context("enumerate")?;
                println!("n={}", en.n);
                println!("triangles={}", en.records.len());
                println!("scratch_faces={}", en.stats.scratch_faces);
                println!("enumerate_seconds={:.3}", clock.elapsed().as_secs_f64());
                return Ok(());
            }
            let Some(output) = output else { bail!("compute: --output is required unless --enumerate-only is given") };
            let shape = temporal_alpha_shape(&d.points).context("compute")?;
            let clock = std::time::Instant::now();
            let archive = Archive::from_shape(&d.name, &shape, !no_index);
            let index_secs = clock.elapsed().as_secs_f64();
            archive.save(&output).with_context(|| format!("save: {}", output.display()))?;
            print_kv(&shape_report(&shape.stats));
            println!("index_seconds={index_secs:.3}");
        }
        Cmd::Stats { archive } => {
            let a = load(&archive)?;
            println!("name={}", a.name);
            println!("n={}", a.points.len());
            println!("triangles={}", a.triangles);
            println!("cuboids={}", a.cuboids.len());
            println!("ratio={:.4}", a.cuboids.len() as f64 / a.triangles.max(1) as f64);
            println!("indexed={}", a.index.is_some());
        }
        Cmd::CountRestricted { archive, stride, min_steps, min_alpha } => {
            let a = load(&archive)?;
            let (count, frac) = count_restricted(&a.cuboids, stride, min_steps, min_alpha);
            println!("needed={count}");
            println!("total={}", a.cuboids.len());
            println!("fraction={frac:.4}");
        }
        Cmd::Query { archive, i, j, alpha } => {
            let loaded = service::Loaded::new(load(&archive)?);
            let q = [("i", i.to_string()), ("j", j.to_string()), ("alpha", alpha.to_string())]
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect();
            let body = service::query(&loaded, &q, usize::MAX).map_err(|e| anyhow::anyhow!("query: {}", e.message))?;
            println!("{}", serde_json::to_string_pretty(&body)?);
        }
        Cmd::Serve { archive, port, edge_cap } => {
            tokio::runtime::Runtime::new()?.block_on(service::serve(archive, port, edge_cap))?;
        }
        Cmd::Bench { archive, queries, min_len, seed } => {
            let l = service::Loaded::new(load(&archive)?);
            if l.n() < 2 {
                bail!("bench: need at least 2 points");
            }
            let qs = random_queries(&l.archive.cuboids, l.n(), min_len, queries, seed);
            let r = bench(&l.tree, &l.archive.cuboids, &qs);
            println!("queries={}", r.queries);
            println!("hits={}", r.hits);
            println!("indexed_seconds={:.4}", r.indexed_secs);
            println!("naive_seconds={:.4}", r.naive_secs);
            println!("speedup={:.1}", r.speedup());
            println!("mismatches={}", r.mismatches);
        }
    }
    Ok(())
}
