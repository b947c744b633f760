//! Times the pipeline on a generated swarm.
//!
//! `cargo run --release --example swarm_scale -- [followers] [steps]`

use tempalpha::dataset::gen_swarm;
use tempalpha::temporal_alpha_shape;

fn main() {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<u32>().expect("arguments are integers"));
    let followers = args.next().unwrap_or(38);
    let steps = args.next().unwrap_or(100);
    let d = gen_swarm(followers, 2, steps, 1).expect("swarm");
    let shape = temporal_alpha_shape(&d.points).expect("shape");
    let s = shape.stats;
    println!("{}: n={} triangles={} cuboids={} ratio={:.3}", d.name, s.n, s.triangles, s.cuboids, shape.ratio());
    println!(
        "enumerate {:.2}s, registry {:.2}s, cuboids {:.2}s, peak per edge {}",
        s.enumerate_secs, s.registry_secs, s.cuboid_secs, s.peak_edge_cuboids
    );
}
