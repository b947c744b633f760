//! WebAssembly bindings for the browser demo in `web/`.
//!
//! Results cross the boundary as flat numeric arrays so the page can draw
//! them without any JSON step: edges as `[a, b, side, ...]` triples and
//! points as `[x, y, ...]` pairs.

use std::collections::BTreeSet;

use tempalpha::dataset::{gen_swarm, ingest_reader, IngestOptions};
use tempalpha::{temporal_alpha_shape, BoxTree, TemporalAlphaShape};
use wasm_bindgen::prelude::*;

#[wasm_bindgen]
pub struct Demo {
    shape: TemporalAlphaShape,
    tree: BoxTree,
    alpha_min: f64,
    alpha_max: f64,
}

fn err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

impl Demo {
    fn from_shape(shape: TemporalAlphaShape) -> Demo {
        let tree = BoxTree::from_cuboids(&shape.cuboids);
        let cs = &shape.cuboids;
        let alpha_min = cs.iter().map(|c| c.alpha_lo).fold(f64::INFINITY, f64::min);
        let alpha_max = cs.iter().flat_map(|c| [c.alpha_lo, c.alpha_hi]).filter(|v| v.is_finite()).fold(0.0, f64::max);
        let alpha_min = if alpha_min.is_finite() { alpha_min } else { 0.0 };
        Demo { shape, tree, alpha_min, alpha_max }
    }

    /// Deduplicated `(a, b, side)` triples of the α-shape of `[i, j]`.
    pub fn edges(&self, i: u32, j: u32, alpha: f64) -> Vec<(u32, u32, u8)> {
        if i < 1 || i >= j || j > self.n() {
            return Vec::new();
        }
        let mut out = BTreeSet::new();
        self.tree.stab_with(i, j, alpha, |k| {
            let c = &self.shape.cuboids[k as usize];
            out.insert((c.a, c.b, c.side as u8));
        });
        out.into_iter().collect()
    }
}

#[wasm_bindgen]
impl Demo {
    /// Computes the shape of a generated leader/follower swarm.
    pub fn swarm(followers: u32, leaders: u32, steps: u32, seed: u32) -> Result<Demo, JsError> {
        let d = gen_swarm(followers, leaders, steps, u64::from(seed)).map_err(err)?;
        Ok(Demo::from_shape(temporal_alpha_shape(&d.points).map_err(err)?))
    }

    /// Computes the shape of `t,x,y` CSV text.
    pub fn from_csv(text: &str) -> Result<Demo, JsError> {
        let d = ingest_reader(text.as_bytes(), "upload", &IngestOptions::default()).map_err(err)?;
        Ok(Demo::from_shape(temporal_alpha_shape(&d.points).map_err(err)?))
    }

    pub fn n(&self) -> u32 {
        self.shape.n()
    }

    #[wasm_bindgen(js_name = cuboidCount)]
    pub fn cuboid_count(&self) -> usize {
        self.shape.cuboids.len()
    }

    #[wasm_bindgen(js_name = triangleCount)]
    pub fn triangle_count(&self) -> usize {
        self.shape.stats.triangles
    }

    #[wasm_bindgen(js_name = alphaMin)]
    pub fn alpha_min(&self) -> f64 {
        self.alpha_min
    }

    #[wasm_bindgen(js_name = alphaMax)]
    pub fn alpha_max(&self) -> f64 {
        self.alpha_max
    }

    /// Flat `[a, b, side, ...]` with side 0 for front and 1 for back.
    pub fn query(&self, i: u32, j: u32, alpha: f64) -> Vec<u32> {
        self.edges(i, j, alpha).into_iter().flat_map(|(a, b, s)| [a, b, u32::from(s)]).collect()
    }

    /// Flat `[x, y, ...]` of points `i..=j`; all points when `i > j`.
    pub fn points(&self, i: u32, j: u32) -> Vec<f64> {
        let pts = &self.shape.points;
        let (lo, hi) = if i > j || pts.is_empty() { (1, pts.len() as u32) } else { (i.max(1), j.min(pts.len() as u32)) };
        pts[(lo - 1) as usize..hi as usize].iter().flat_map(|p| [p.x, p.y]).collect()
    }
}
