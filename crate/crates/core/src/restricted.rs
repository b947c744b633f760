//! Counting the cuboids needed for a restricted family of queries: windows
//! aligned to movement steps of `stride` points, at least `min_steps` steps
//! long, and α at least `min_alpha`.

use crate::alpha::Cuboid;

/// Aligned windows are `[stride * s + 1, stride * t]` for step indices
/// `s < t`. A cuboid is needed iff some aligned window with `t - s >=
/// min_steps` lies in its footprint and its α-range reaches `min_alpha`.
pub fn needed(c: &Cuboid, stride: u32, min_steps: u32, min_alpha: f64) -> bool {
    if c.alpha_hi < min_alpha {
        return false;
    }
    let stride = u64::from(stride.max(1));
    let s = (u64::from(c.i_min) - 1).div_ceil(stride);
    if stride * s + 1 > u64::from(c.i_max) {
        return false;
    }
    let t = u64::from(c.j_max) / stride;
    if stride * t < u64::from(c.j_min) {
        return false;
    }
    t >= s + u64::from(min_steps)
}

/// Returns the number of needed cuboids and their share of all cuboids.
pub fn count_restricted(cuboids: &[Cuboid], stride: u32, min_steps: u32, min_alpha: f64) -> (usize, f64) {
    let count = cuboids.iter().filter(|c| needed(c, stride, min_steps, min_alpha)).count();
    let frac = if cuboids.is_empty() { 0.0 } else { count as f64 / cuboids.len() as f64 };
    (count, frac)
}
