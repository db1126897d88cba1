//! Seeded randomness and direction sampling.
//!
//! Every stochastic routine in the crate derives its generator through
//! [`rng_for`] so that results are a pure function of `(seed, stream)` and
//! independent of thread count or call interleaving.

use nalgebra::DVector;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::geom::Point;

/// Deterministic generator for a given seed and stream index.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Stable 64-bit mix of raw bytes (FNV-1a); used to derive per-input streams
/// so that, e.g., orbit-distance sampling decorrelates across query points
/// while staying deterministic.
pub fn mix_bytes(seed: u64, bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ seed;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Mixes the bit patterns of a float slice into a stream id.
pub fn mix_floats(seed: u64, floats: &[f64]) -> u64 {
    let mut bytes = Vec::with_capacity(floats.len() * 8);
    for f in floats {
        bytes.extend_from_slice(&f.to_bits().to_le_bytes());
    }
    mix_bytes(seed, &bytes)
}

/// Standard normal vector of the given dimension.
pub fn gaussian_vector(dim: usize, rng: &mut impl Rng) -> DVector<f64> {
    DVector::from_fn(dim, |_, _| rng.sample(StandardNormal))
}

/// Uniform point on the unit sphere of `R^dim`.
pub fn unit_sphere_point(dim: usize, rng: &mut impl Rng) -> Point {
    loop {
        let g = gaussian_vector(dim, rng);
        let n = g.norm();
        if n > 1e-12 {
            return Point::from_vector(g / n);
        }
    }
}

/// Uniform point in the closed ball of the given radius.
pub fn ball_point(dim: usize, radius: f64, rng: &mut impl Rng) -> Point {
    let u: f64 = rng.gen();
    let r = radius * u.powf(1.0 / dim as f64);
    unit_sphere_point(dim, rng).scale(r)
}

/// Deterministic direction set: `±e_i`, the normalized all-ones diagonals
/// `±(1,…,1)/√d`, then seeded unit samples up to `budget` total.
///
/// The axis/diagonal prefix pins down the directions where polytope support
/// gaps are typically extremal, so small budgets already catch them.
pub fn unit_directions(dim: usize, budget: usize, seed: u64) -> Vec<Point> {
    let mut dirs: Vec<Point> = Vec::with_capacity(budget.max(2 * dim + 2));
    for i in 0..dim {
        dirs.push(Point::axis(dim, i));
        dirs.push(Point::axis(dim, i).scale(-1.0));
    }
    let diag = Point::from_vector(DVector::from_element(dim, 1.0 / (dim as f64).sqrt()));
    dirs.push(diag.clone());
    dirs.push(diag.scale(-1.0));
    let mut rng = rng_for(seed, 0x0d15_ea5e);
    while dirs.len() < budget {
        dirs.push(unit_sphere_point(dim, &mut rng));
    }
    dirs.truncate(dirs.len().max(budget));
    dirs
}
