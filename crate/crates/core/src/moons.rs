//! Seeded two-moons toy data, min-max scaled to the unit square.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::dataio::Dataset;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `n` points on two interleaving half circles with Gaussian jitter.
/// Label 0 is the outer (upper) moon, label 1 the inner one. Rows alternate
/// between the moons so any prefix is roughly balanced.
pub fn two_moons<T: Scalar>(n: usize, noise: f64, seed: u64) -> Result<Dataset<T>> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("two moons need at least 2 points, got {n}")));
    }
    if !(noise >= 0.0) || !noise.is_finite() {
        return Err(Error::InvalidParameter(format!("noise must be non-negative, got {noise}")));
    }
    let n_outer = n / 2;
    let n_inner = n - n_outer;
    let theta = |i: usize, count: usize| if count > 1 { PI * i as f64 / (count - 1) as f64 } else { 0.0 };
    let outer: Vec<[f64; 2]> = (0..n_outer).map(|i| [theta(i, n_outer).cos(), theta(i, n_outer).sin()]).collect();
    let inner: Vec<[f64; 2]> = (0..n_inner)
        .map(|i| [1.0 - theta(i, n_inner).cos(), 0.5 - theta(i, n_inner).sin()])
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jitter = Normal::new(0.0, noise).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut points: Vec<([f64; 2], u32)> = Vec::with_capacity(n);
    for i in 0..n_inner {
        for (moon, label) in [(&inner, 1), (&outer, 0)] {
            if let Some(p) = moon.get(i) {
                points.push(([p[0] + jitter.sample(&mut rng), p[1] + jitter.sample(&mut rng)], label));
            }
        }
    }

    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for (p, _) in &points {
        for c in 0..2 {
            lo[c] = lo[c].min(p[c]);
            hi[c] = hi[c].max(p[c]);
        }
    }
    let scale = |v: f64, c: usize| if hi[c] > lo[c] { (v - lo[c]) / (hi[c] - lo[c]) } else { 0.0 };
    let instances = points
        .iter()
        .map(|(p, _)| vec![T::lit(scale(p[0], 0)), T::lit(scale(p[1], 1))])
        .collect();
    let labels = points.iter().map(|&(_, l)| l).collect();
    Dataset::from_matrix(instances, labels)
}
