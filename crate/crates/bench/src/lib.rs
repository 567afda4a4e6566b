//! Shared fixtures for the criterion benches.

use curvature_core::metric::FiniteMetricSpace;
use curvature_core::rng::derive_rng;
use rand::Rng;

/// Seeded random point cloud in the unit square, as a finite space.
pub fn random_plane_cloud(n: usize, seed: u64) -> FiniteMetricSpace {
    let mut rng = derive_rng(seed, "bench.cloud", 0);
    let pts: Vec<[f64; 2]> =
        (0..n).map(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]).collect();
    let d = |a: &[f64; 2], b: &[f64; 2]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
    let matrix = pts.iter().map(|a| pts.iter().map(|b| d(a, b)).collect()).collect();
    FiniteMetricSpace::from_matrix(matrix).unwrap()
}
