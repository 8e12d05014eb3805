//! Shared deterministic fixtures for the criterion benchmarks.

use repgeom::synthetic::{sample_manifold, ManifoldKind, ManifoldSpec};
use repgeom::Matrix;

/// Noise-free hypercube cloud embedded in `ambient` dimensions.
pub fn cube(d: usize, n: usize, ambient: usize, seed: u64) -> Matrix {
    sample_manifold(&ManifoldSpec {
        kind: ManifoldKind::Hypercube,
        intrinsic_dim: d,
        ambient,
        n,
        noise_sigma: 0.0,
        seed,
    })
    .expect("benchmark fixture should generate")
}

/// Full-rank Gaussian cloud, `n x dim`.
pub fn gaussian(n: usize, dim: usize, seed: u64) -> Matrix {
    sample_manifold(&ManifoldSpec {
        kind: ManifoldKind::Gaussian,
        intrinsic_dim: dim,
        ambient: dim,
        n,
        noise_sigma: 0.0,
        seed,
    })
    .expect("benchmark fixture should generate")
}
