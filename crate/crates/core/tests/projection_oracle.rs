//! PCA cross-checked against an independent dense eigensolver (nalgebra).

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use concept_metrics_core::projection::pca_2d;

fn random_items(n: usize, dim: usize, seed: u64) -> Vec<(String, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            (format!("p{i:03}"), (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect())
        })
        .collect()
}

/// Top-2 reconstruction error from an eigendecomposition of the dim x dim
/// scatter matrix, computed entirely with nalgebra.
fn oracle_reconstruction_error(items: &[(String, Vec<f64>)]) -> f64 {
    let n = items.len();
    let dim = items[0].1.len();
    let mut mean = vec![0.0f64; dim];
    for (_, v) in items {
        for (m, x) in mean.iter_mut().zip(v) {
            *m += x / n as f64;
        }
    }
    let centered = DMatrix::from_fn(n, dim, |i, j| items[i].1[j] - mean[j]);
    let scatter = centered.transpose() * &centered;
    let eigen = nalgebra::SymmetricEigen::new(scatter);
    let mut eigenvalues: Vec<f64> = eigen.eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(|a, b| b.total_cmp(a));
    eigenvalues.iter().skip(2).sum()
}

fn implementation_reconstruction_error(items: &[(String, Vec<f64>)]) -> f64 {
    let n = items.len();
    let dim = items[0].1.len();
    let mut mean = vec![0.0f64; dim];
    for (_, v) in items {
        for (m, x) in mean.iter_mut().zip(v) {
            *m += x / n as f64;
        }
    }
    let total: f64 = items
        .iter()
        .map(|(_, v)| v.iter().zip(&mean).map(|(x, m)| (x - m) * (x - m)).sum::<f64>())
        .sum();
    let proj = pca_2d(items).unwrap();
    let captured: f64 = proj.rows.iter().map(|r| r.x * r.x + r.y * r.y).sum();
    total - captured
}

#[test]
fn reconstruction_error_matches_dense_eigensolver() {
    for seed in [3u64, 17, 99] {
        let items = random_items(50, 16, seed);
        let ours = implementation_reconstruction_error(&items);
        let oracle = oracle_reconstruction_error(&items);
        assert!(
            (ours - oracle).abs() <= 1e-8,
            "seed {seed}: ours {ours}, oracle {oracle}"
        );
    }
}

#[test]
fn gram_path_agrees_with_oracle_when_points_are_few() {
    // 10 points in 40 dims exercises the Gram-matrix branch
    let items = random_items(10, 40, 5);
    let ours = implementation_reconstruction_error(&items);
    let oracle = oracle_reconstruction_error(&items);
    assert!((ours - oracle).abs() <= 1e-8, "ours {ours}, oracle {oracle}");
}
