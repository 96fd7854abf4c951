//! Exact (non-approximated) t-SNE, sized for projecting dozens to a couple of
//! thousand concept vectors.
//!
//! All hyperparameters are pinned: Gaussian input affinities matched to the
//! target perplexity by per-point bisection (tolerance 1e-5, at most 50
//! steps), symmetrization with an epsilon floor of 1e-12, Student-t output
//! kernel, early exaggeration x12 for the first 250 iterations, momentum 0.5
//! switching to 0.8 after iteration 250, learning rate 200, and PCA
//! initialization rescaled to a 1e-4 standard deviation. The gradient loop is
//! single-threaded so a fixed seed and parameter set reproduce the output
//! bit-for-bit.

use crate::error::{Error, Result};

use super::pca::pca_2d;
use super::{KlCheckpoint, Projection2D, ProjectedPoint, ProjectionMethod, ProjectionParams};

const EPS: f64 = 1e-12;
const EXAGGERATION: f64 = 12.0;
const EXAGGERATION_ITERS: usize = 250;
const MOMENTUM_EARLY: f64 = 0.5;
const MOMENTUM_LATE: f64 = 0.8;
const LEARNING_RATE: f64 = 200.0;
const PERPLEXITY_TOL: f64 = 1e-5;
const BISECTION_STEPS: usize = 50;
const INIT_STDDEV: f64 = 1e-4;
const MIN_GAIN: f64 = 0.01;

#[derive(Debug, Clone)]
pub struct TsneOptions {
    /// Defaults to `min(30, (n - 1) / 3)` and is clamped into
    /// `[1, (n - 1) / 3]` either way.
    pub perplexity: Option<f64>,
    pub iterations: usize,
    /// Recorded in the output metadata. The pinned PCA initialization is
    /// deterministic on its own, so the seed does not perturb the layout.
    pub seed: u64,
}

impl Default for TsneOptions {
    fn default() -> Self {
        TsneOptions { perplexity: None, iterations: 1000, seed: 0 }
    }
}

pub fn tsne_2d(items: &[(String, Vec<f64>)], opts: &TsneOptions) -> Result<Projection2D> {
    let n = items.len();
    if n < 4 {
        return Err(Error::Insufficient { what: "points", needed: 4, got: n });
    }
    if opts.iterations == 0 {
        return Err(Error::InvalidInput("iterations must be at least 1".into()));
    }
    let max_perplexity = (n - 1) as f64 / 3.0;
    let perplexity = opts
        .perplexity
        .unwrap_or_else(|| 30.0f64.min(max_perplexity))
        .min(max_perplexity)
        .max(1.0);

    let distances = squared_distances(items)?;
    let p = joint_affinities(&distances, n, perplexity);

    // PCA initialization, rescaled so the first component has stddev 1e-4.
    let init = pca_2d(items)?;
    let mut y: Vec<[f64; 2]> = init.rows.iter().map(|r| [r.x, r.y]).collect();
    let mean_x = y.iter().map(|p| p[0]).sum::<f64>() / n as f64;
    let var_x = y.iter().map(|p| (p[0] - mean_x).powi(2)).sum::<f64>() / n as f64;
    let std_x = var_x.sqrt();
    if std_x > 0.0 {
        let scale = INIT_STDDEV / std_x;
        for point in &mut y {
            point[0] *= scale;
            point[1] *= scale;
        }
    }

    let mut velocity = vec![[0.0f64; 2]; n];
    // per-coordinate adaptive gains, as in the reference gradient descent
    let mut gains = vec![[1.0f64; 2]; n];
    let mut checkpoints: Vec<usize> = [250usize, 500]
        .into_iter()
        .filter(|&c| c < opts.iterations)
        .collect();
    checkpoints.push(opts.iterations);
    let mut kl_checkpoints = Vec::new();

    let mut q = vec![0.0f64; n * n];
    let mut num = vec![0.0f64; n * n];
    for iter in 1..=opts.iterations {
        student_t_kernel(&y, &mut q, &mut num);
        let exaggeration = if iter <= EXAGGERATION_ITERS { EXAGGERATION } else { 1.0 };
        let momentum = if iter <= EXAGGERATION_ITERS { MOMENTUM_EARLY } else { MOMENTUM_LATE };

        for i in 0..n {
            let mut grad = [0.0f64; 2];
            for j in 0..n {
                if i == j {
                    continue;
                }
                let idx = i * n + j;
                let factor = 4.0 * (exaggeration * p[idx] - q[idx]) * num[idx];
                grad[0] += factor * (y[i][0] - y[j][0]);
                grad[1] += factor * (y[i][1] - y[j][1]);
            }
            for d in 0..2 {
                gains[i][d] = if (grad[d] > 0.0) != (velocity[i][d] > 0.0) {
                    gains[i][d] + 0.2
                } else {
                    (gains[i][d] * 0.8).max(MIN_GAIN)
                };
                velocity[i][d] = momentum * velocity[i][d] - LEARNING_RATE * gains[i][d] * grad[d];
            }
        }
        let mut center = [0.0f64; 2];
        for i in 0..n {
            y[i][0] += velocity[i][0];
            y[i][1] += velocity[i][1];
            center[0] += y[i][0];
            center[1] += y[i][1];
        }
        center[0] /= n as f64;
        center[1] /= n as f64;
        for point in &mut y {
            point[0] -= center[0];
            point[1] -= center[1];
        }

        if checkpoints.contains(&iter) {
            student_t_kernel(&y, &mut q, &mut num);
            kl_checkpoints.push(KlCheckpoint {
                iteration: iter,
                kl: kl_divergence(&p, &q, n),
            });
        }
    }

    let rows = items
        .iter()
        .zip(&y)
        .map(|((id, _), point)| ProjectedPoint { id: id.clone(), x: point[0], y: point[1] })
        .collect();
    Ok(Projection2D {
        rows,
        method: ProjectionMethod::Tsne,
        params: ProjectionParams {
            perplexity: Some(perplexity),
            iterations: Some(opts.iterations),
            seed: Some(opts.seed),
            kl_checkpoints,
        },
    })
}

fn squared_distances(items: &[(String, Vec<f64>)]) -> Result<Vec<f64>> {
    let n = items.len();
    let dim = items[0].1.len();
    for (id, v) in items {
        if v.len() != dim {
            return Err(Error::InvalidInput(format!(
                "vector for `{id}` has length {}, expected {dim}",
                v.len()
            )));
        }
    }
    let mut d = vec![0.0f64; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let dist: f64 = items[i]
                .1
                .iter()
                .zip(&items[j].1)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            d[i * n + j] = dist;
            d[j * n + i] = dist;
        }
    }
    Ok(d)
}

/// Per-point bisection on the Gaussian precision to match `ln(perplexity)`,
/// then symmetrize: `p_ij = (p_{j|i} + p_{i|j}) / (2n)`, floored at 1e-12.
fn joint_affinities(distances: &[f64], n: usize, perplexity: f64) -> Vec<f64> {
    let target = perplexity.ln();
    let mut conditional = vec![0.0f64; n * n];
    for i in 0..n {
        let mut beta = 1.0f64;
        let mut beta_min = f64::NEG_INFINITY;
        let mut beta_max = f64::INFINITY;
        for _ in 0..BISECTION_STEPS {
            let mut sum = 0.0;
            let mut weighted = 0.0;
            for j in 0..n {
                if i == j {
                    continue;
                }
                let d = distances[i * n + j];
                let w = (-beta * d).exp();
                conditional[i * n + j] = w;
                sum += w;
                weighted += w * d;
            }
            // entropy of the normalized row: ln(sum) + beta * E[d]
            let entropy = if sum > 0.0 { sum.ln() + beta * weighted / sum } else { 0.0 };
            let diff = entropy - target;
            if diff.abs() < PERPLEXITY_TOL {
                break;
            }
            if diff > 0.0 {
                beta_min = beta;
                beta = if beta_max.is_infinite() { beta * 2.0 } else { (beta + beta_max) / 2.0 };
            } else {
                beta_max = beta;
                beta = if beta_min.is_infinite() { beta / 2.0 } else { (beta + beta_min) / 2.0 };
            }
        }
        let sum: f64 = (0..n).filter(|&j| j != i).map(|j| conditional[i * n + j]).sum();
        if sum > 0.0 {
            for j in 0..n {
                if j != i {
                    conditional[i * n + j] /= sum;
                }
            }
        }
    }
    let mut joint = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                joint[i * n + j] =
                    ((conditional[i * n + j] + conditional[j * n + i]) / (2.0 * n as f64)).max(EPS);
            }
        }
    }
    joint
}

/// Fill `q` (normalized Student-t affinities, floored) and `num` (the raw
/// `1 / (1 + d^2)` kernel) from the current layout.
fn student_t_kernel(y: &[[f64; 2]], q: &mut [f64], num: &mut [f64]) {
    let n = y.len();
    let mut sum = 0.0;
    for i in 0..n {
        num[i * n + i] = 0.0;
        for j in i + 1..n {
            let dx = y[i][0] - y[j][0];
            let dy = y[i][1] - y[j][1];
            let k = 1.0 / (1.0 + dx * dx + dy * dy);
            num[i * n + j] = k;
            num[j * n + i] = k;
            sum += 2.0 * k;
        }
    }
    for i in 0..n {
        for j in 0..n {
            q[i * n + j] = if i == j { 0.0 } else { (num[i * n + j] / sum).max(EPS) };
        }
    }
}

fn kl_divergence(p: &[f64], q: &[f64], n: usize) -> f64 {
    let mut kl = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let pij = p[i * n + j];
                kl += pij * (pij / q[i * n + j]).ln();
            }
        }
    }
    kl
}
