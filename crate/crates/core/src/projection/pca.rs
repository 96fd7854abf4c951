//! PCA onto the top-2 principal components, via cyclic Jacobi eigendecomposition
//! of the smaller of the covariance and Gram matrices.

use crate::error::{Error, Result};

use super::{Projection2D, ProjectedPoint, ProjectionMethod, ProjectionParams};

/// Project onto the top-2 principal components of the mean-centered data.
///
/// Sign convention: each component's largest-magnitude loading is positive
/// (first index wins ties), so the output is deterministic. With rank-1 or
/// one-dimensional input the second coordinate is identically zero.
pub fn pca_2d(items: &[(String, Vec<f64>)]) -> Result<Projection2D> {
    let (centered, _mean) = center(items)?;
    let axes = principal_axes_2(&centered)?;
    let rows = items
        .iter()
        .zip(&centered)
        .map(|((id, _), row)| ProjectedPoint {
            id: id.clone(),
            x: dot(row, &axes.0),
            y: dot(row, &axes.1),
        })
        .collect();
    Ok(Projection2D {
        rows,
        method: ProjectionMethod::Pca,
        params: ProjectionParams::default(),
    })
}

pub(super) fn center(items: &[(String, Vec<f64>)]) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    if items.len() < 2 {
        return Err(Error::Insufficient { what: "points", needed: 2, got: items.len() });
    }
    let dim = items[0].1.len();
    if dim == 0 {
        return Err(Error::InvalidInput("zero-dimensional vectors".into()));
    }
    for (id, v) in items {
        if v.len() != dim {
            return Err(Error::InvalidInput(format!(
                "vector for `{id}` has length {}, expected {dim}",
                v.len()
            )));
        }
    }
    let n = items.len() as f64;
    let mut mean = vec![0.0; dim];
    for (_, v) in items {
        for (m, x) in mean.iter_mut().zip(v) {
            *m += x;
        }
    }
    for m in &mut mean {
        *m /= n;
    }
    let centered: Vec<Vec<f64>> = items
        .iter()
        .map(|(_, v)| v.iter().zip(&mean).map(|(x, m)| x - m).collect())
        .collect();
    let total: f64 = centered.iter().flatten().map(|x| x * x).sum();
    if total == 0.0 {
        return Err(Error::InvalidInput("zero variance: all points are identical".into()));
    }
    Ok((centered, mean))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Top-2 principal axes of centered data, each of unit norm (or zero when the
/// data has rank below 2).
fn principal_axes_2(centered: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = centered.len();
    let dim = centered[0].len();
    let (mut first, mut second) = if dim <= n {
        // eigendecompose X^T X (dim x dim)
        let mut cov = vec![vec![0.0; dim]; dim];
        for row in centered {
            for i in 0..dim {
                for j in i..dim {
                    cov[i][j] += row[i] * row[j];
                }
            }
        }
        for i in 0..dim {
            for j in 0..i {
                cov[i][j] = cov[j][i];
            }
        }
        let eig = jacobi_eigen(cov);
        let axis = |k: usize| -> Vec<f64> {
            if k < eig.len() && eig[k].0 > 0.0 {
                eig[k].1.clone()
            } else {
                vec![0.0; dim]
            }
        };
        (axis(0), axis(1))
    } else {
        // eigendecompose the Gram matrix X X^T (n x n) and map back
        let mut gram = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i..n {
                let g = dot(&centered[i], &centered[j]);
                gram[i][j] = g;
                gram[j][i] = g;
            }
        }
        let eig = jacobi_eigen(gram);
        let axis = |k: usize| -> Vec<f64> {
            if k >= eig.len() || eig[k].0 <= 0.0 {
                return vec![0.0; dim];
            }
            let u = &eig[k].1;
            let mut v = vec![0.0; dim];
            for (row, ui) in centered.iter().zip(u) {
                for (vi, xi) in v.iter_mut().zip(row) {
                    *vi += ui * xi;
                }
            }
            let norm = dot(&v, &v).sqrt();
            if norm == 0.0 {
                return vec![0.0; dim];
            }
            for vi in &mut v {
                *vi /= norm;
            }
            v
        };
        (axis(0), axis(1))
    };
    orient(&mut first);
    orient(&mut second);
    Ok((first, second))
}

/// Flip an axis so its largest-magnitude loading is positive.
fn orient(axis: &mut [f64]) {
    let mut best = 0usize;
    for (i, x) in axis.iter().enumerate() {
        if x.abs() > axis[best].abs() {
            best = i;
        }
    }
    if axis[best] < 0.0 {
        for x in axis.iter_mut() {
            *x = -*x;
        }
    }
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns
/// `(eigenvalue, eigenvector)` pairs sorted by descending eigenvalue.
fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> Vec<(f64, Vec<f64>)> {
    let n = a.len();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    if n == 1 {
        return vec![(a[0][0], vec![1.0])];
    }
    let fro: f64 = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    let threshold = 1e-14 * fro.max(1.0);
    for _sweep in 0..200 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[p][q] * a[p][q];
            }
        }
        if off.sqrt() <= threshold {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq.abs() <= threshold * 1e-2 {
                    continue;
                }
                let tau = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (tau - (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let app = a[p][p];
                let aqq = a[q][q];
                a[p][p] = c * c * app - 2.0 * s * c * apq + s * s * aqq;
                a[q][q] = s * s * app + 2.0 * s * c * apq + c * c * aqq;
                a[p][q] = 0.0;
                a[q][p] = 0.0;
                for k in 0..n {
                    if k != p && k != q {
                        let akp = a[k][p];
                        let akq = a[k][q];
                        a[k][p] = c * akp - s * akq;
                        a[p][k] = a[k][p];
                        a[k][q] = s * akp + c * akq;
                        a[q][k] = a[k][q];
                    }
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j][j].total_cmp(&a[i][i]).then(i.cmp(&j)));
    order
        .into_iter()
        .map(|k| (a[k][k], v.iter().map(|row| row[k]).collect()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn items(points: &[&[f64]]) -> Vec<(String, Vec<f64>)> {
        points
            .iter()
            .enumerate()
            .map(|(i, p)| (format!("p{i}"), p.to_vec()))
            .collect()
    }

    #[test]
    fn collinear_points_project_onto_a_line() {
        let proj = pca_2d(&items(&[&[0.0, 0.0], &[1.0, 1.0], &[2.0, 2.0]])).unwrap();
        for row in &proj.rows {
            assert!(row.y.abs() < 1e-9, "y = {}", row.y);
        }
        // spacing ratios preserved
        let x0 = proj.rows[0].x;
        let x1 = proj.rows[1].x;
        let x2 = proj.rows[2].x;
        assert!(((x2 - x1) - (x1 - x0)).abs() < 1e-9);
    }

    #[test]
    fn two_dimensional_input_is_an_isometry() {
        let pts = items(&[&[0.0, 0.0], &[1.0, 0.2], &[0.3, 1.4], &[-0.5, 0.7]]);
        let proj = pca_2d(&pts).unwrap();
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let orig = ((pts[i].1[0] - pts[j].1[0]).powi(2)
                    + (pts[i].1[1] - pts[j].1[1]).powi(2))
                .sqrt();
                let new = ((proj.rows[i].x - proj.rows[j].x).powi(2)
                    + (proj.rows[i].y - proj.rows[j].y).powi(2))
                .sqrt();
                assert!((orig - new).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn projection_is_contractive() {
        let mut state = 88172645463325252u64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let pts: Vec<(String, Vec<f64>)> = (0..20)
            .map(|i| (format!("p{i}"), (0..6).map(|_| next()).collect()))
            .collect();
        let proj = pca_2d(&pts).unwrap();
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let orig: f64 = pts[i]
                    .1
                    .iter()
                    .zip(&pts[j].1)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                let new = ((proj.rows[i].x - proj.rows[j].x).powi(2)
                    + (proj.rows[i].y - proj.rows[j].y).powi(2))
                .sqrt();
                assert!(new <= orig + 1e-9);
            }
        }
    }

    #[test]
    fn degenerate_inputs_rejected() {
        assert!(pca_2d(&items(&[&[1.0, 2.0]])).is_err());
        assert!(pca_2d(&items(&[&[1.0, 2.0], &[1.0, 2.0]])).is_err());
    }

    #[test]
    fn sign_convention_keeps_dominant_loading_positive() {
        // variance lives on the second input axis, so pc1 loads on it; the
        // convention orients that loading positive and x tracks raw axis 1
        let proj = pca_2d(&items(&[&[0.0, -3.0], &[0.0, 1.0], &[0.1, 5.0]])).unwrap();
        assert!(proj.rows[0].x < proj.rows[1].x);
        assert!(proj.rows[1].x < proj.rows[2].x);
    }

    #[test]
    fn gram_branch_matches_covariance_branch() {
        // 3 points in 5 dims exercises the Gram path; lift to 3 points in 2 dims
        // with the same geometry for the covariance path.
        let pts_high = items(&[
            &[1.0, 0.0, 0.0, 0.0, 0.0],
            &[0.0, 2.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0, 0.0],
        ]);
        let proj = pca_2d(&pts_high).unwrap();
        // pairwise distances survive (rank-2 data): 2-D projection is exact
        let d01 = ((proj.rows[0].x - proj.rows[1].x).powi(2)
            + (proj.rows[0].y - proj.rows[1].y).powi(2))
        .sqrt();
        assert!((d01 - (5.0f64).sqrt()).abs() < 1e-9);
    }
}
