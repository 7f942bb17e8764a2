//! Thin singular value decomposition by one-sided Jacobi rotations.
//!
//! Used instead of the bidiagonal SVD of nalgebra 0.35, which returns wrong
//! factors for some exactly rank-deficient inputs (such as the centred pair
//! `[x, −x]`). Jacobi rotations keep high relative accuracy on small
//! singular values, which the rank decisions of the projections rely on.

use nalgebra::{DMatrix, DVector};

const MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone)]
pub(crate) struct Svd {
    /// `r × k` with orthonormal columns.
    pub u: DMatrix<f64>,
    /// Non-increasing, length `k = min(r, c)`.
    pub singular_values: DVector<f64>,
    /// `c × k` with orthonormal columns.
    pub v: DMatrix<f64>,
}

impl Svd {
    pub fn new(a: &DMatrix<f64>) -> Self {
        if a.nrows() < a.ncols() {
            let t = Self::new(&a.transpose());
            return Self {
                u: t.v,
                singular_values: t.singular_values,
                v: t.u,
            };
        }
        let (rows, cols) = a.shape();
        let mut u = a.clone();
        let mut v = DMatrix::<f64>::identity(cols, cols);
        for _ in 0..MAX_SWEEPS {
            let mut rotated = false;
            for p in 0..cols {
                for q in (p + 1)..cols {
                    let alpha = u.column(p).norm_squared();
                    let beta = u.column(q).norm_squared();
                    let gamma = u.column(p).dot(&u.column(q));
                    if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                        continue;
                    }
                    rotated = true;
                    let zeta = (beta - alpha) / (2.0 * gamma);
                    let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = c * t;
                    rotate(&mut u, p, q, c, s);
                    rotate(&mut v, p, q, c, s);
                }
            }
            if !rotated {
                break;
            }
        }

        let mut norms: Vec<f64> = (0..cols).map(|j| u.column(j).norm()).collect();
        // Columns at rounding level carry no direction information.
        let floor =
            f64::EPSILON * rows.max(cols) as f64 * norms.iter().cloned().fold(0.0, f64::max);
        norms
            .iter_mut()
            .filter(|v| **v <= floor)
            .for_each(|v| *v = 0.0);
        let mut order: Vec<usize> = (0..cols).collect();
        order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]).then(a.cmp(&b)));
        let mut left = DMatrix::zeros(rows, cols);
        let mut right = DMatrix::zeros(cols, cols);
        let mut sigma = DVector::zeros(cols);
        for (k, &j) in order.iter().enumerate() {
            sigma[k] = norms[j];
            if norms[j] > 0.0 {
                left.set_column(k, &(u.column(j) / norms[j]));
            }
            right.set_column(k, &v.column(j));
        }
        complete_orthonormal(&mut left, &sigma);
        Self {
            u: left,
            singular_values: sigma,
            v: right,
        }
    }

    /// Number of singular values above `rcond · σ_max`.
    pub fn rank(&self, rcond: f64) -> usize {
        let smax = self.singular_values.get(0).copied().unwrap_or(0.0);
        if smax == 0.0 {
            return 0;
        }
        self.singular_values
            .iter()
            .take_while(|&&s| s > rcond * smax)
            .count()
    }
}

/// Fills the columns of `u` paired with zero singular values so that all
/// columns are orthonormal, using Gram-Schmidt on the unit vectors.
fn complete_orthonormal(u: &mut DMatrix<f64>, sigma: &DVector<f64>) {
    let rows = u.nrows();
    let mut candidate = 0;
    for k in 0..u.ncols() {
        if sigma[k] > 0.0 {
            continue;
        }
        while candidate < rows {
            let mut e = DVector::zeros(rows);
            e[candidate] = 1.0;
            candidate += 1;
            for _ in 0..2 {
                for j in 0..k {
                    let c = u.column(j).dot(&e);
                    e -= u.column(j) * c;
                }
            }
            let norm = e.norm();
            if norm > 0.5 {
                u.set_column(k, &(e / norm));
                break;
            }
        }
    }
}

fn rotate(m: &mut DMatrix<f64>, p: usize, q: usize, c: f64, s: f64) {
    for i in 0..m.nrows() {
        let a = m[(i, p)];
        let b = m[(i, q)];
        m[(i, p)] = c * a - s * b;
        m[(i, q)] = s * a + c * b;
    }
}
