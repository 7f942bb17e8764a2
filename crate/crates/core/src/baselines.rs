//! Tangent PCA in the graph space of networks modulo node permutations.
//!
//! Networks are aligned to a running mean by exhaustive search over node
//! permutations, the Fréchet mean is found by alternating alignment and
//! averaging, and PCA is run on the aligned differences to the mean.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::Svd;
use crate::spectral::Network;

/// Largest node count accepted by the exhaustive permutation search.
pub const MAX_ALIGNMENT_NODES: usize = 10;
pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct PermutationAlignment {
    /// `permutation[i]` is the node of `y` placed at position `i`, i.e. the
    /// aligned matrix is `y[π(i), π(j)]`.
    pub permutation: Vec<usize>,
    /// Frobenius norm of `P y Pᵀ − x`.
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct FrechetMeanResult {
    pub mean: Network,
    pub aligned: Vec<Network>,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct TangentPcaResult {
    /// Symmetric matrices, orthonormal for the Frobenius inner product.
    pub components: Vec<DMatrix<f64>>,
    /// `N × c` coordinates of the centered tangent vectors.
    pub scores: Vec<Vec<f64>>,
    pub explained_variance_ratio: Vec<f64>,
    pub mean: Network,
    pub aligned: Vec<Network>,
    /// Sum of squared Frobenius norms of the centered tangent vectors.
    pub total_variance: f64,
}

/// `y[π(i), π(j)]`.
pub fn permute(y: &DMatrix<f64>, permutation: &[usize]) -> DMatrix<f64> {
    let n = y.nrows();
    DMatrix::from_fn(n, n, |i, j| y[(permutation[i], permutation[j])])
}

fn check_pair(x: &Network, y: &Network) -> Result<()> {
    if x.n() != y.n() {
        return Err(Error::SizeMismatch {
            expected: x.n(),
            found: y.n(),
        });
    }
    if x.n() > MAX_ALIGNMENT_NODES {
        return Err(Error::TooLarge {
            n: x.n(),
            limit: MAX_ALIGNMENT_NODES,
        });
    }
    Ok(())
}

/// Rearranges `perm` into the next permutation in lexicographic order.
fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

fn squared_residual(x: &[f64], y: &[f64], n: usize, perm: &[usize]) -> f64 {
    let mut acc = 0.0;
    for i in 0..n {
        let yi = perm[i] * n;
        let xi = i * n;
        for j in 0..n {
            let d = y[yi + perm[j]] - x[xi + j];
            acc += d * d;
        }
    }
    acc
}

/// Best permutation among those starting with `first`, scanned in
/// lexicographic order (first minimum wins).
fn best_with_first(x: &[f64], y: &[f64], n: usize, first: usize) -> (Vec<usize>, f64) {
    let mut perm: Vec<usize> = std::iter::once(first)
        .chain((0..n).filter(|&k| k != first))
        .collect();
    let mut best = perm.clone();
    let mut best_score = squared_residual(x, y, n, &perm);
    while next_permutation(&mut perm) && perm[0] == first {
        let score = squared_residual(x, y, n, &perm);
        if score < best_score {
            best_score = score;
            best.copy_from_slice(&perm);
        }
    }
    (best, best_score)
}

/// Exhaustive search for the node permutation of `y` closest to `x` in
/// Frobenius norm. Ties go to the lexicographically smallest permutation.
pub fn best_permutation_alignment(x: &Network, y: &Network) -> Result<PermutationAlignment> {
    check_pair(x, y)?;
    let n = x.n();
    // Row-major copies for the inner loop.
    let xs: Vec<f64> = x.adjacency().transpose().iter().cloned().collect();
    let ys: Vec<f64> = y.adjacency().transpose().iter().cloned().collect();
    let per_first: Vec<(Vec<usize>, f64)> = if n >= 7 {
        (0..n)
            .into_par_iter()
            .map(|f| best_with_first(&xs, &ys, n, f))
            .collect()
    } else {
        (0..n).map(|f| best_with_first(&xs, &ys, n, f)).collect()
    };
    // Branches are already in lexicographic order; keep the first minimum.
    let (permutation, score) = per_first
        .into_iter()
        .reduce(|best, cand| if cand.1 < best.1 { cand } else { best })
        .expect("n >= 1");
    Ok(PermutationAlignment {
        permutation,
        residual: score.sqrt(),
    })
}

fn average(mats: &[DMatrix<f64>]) -> DMatrix<f64> {
    let mut acc = DMatrix::zeros(mats[0].nrows(), mats[0].ncols());
    for m in mats {
        acc += m;
    }
    acc / mats.len() as f64
}

fn check_dataset(networks: &[Network]) -> Result<usize> {
    let first = networks
        .first()
        .ok_or_else(|| Error::DegenerateDataset("empty dataset".into()))?;
    let n = first.n();
    if n > MAX_ALIGNMENT_NODES {
        return Err(Error::TooLarge {
            n,
            limit: MAX_ALIGNMENT_NODES,
        });
    }
    for net in networks {
        if net.n() != n {
            return Err(Error::SizeMismatch {
                expected: n,
                found: net.n(),
            });
        }
    }
    Ok(n)
}

/// Fréchet mean in the graph space by alternating alignment and averaging.
///
/// Initialized at the medoid (smallest sum of squared Frobenius distances,
/// first index on ties). Stops once the mean moves less than `tol` in
/// Frobenius norm, or after `max_iter` iterations.
pub fn frechet_mean(networks: &[Network], tol: f64, max_iter: usize) -> Result<FrechetMeanResult> {
    check_dataset(networks)?;
    let medoid = (0..networks.len())
        .map(|i| {
            let cost: f64 = networks
                .iter()
                .map(|other| (networks[i].adjacency() - other.adjacency()).norm_squared())
                .sum();
            (i, cost)
        })
        .reduce(|best, cand| if cand.1 < best.1 { cand } else { best })
        .expect("nonempty")
        .0;
    let mut mean = networks[medoid].adjacency().clone();
    let mut aligned: Vec<DMatrix<f64>> = Vec::new();
    let mut iterations = 0;
    let mut converged = false;

    while iterations < max_iter {
        iterations += 1;
        let reference = Network::new("mean", mean.clone())?;
        aligned = networks
            .par_iter()
            .map(|net| {
                best_permutation_alignment(&reference, net)
                    .map(|a| permute(net.adjacency(), &a.permutation))
            })
            .collect::<Result<_>>()?;
        let next = average(&aligned);
        let moved = (&next - &mean).norm();
        mean = next;
        if moved < tol {
            converged = true;
            break;
        }
    }

    let aligned = networks
        .iter()
        .zip(aligned)
        .map(|(net, m)| Network::new(net.id(), m))
        .collect::<Result<_>>()?;
    Ok(FrechetMeanResult {
        mean: Network::new("frechet-mean", mean)?,
        aligned,
        iterations,
        converged,
    })
}

/// Isometric vectorization of a symmetric matrix: upper triangle in
/// row-major order, off-diagonal entries scaled by `√2`, so that vector dot
/// products equal Frobenius inner products.
pub fn vectorize_symmetric(m: &DMatrix<f64>) -> DVector<f64> {
    let n = m.nrows();
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            let v = m[(i, j)];
            out.push(if i == j {
                v
            } else {
                v * std::f64::consts::SQRT_2
            });
        }
    }
    DVector::from_vec(out)
}

pub fn unvectorize_symmetric(v: &DVector<f64>, n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            if i == j {
                m[(i, i)] = v[k];
            } else {
                let x = v[k] / std::f64::consts::SQRT_2;
                m[(i, j)] = x;
                m[(j, i)] = x;
            }
            k += 1;
        }
    }
    m
}

/// Tangent PCA at the Fréchet mean: PCA of the aligned differences
/// `aligned_i − mean`, with the Frobenius inner product.
pub fn tangent_pca(
    networks: &[Network],
    num_components: usize,
    tol: f64,
    max_iter: usize,
) -> Result<TangentPcaResult> {
    let n = check_dataset(networks)?;
    let count = networks.len();
    let dim = n * (n + 1) / 2;
    let limit = count.saturating_sub(1).min(dim);
    if num_components == 0 || num_components > limit {
        return Err(Error::InvalidArgument(format!(
            "number of components must be in 1..={limit}, got {num_components}"
        )));
    }
    let fm = frechet_mean(networks, tol, max_iter)?;
    let logs: Vec<DVector<f64>> = fm
        .aligned
        .iter()
        .map(|a| vectorize_symmetric(&(a.adjacency() - fm.mean.adjacency())))
        .collect();
    let center = logs.iter().fold(DVector::zeros(dim), |acc, v| acc + v) / count as f64;
    let data = DMatrix::from_fn(count, dim, |i, k| logs[i][k] - center[k]);
    let total_variance = data.norm_squared();
    if total_variance <= f64::MIN_POSITIVE {
        return Err(Error::DegenerateDataset(
            "all networks coincide after alignment".into(),
        ));
    }

    let svd = Svd::new(&data);
    let mut components = Vec::with_capacity(num_components);
    let mut directions = Vec::with_capacity(num_components);
    let mut ratios = Vec::with_capacity(num_components);
    for k in 0..num_components {
        let mut dir: DVector<f64> = svd.v.column(k).into_owned();
        let pivot = dir.iamax();
        if dir[pivot] < 0.0 {
            dir = -dir;
        }
        let sigma = svd.singular_values[k];
        ratios.push(sigma * sigma / total_variance);
        components.push(unvectorize_symmetric(&dir, n));
        directions.push(dir);
    }
    let scores = (0..count)
        .map(|i| {
            let row = data.row(i).transpose();
            directions.iter().map(|d| row.dot(d)).collect()
        })
        .collect();

    Ok(TangentPcaResult {
        components,
        scores,
        explained_variance_ratio: ratios,
        mean: fm.mean,
        aligned: fm.aligned,
        total_variance,
    })
}

/// `mean + t · components[component]`. The result may have negative weights.
pub fn component_deformation(
    result: &TangentPcaResult,
    component: usize,
    t: f64,
) -> Result<Network> {
    let v = result
        .components
        .get(component)
        .ok_or(Error::IndexOutOfRange {
            index: component,
            len: result.components.len(),
        })?;
    Network::new(
        format!("component-{component}-t{t}"),
        result.mean.adjacency() + v * t,
    )
}
