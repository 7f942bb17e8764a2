#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use spectral_bsa::Network;

/// Symmetric zero-diagonal network with weights uniform on `[0, 1)`.
pub fn random_network(rng: &mut ChaCha8Rng, n: usize, id: &str) -> Network {
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let w: f64 = rng.random();
            m[(i, j)] = w;
            m[(j, i)] = w;
        }
    }
    Network::new(id, m).unwrap()
}

pub fn random_networks(rng: &mut ChaCha8Rng, count: usize, n: usize) -> Vec<Network> {
    (0..count)
        .map(|k| random_network(rng, n, &format!("g{k}")))
        .collect()
}

/// All permutations of `0..n` (Heap's algorithm).
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn heap(k: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(p.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, p, out);
            if k.is_multiple_of(2) {
                p.swap(i, k - 1);
            } else {
                p.swap(0, k - 1);
            }
        }
    }
    let mut out = Vec::new();
    heap(n, &mut (0..n).collect(), &mut out);
    out
}

/// Eigenvalues in whatever order the solver returns them.
pub fn raw_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    m.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect()
}

pub fn frobenius(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm()
}

pub fn permuted(y: &DMatrix<f64>, p: &[usize]) -> DMatrix<f64> {
    let n = y.nrows();
    DMatrix::from_fn(n, n, |i, j| y[(p[i], p[j])])
}
