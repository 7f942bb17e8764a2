//! Networks, their sorted spectra, and the quotient geometry of the spectral
//! graph space.
//!
//! Two networks are identified when their adjacency matrices are orthogonally
//! similar, so every unlabeled network is represented by its ascending
//! eigenvalue vector, a point of the cone `{μ : μ_1 ≤ … ≤ μ_n}`. The quotient
//! distance, geodesics and logarithm are then the Euclidean ones of that cone.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Relative tolerance used when accepting a nearly symmetric matrix.
pub const SYMMETRY_TOL: f64 = 1e-12;

const EIGEN_EPS: f64 = 1e-15;
const EIGEN_MAX_ITER: usize = 10_000;

/// An undirected weighted network given by its symmetric adjacency matrix.
/// Self-loops (diagonal entries) are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    id: String,
    adjacency: DMatrix<f64>,
}

impl Network {
    /// Validates `raw` and wraps it as a network.
    ///
    /// Matrices whose asymmetry is below `SYMMETRY_TOL` (relative to the
    /// largest entry, floored at one) are symmetrized as `(A + Aᵀ) / 2`.
    pub fn new(id: impl Into<String>, raw: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = raw.shape();
        if rows != cols {
            return Err(Error::NonSquare { rows, cols });
        }
        if rows == 0 {
            return Err(Error::Empty);
        }
        let mut scale: f64 = 1.0;
        for j in 0..cols {
            for i in 0..rows {
                let v = raw[(i, j)];
                if !v.is_finite() {
                    return Err(Error::NonFinite { i, j });
                }
                scale = scale.max(v.abs());
            }
        }
        let tol = SYMMETRY_TOL * scale;
        let mut symmetric = true;
        for i in 0..rows {
            for j in (i + 1)..cols {
                let asymmetry = (raw[(i, j)] - raw[(j, i)]).abs();
                if asymmetry > tol {
                    return Err(Error::NonSymmetric { i, j, asymmetry });
                }
                if asymmetry != 0.0 {
                    symmetric = false;
                }
            }
        }
        let adjacency = if symmetric {
            raw
        } else {
            (&raw + raw.transpose()) * 0.5
        };
        Ok(Self {
            id: id.into(),
            adjacency,
        })
    }

    pub fn from_rows(id: impl Into<String>, rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        for row in rows {
            if row.len() != n {
                return Err(Error::NonSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
        }
        Self::new(id, DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn n(&self) -> usize {
        self.adjacency.nrows()
    }

    pub fn adjacency(&self) -> &DMatrix<f64> {
        &self.adjacency
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        let n = self.n();
        (0..n)
            .map(|i| (0..n).map(|j| self.adjacency[(i, j)]).collect())
            .collect()
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn spectrum(&self) -> Result<Spectrum> {
        spectrum(self)
    }

    pub fn eigendecompose(&self) -> Result<EigenDecomposition> {
        eigendecompose(self)
    }
}

/// Ascending eigenvalues of a network; the canonical coordinates of its
/// cospectral class.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct Spectrum(Vec<f64>);

impl Spectrum {
    /// Wraps `values`, rejecting vectors that are not sorted ascending.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::with_slack(values, 0.0)
    }

    /// Like [`Spectrum::new`] but tolerates descents up to `slack`.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn with_slack(values: Vec<f64>, slack: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty);
        }
        for (index, pair) in values.windows(2).enumerate() {
            if !(pair[0] <= pair[1] + slack) {
                return Err(Error::Unsorted { index });
            }
        }
        Ok(Self(values))
    }

    /// Sorts arbitrary finite values into a spectrum.
    pub fn from_unsorted(mut values: Vec<f64>) -> Self {
        values.sort_by(f64::total_cmp);
        Self(values)
    }

    pub(crate) fn from_sorted_unchecked(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_dvector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.0)
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// Sorted eigendecomposition `X = Q diag(λ) Qᵀ` with `λ` ascending.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub spectrum: Spectrum,
    /// Orthonormal eigenvectors, column `k` paired with `spectrum[k]`.
    pub basis: DMatrix<f64>,
}

impl EigenDecomposition {
    /// `Q diag(values) Qᵀ`.
    pub fn conjugate(&self, values: &[f64]) -> DMatrix<f64> {
        let scaled = DMatrix::from_fn(self.basis.nrows(), self.basis.ncols(), |i, k| {
            self.basis[(i, k)] * values[k]
        });
        let out = scaled * self.basis.transpose();
        (&out + out.transpose()) * 0.5
    }
}

/// A tangent vector at a point of the cone, identified with `R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector(Vec<f64>);

impl TangentVector {
    pub fn new(components: Vec<f64>) -> Self {
        Self(components)
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Ascending eigenvalues of the adjacency matrix, with multiplicity.
pub fn spectrum(net: &Network) -> Result<Spectrum> {
    Ok(eigendecompose(net)?.spectrum)
}

/// Symmetric eigendecomposition sorted by ascending eigenvalue.
///
/// When eigenvalues repeat, any orthonormal basis of the eigenspace is
/// returned.
pub fn eigendecompose(net: &Network) -> Result<EigenDecomposition> {
    symmetric_eigen(net.adjacency())
}

pub(crate) fn symmetric_eigen(m: &DMatrix<f64>) -> Result<EigenDecomposition> {
    let n = m.nrows();
    let eig = SymmetricEigen::try_new(m.clone(), EIGEN_EPS, EIGEN_MAX_ITER)
        .ok_or(Error::EigensolverFailure)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let basis = DMatrix::from_fn(n, n, |i, k| eig.eigenvectors[(i, order[k])]);
    Ok(EigenDecomposition {
        spectrum: Spectrum::from_sorted_unchecked(values),
        basis,
    })
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::SizeMismatch { expected, found });
    }
    Ok(())
}

/// Euclidean distance between two sorted spectra.
pub fn spectrum_distance(a: &Spectrum, b: &Spectrum) -> Result<f64> {
    check_len(a.len(), b.len())?;
    Ok(a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

/// Quotient distance between two networks: the `ℓ²` distance between their
/// sorted spectra, equal to `min_R ‖R b Rᵀ − a‖_F` over orthogonal `R`.
pub fn spectral_distance(a: &Network, b: &Network) -> Result<f64> {
    check_len(a.n(), b.n())?;
    spectrum_distance(&spectrum(a)?, &spectrum(b)?)
}

/// Orthogonal `R = Q_a Q_bᵀ` realizing the spectral distance, i.e.
/// `‖R b Rᵀ − a‖_F = spectral_distance(a, b)`.
pub fn align(a: &Network, b: &Network) -> Result<DMatrix<f64>> {
    check_len(a.n(), b.n())?;
    let ea = eigendecompose(a)?;
    let eb = eigendecompose(b)?;
    Ok(&ea.basis * eb.basis.transpose())
}

/// Logarithm of `target` at `base`: the difference of sorted spectra.
pub fn log_map(base: &Spectrum, target: &Spectrum) -> Result<TangentVector> {
    check_len(base.len(), target.len())?;
    Ok(TangentVector(
        target
            .values()
            .iter()
            .zip(base.values())
            .map(|(t, b)| t - b)
            .collect(),
    ))
}

/// Point `(1 − t) a + t b` of the minimizing geodesic between `a` and `b`.
///
/// For `t ∉ [0, 1]` the extrapolated point is returned only when it is still
/// sorted; it is never clamped.
pub fn geodesic_point(a: &Spectrum, b: &Spectrum, t: f64) -> Result<Spectrum> {
    check_len(a.len(), b.len())?;
    let values: Vec<f64> = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (1.0 - t) * x + t * y)
        .collect();
    if (0.0..=1.0).contains(&t) {
        // Rounded multiplication and addition are monotone, so this stays sorted.
        return Ok(Spectrum(values));
    }
    Spectrum::new(values).map_err(|_| Error::LeftCone { t })
}

pub fn tangent_inner(u: &TangentVector, v: &TangentVector) -> Result<f64> {
    check_len(u.len(), v.len())?;
    Ok(u.0.iter().zip(&v.0).map(|(x, y)| x * y).sum())
}

pub fn frobenius_distance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn net(rows: &[Vec<f64>]) -> Network {
        Network::from_rows("t", rows).unwrap()
    }

    fn random_symmetric(n: usize, rng: &mut ChaCha8Rng) -> Network {
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v: f64 = rng.random_range(-1.0..1.0);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Network::new("r", m).unwrap()
    }

    #[test]
    fn validation() {
        net(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let near = net(&[vec![0.0, 1.0], vec![1.0 + 1e-13, 0.0]]);
        assert_eq!(near.adjacency()[(0, 1)], near.adjacency()[(1, 0)]);
        assert!(matches!(
            Network::from_rows("x", &[vec![0.0, 1.0], vec![2.0, 0.0]]),
            Err(Error::NonSymmetric { .. })
        ));
        assert!(matches!(
            Network::new("x", DMatrix::zeros(2, 3)),
            Err(Error::NonSquare { .. })
        ));
        assert!(matches!(
            Network::from_rows("x", &[vec![f64::NAN]]),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn known_spectra() {
        let d = Network::new(
            "d",
            DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 1.0, 2.0])),
        )
        .unwrap();
        assert_eq!(spectrum(&d).unwrap().values(), &[1.0, 2.0, 3.0]);

        let complete = Network::new(
            "k10",
            DMatrix::from_fn(10, 10, |i, j| if i == j { 0.0 } else { 0.5 }),
        )
        .unwrap();
        let s = spectrum(&complete).unwrap();
        for v in &s.values()[..9] {
            assert_abs_diff_eq!(*v, -0.5, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(s.values()[9], 4.5, epsilon = 1e-12);

        let star = Network::new(
            "star",
            DMatrix::from_fn(10, 10, |i, j| if (i == 0) ^ (j == 0) { 1.0 } else { 0.0 }),
        )
        .unwrap();
        let s = spectrum(&star).unwrap();
        assert_abs_diff_eq!(s.values()[0], -3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.values()[9], 3.0, epsilon = 1e-12);
        for v in &s.values()[1..9] {
            assert_abs_diff_eq!(*v, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn eigendecomposition_invariants() {
        let id = Network::new("i", DMatrix::identity(3, 3)).unwrap();
        let e = eigendecompose(&id).unwrap();
        assert_eq!(e.spectrum.values(), &[1.0, 1.0, 1.0]);

        let d = Network::new(
            "d",
            DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0])),
        )
        .unwrap();
        let e = eigendecompose(&d).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(e.basis[(i, j)].abs(), expect, epsilon = 1e-14);
            }
        }

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = random_symmetric(5, &mut rng);
        let e = eigendecompose(&x).unwrap();
        let gram = e.basis.transpose() * &e.basis;
        assert!((gram - DMatrix::<f64>::identity(5, 5)).norm() < 1e-9);
        assert!((e.conjugate(e.spectrum.values()) - x.adjacency()).norm() < 1e-9);
    }

    #[test]
    fn distance_examples() {
        let a = Network::new(
            "a",
            DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0])),
        )
        .unwrap();
        let b = Network::new(
            "b",
            DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 5.0])),
        )
        .unwrap();
        assert_eq!(spectral_distance(&a, &a).unwrap(), 0.0);
        assert_abs_diff_eq!(
            spectral_distance(&a, &b).unwrap(),
            13f64.sqrt(),
            epsilon = 1e-12
        );
        let c = Network::new("c", DMatrix::identity(3, 3)).unwrap();
        assert!(matches!(
            spectral_distance(&a, &c),
            Err(Error::SizeMismatch { .. })
        ));
    }

    #[test]
    fn align_swaps_diagonal() {
        let a = Network::new(
            "a",
            DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0])),
        )
        .unwrap();
        let b = Network::new(
            "b",
            DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 1.0])),
        )
        .unwrap();
        let r = align(&a, &b).unwrap();
        assert_abs_diff_eq!(r[(0, 0)], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r[(0, 1)].abs(), 1.0, epsilon = 1e-14);
        let residual = (&r * b.adjacency() * r.transpose() - a.adjacency()).norm();
        assert_abs_diff_eq!(residual, 0.0, epsilon = 1e-14);

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x = random_symmetric(4, &mut rng);
        let r = align(&x, &x).unwrap();
        assert!((&r * x.adjacency() * r.transpose() - x.adjacency()).norm() < 1e-12);
    }

    #[test]
    fn log_geodesic_and_inner() {
        let base = Spectrum::new(vec![0.0, 0.0]).unwrap();
        let target = Spectrum::new(vec![1.0, 3.0]).unwrap();
        assert_eq!(log_map(&base, &target).unwrap().components(), &[1.0, 3.0]);
        assert_eq!(log_map(&target, &target).unwrap().components(), &[0.0, 0.0]);

        let a = Spectrum::new(vec![0.0, 2.0]).unwrap();
        let b = Spectrum::new(vec![2.0, 4.0]).unwrap();
        assert_eq!(geodesic_point(&a, &b, 0.0).unwrap(), a);
        assert_eq!(geodesic_point(&a, &b, 1.0).unwrap(), b);
        assert_eq!(geodesic_point(&a, &b, 0.5).unwrap().values(), &[1.0, 3.0]);

        let c = Spectrum::new(vec![0.0, 1.0]).unwrap();
        let d = Spectrum::new(vec![0.0, 3.0]).unwrap();
        // (1 - t) c + t d at t = -1 is (0, -1): unsorted.
        assert!(matches!(
            geodesic_point(&c, &d, -1.0),
            Err(Error::LeftCone { .. })
        ));
        assert_eq!(geodesic_point(&c, &d, 2.0).unwrap().values(), &[0.0, 5.0]);

        let u = TangentVector::new(vec![1.0, 2.0]);
        let v = TangentVector::new(vec![3.0, 4.0]);
        assert_eq!(tangent_inner(&u, &v).unwrap(), 11.0);
        assert_eq!(
            tangent_inner(&u, &TangentVector::new(vec![0.0, 0.0])).unwrap(),
            0.0
        );
    }

    #[test]
    fn spectrum_rejects_unsorted() {
        assert!(matches!(
            Spectrum::new(vec![1.0, 0.0]),
            Err(Error::Unsorted { index: 0 })
        ));
    }
}
