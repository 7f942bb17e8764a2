//! Sample-limited barycentric subspace analysis.
//!
//! Reference networks are chosen among the data points so that the mean
//! squared spectral distance of the dataset to the barycentric subspace they
//! span is minimal. The search is either exhaustive over all index subsets of
//! the requested size or greedy-backward (remove one reference at a time).

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::barycentric::{compute_halfspaces, BarycentricSubspace, Projection};
use crate::error::{Error, Result};
use crate::spectral::{eigendecompose, spectrum, spectrum_distance, Network, Spectrum};

/// Default cap on the number of subsets examined by an exhaustive search.
pub const DEFAULT_SUBSET_BUDGET: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Search {
    Exhaustive,
    GreedyBackward,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BsaConfig {
    /// Number of reference points `m`; the subspace has dimension at most
    /// `m − 1`. For [`fit_backward`] this is the size of the starting set.
    pub num_refs: usize,
    /// Restrict barycentric weights to be nonnegative.
    pub convex: bool,
    pub search: Search,
    /// Minimal spectral distance between any two references.
    pub min_ref_separation: Option<f64>,
    /// When set, references must carry pairwise distinct labels.
    pub cluster_labels: Option<Vec<String>>,
    pub parallel: bool,
    pub subset_budget: u128,
}

impl BsaConfig {
    pub fn new(num_refs: usize) -> Self {
        Self {
            num_refs,
            convex: false,
            search: Search::Exhaustive,
            min_ref_separation: None,
            cluster_labels: None,
            parallel: false,
            subset_budget: DEFAULT_SUBSET_BUDGET,
        }
    }

    pub fn convex(mut self, convex: bool) -> Self {
        self.convex = convex;
        self
    }

    pub fn parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    pub fn search(mut self, search: Search) -> Self {
        self.search = search;
        self
    }

    pub fn min_ref_separation(mut self, sep: f64) -> Self {
        self.min_ref_separation = Some(sep);
        self
    }

    pub fn cluster_labels(mut self, labels: Vec<String>) -> Self {
        self.cluster_labels = Some(labels);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BsaResult {
    pub ref_indices: Vec<usize>,
    pub ref_spectra: Vec<Spectrum>,
    pub convex: bool,
    /// `N × m`, row `i` holds the barycentric weights of datum `i`.
    pub weights: Vec<Vec<f64>>,
    pub projections: Vec<Spectrum>,
    pub per_datum_sq_error: Vec<f64>,
    pub mse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackwardStep {
    pub ref_indices: Vec<usize>,
    pub mse: f64,
}

impl BackwardStep {
    /// Dimension of the barycentric subspace (one less than the number of
    /// references).
    pub fn dimension(&self) -> usize {
        self.ref_indices.len() - 1
    }
}

/// Nested reference sets from the starting size down to a single reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackwardPath {
    pub convex: bool,
    pub steps: Vec<BackwardStep>,
}

impl BackwardPath {
    pub fn step_with_refs(&self, m: usize) -> Option<&BackwardStep> {
        self.steps.iter().find(|s| s.ref_indices.len() == m)
    }
}

/// Spectra of a dataset, checked for a common node count.
pub fn dataset_spectra(networks: &[Network]) -> Result<Vec<Spectrum>> {
    let first = networks
        .first()
        .ok_or_else(|| Error::DegenerateDataset("empty dataset".into()))?;
    networks
        .iter()
        .map(|net| {
            if net.n() != first.n() {
                return Err(Error::SizeMismatch {
                    expected: first.n(),
                    found: net.n(),
                });
            }
            spectrum(net)
        })
        .collect()
}

struct Searcher<'a> {
    spectra: &'a [Spectrum],
    config: &'a BsaConfig,
}

impl Searcher<'_> {
    fn project(&self, bs: &BarycentricSubspace, s: &Spectrum) -> Result<Projection> {
        if self.config.convex {
            bs.project_convex(s)
        } else {
            bs.project(s)
        }
    }

    fn mse(&self, subset: &[usize]) -> Result<f64> {
        let refs: Vec<Spectrum> = subset.iter().map(|&i| self.spectra[i].clone()).collect();
        let bs = compute_halfspaces(&refs)?;
        let mut total = 0.0;
        for (i, s) in self.spectra.iter().enumerate() {
            if subset.contains(&i) {
                continue;
            }
            total += self.project(&bs, s)?.squared_error;
        }
        Ok(total / self.spectra.len() as f64)
    }

    fn admissible(&self, subset: &[usize]) -> bool {
        if let Some(labels) = &self.config.cluster_labels {
            let distinct = subset.iter().map(|&i| &labels[i]).all_unique();
            if !distinct {
                return false;
            }
        }
        if let Some(sep) = self.config.min_ref_separation {
            for (a, b) in subset.iter().tuple_combinations() {
                let d = spectrum_distance(&self.spectra[*a], &self.spectra[*b])
                    .expect("common length checked");
                if d < sep {
                    return false;
                }
            }
        }
        true
    }

    /// Lowest mse among `candidates`, ties resolved by lexicographic subset
    /// order. Candidates are scored independently, so the result does not
    /// depend on `parallel`.
    fn best(&self, candidates: Vec<Vec<usize>>) -> Result<(Vec<usize>, f64)> {
        let scores: Vec<Result<f64>> = if self.config.parallel {
            candidates.par_iter().map(|c| self.mse(c)).collect()
        } else {
            candidates.iter().map(|c| self.mse(c)).collect()
        };
        let mut best: Option<(Vec<usize>, f64)> = None;
        for (subset, score) in candidates.into_iter().zip(scores) {
            let score = score?;
            let better = match &best {
                None => true,
                Some((b, s)) => score < *s || (score == *s && subset < *b),
            };
            if better {
                best = Some((subset, score));
            }
        }
        best.ok_or(Error::NoAdmissibleSubset)
    }

    fn result(&self, subset: Vec<usize>) -> Result<BsaResult> {
        let refs: Vec<Spectrum> = subset.iter().map(|&i| self.spectra[i].clone()).collect();
        let bs = compute_halfspaces(&refs)?;
        let mut weights = Vec::with_capacity(self.spectra.len());
        let mut projections = Vec::with_capacity(self.spectra.len());
        let mut errors = Vec::with_capacity(self.spectra.len());
        for (i, s) in self.spectra.iter().enumerate() {
            if let Some(pos) = subset.iter().position(|&r| r == i) {
                let mut w = vec![0.0; subset.len()];
                w[pos] = 1.0;
                weights.push(w);
                projections.push(s.clone());
                errors.push(0.0);
                continue;
            }
            let p = self.project(&bs, s)?;
            weights.push(p.coords.0);
            projections.push(p.point);
            errors.push(p.squared_error);
        }
        let mse = errors.iter().sum::<f64>() / errors.len() as f64;
        Ok(BsaResult {
            ref_indices: subset,
            ref_spectra: refs,
            convex: self.config.convex,
            weights,
            projections,
            per_datum_sq_error: errors,
            mse,
        })
    }

    fn exhaustive(&self) -> Result<Vec<usize>> {
        let n = self.spectra.len();
        let m = self.config.num_refs;
        let count = binomial(n as u128, m as u128);
        if count > self.config.subset_budget {
            return Err(Error::BudgetExceeded {
                subsets: count,
                budget: self.config.subset_budget,
            });
        }
        let candidates: Vec<Vec<usize>> = (0..n)
            .combinations(m)
            .filter(|c| self.admissible(c))
            .collect();
        Ok(self.best(candidates)?.0)
    }

    fn backward_from(&self, start: Vec<usize>) -> Result<Vec<BackwardStep>> {
        let mut current = start;
        let mut steps = vec![BackwardStep {
            mse: self.mse(&current)?,
            ref_indices: current.clone(),
        }];
        while current.len() > 1 {
            let candidates: Vec<Vec<usize>> = (0..current.len())
                .map(|k| {
                    let mut c = current.clone();
                    c.remove(k);
                    c
                })
                .collect();
            let (next, mse) = self.best(candidates)?;
            steps.push(BackwardStep {
                ref_indices: next.clone(),
                mse,
            });
            current = next;
        }
        Ok(steps)
    }
}

fn validate(networks: &[Network], config: &BsaConfig) -> Result<Vec<Spectrum>> {
    let spectra = dataset_spectra(networks)?;
    if config.num_refs == 0 || config.num_refs > spectra.len() {
        return Err(Error::InvalidArgument(format!(
            "number of references must be in 1..={}, got {}",
            spectra.len(),
            config.num_refs
        )));
    }
    if let Some(labels) = &config.cluster_labels {
        if labels.len() != spectra.len() {
            return Err(Error::SizeMismatch {
                expected: spectra.len(),
                found: labels.len(),
            });
        }
    }
    Ok(spectra)
}

pub(crate) fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Sample-limited BSA with `config.num_refs` references.
///
/// With [`Search::Exhaustive`] every admissible index subset is scored and
/// the best one (lexicographically first among ties) is returned. With
/// [`Search::GreedyBackward`] the references are those left at size
/// `num_refs` along the backward path started from `N − 1` references.
pub fn fit(networks: &[Network], config: &BsaConfig) -> Result<BsaResult> {
    let spectra = validate(networks, config)?;
    let search = Searcher {
        spectra: &spectra,
        config,
    };
    let subset = match config.search {
        Search::Exhaustive => search.exhaustive()?,
        Search::GreedyBackward => {
            let first = spectra.len().saturating_sub(1).max(config.num_refs);
            let start = start_set(&search, first)?;
            let steps = search.backward_from(start)?;
            steps
                .into_iter()
                .find(|s| s.ref_indices.len() == config.num_refs)
                .map(|s| s.ref_indices)
                .ok_or(Error::NoAdmissibleSubset)?
        }
    };
    search.result(subset)
}

fn start_set(search: &Searcher<'_>, m: usize) -> Result<Vec<usize>> {
    let n = search.spectra.len();
    if m >= n {
        return Ok((0..n).collect());
    }
    let config = BsaConfig {
        num_refs: m,
        ..search.config.clone()
    };
    Searcher {
        spectra: search.spectra,
        config: &config,
    }
    .exhaustive()
}

/// Sample-limited backward BSA.
///
/// Starts from the exhaustively best set of `config.num_refs` references
/// (see [`BsaConfig::backward`] for the usual `N − 1`) and repeatedly removes
/// the reference whose removal increases the mean squared error the least,
/// recording every nested set down to a single reference.
pub fn fit_backward(networks: &[Network], config: &BsaConfig) -> Result<BackwardPath> {
    let spectra = validate(networks, config)?;
    let search = Searcher {
        spectra: &spectra,
        config,
    };
    let start = start_set(&search, config.num_refs)?;
    Ok(BackwardPath {
        convex: config.convex,
        steps: search.backward_from(start)?,
    })
}

impl BsaConfig {
    /// Backward configuration starting from `N − 1` references.
    pub fn backward(dataset_size: usize) -> Self {
        Self::new(dataset_size.saturating_sub(1).max(1)).search(Search::GreedyBackward)
    }
}

/// Full [`BsaResult`] for a given reference subset.
pub fn evaluate(networks: &[Network], ref_indices: &[usize], convex: bool) -> Result<BsaResult> {
    let config = BsaConfig::new(ref_indices.len()).convex(convex);
    let spectra = validate(networks, &config)?;
    for &i in ref_indices {
        if i >= spectra.len() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: spectra.len(),
            });
        }
    }
    let mut subset = ref_indices.to_vec();
    subset.sort_unstable();
    Searcher {
        spectra: &spectra,
        config: &config,
    }
    .result(subset)
}

/// Network with the projected spectrum that is closest (in Frobenius norm)
/// to `datum`: `R diag(point) Rᵀ` with `R` the eigenbasis of `datum`.
pub fn reconstruct(datum: &Network, proj: &Projection) -> Result<Network> {
    reconstruct_spectrum(datum, &proj.point)
}

pub fn reconstruct_spectrum(datum: &Network, point: &Spectrum) -> Result<Network> {
    if point.len() != datum.n() {
        return Err(Error::SizeMismatch {
            expected: datum.n(),
            found: point.len(),
        });
    }
    let eig = eigendecompose(datum)?;
    Network::new(
        format!("{}-reconstructed", datum.id()),
        eig.conjugate(point.values()),
    )
}

/// Fraction of the total spectral variance (around the spectral mean)
/// captured by the projections, clamped to `[0, 1]`.
pub fn variance_explained(networks: &[Network], result: &BsaResult) -> Result<f64> {
    let spectra = dataset_spectra(networks)?;
    if result.per_datum_sq_error.len() != spectra.len() {
        return Err(Error::SizeMismatch {
            expected: spectra.len(),
            found: result.per_datum_sq_error.len(),
        });
    }
    let n = spectra[0].len();
    let count = spectra.len() as f64;
    let mean: Vec<f64> = (0..n)
        .map(|r| spectra.iter().map(|s| s.values()[r]).sum::<f64>() / count)
        .collect();
    let total: f64 = spectra
        .iter()
        .map(|s| {
            s.values()
                .iter()
                .zip(&mean)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
        })
        .sum();
    if total <= f64::MIN_POSITIVE {
        return Err(Error::DegenerateDataset("zero total variance".into()));
    }
    let residual: f64 = result.per_datum_sq_error.iter().sum();
    Ok((1.0 - residual / total).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    fn diag(id: &str, v: &[f64]) -> Network {
        Network::new(id, DMatrix::from_diagonal(&DVector::from_column_slice(v))).unwrap()
    }

    fn small() -> Vec<Network> {
        vec![
            diag("a", &[0.0, 1.0, 3.0]),
            diag("b", &[-1.0, 2.0, 2.5]),
            diag("c", &[0.5, 0.5, 1.0]),
            diag("d", &[-2.0, 0.0, 4.0]),
        ]
    }

    #[test]
    fn all_points_as_references() {
        let data = small();
        let r = fit(&data, &BsaConfig::new(4)).unwrap();
        assert_eq!(r.ref_indices, vec![0, 1, 2, 3]);
        assert_eq!(r.mse, 0.0);
    }

    #[test]
    fn convex_never_beats_plain() {
        let data = small();
        for m in 1..=3 {
            let plain = fit(&data, &BsaConfig::new(m)).unwrap();
            let convex = fit(&data, &BsaConfig::new(m).convex(true)).unwrap();
            assert!(convex.mse >= plain.mse - 1e-12, "m = {m}");
            for row in &convex.weights {
                assert!(row.iter().all(|&w| w >= -1e-12));
            }
        }
    }

    #[test]
    fn mse_is_mean_of_errors() {
        let r = fit(&small(), &BsaConfig::new(2)).unwrap();
        let mean = r.per_datum_sq_error.iter().sum::<f64>() / 4.0;
        assert!((r.mse - mean).abs() <= 1e-12);
        for row in &r.weights {
            assert!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let mut cfg = BsaConfig::new(2);
        cfg.subset_budget = 3;
        assert!(matches!(
            fit(&small(), &cfg),
            Err(Error::BudgetExceeded {
                subsets: 6,
                budget: 3
            })
        ));
    }

    #[test]
    fn separation_and_cluster_filters() {
        let data = small();
        let labels = vec!["x".into(), "x".into(), "y".into(), "y".into()];
        let r = fit(&data, &BsaConfig::new(2).cluster_labels(labels.clone())).unwrap();
        assert_ne!(labels[r.ref_indices[0]], labels[r.ref_indices[1]]);

        let r = fit(&data, &BsaConfig::new(2).min_ref_separation(1e6));
        assert!(matches!(r, Err(Error::NoAdmissibleSubset)));
    }

    #[test]
    fn two_network_backward_path() {
        let data = vec![diag("a", &[0.0, 1.0]), diag("b", &[1.0, 3.0])];
        let path = fit_backward(&data, &BsaConfig::new(2)).unwrap();
        assert_eq!(path.steps.len(), 2);
        assert_eq!(path.steps[0].mse, 0.0);
        // Either point as sole reference leaves the other at squared distance 5.
        assert!((path.steps[1].mse - 2.5).abs() < 1e-12);
        assert_eq!(path.steps[1].ref_indices, vec![0]);
    }

    #[test]
    fn parallel_matches_sequential() {
        let data = small();
        let a = fit(&data, &BsaConfig::new(2)).unwrap();
        let b = fit(&data, &BsaConfig::new(2).parallel(true)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn reconstruction_of_own_spectrum() {
        let net = Network::from_rows(
            "x",
            &[
                vec![0.0, 1.0, 0.3],
                vec![1.0, 0.0, 2.0],
                vec![0.3, 2.0, 0.0],
            ],
        )
        .unwrap();
        let s = spectrum(&net).unwrap();
        let back = reconstruct_spectrum(&net, &s).unwrap();
        assert!((back.adjacency() - net.adjacency()).norm() < 1e-9);
    }

    #[test]
    fn variance_explained_examples() {
        let data = vec![diag("a", &[0.0, 1.0]), diag("b", &[1.0, 3.0])];
        let full = fit(&data, &BsaConfig::new(2)).unwrap();
        assert_eq!(variance_explained(&data, &full).unwrap(), 1.0);
        // One reference: residual 5 against total variance 2 × (5 / 4) = 2.5,
        // so 1 − 5 / 2.5 = −1, clamped to 0.
        let single = evaluate(&data, &[0], false).unwrap();
        assert_eq!(single.per_datum_sq_error, vec![0.0, 5.0]);
        assert_eq!(variance_explained(&data, &single).unwrap(), 0.0);

        let same = vec![diag("a", &[0.0, 1.0]), diag("b", &[0.0, 1.0])];
        let r = fit(&same, &BsaConfig::new(1)).unwrap();
        assert!(matches!(
            variance_explained(&same, &r),
            Err(Error::DegenerateDataset(_))
        ));
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(15, 3), 455);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(3, 5), 0);
    }
}
