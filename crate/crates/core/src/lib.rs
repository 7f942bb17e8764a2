//! Barycentric subspace analysis of unlabeled weighted networks.
//!
//! Networks are compared through their sorted adjacency spectra, which makes
//! the space of unlabeled networks (up to orthogonal conjugation) isometric to
//! the convex cone of ascending vectors. Barycentric subspaces spanned by a
//! few reference networks are then polytopes of that cone, and projecting
//! onto them reduces to small convex quadratic programs.

pub mod barycentric;
pub mod baselines;
pub mod bsa;
pub mod datasets;
pub mod error;
mod linalg;
mod qp;
pub mod spectral;

pub use barycentric::{
    compute_halfspaces, embed_polygon_2d, BarycentricCoordinates, BarycentricSubspace, HalfPlane,
    HalfSpace, Polygon2D, Projection,
};
pub use baselines::{
    best_permutation_alignment, component_deformation, frechet_mean, tangent_pca,
    FrechetMeanResult, PermutationAlignment, TangentPcaResult,
};
pub use bsa::{fit, fit_backward, BackwardPath, BsaConfig, BsaResult, Search};
pub use datasets::{Dataset, RegionMapping};
pub use error::{Error, Result};
pub use spectral::{
    align, eigendecompose, geodesic_point, log_map, spectral_distance, spectrum, spectrum_distance,
    tangent_inner, EigenDecomposition, Network, Spectrum, TangentVector,
};
