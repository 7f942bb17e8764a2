//! Barycentric subspaces of the spectral graph space.
//!
//! The barycentric subspace of reference spectra `λ(A_0), …, λ(A_{m-1})` is
//! the set of affine combinations `Σ w_j λ(A_j)` (with `Σ w_j = 1`) that are
//! still sorted. It is the cross-section of the cone of sorted vectors by the
//! affine hull of the references: a convex polytope cut out by at most `n − 1`
//! half-spaces `α_rᵀ μ ≥ β_r`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Svd;
use crate::qp;
use crate::spectral::{spectrum_distance, Spectrum};

/// Default tolerance of [`BarycentricSubspace::contains`].
pub const CONTAINS_TOL: f64 = 1e-9;

const RANK_RCOND: f64 = 1e-10;
const CONSISTENCY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfSpace {
    pub alpha: Vec<f64>,
    pub beta: f64,
}

impl HalfSpace {
    pub fn slack(&self, point: &[f64]) -> f64 {
        self.alpha
            .iter()
            .zip(point)
            .map(|(a, x)| a * x)
            .sum::<f64>()
            - self.beta
    }
}

/// Reference spectra together with the half-spaces describing their
/// barycentric subspace.
#[derive(Debug, Clone)]
pub struct BarycentricSubspace {
    refs: Vec<Spectrum>,
    halfspaces: Vec<HalfSpace>,
    /// `(n+1) × m`, column `j` is `[λ(A_j); 1]`.
    lifted: DMatrix<f64>,
    lifted_pinv: DMatrix<f64>,
    center: DVector<f64>,
    /// Orthonormal basis of the direction space of the affine hull.
    directions: DMatrix<f64>,
    scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BarycentricCoordinates(pub Vec<f64>);

impl BarycentricCoordinates {
    pub fn weights(&self) -> &[f64] {
        &self.0
    }
}

/// Result of projecting a spectrum onto a barycentric subspace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    pub coords: BarycentricCoordinates,
    pub point: Spectrum,
    pub squared_error: f64,
    /// Lagrange multipliers: one per sorted-order constraint for the plain
    /// projection, one per weight (`w_j ≥ 0`) for the convex one.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub multipliers: Vec<f64>,
}

/// Builds the barycentric subspace of `refs`.
///
/// Each `(α_r, β_r)` is the minimum-norm solution of
/// `[λ(A_j)ᵀ 1] [α_r; −β_r] = λ_{r+1}(A_j) − λ_r(A_j)` over all references.
pub fn compute_halfspaces(refs: &[Spectrum]) -> Result<BarycentricSubspace> {
    let first = refs
        .first()
        .ok_or_else(|| Error::InvalidArgument("at least one reference is required".into()))?;
    let n = first.len();
    for r in refs {
        if r.len() != n {
            return Err(Error::SizeMismatch {
                expected: n,
                found: r.len(),
            });
        }
    }
    let m = refs.len();
    let lifted = DMatrix::from_fn(
        n + 1,
        m,
        |i, j| if i < n { refs[j].values()[i] } else { 1.0 },
    );
    let system = lifted.transpose();
    let system_pinv = qp::pseudo_inverse(&system, RANK_RCOND)?;

    let mut halfspaces = Vec::with_capacity(n.saturating_sub(1));
    for facet in 0..n.saturating_sub(1) {
        let gaps = DVector::from_fn(m, |j, _| {
            let v = refs[j].values();
            v[facet + 1] - v[facet]
        });
        let sol = &system_pinv * &gaps;
        let residual = (&system * &sol - &gaps).norm();
        if residual > CONSISTENCY_TOL * gaps.norm().max(1.0) {
            return Err(Error::InconsistentSystem { facet, residual });
        }
        halfspaces.push(HalfSpace {
            alpha: sol.rows(0, n).iter().cloned().collect(),
            beta: -sol[n],
        });
    }

    let center = DVector::from_fn(n, |i, _| {
        refs.iter().map(|r| r.values()[i]).sum::<f64>() / m as f64
    });
    let centered = DMatrix::from_fn(n, m, |i, j| refs[j].values()[i] - center[i]);
    let directions = qp::column_basis(&centered, RANK_RCOND);
    let lifted_pinv = qp::pseudo_inverse(&lifted, RANK_RCOND)?;
    let scale = refs
        .iter()
        .flat_map(|r| r.values().iter())
        .fold(1.0f64, |acc, v| acc.max(v.abs()));

    Ok(BarycentricSubspace {
        refs: refs.to_vec(),
        halfspaces,
        lifted,
        lifted_pinv,
        center,
        directions,
        scale,
    })
}

impl BarycentricSubspace {
    pub fn refs(&self) -> &[Spectrum] {
        &self.refs
    }

    pub fn halfspaces(&self) -> &[HalfSpace] {
        &self.halfspaces
    }

    pub fn n(&self) -> usize {
        self.center.len()
    }

    /// Dimension of the affine hull of the references.
    pub fn dimension(&self) -> usize {
        self.directions.ncols()
    }

    fn check_len(&self, s: &[f64]) -> Result<()> {
        if s.len() != self.n() {
            return Err(Error::SizeMismatch {
                expected: self.n(),
                found: s.len(),
            });
        }
        Ok(())
    }

    /// Minimum-norm barycentric weights of a point of the affine hull.
    pub fn weights_of(&self, point: &[f64]) -> Vec<f64> {
        let lifted_point =
            DVector::from_fn(
                self.n() + 1,
                |i, _| {
                    if i < self.n() {
                        point[i]
                    } else {
                        1.0
                    }
                },
            );
        (&self.lifted_pinv * lifted_point).iter().cloned().collect()
    }

    /// `Σ_j w_j λ(A_j)`.
    pub fn combine(&self, weights: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n()];
        for (w, r) in weights.iter().zip(&self.refs) {
            for (o, v) in out.iter_mut().zip(r.values()) {
                *o += w * v;
            }
        }
        out
    }

    /// Distance from `s` to the affine hull of the references.
    pub fn affine_residual(&self, s: &[f64]) -> f64 {
        let offset = DVector::from_column_slice(s) - &self.center;
        let inside = &self.directions * (self.directions.transpose() * &offset);
        (offset - inside).norm()
    }

    /// Membership test: `s` lies in the affine hull (residual ≤ `tol`) and
    /// satisfies every half-space within `tol`. Both tolerances are scaled by
    /// the largest absolute reference eigenvalue (floored at one).
    pub fn contains(&self, s: &[f64], tol: f64) -> Result<bool> {
        self.check_len(s)?;
        let tol = tol * self.scale;
        if self.affine_residual(s) > tol {
            return Ok(false);
        }
        Ok(self.halfspaces.iter().all(|h| h.slack(s) >= -tol))
    }

    /// Nearest point of the barycentric subspace to `s`.
    ///
    /// Solved in coordinates of the affine hull, where the problem is the
    /// Euclidean projection onto `{z : D(c + U z) ≥ 0}` with `D` the
    /// consecutive-difference operator. Weights are the minimum-norm
    /// barycentric coordinates of the projected point.
    pub fn project(&self, s: &Spectrum) -> Result<Projection> {
        self.check_len(s.values())?;
        let n = self.n();
        let d = self.dimension();
        let sv = s.to_dvector();
        let target = self.directions.transpose() * (&sv - &self.center);

        let rows = n.saturating_sub(1);
        let diff_u = DMatrix::from_fn(rows, d, |r, k| {
            self.directions[(r + 1, k)] - self.directions[(r, k)]
        });
        let rhs = DVector::from_fn(rows, |r, _| -(self.center[r + 1] - self.center[r]));
        let sol = qp::project_polyhedron(
            &target,
            &DMatrix::zeros(0, d),
            &DVector::zeros(0),
            &diff_u,
            &rhs,
            1e-13 * self.scale,
        )?;
        let point = &self.center + &self.directions * &sol.x;
        let point: Vec<f64> = point.iter().cloned().collect();
        let weights = self.weights_of(&point);
        self.finish(
            s,
            point,
            weights,
            sol.ineq_multipliers.iter().cloned().collect(),
        )
    }

    /// Nearest point of the convex hull of the references to `s`
    /// (barycentric weights constrained to be nonnegative).
    ///
    /// Among optimal weight vectors the one of minimum norm is returned.
    pub fn project_convex(&self, s: &Spectrum) -> Result<Projection> {
        self.check_len(s.values())?;
        let n = self.n();
        let m = self.refs.len();
        let shifted = DMatrix::from_fn(n, m, |i, j| self.refs[j].values()[i] - s.values()[i]);
        let wolfe = qp::min_norm_point(&shifted, 1e-15)?;
        let mut weights: Vec<f64> = wolfe.iter().cloned().collect();
        let point = self.combine(&weights);

        if self.dimension() + 1 < m {
            if let Some(w) = self.min_norm_convex_weights(&point) {
                weights = w;
            }
        }
        let point = self.combine(&weights);

        let g: Vec<f64> = self
            .refs
            .iter()
            .map(|r| {
                r.values()
                    .iter()
                    .zip(&point)
                    .zip(s.values())
                    .map(|((a, p), x)| a * (p - x))
                    .sum()
            })
            .collect();
        let nu: f64 = g.iter().zip(&weights).map(|(gi, wi)| gi * wi).sum();
        let multipliers = g.iter().map(|gi| gi - nu).collect();
        self.finish(s, point, weights, multipliers)
    }

    /// Minimum-norm `w ≥ 0` with `Σ w_j [λ(A_j); 1] = [point; 1]`, used to
    /// break ties between optimal convex weights of dependent references.
    fn min_norm_convex_weights(&self, point: &[f64]) -> Option<Vec<f64>> {
        let m = self.refs.len();
        let n = self.n();
        let svd = Svd::new(&self.lifted);
        let rank = svd.rank(RANK_RCOND);
        let lifted_point = DVector::from_fn(n + 1, |i, _| if i < n { point[i] } else { 1.0 });
        let eq = svd.v.columns(0, rank).transpose();
        let eq_rhs = DVector::from_fn(rank, |a, _| {
            svd.u.column(a).dot(&lifted_point) / svd.singular_values[a]
        });
        let sol = qp::project_polyhedron(
            &DVector::zeros(m),
            &eq,
            &eq_rhs,
            &DMatrix::identity(m, m),
            &DVector::zeros(m),
            1e-14,
        )
        .ok()?;
        let mut w: Vec<f64> = sol.x.iter().map(|v| v.max(0.0)).collect();
        let total: f64 = w.iter().sum();
        if total <= 0.0 {
            return None;
        }
        w.iter_mut().for_each(|v| *v /= total);
        let recombined = self.combine(&w);
        let drift = recombined
            .iter()
            .zip(point)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        (drift <= 1e-11 * self.scale).then_some(w)
    }

    fn finish(
        &self,
        s: &Spectrum,
        point: Vec<f64>,
        weights: Vec<f64>,
        multipliers: Vec<f64>,
    ) -> Result<Projection> {
        let squared_error = s
            .values()
            .iter()
            .zip(&point)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        let point = Spectrum::with_slack(point, 1e-9 * self.scale).map_err(|_| {
            Error::SolverFailure("projected point left the cone of sorted spectra".into())
        })?;
        Ok(Projection {
            coords: BarycentricCoordinates(weights),
            point,
            squared_error,
            multipliers,
        })
    }

    /// KKT residual of a plain projection of `s`: the largest violation of
    /// stationarity (within the affine hull), primal and dual feasibility, and
    /// complementary slackness.
    pub fn kkt_residual(&self, s: &Spectrum, proj: &Projection) -> Result<f64> {
        self.check_len(s.values())?;
        let n = self.n();
        let p = proj.point.values();
        let mu = &proj.multipliers;
        if mu.len() != n.saturating_sub(1) {
            return Err(Error::SizeMismatch {
                expected: n.saturating_sub(1),
                found: mu.len(),
            });
        }
        // p - s - Dᵀ μ
        let mut grad = DVector::from_fn(n, |i, _| p[i] - s.values()[i]);
        for (r, m) in mu.iter().enumerate() {
            grad[r + 1] -= m;
            grad[r] += m;
        }
        let stationarity = (self.directions.transpose() * grad).amax();
        let mut worst = stationarity.max(self.affine_residual(p));
        for (r, m) in mu.iter().enumerate() {
            let gap = p[r + 1] - p[r];
            worst = worst.max(-gap).max(-m).max((m * gap).abs());
        }
        let sum: f64 = proj.coords.weights().iter().sum();
        Ok(worst.max((sum - 1.0).abs()))
    }

    /// KKT residual of a convex projection of `s`, computed from the weights
    /// alone: with `g = Rᵀ(p − s)` and `ν = gᵀw`, optimality requires
    /// `g_j ≥ ν` for all `j` and `g_j = ν` on the support of `w`.
    pub fn kkt_residual_convex(&self, s: &Spectrum, proj: &Projection) -> Result<f64> {
        self.check_len(s.values())?;
        let w = proj.coords.weights();
        let p = self.combine(w);
        let g: Vec<f64> = self
            .refs
            .iter()
            .map(|r| {
                r.values()
                    .iter()
                    .zip(&p)
                    .zip(s.values())
                    .map(|((a, q), x)| a * (q - x))
                    .sum()
            })
            .collect();
        let nu: f64 = g.iter().zip(w).map(|(gi, wi)| gi * wi).sum();
        let mut worst = (w.iter().sum::<f64>() - 1.0).abs();
        for (gi, wi) in g.iter().zip(w) {
            worst = worst.max(nu - gi).max(wi * (gi - nu).abs()).max(-wi);
        }
        Ok(worst)
    }
}

/// Half-plane `alpha · x ≥ beta` in the plane of a two-dimensional embedding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfPlane {
    pub alpha: [f64; 2],
    pub beta: f64,
}

/// Isometric planar picture of the barycentric subspace of three references.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polygon2D {
    pub ref_points_2d: [[f64; 2]; 3],
    pub halfplanes: Vec<HalfPlane>,
    /// Polygon vertices in counterclockwise order.
    pub vertices_2d: Vec<[f64; 2]>,
    /// Extreme rays of the polygon when it is unbounded.
    pub rays: Vec<[f64; 2]>,
    /// Number of half-planes that contribute an edge.
    pub sides: usize,
    pub closed: bool,
}

/// Draws the barycentric subspace of three references isometrically in the
/// plane.
///
/// The references are placed at `a_0 = (0, 0)`, `a_1 = (d_01, 0)` and `a_2`
/// above the first axis, so that planar distances equal spectral distances.
/// Each facet's planar coefficients solve `[a_i 1] [α; −β] = θ_r(i)`.
pub fn embed_polygon_2d(refs: &[Spectrum]) -> Result<Polygon2D> {
    if refs.len() != 3 {
        return Err(Error::InvalidArgument(format!(
            "polygon embedding needs exactly 3 references, got {}",
            refs.len()
        )));
    }
    let n = refs[0].len();
    for r in refs {
        if r.len() != n {
            return Err(Error::SizeMismatch {
                expected: n,
                found: r.len(),
            });
        }
    }
    let d01 = spectrum_distance(&refs[0], &refs[1])?;
    let d02 = spectrum_distance(&refs[0], &refs[2])?;
    let d12 = spectrum_distance(&refs[1], &refs[2])?;
    let longest = d01.max(d02).max(d12);
    if d01 == 0.0 || d02 == 0.0 || d12 == 0.0 {
        return Err(Error::DegenerateTriangle);
    }
    let x = (d01 * d01 + d02 * d02 - d12 * d12) / (2.0 * d01);
    let y2 = d02 * d02 - x * x;
    if y2 <= (1e-9 * longest).powi(2) {
        return Err(Error::DegenerateTriangle);
    }
    let pts = [[0.0, 0.0], [d01, 0.0], [x, y2.sqrt()]];
    let system = DMatrix::from_fn(3, 3, |i, j| if j < 2 { pts[i][j] } else { 1.0 });
    let lu = system.clone().lu();
    if lu.determinant().abs() <= 1e-12 * longest * longest {
        return Err(Error::SingularSystem);
    }
    let mut halfplanes = Vec::with_capacity(n.saturating_sub(1));
    for r in 0..n.saturating_sub(1) {
        let gaps = DVector::from_fn(3, |i, _| refs[i].values()[r + 1] - refs[i].values()[r]);
        let sol = lu.solve(&gaps).ok_or(Error::SingularSystem)?;
        halfplanes.push(HalfPlane {
            alpha: [sol[0], sol[1]],
            beta: -sol[2],
        });
    }

    let scale = longest.max(1.0);
    let tol = 1e-9 * scale;
    let active: Vec<&HalfPlane> = halfplanes
        .iter()
        .filter(|h| h.alpha[0].hypot(h.alpha[1]) > 1e-12)
        .collect();
    let satisfies = |p: [f64; 2]| {
        active
            .iter()
            .all(|h| h.alpha[0] * p[0] + h.alpha[1] * p[1] >= h.beta - tol)
    };

    let mut vertices: Vec<[f64; 2]> = Vec::new();
    for (i, h) in active.iter().enumerate() {
        for g in &active[i + 1..] {
            let det = h.alpha[0] * g.alpha[1] - h.alpha[1] * g.alpha[0];
            if det.abs() <= 1e-12 {
                continue;
            }
            let p = [
                (h.beta * g.alpha[1] - h.alpha[1] * g.beta) / det,
                (h.alpha[0] * g.beta - h.beta * g.alpha[0]) / det,
            ];
            if satisfies(p)
                && !vertices
                    .iter()
                    .any(|v| (v[0] - p[0]).hypot(v[1] - p[1]) <= tol)
            {
                vertices.push(p);
            }
        }
    }
    let centroid = [
        (pts[0][0] + pts[1][0] + pts[2][0]) / 3.0,
        (pts[0][1] + pts[1][1] + pts[2][1]) / 3.0,
    ];
    vertices.sort_by(|a, b| {
        let ta = (a[1] - centroid[1]).atan2(a[0] - centroid[0]);
        let tb = (b[1] - centroid[1]).atan2(b[0] - centroid[0]);
        ta.total_cmp(&tb)
    });

    let mut rays: Vec<[f64; 2]> = Vec::new();
    for h in &active {
        let norm = h.alpha[0].hypot(h.alpha[1]);
        for d in [
            [-h.alpha[1] / norm, h.alpha[0] / norm],
            [h.alpha[1] / norm, -h.alpha[0] / norm],
        ] {
            let recedes = active
                .iter()
                .all(|g| g.alpha[0] * d[0] + g.alpha[1] * d[1] >= -1e-12);
            if recedes
                && !rays
                    .iter()
                    .any(|r| (r[0] - d[0]).hypot(r[1] - d[1]) <= 1e-9)
            {
                rays.push(d);
            }
        }
    }
    let closed = !active.is_empty() && rays.is_empty();

    // A half-plane is a side when its boundary line meets the polygon in a
    // segment or ray of positive length. Coincident lines count once.
    let mut sides = 0;
    for (k, h) in active.iter().enumerate() {
        let duplicate = active[..k].iter().any(|g| same_line(g, h));
        if duplicate {
            continue;
        }
        let norm2 = h.alpha[0] * h.alpha[0] + h.alpha[1] * h.alpha[1];
        let base = [h.alpha[0] * h.beta / norm2, h.alpha[1] * h.beta / norm2];
        let dir = [-h.alpha[1], h.alpha[0]];
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for (j, g) in active.iter().enumerate() {
            if j == k || same_line(g, h) {
                continue;
            }
            let c = g.alpha[0] * dir[0] + g.alpha[1] * dir[1];
            let rhs = g.beta - (g.alpha[0] * base[0] + g.alpha[1] * base[1]);
            if c.abs() <= 1e-12 {
                if rhs > tol {
                    lo = f64::INFINITY;
                }
                continue;
            }
            if c > 0.0 {
                lo = lo.max(rhs / c);
            } else {
                hi = hi.min(rhs / c);
            }
        }
        if hi - lo > tol / norm2.sqrt() {
            sides += 1;
        }
    }

    Ok(Polygon2D {
        ref_points_2d: pts,
        halfplanes,
        vertices_2d: vertices,
        rays,
        sides,
        closed,
    })
}

fn same_line(a: &HalfPlane, b: &HalfPlane) -> bool {
    let na = a.alpha[0].hypot(a.alpha[1]);
    let nb = b.alpha[0].hypot(b.alpha[1]);
    (a.alpha[0] / na - b.alpha[0] / nb).abs() < 1e-12
        && (a.alpha[1] / na - b.alpha[1] / nb).abs() < 1e-12
        && (a.beta / na - b.beta / nb).abs() < 1e-12
}

/// Places a point with barycentric weights `w` in the planar embedding.
pub fn planar_point(polygon: &Polygon2D, weights: &[f64]) -> [f64; 2] {
    let mut out = [0.0, 0.0];
    for (w, a) in weights.iter().zip(&polygon.ref_points_2d) {
        out[0] += w * a[0];
        out[1] += w * a[1];
    }
    out
}
