//! Small dense quadratic programs used by the projections.
//!
//! Two solvers live here:
//!
//! * [`project_polyhedron`]: the Goldfarb–Idnani dual active-set method
//!   specialised to an identity Hessian, i.e. Euclidean projection of a point
//!   onto `{x : E x = e, G x ≥ h}`.
//! * [`min_norm_point`]: Wolfe's algorithm for the point of smallest norm in
//!   the convex hull of a finite point set.
//!
//! Both are exact active-set methods, deterministic for a given input, and
//! bounded by an iteration budget.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::Svd;

pub const MAX_ITERATIONS: usize = 10_000;

/// Outcome of [`project_polyhedron`].
#[derive(Debug, Clone)]
pub struct PolyhedronProjection {
    pub x: DVector<f64>,
    /// One multiplier per inequality row, zero for inactive rows.
    pub ineq_multipliers: DVector<f64>,
}

#[derive(Debug, Clone, Copy)]
enum Row {
    Eq(usize, f64),
    Ineq(usize),
}

struct Problem<'a> {
    eq: &'a DMatrix<f64>,
    eq_rhs: &'a DVector<f64>,
    ineq: &'a DMatrix<f64>,
    ineq_rhs: &'a DVector<f64>,
}

impl Problem<'_> {
    fn normal(&self, row: Row) -> DVector<f64> {
        match row {
            Row::Eq(k, sign) => self.eq.row(k).transpose() * sign,
            Row::Ineq(k) => self.ineq.row(k).transpose(),
        }
    }

    fn slack(&self, row: Row, x: &DVector<f64>) -> f64 {
        match row {
            Row::Eq(k, sign) => sign * (self.eq.row(k).dot(&x.transpose()) - self.eq_rhs[k]),
            Row::Ineq(k) => self.ineq.row(k).dot(&x.transpose()) - self.ineq_rhs[k],
        }
    }
}

/// Primal step direction `z` (component of `normal` orthogonal to the active
/// normals) and dual direction `r = (NᵀN)⁻¹ Nᵀ normal`.
fn directions(active: &[DVector<f64>], normal: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
    if active.is_empty() {
        return (normal.clone(), DVector::zeros(0));
    }
    let n = DMatrix::from_columns(active);
    let qr = n.qr();
    let q = qr.q();
    let r = qr.r();
    let qt_n = q.transpose() * normal;
    let z = normal - &q * &qt_n;
    let dual = r
        .solve_upper_triangular(&qt_n)
        .unwrap_or_else(|| DVector::zeros(active.len()));
    (z, dual)
}

/// Projects `target` onto `{x : eq·x = eq_rhs, ineq·x ≥ ineq_rhs}`.
///
/// Equality rows must be linearly independent. Inequality rows violated by
/// less than `tol` are treated as satisfied.
pub fn project_polyhedron(
    target: &DVector<f64>,
    eq: &DMatrix<f64>,
    eq_rhs: &DVector<f64>,
    ineq: &DMatrix<f64>,
    ineq_rhs: &DVector<f64>,
    tol: f64,
) -> Result<PolyhedronProjection> {
    let problem = Problem {
        eq,
        eq_rhs,
        ineq,
        ineq_rhs,
    };
    let mut x = target.clone();
    let mut active: Vec<Row> = Vec::new();
    let mut normals: Vec<DVector<f64>> = Vec::new();
    let mut u: Vec<f64> = Vec::new();
    let mut iterations = 0;

    let mut pending_eq: Vec<usize> = (0..eq.nrows()).collect();
    pending_eq.reverse();

    loop {
        // Equalities first, then the most violated inequality.
        let chosen = if let Some(k) = pending_eq.pop() {
            let raw = problem.slack(Row::Eq(k, 1.0), &x);
            Row::Eq(k, if raw > 0.0 { -1.0 } else { 1.0 })
        } else {
            let mut worst: Option<(usize, f64)> = None;
            for k in 0..ineq.nrows() {
                if active.iter().any(|r| matches!(r, Row::Ineq(j) if *j == k)) {
                    continue;
                }
                let s = problem.slack(Row::Ineq(k), &x);
                if s < -tol && worst.is_none_or(|(_, w)| s < w) {
                    worst = Some((k, s));
                }
            }
            match worst {
                Some((k, _)) => Row::Ineq(k),
                None => break,
            }
        };

        let np = problem.normal(chosen);
        let mut u_plus = 0.0;
        loop {
            iterations += 1;
            if iterations > MAX_ITERATIONS {
                return Err(Error::SolverFailure(format!(
                    "active-set projection exceeded {MAX_ITERATIONS} iterations"
                )));
            }
            let s = problem.slack(chosen, &x);
            let (z, r) = directions(&normals, &np);
            let zz = z.norm_squared();

            let mut partial: Option<(usize, f64)> = None;
            for (j, row) in active.iter().enumerate() {
                if matches!(row, Row::Ineq(_)) && r[j] > 1e-14 {
                    let t = u[j] / r[j];
                    if partial.is_none_or(|(_, best)| t < best) {
                        partial = Some((j, t));
                    }
                }
            }
            let full = if zz > 1e-24 * np.norm_squared().max(1e-300) {
                Some(-s / zz)
            } else {
                None
            };

            match (full, partial) {
                (None, None) => {
                    if s.abs() <= tol {
                        // Dependent on the active set and already satisfied.
                        break;
                    }
                    return Err(Error::SolverFailure(
                        "constraints are infeasible".to_string(),
                    ));
                }
                (None, Some((k, t))) => {
                    for j in 0..active.len() {
                        u[j] -= t * r[j];
                    }
                    u_plus += t;
                    active.remove(k);
                    normals.remove(k);
                    u.remove(k);
                }
                (Some(t2), partial) => {
                    let (t, drop) = match partial {
                        Some((k, t1)) if t1 < t2 => (t1, Some(k)),
                        _ => (t2, None),
                    };
                    x += &z * t;
                    for j in 0..active.len() {
                        u[j] -= t * r[j];
                    }
                    u_plus += t;
                    match drop {
                        None => {
                            active.push(chosen);
                            normals.push(np.clone());
                            u.push(u_plus);
                            break;
                        }
                        Some(k) => {
                            active.remove(k);
                            normals.remove(k);
                            u.remove(k);
                        }
                    }
                }
            }
        }
    }

    let mut ineq_multipliers = DVector::zeros(ineq.nrows());
    for (row, mult) in active.iter().zip(&u) {
        if let Row::Ineq(k) = *row {
            ineq_multipliers[k] = mult.max(0.0);
        }
    }
    Ok(PolyhedronProjection {
        x,
        ineq_multipliers,
    })
}

/// Convex weights (one per column of `points`) of the minimum-norm point of
/// the convex hull of the columns.
///
/// `tol` is relative to the largest squared column norm.
pub fn min_norm_point(points: &DMatrix<f64>, tol: f64) -> Result<DVector<f64>> {
    let m = points.ncols();
    if m == 0 {
        return Err(Error::InvalidArgument("empty point set".to_string()));
    }
    let sq: Vec<f64> = (0..m).map(|j| points.column(j).norm_squared()).collect();
    let scale = sq.iter().cloned().fold(0.0f64, f64::max).max(1e-300);
    let eps = tol * scale;

    let start = (0..m)
        .min_by(|&a, &b| sq[a].total_cmp(&sq[b]))
        .expect("nonempty");
    let mut corral: Vec<usize> = vec![start];
    let mut lambda: Vec<f64> = vec![1.0];
    let mut x: DVector<f64> = points.column(start).into_owned();
    let mut iterations = 0;

    loop {
        iterations += 1;
        if iterations > MAX_ITERATIONS {
            return Err(Error::SolverFailure(format!(
                "min-norm point exceeded {MAX_ITERATIONS} iterations"
            )));
        }
        let xx = x.norm_squared();
        let (j, xp) = (0..m)
            .map(|j| (j, x.dot(&points.column(j))))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty");
        if xx - xp <= eps || corral.contains(&j) {
            break;
        }
        let saved = (corral.clone(), lambda.clone());
        corral.push(j);
        lambda.push(0.0);

        // Minor cycle: move toward the affine minimizer of the corral,
        // discarding points whose weight would turn negative.
        loop {
            iterations += 1;
            if iterations > MAX_ITERATIONS {
                return Err(Error::SolverFailure(format!(
                    "min-norm point exceeded {MAX_ITERATIONS} iterations"
                )));
            }
            let v = affine_min_norm(points, &corral)?;
            if v.iter().all(|&vi| vi > 1e-15) {
                lambda = v.iter().cloned().collect();
                x = combine(points, &corral, &lambda);
                break;
            }
            let mut theta = 1.0f64;
            for (li, vi) in lambda.iter().zip(v.iter()) {
                if *vi <= 1e-15 {
                    let denom = li - vi;
                    let step = if denom > 0.0 { li / denom } else { 0.0 };
                    theta = theta.min(step);
                }
            }
            for (li, vi) in lambda.iter_mut().zip(v.iter()) {
                *li = (1.0 - theta) * *li + theta * vi;
            }
            let mut k = 0;
            while k < corral.len() {
                if lambda[k] <= 1e-15 {
                    corral.remove(k);
                    lambda.remove(k);
                } else {
                    k += 1;
                }
            }
            let total: f64 = lambda.iter().sum();
            lambda.iter_mut().for_each(|l| *l /= total);
        }
        // In exact arithmetic every major step strictly decreases the norm;
        // stop once rounding prevents that instead of cycling.
        if x.norm_squared() >= xx {
            (corral, lambda) = saved;
            break;
        }
    }

    let mut weights = DVector::zeros(m);
    for (&j, &l) in corral.iter().zip(&lambda) {
        weights[j] = l;
    }
    Ok(weights)
}

fn combine(points: &DMatrix<f64>, corral: &[usize], lambda: &[f64]) -> DVector<f64> {
    let mut x = DVector::zeros(points.nrows());
    for (&j, &l) in corral.iter().zip(lambda) {
        x += points.column(j) * l;
    }
    x
}

/// Weights `v` with `Σ v = 1` minimizing `‖Σ v_i p_i‖` over the corral.
fn affine_min_norm(points: &DMatrix<f64>, corral: &[usize]) -> Result<DVector<f64>> {
    let k = corral.len();
    let mut kkt = DMatrix::zeros(k + 1, k + 1);
    for a in 0..k {
        for b in 0..k {
            kkt[(a, b)] = points.column(corral[a]).dot(&points.column(corral[b]));
        }
        kkt[(a, k)] = 1.0;
        kkt[(k, a)] = 1.0;
    }
    let mut rhs = DVector::zeros(k + 1);
    rhs[k] = 1.0;
    let sol = min_norm_solve(&kkt, &rhs, 1e-13)?;
    Ok(sol.rows(0, k).into_owned())
}

/// Minimum-norm least-squares solution of `a x = b` via the SVD, treating
/// singular values below `rcond · σ_max` as zero.
pub fn min_norm_solve(a: &DMatrix<f64>, b: &DVector<f64>, rcond: f64) -> Result<DVector<f64>> {
    let pinv = pseudo_inverse(a, rcond)?;
    Ok(pinv * b)
}

pub fn pseudo_inverse(a: &DMatrix<f64>, rcond: f64) -> Result<DMatrix<f64>> {
    let svd = Svd::new(a);
    let rank = svd.rank(rcond);
    let mut pinv = DMatrix::zeros(a.ncols(), a.nrows());
    for k in 0..rank {
        pinv += svd.v.column(k) * svd.u.column(k).transpose() / svd.singular_values[k];
    }
    if pinv.iter().all(|v| v.is_finite()) {
        Ok(pinv)
    } else {
        Err(Error::SolverFailure("non-finite pseudo-inverse".into()))
    }
}

/// Orthonormal basis of the column space of `a` (left singular vectors with
/// singular value above `rcond · σ_max`, in decreasing order).
pub fn column_basis(a: &DMatrix<f64>, rcond: f64) -> DMatrix<f64> {
    let svd = Svd::new(a);
    let rank = svd.rank(rcond);
    svd.u.columns(0, rank).into_owned()
}
