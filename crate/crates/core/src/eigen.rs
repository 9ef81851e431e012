//! Generalized PCA of a statistical triplet.
//!
//! The spectral decomposition of the operator `X^T Dn X Dp` is computed
//! through its symmetric equivalent `Dp^{1/2} X^T Dn X Dp^{1/2}`, whose
//! spectrum is real and nonnegative. Eigenvectors are mapped back with
//! `Dp^{-1/2}`, which makes the axes `Dp`-orthonormal. A fixed sign
//! convention keeps runs reproducible: each axis is flipped so that its
//! entry of largest magnitude (first one on ties) is positive.

use ndarray::{Array1, Array2, Axis};

use crate::error::AnalysisError;
use crate::tabular::{ColumnMetric, RowWeights, Triplet};

/// Eigenvalues below `RANK_TOL * lambda_max` are treated as null.
pub const RANK_TOL: f64 = 1e-9;

/// Result of the generalized PCA of a triplet `(X, Dp, Dn)`.
///
/// `eigenvalues` holds the full descending spectrum of `X^T Dn X Dp`
/// (tiny negative rounding residues clamped to zero); `rank` counts the
/// eigenvalues above the rank tolerance. Axes, row scores and components
/// are kept for `min(n_axes, rank)` leading axes.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    eigenvalues: Vec<f64>,
    rank: usize,
    axes: Array2<f64>,
    row_scores: Array2<f64>,
    components: Array2<f64>,
    col_metric: ColumnMetric,
    row_weights: RowWeights,
    col_labels: Vec<String>,
    row_labels: Vec<String>,
    n: usize,
    p: usize,
}

impl Decomposition {
    /// Full spectrum, descending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Number of eigenvalues above the rank tolerance.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Number of axes actually kept (`min(n_axes, rank)`).
    pub fn n_axes(&self) -> usize {
        self.axes.ncols()
    }

    /// Principal axes `U` (p x r), `Dp`-orthonormal columns.
    pub fn axes(&self) -> &Array2<f64> {
        &self.axes
    }

    /// Row scores `X Dp U` (n x r); the Dn-weighted variance of column `i`
    /// equals the `i`th eigenvalue.
    pub fn row_scores(&self) -> &Array2<f64> {
        &self.row_scores
    }

    /// Normalized row scores `X Dp U Lambda^{-1/2}` (n x r), unit weighted
    /// variance per axis.
    pub fn components(&self) -> &Array2<f64> {
        &self.components
    }

    pub fn col_metric(&self) -> &ColumnMetric {
        &self.col_metric
    }

    pub fn row_weights(&self) -> &RowWeights {
        &self.row_weights
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.n, self.p)
    }

    /// Sum of the full spectrum; equals the total inertia of the source
    /// triplet up to rounding.
    pub fn trace(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }
}

/// Generalized PCA of the triplet, keeping at most `n_axes` axes.
pub fn gpca(t: &Triplet, n_axes: usize) -> Result<Decomposition, AnalysisError> {
    let (n, p) = (t.nrows(), t.ncols());
    if n == 0 || p == 0 || n_axes == 0 {
        return Err(AnalysisError::DimensionMismatch(format!(
            "gpca needs n >= 1, p >= 1 and n_axes >= 1 (got n={n}, p={p}, n_axes={n_axes})"
        )));
    }

    // M = X^T Dn X, then A = Dp^{1/2} M Dp^{1/2}, symmetrized against rounding.
    let w = t.row_weights().diag();
    let d = t.col_metric().diag();
    let x = t.values();
    let mut xw = x.to_owned();
    for (i, mut row) in xw.axis_iter_mut(Axis(0)).enumerate() {
        row *= w[i];
    }
    let m = x.t().dot(&xw);
    let sqrt_d = d.mapv(f64::sqrt);
    let mut a = Array2::zeros((p, p));
    for i in 0..p {
        for j in 0..=i {
            let v = 0.5 * (m[[i, j]] + m[[j, i]]) * sqrt_d[i] * sqrt_d[j];
            a[[i, j]] = v;
            a[[j, i]] = v;
        }
    }

    let (mut eigenvalues, vectors) = sym_eigen(&a);
    for ev in eigenvalues.iter_mut() {
        if *ev < 0.0 {
            *ev = 0.0;
        }
    }

    let lambda_max = eigenvalues.first().copied().unwrap_or(0.0);
    let tol = RANK_TOL * lambda_max;
    let rank = eigenvalues.iter().take_while(|&&ev| ev > tol).count();
    let kept = n_axes.min(rank);

    // U = Dp^{-1/2} V for the kept axes, then the sign convention.
    let mut axes = Array2::zeros((p, kept));
    for ax in 0..kept {
        for j in 0..p {
            axes[[j, ax]] = vectors[[j, ax]] / sqrt_d[j];
        }
    }
    apply_sign_convention(&mut axes);

    // Row scores X Dp U and unit-variance components.
    let mut xd = x.to_owned();
    for (j, mut col) in xd.axis_iter_mut(Axis(1)).enumerate() {
        col *= d[j];
    }
    let row_scores = xd.dot(&axes);
    let mut components = row_scores.clone();
    for (ax, mut col) in components.axis_iter_mut(Axis(1)).enumerate() {
        col /= eigenvalues[ax].sqrt();
    }

    Ok(Decomposition {
        eigenvalues,
        rank,
        axes,
        row_scores,
        components,
        col_metric: t.col_metric().clone(),
        row_weights: t.row_weights().clone(),
        col_labels: t.table().col_labels().to_vec(),
        row_labels: t.table().row_labels().to_vec(),
        n,
        p,
    })
}

/// Project supplementary rows onto the axes: `X_sup Dp U`.
///
/// The supplementary triplet must live in the same column space as the
/// decomposed table (same labels, same metric).
pub fn project_rows(d: &Decomposition, sup: &Triplet) -> Result<Array2<f64>, AnalysisError> {
    if sup.table().col_labels() != d.col_labels.as_slice() {
        return Err(AnalysisError::ColumnMismatch(
            "supplementary rows must share the decomposed table's column labels".into(),
        ));
    }
    if sup.col_metric() != &d.col_metric {
        return Err(AnalysisError::ColumnMismatch(
            "supplementary rows must share the decomposed table's column metric".into(),
        ));
    }
    let metric = d.col_metric.diag();
    let mut xd = sup.values().to_owned();
    for (j, mut col) in xd.axis_iter_mut(Axis(1)).enumerate() {
        col *= metric[j];
    }
    Ok(xd.dot(&d.axes))
}

/// Project supplementary columns onto the components:
/// `X_sup^T Dn X Dp U Lambda^{-1/2}`, i.e. the Dn-weighted inner products
/// of the new columns with the unit-variance components.
pub fn project_cols(
    d: &Decomposition,
    sup_cols: &Array2<f64>,
) -> Result<Array2<f64>, AnalysisError> {
    if sup_cols.nrows() != d.n {
        return Err(AnalysisError::RowMismatch(format!(
            "supplementary columns have {} rows, expected {}",
            sup_cols.nrows(),
            d.n
        )));
    }
    let lambda_max = d.eigenvalues.first().copied().unwrap_or(0.0);
    for ax in 0..d.n_axes() {
        if d.eigenvalues[ax] <= RANK_TOL * lambda_max {
            return Err(AnalysisError::NullEigenvalue { axis: ax });
        }
    }
    let w = d.row_weights.diag();
    let mut weighted = d.components.clone();
    for (i, mut row) in weighted.axis_iter_mut(Axis(0)).enumerate() {
        row *= w[i];
    }
    Ok(sup_cols.t().dot(&weighted))
}

/// Flip each column so its entry of largest magnitude is positive; on exact
/// ties the earliest entry decides.
fn apply_sign_convention(axes: &mut Array2<f64>) {
    for mut col in axes.axis_iter_mut(Axis(1)) {
        let mut best = 0usize;
        let mut best_abs = f64::NEG_INFINITY;
        for (j, v) in col.iter().enumerate() {
            let a = v.abs();
            if a > best_abs {
                best_abs = a;
                best = j;
            }
        }
        if col[best] < 0.0 {
            col.mapv_inplace(|v| -v);
        }
    }
}

/// Eigen-decomposition of a symmetric matrix by the cyclic Jacobi method.
///
/// Returns eigenvalues in descending order and the matching eigenvectors as
/// columns. Deterministic: a fixed sweep order and no randomization. For the
/// small operators handled here (p up to a few dozen) Jacobi converges in a
/// handful of sweeps and delivers high relative accuracy.
pub(crate) fn sym_eigen(a: &Array2<f64>) -> (Vec<f64>, Array2<f64>) {
    let p = a.nrows();
    assert_eq!(p, a.ncols(), "matrix must be square");
    let mut m = a.clone();
    let mut v: Array2<f64> = Array2::eye(p);

    if p > 1 {
        let scale = m.iter().fold(0.0f64, |acc, x| acc.max(x.abs())).max(1.0);
        let stop = 1e-15 * scale;
        for _sweep in 0..100 {
            let mut off = 0.0f64;
            for i in 0..p {
                for j in (i + 1)..p {
                    off = off.max(m[[i, j]].abs());
                }
            }
            if off <= stop {
                break;
            }
            for i in 0..p - 1 {
                for j in (i + 1)..p {
                    let apq = m[[i, j]];
                    if apq.abs() <= stop * 1e-2 {
                        continue;
                    }
                    let theta = (m[[j, j]] - m[[i, i]]) / (2.0 * apq);
                    let t = if theta.abs() > 1e150 {
                        1.0 / (2.0 * theta)
                    } else {
                        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                    };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;

                    for k in 0..p {
                        let mik = m[[i, k]];
                        let mjk = m[[j, k]];
                        m[[i, k]] = c * mik - s * mjk;
                        m[[j, k]] = s * mik + c * mjk;
                    }
                    for k in 0..p {
                        let mki = m[[k, i]];
                        let mkj = m[[k, j]];
                        m[[k, i]] = c * mki - s * mkj;
                        m[[k, j]] = s * mki + c * mkj;
                    }
                    for k in 0..p {
                        let vki = v[[k, i]];
                        let vkj = v[[k, j]];
                        v[[k, i]] = c * vki - s * vkj;
                        v[[k, j]] = s * vki + c * vkj;
                    }
                }
            }
        }
    }

    // Sort descending by eigenvalue; stable order for ties.
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&i, &j| {
        m[[j, j]]
            .partial_cmp(&m[[i, i]])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&i| m[[i, i]]).collect();
    let mut vectors = Array2::zeros((p, p));
    for (new, &old) in order.iter().enumerate() {
        for k in 0..p {
            vectors[[k, new]] = v[[k, old]];
        }
    }
    (eigenvalues, vectors)
}

/// Dn-weighted variance of each column of a score matrix (no centering:
/// scores of centered tables already have zero weighted mean).
pub(crate) fn weighted_second_moment(scores: &Array2<f64>, w: &RowWeights) -> Array1<f64> {
    let wv = w.diag();
    let mut out = Array1::zeros(scores.ncols());
    for (i, row) in scores.axis_iter(Axis(0)).enumerate() {
        for (ax, x) in row.iter().enumerate() {
            out[ax] += wv[i] * x * x;
        }
    }
    out
}
