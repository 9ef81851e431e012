//! Two-table coupling over shared rows.
//!
//! Co-Inertia Analysis is the generalized PCA of the crossed triplet
//! `(Y^T Dn X, Dp, Dq)`. Its axes pair a direction in each table's column
//! space so that the Dn-covariance between the two sets of row scores is
//! maximized axis by axis; the eigenvalues are the squared covariances.

use ndarray::{Array2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::eigen::{self, Decomposition};
use crate::error::{AnalysisError, Warning};
use crate::tabular::{DataTable, RowWeights, Triplet};

/// Relative tolerance used to warn about non-centered inputs.
const CENTERING_WARN_TOL: f64 = 1e-8;

/// Per-axis diagnostics of a co-inertia analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisStats {
    /// Dn-weighted covariance between the paired row scores; its square is
    /// the eigenvalue.
    pub covariance: f64,
    /// Dn-weighted correlation between the paired row scores.
    pub correlation: f64,
    /// Dn-weighted variance of the x row scores.
    pub x_variance: f64,
    /// Dn-weighted variance of the y row scores.
    pub y_variance: f64,
}

/// Result of a co-inertia analysis of two triplets sharing rows.
#[derive(Debug, Clone, PartialEq)]
pub struct CoInertiaResult {
    crossed: Decomposition,
    x_axes: Array2<f64>,
    y_axes: Array2<f64>,
    x_scores: Array2<f64>,
    y_scores: Array2<f64>,
    axis_stats: Vec<AxisStats>,
    total_coinertia: f64,
    rv: f64,
    x_col_labels: Vec<String>,
    y_col_labels: Vec<String>,
    row_labels: Vec<String>,
    warnings: Vec<Warning>,
}

impl CoInertiaResult {
    /// Squared covariances, full descending spectrum.
    pub fn eigenvalues(&self) -> &[f64] {
        self.crossed.eigenvalues()
    }

    pub fn rank(&self) -> usize {
        self.crossed.rank()
    }

    pub fn n_axes(&self) -> usize {
        self.x_axes.ncols()
    }

    /// `Dp`-orthonormal coefficient vectors in the first table's column space.
    pub fn x_axes(&self) -> &Array2<f64> {
        &self.x_axes
    }

    /// `Dq`-orthonormal coefficient vectors in the second table's column space.
    pub fn y_axes(&self) -> &Array2<f64> {
        &self.y_axes
    }

    /// Row scores `X Dp A` of the first table.
    pub fn x_scores(&self) -> &Array2<f64> {
        &self.x_scores
    }

    /// Row scores `Y Dq B` of the second table.
    pub fn y_scores(&self) -> &Array2<f64> {
        &self.y_scores
    }

    pub fn axis_stats(&self) -> &[AxisStats] {
        &self.axis_stats
    }

    /// Sum of the full spectrum of squared covariances.
    pub fn total_coinertia(&self) -> f64 {
        self.total_coinertia
    }

    /// The RV coefficient between the two tables.
    pub fn rv(&self) -> f64 {
        self.rv
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn x_col_labels(&self) -> &[String] {
        &self.x_col_labels
    }

    pub fn y_col_labels(&self) -> &[String] {
        &self.y_col_labels
    }

    pub fn warnings(&self) -> &[Warning] {
        &self.warnings
    }

    /// Underlying decomposition of the crossed triplet.
    pub fn crossed(&self) -> &Decomposition {
        &self.crossed
    }

    /// Project supplementary rows of an x-side table: `X_sup Dp A`.
    pub fn project_x_rows(&self, sup: &Triplet) -> Result<Array2<f64>, AnalysisError> {
        if sup.table().col_labels() != self.x_col_labels.as_slice() {
            return Err(AnalysisError::ColumnMismatch(
                "supplementary rows must share the x table's columns".into(),
            ));
        }
        let d = sup.col_metric().diag();
        let mut xd = sup.values().to_owned();
        for (j, mut col) in xd.axis_iter_mut(Axis(1)).enumerate() {
            col *= d[j];
        }
        Ok(xd.dot(&self.x_axes))
    }

    /// Project supplementary rows of a y-side table: `Y_sup Dq B`.
    pub fn project_y_rows(&self, sup: &Triplet) -> Result<Array2<f64>, AnalysisError> {
        if sup.table().col_labels() != self.y_col_labels.as_slice() {
            return Err(AnalysisError::ColumnMismatch(
                "supplementary rows must share the y table's columns".into(),
            ));
        }
        let d = sup.col_metric().diag();
        let mut yd = sup.values().to_owned();
        for (j, mut col) in yd.axis_iter_mut(Axis(1)).enumerate() {
            col *= d[j];
        }
        Ok(yd.dot(&self.y_axes))
    }
}

/// Result of a row-permutation significance test.
#[derive(Debug, Clone, PartialEq)]
pub struct PermutationTestResult {
    pub observed: f64,
    pub permuted: Vec<f64>,
    pub p_value: f64,
    pub seed: u64,
    pub n_perm: usize,
}

impl PermutationTestResult {
    fn from_draws(observed: f64, permuted: Vec<f64>, seed: u64) -> Self {
        let n_perm = permuted.len();
        let count = permuted.iter().filter(|&&v| v >= observed).count();
        let p_value = (count + 1) as f64 / (n_perm + 1) as f64;
        Self {
            observed,
            permuted,
            p_value,
            seed,
            n_perm,
        }
    }
}

fn check_paired_rows(tx: &Triplet, ty: &Triplet) -> Result<(), AnalysisError> {
    if tx.table().row_labels() != ty.table().row_labels() {
        return Err(AnalysisError::RowMismatch(
            "the two tables must share row labels".into(),
        ));
    }
    if tx.row_weights() != ty.row_weights() {
        return Err(AnalysisError::RowMismatch(
            "the two tables must share row weights".into(),
        ));
    }
    Ok(())
}

/// The crossed triplet `(Z, Dp, Dq)` with `Z = Y^T Dn X`.
///
/// `Z` is `q x p`: its rows are the second table's variables, its columns the
/// first table's. The first table's column metric becomes the column metric
/// of `Z` and the second table's column metric weights the rows of `Z`.
pub fn cross_table(tx: &Triplet, ty: &Triplet) -> Result<Triplet, AnalysisError> {
    check_paired_rows(tx, ty)?;
    let w = tx.row_weights().diag();
    let mut yw = ty.values().to_owned();
    for (i, mut row) in yw.axis_iter_mut(Axis(0)).enumerate() {
        row *= w[i];
    }
    let z = yw.t().dot(tx.values());
    let table = DataTable::new(
        z,
        ty.table().col_labels().to_vec(),
        tx.table().col_labels().to_vec(),
    )?;
    Triplet::new(
        table,
        tx.col_metric().clone(),
        RowWeights::from_metric(ty.col_metric()),
    )
}

/// Co-inertia analysis of two triplets sharing rows and row weights.
///
/// Inputs are expected to be column-centered; a warning is attached to the
/// result otherwise.
pub fn coia(tx: &Triplet, ty: &Triplet, n_axes: usize) -> Result<CoInertiaResult, AnalysisError> {
    let crossed_triplet = cross_table(tx, ty)?;
    let mut warnings = Vec::new();
    for (t, name) in [(tx, "x"), (ty, "y")] {
        if crate::tabular::max_abs_column_mean(t) > CENTERING_WARN_TOL * scale_of(t) {
            warnings.push(Warning::NotCentered {
                table: name.to_string(),
            });
        }
    }

    let crossed = eigen::gpca(&crossed_triplet, n_axes)?;
    let x_axes = crossed.axes().clone();
    let y_axes = crossed.components().clone();

    let dx = tx.col_metric().diag();
    let mut xd = tx.values().to_owned();
    for (j, mut col) in xd.axis_iter_mut(Axis(1)).enumerate() {
        col *= dx[j];
    }
    let x_scores = xd.dot(&x_axes);

    let dy = ty.col_metric().diag();
    let mut yd = ty.values().to_owned();
    for (j, mut col) in yd.axis_iter_mut(Axis(1)).enumerate() {
        col *= dy[j];
    }
    let y_scores = yd.dot(&y_axes);

    let w = tx.row_weights();
    let x_var = eigen::weighted_second_moment(&x_scores, w);
    let y_var = eigen::weighted_second_moment(&y_scores, w);
    let mut axis_stats = Vec::with_capacity(x_axes.ncols());
    for ax in 0..x_axes.ncols() {
        let mut cov = 0.0;
        for i in 0..x_scores.nrows() {
            cov += w.diag()[i] * x_scores[[i, ax]] * y_scores[[i, ax]];
        }
        let denom = (x_var[ax] * y_var[ax]).sqrt();
        let correlation = if denom > 0.0 { cov / denom } else { 0.0 };
        axis_stats.push(AxisStats {
            covariance: cov,
            correlation,
            x_variance: x_var[ax],
            y_variance: y_var[ax],
        });
    }

    let total = crossed.trace();
    let rv = rv_coefficient(tx, ty).unwrap_or(0.0);

    Ok(CoInertiaResult {
        crossed,
        x_axes,
        y_axes,
        x_scores,
        y_scores,
        axis_stats,
        total_coinertia: total,
        rv,
        x_col_labels: tx.table().col_labels().to_vec(),
        y_col_labels: ty.table().col_labels().to_vec(),
        row_labels: tx.table().row_labels().to_vec(),
        warnings,
    })
}

fn scale_of(t: &Triplet) -> f64 {
    t.values().iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0)
}

/// Total co-inertia `trace(X Dp X^T Dn Y Dq Y^T Dn)`: the metric-weighted
/// sum of squared cross-covariances between the columns of the two tables.
pub fn total_coinertia(tx: &Triplet, ty: &Triplet) -> Result<f64, AnalysisError> {
    check_paired_rows(tx, ty)?;
    let w = tx.row_weights().diag();
    let mut xw = tx.values().to_owned();
    for (i, mut row) in xw.axis_iter_mut(Axis(0)).enumerate() {
        row *= w[i];
    }
    let cross = xw.t().dot(ty.values()); // p x q, X^T Dn Y
    let dx = tx.col_metric().diag();
    let dy = ty.col_metric().diag();
    let mut total = 0.0;
    for ((j, l), v) in cross.indexed_iter() {
        total += dx[j] * dy[l] * v * v;
    }
    Ok(total)
}

/// Squared Frobenius norm of the cross-product operator `X Dp X^T Dn`,
/// i.e. the total co-inertia of a table with itself.
fn operator_norm2(t: &Triplet) -> Result<f64, AnalysisError> {
    total_coinertia(t, t)
}

/// The RV coefficient: total co-inertia normalized by the operator norms of
/// the two tables, a correlation-like value in `[0, 1]`.
pub fn rv_coefficient(tx: &Triplet, ty: &Triplet) -> Result<f64, AnalysisError> {
    check_paired_rows(tx, ty)?;
    let nx = operator_norm2(tx)?;
    let ny = operator_norm2(ty)?;
    if nx <= 0.0 {
        return Err(AnalysisError::ZeroVarianceTable { table: "x".into() });
    }
    if ny <= 0.0 {
        return Err(AnalysisError::ZeroVarianceTable { table: "y".into() });
    }
    Ok(total_coinertia(tx, ty)? / (nx * ny).sqrt())
}

/// Row-permutation test of the total co-inertia between two tables.
///
/// The rows of `tx` are permuted uniformly at random `n_perm` times while
/// `ty` stays fixed; the p-value uses the add-one convention
/// `(#{permuted >= observed} + 1) / (n_perm + 1)`. Each permutation draws
/// its randomness from a stream derived from `(seed, permutation index)`,
/// so the result does not depend on scheduling or thread count.
pub fn coia_permutation_test(
    tx: &Triplet,
    ty: &Triplet,
    n_perm: usize,
    seed: u64,
) -> Result<PermutationTestResult, AnalysisError> {
    check_paired_rows(tx, ty)?;
    if n_perm == 0 {
        return Err(AnalysisError::DimensionMismatch(
            "permutation test needs n_perm >= 1".into(),
        ));
    }
    let n = tx.nrows();
    let w = tx.row_weights().diag();

    // Precompute the n x n cross-product operators; a row permutation of X
    // permutes W_X symmetrically, so each draw costs O(n^2).
    let wx = gram(tx);
    let wy = gram(ty);

    let observed = coinertia_from_grams(&wx, &wy, &w.to_owned(), None);

    let permuted: Vec<f64> = (0..n_perm)
        .into_par_iter()
        .map(|idx| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(idx as u64 + 1);
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            coinertia_from_grams(&wx, &wy, &w.to_owned(), Some(&perm))
        })
        .collect();

    Ok(PermutationTestResult::from_draws(observed, permuted, seed))
}

/// `X Dp X^T`, the unweighted cross-product operator between rows.
fn gram(t: &Triplet) -> Array2<f64> {
    let d = t.col_metric().diag();
    let mut xd = t.values().to_owned();
    for (j, mut col) in xd.axis_iter_mut(Axis(1)).enumerate() {
        col *= d[j];
    }
    xd.dot(&t.values().t())
}

/// `trace(W_X Dn W_Y Dn)` with an optional row permutation applied to `W_X`.
fn coinertia_from_grams(
    wx: &Array2<f64>,
    wy: &Array2<f64>,
    w: &ndarray::Array1<f64>,
    perm: Option<&[usize]>,
) -> f64 {
    let n = wx.nrows();
    let mut total = 0.0;
    match perm {
        None => {
            for i in 0..n {
                for j in 0..n {
                    total += w[i] * w[j] * wx[[i, j]] * wy[[j, i]];
                }
            }
        }
        Some(p) => {
            for i in 0..n {
                for j in 0..n {
                    total += w[i] * w[j] * wx[[p[i], p[j]]] * wy[[j, i]];
                }
            }
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tabular::{ColumnMetric, DataTable};
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    fn plain(values: Array2<f64>) -> Triplet {
        Triplet::plain(DataTable::from_values(values).unwrap())
    }

    fn centered(values: Array2<f64>) -> Triplet {
        plain(values).centered()
    }

    #[test]
    fn self_cross_is_covariance_matrix() {
        let x = centered(array![[1.0, 2.0], [3.0, -1.0], [-4.0, 2.0]]);
        let z = cross_table(&x, &x).unwrap();
        // Z = X^T Dn X: weighted covariance matrix of the centered table.
        let n = 3.0;
        let v = x.values();
        for j in 0..2 {
            for l in 0..2 {
                let mut cov = 0.0;
                for i in 0..3 {
                    cov += v[[i, j]] * v[[i, l]] / n;
                }
                assert_abs_diff_eq!(z.values()[[l, j]], cov, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn cross_of_zero_table_is_zero() {
        let x = plain(Array2::zeros((3, 2)));
        let y = plain(array![[1.0, 0.5], [2.0, -1.0], [0.0, 1.0]]);
        let z = cross_table(&x, &y).unwrap();
        assert!(z.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn cross_table_hand_case() {
        // 3x2 / 3x2, uniform weights: Z[l][j] = (1/3) sum_i y_il x_ij
        let x = plain(array![[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]);
        let y = plain(array![[2.0, 1.0], [0.0, 1.0], [1.0, 0.0]]);
        let z = cross_table(&x, &y).unwrap();
        let xv = x.values();
        let yv = y.values();
        for l in 0..2 {
            for j in 0..2 {
                let mut expect = 0.0;
                for i in 0..3 {
                    expect += yv[[i, l]] * xv[[i, j]] / 3.0;
                }
                assert_abs_diff_eq!(z.values()[[l, j]], expect, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn cross_table_carries_metrics() {
        let x = Triplet::new(
            DataTable::from_values(array![[1.0, 0.0], [0.0, 1.0]]).unwrap(),
            ColumnMetric::new(vec![2.0, 3.0]).unwrap(),
            RowWeights::uniform(2),
        )
        .unwrap();
        let y = Triplet::new(
            DataTable::new(
                array![[1.0], [2.0]],
                vec!["r1".into(), "r2".into()],
                vec!["s1".into()],
            )
            .unwrap(),
            ColumnMetric::new(vec![5.0]).unwrap(),
            RowWeights::uniform(2),
        )
        .unwrap();
        let z = cross_table(&x, &y).unwrap();
        assert_eq!(z.col_metric().diag().to_vec(), vec![2.0, 3.0]);
        assert_eq!(z.row_weights().diag().to_vec(), vec![5.0]);
    }

    #[test]
    fn coia_self_eigenvalues_are_squared_gpca_eigenvalues() {
        let x = centered(array![[1.0, 2.0], [3.0, -1.0], [-4.0, 2.0]]);
        let single = eigen::gpca(&x, 2).unwrap();
        let co = coia(&x, &x, 2).unwrap();
        for (l, sq) in co.eigenvalues().iter().zip(single.eigenvalues()) {
            assert_abs_diff_eq!(*l, sq * sq, epsilon = 1e-10);
        }
    }

    #[test]
    fn coia_unrelated_constant_table_has_zero_coinertia() {
        let x = centered(array![[1.0, 2.0], [3.0, -1.0], [-4.0, 2.0]]);
        let y = plain(array![[5.0], [5.0], [5.0]]).centered();
        let co = coia(&x, &y, 2).unwrap();
        assert_abs_diff_eq!(co.total_coinertia(), 0.0, epsilon = 1e-20);
    }

    #[test]
    fn coia_warns_on_uncentered_input() {
        let x = plain(array![[10.0, 2.0], [13.0, -1.0], [9.0, 2.0]]);
        let y = centered(array![[1.0], [0.0], [-1.0]]);
        let co = coia(&x, &y, 1).unwrap();
        assert!(co
            .warnings()
            .iter()
            .any(|w| matches!(w, Warning::NotCentered { table } if table == "x")));
    }

    #[test]
    fn total_coinertia_double_sum_oracle() {
        let x = centered(array![[1.0, 2.0], [3.0, -1.0], [-4.0, 2.0]]);
        let total = total_coinertia(&x, &x).unwrap();
        // sum over column pairs of squared weighted covariances
        let v = x.values();
        let mut expect = 0.0;
        for j in 0..2 {
            for l in 0..2 {
                let mut cov = 0.0;
                for i in 0..3 {
                    cov += v[[i, j]] * v[[i, l]] / 3.0;
                }
                expect += cov * cov;
            }
        }
        assert_abs_diff_eq!(total, expect, epsilon = 1e-12);
    }

    #[test]
    fn total_coinertia_invariant_under_joint_row_permutation() {
        let x = centered(array![[1.0, 2.0], [3.0, -1.0], [-4.0, 2.0]]);
        let y = centered(array![[0.5], [2.0], [-1.0]]);
        let before = total_coinertia(&x, &y).unwrap();
        let flip = |t: &Triplet| {
            let mut v = t.values().clone();
            let last = v.nrows() - 1;
            for j in 0..v.ncols() {
                v.swap([0, j], [last, j]);
            }
            t.with_table(t.table().with_values(v)).unwrap()
        };
        let after = total_coinertia(&flip(&x), &flip(&y)).unwrap();
        assert_abs_diff_eq!(before, after, epsilon = 1e-12);
    }

    #[test]
    fn rv_of_table_with_itself_is_one() {
        let x = centered(array![[1.0, 2.0], [3.0, -1.0], [-4.0, 2.0]]);
        assert_abs_diff_eq!(rv_coefficient(&x, &x).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn rv_is_scale_invariant() {
        let x = centered(array![[1.0, 2.0], [3.0, -1.0], [-4.0, 2.0]]);
        let x2 = x.with_table(x.table().with_values(x.values() * 2.0)).unwrap();
        assert_abs_diff_eq!(rv_coefficient(&x, &x2).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn rv_of_orthogonal_pair_is_zero() {
        // x varies on rows 1-2, y on rows 3-4; cross covariance vanishes.
        let x = centered(array![[1.0], [-1.0], [0.0], [0.0]]);
        let y = centered(array![[0.0], [0.0], [1.0], [-1.0]]);
        let orthogonal = total_coinertia(&x, &y).unwrap();
        assert_abs_diff_eq!(orthogonal, 0.0, epsilon = 1e-20);
        assert_abs_diff_eq!(rv_coefficient(&x, &y).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn rv_rejects_zero_table() {
        let x = plain(Array2::zeros((3, 2)));
        let y = centered(array![[1.0], [0.0], [-1.0]]);
        assert!(matches!(
            rv_coefficient(&x, &y).unwrap_err(),
            AnalysisError::ZeroVarianceTable { .. }
        ));
    }

    #[test]
    fn permutation_test_single_row_p_is_one() {
        let x = plain(array![[1.0, 2.0]]);
        let y = plain(array![[3.0]]);
        let r = coia_permutation_test(&x, &y, 19, 7).unwrap();
        assert_abs_diff_eq!(r.p_value, 1.0);
    }

    #[test]
    fn permutation_test_deterministic_per_seed() {
        let x = centered(array![[1.0, 2.0], [3.0, -1.0], [-4.0, 2.0], [0.5, 1.5]]);
        let y = centered(array![[2.0], [1.0], [-3.0], [0.0]]);
        let a = coia_permutation_test(&x, &y, 99, 42).unwrap();
        let b = coia_permutation_test(&x, &y, 99, 42).unwrap();
        assert_eq!(a, b);
        let c = coia_permutation_test(&x, &y, 99, 43).unwrap();
        assert_ne!(a.permuted, c.permuted);
    }

    #[test]
    fn permuted_statistic_matches_naive_recomputation() {
        let x = centered(array![[1.0, 2.0], [3.0, -1.0], [-4.0, 2.0], [0.5, 1.5]]);
        let y = centered(array![[2.0], [1.0], [-3.0], [0.0]]);
        let r = coia_permutation_test(&x, &y, 5, 11).unwrap();
        for (idx, &stat) in r.permuted.iter().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            rng.set_stream(idx as u64 + 1);
            let mut perm: Vec<usize> = (0..4).collect();
            perm.shuffle(&mut rng);
            let mut vals = Array2::zeros((4, 2));
            for (i, &src) in perm.iter().enumerate() {
                vals.row_mut(i).assign(&x.values().row(src));
            }
            let permuted_x = x.with_table(x.table().with_values(vals)).unwrap();
            let naive = total_coinertia(&permuted_x, &y).unwrap();
            assert_abs_diff_eq!(stat, naive, epsilon = 1e-12);
        }
    }

    #[test]
    fn add_one_p_value_never_zero() {
        let x = centered(array![[1.0, 2.0], [3.0, -1.0], [-4.0, 2.0], [0.5, 1.5]]);
        let y = x.clone();
        let r = coia_permutation_test(&x, &y, 99, 1).unwrap();
        assert!(r.p_value >= 1.0 / 100.0);
        assert!(r.p_value <= 1.0);
    }

    #[test]
    fn p_value_matches_the_add_one_formula() {
        let x = centered(array![[1.0, 2.0], [3.0, -1.0], [-4.0, 2.0], [0.5, 1.5]]);
        let y = centered(array![[2.0], [1.0], [-3.0], [0.0]]);
        let r = coia_permutation_test(&x, &y, 49, 3).unwrap();
        let count = r.permuted.iter().filter(|&&v| v >= r.observed).count();
        assert_abs_diff_eq!(r.p_value, (count + 1) as f64 / 50.0, epsilon = 1e-15);
    }
}
