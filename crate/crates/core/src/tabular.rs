//! Data model for labeled tables, weights, triplets, groups and k-tables,
//! plus the preprocessing transforms applied before any analysis.
//!
//! The unit of analysis everywhere in this crate is the *statistical triplet*
//! `(X, Dp, Dn)`: a numeric table together with a diagonal metric on its
//! column space and a diagonal weighting of its rows. All transforms are pure
//! and return new values; nothing is mutated in place.

use ndarray::{Array1, Array2, ArrayView1, Axis};

use crate::error::AnalysisError;

/// Tolerance for checking that probability weights sum to one.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// A labeled numeric matrix: rows are samples, columns are variables.
///
/// Entries must be finite and labels unique within their axis.
#[derive(Debug, Clone, PartialEq)]
pub struct DataTable {
    values: Array2<f64>,
    row_labels: Vec<String>,
    col_labels: Vec<String>,
}

impl DataTable {
    pub fn new(
        values: Array2<f64>,
        row_labels: Vec<String>,
        col_labels: Vec<String>,
    ) -> Result<Self, AnalysisError> {
        if row_labels.len() != values.nrows() || col_labels.len() != values.ncols() {
            return Err(AnalysisError::DimensionMismatch(format!(
                "{} row labels and {} column labels for a {}x{} matrix",
                row_labels.len(),
                col_labels.len(),
                values.nrows(),
                values.ncols()
            )));
        }
        check_unique(&row_labels)?;
        check_unique(&col_labels)?;
        for ((i, j), v) in values.indexed_iter() {
            if !v.is_finite() {
                return Err(AnalysisError::NonFiniteEntry {
                    row: row_labels[i].clone(),
                    column: col_labels[j].clone(),
                });
            }
        }
        Ok(Self {
            values,
            row_labels,
            col_labels,
        })
    }

    /// Convenience constructor labeling rows `r1..rn` and columns `c1..cp`.
    pub fn from_values(values: Array2<f64>) -> Result<Self, AnalysisError> {
        let rows = (1..=values.nrows()).map(|i| format!("r{i}")).collect();
        let cols = (1..=values.ncols()).map(|j| format!("c{j}")).collect();
        Self::new(values, rows, cols)
    }

    pub fn nrows(&self) -> usize {
        self.values.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    /// Entry-wise `ln(1 + x)`, the usual variance-stabilizing transform for
    /// count data. Fails on negative entries.
    pub fn log1p(&self) -> Result<DataTable, AnalysisError> {
        for ((i, j), v) in self.values.indexed_iter() {
            if *v < 0.0 {
                return Err(AnalysisError::NegativeEntry {
                    row: self.row_labels[i].clone(),
                    column: self.col_labels[j].clone(),
                });
            }
        }
        Ok(DataTable {
            values: self.values.mapv(f64::ln_1p),
            row_labels: self.row_labels.clone(),
            col_labels: self.col_labels.clone(),
        })
    }

    /// Same labels, new values of the same shape.
    pub fn with_values(&self, values: Array2<f64>) -> DataTable {
        assert_eq!(values.dim(), self.values.dim(), "shape must be preserved");
        DataTable {
            values,
            row_labels: self.row_labels.clone(),
            col_labels: self.col_labels.clone(),
        }
    }

    /// Replace the row labels, keeping values and column labels.
    pub fn relabeled_rows(&self, row_labels: Vec<String>) -> Result<DataTable, AnalysisError> {
        DataTable::new(self.values.clone(), row_labels, self.col_labels.clone())
    }
}

fn check_unique(labels: &[String]) -> Result<(), AnalysisError> {
    let mut seen = std::collections::HashSet::with_capacity(labels.len());
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(AnalysisError::DuplicateLabel { label: l.clone() });
        }
    }
    Ok(())
}

/// Diagonal weighting of the rows of a table.
///
/// Sampling triplets carry probability weights (positive, summing to one);
/// crossed triplets reuse a column metric as the row weighting, in which case
/// the entries are only required to be positive.
#[derive(Debug, Clone, PartialEq)]
pub struct RowWeights(Array1<f64>);

impl RowWeights {
    /// Probability weights: positive and summing to one within `1e-12`.
    pub fn probabilities(w: Vec<f64>) -> Result<Self, AnalysisError> {
        let w = Array1::from(w);
        check_positive(&w)?;
        let sum = w.sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(AnalysisError::InvalidWeights(format!(
                "row weights sum to {sum}, expected 1"
            )));
        }
        Ok(Self(w))
    }

    /// Uniform probability weights `1/n`.
    pub fn uniform(n: usize) -> Self {
        Self(Array1::from_elem(n, 1.0 / n as f64))
    }

    /// Row weighting taken from a metric; positive but not normalized.
    /// Used for the crossed triplet of a co-inertia analysis, where the
    /// second table's column metric weights the rows of the cross table.
    pub fn from_metric(m: &ColumnMetric) -> Self {
        Self(m.diag().to_owned())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn diag(&self) -> ArrayView1<'_, f64> {
        self.0.view()
    }

    pub fn sum(&self) -> f64 {
        self.0.sum()
    }
}

fn check_positive(w: &Array1<f64>) -> Result<(), AnalysisError> {
    for (i, v) in w.iter().enumerate() {
        if !(v.is_finite() && *v > 0.0) {
            return Err(AnalysisError::InvalidWeights(format!(
                "entry {i} is {v}, expected a positive finite value"
            )));
        }
    }
    Ok(())
}

/// Diagonal metric on the column space of a table.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnMetric(Array1<f64>);

impl ColumnMetric {
    pub fn new(d: Vec<f64>) -> Result<Self, AnalysisError> {
        let d = Array1::from(d);
        check_positive(&d)?;
        Ok(Self(d))
    }

    /// The Euclidean metric on `p` columns.
    pub fn identity(p: usize) -> Self {
        Self(Array1::ones(p))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn diag(&self) -> ArrayView1<'_, f64> {
        self.0.view()
    }
}

/// The statistical triplet `(X, Dp, Dn)`: a table, a metric on its columns
/// and a weighting of its rows. This completely defines a weighted PCA.
#[derive(Debug, Clone, PartialEq)]
pub struct Triplet {
    table: DataTable,
    col_metric: ColumnMetric,
    row_weights: RowWeights,
}

impl Triplet {
    pub fn new(
        table: DataTable,
        col_metric: ColumnMetric,
        row_weights: RowWeights,
    ) -> Result<Self, AnalysisError> {
        if col_metric.len() != table.ncols() {
            return Err(AnalysisError::DimensionMismatch(format!(
                "column metric has {} entries for {} columns",
                col_metric.len(),
                table.ncols()
            )));
        }
        if row_weights.len() != table.nrows() {
            return Err(AnalysisError::DimensionMismatch(format!(
                "row weights have {} entries for {} rows",
                row_weights.len(),
                table.nrows()
            )));
        }
        Ok(Self {
            table,
            col_metric,
            row_weights,
        })
    }

    /// Identity metric and uniform row weights: a plain PCA triplet.
    pub fn plain(table: DataTable) -> Self {
        let p = table.ncols();
        let n = table.nrows();
        Self {
            table,
            col_metric: ColumnMetric::identity(p),
            row_weights: RowWeights::uniform(n),
        }
    }

    pub fn table(&self) -> &DataTable {
        &self.table
    }

    pub fn values(&self) -> &Array2<f64> {
        self.table.values()
    }

    pub fn col_metric(&self) -> &ColumnMetric {
        &self.col_metric
    }

    pub fn row_weights(&self) -> &RowWeights {
        &self.row_weights
    }

    pub fn nrows(&self) -> usize {
        self.table.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.table.ncols()
    }

    pub fn with_table(&self, table: DataTable) -> Result<Triplet, AnalysisError> {
        Triplet::new(table, self.col_metric.clone(), self.row_weights.clone())
    }

    /// Weighted column means `sum_i w_i x_ij / sum_i w_i`.
    pub fn column_means(&self) -> Array1<f64> {
        let w = self.row_weights.diag();
        let total = self.row_weights.sum();
        let mut means = Array1::zeros(self.ncols());
        for (i, row) in self.values().axis_iter(Axis(0)).enumerate() {
            means.scaled_add(w[i] / total, &row);
        }
        means
    }

    /// Weighted column variances with the population divisor `sum w`.
    pub fn column_variances(&self) -> Array1<f64> {
        let means = self.column_means();
        let w = self.row_weights.diag();
        let total = self.row_weights.sum();
        let mut vars = Array1::zeros(self.ncols());
        for (i, row) in self.values().axis_iter(Axis(0)).enumerate() {
            let dev = &row - &means;
            vars.scaled_add(w[i] / total, &dev.mapv(|x| x * x));
        }
        vars
    }

    /// Remove the weighted mean of every column. Metric and weights are kept.
    pub fn centered(&self) -> Triplet {
        let means = self.column_means();
        let centered = self.values() - &means.broadcast((self.nrows(), self.ncols())).unwrap();
        Triplet {
            table: self.table.with_values(centered),
            col_metric: self.col_metric.clone(),
            row_weights: self.row_weights.clone(),
        }
    }

    /// Center every column and scale it to unit weighted variance.
    pub fn standardized(&self) -> Result<Triplet, AnalysisError> {
        self.centered().scaled_to_unit_variance(None)
    }

    /// Scale each column by the inverse of its weighted standard deviation,
    /// without centering. Standalone use keeps within-block means intact
    /// while equalizing total variances across variables.
    pub fn scaled_to_unit_variance(
        &self,
        block: Option<&str>,
    ) -> Result<Triplet, AnalysisError> {
        let vars = self.column_variances();
        for (j, v) in vars.iter().enumerate() {
            if *v <= 0.0 {
                return Err(AnalysisError::ZeroVarianceColumn {
                    column: self.table.col_labels()[j].clone(),
                    block: block.map(str::to_owned),
                });
            }
        }
        let inv_sd = vars.mapv(|v| 1.0 / v.sqrt());
        let scaled = self.values() * &inv_sd.broadcast((self.nrows(), self.ncols())).unwrap();
        Ok(Triplet {
            table: self.table.with_values(scaled),
            col_metric: self.col_metric.clone(),
            row_weights: self.row_weights.clone(),
        })
    }

    /// Total inertia `trace(X Dp X^T Dn)`: the weighted sum of squared row
    /// norms, equal to the sum of column variances for centered data.
    pub fn total_inertia(&self) -> f64 {
        let d = self.col_metric.diag();
        let w = self.row_weights.diag();
        let mut total = 0.0;
        for (i, row) in self.values().axis_iter(Axis(0)).enumerate() {
            let mut norm = 0.0;
            for (j, x) in row.iter().enumerate() {
                norm += d[j] * x * x;
            }
            total += w[i] * norm;
        }
        total
    }
}

/// Assignment of the `n` rows of a table to `g` nonempty groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupAssignment {
    group_of: Vec<usize>,
    group_labels: Vec<String>,
}

impl GroupAssignment {
    /// `group_of[i]` is the zero-based group index of row `i`.
    pub fn new(group_of: Vec<usize>, group_labels: Vec<String>) -> Result<Self, AnalysisError> {
        check_unique(&group_labels)?;
        let g = group_labels.len();
        for &k in &group_of {
            if k >= g {
                return Err(AnalysisError::DimensionMismatch(format!(
                    "group index {k} out of range for {g} groups"
                )));
            }
        }
        let mut counts = vec![0usize; g];
        for &k in &group_of {
            counts[k] += 1;
        }
        if let Some(k) = counts.iter().position(|&c| c == 0) {
            return Err(AnalysisError::EmptyGroup {
                group: group_labels[k].clone(),
            });
        }
        Ok(Self {
            group_of,
            group_labels,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.group_of.len()
    }

    pub fn n_groups(&self) -> usize {
        self.group_labels.len()
    }

    pub fn group_of(&self) -> &[usize] {
        &self.group_of
    }

    pub fn group_labels(&self) -> &[String] {
        &self.group_labels
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.n_groups()];
        for &k in &self.group_of {
            counts[k] += 1;
        }
        counts
    }

    /// Same groups with the assignment vector reshuffled; used by the
    /// between-group permutation test.
    pub(crate) fn with_assignment(&self, group_of: Vec<usize>) -> GroupAssignment {
        debug_assert_eq!(group_of.len(), self.group_of.len());
        GroupAssignment {
            group_of,
            group_labels: self.group_labels.clone(),
        }
    }
}

/// How a stacked table splits vertically into consecutive blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockDescriptor {
    blocks: Vec<(String, usize)>,
}

impl BlockDescriptor {
    pub fn new(blocks: Vec<(String, usize)>) -> Result<Self, AnalysisError> {
        let labels: Vec<String> = blocks.iter().map(|(l, _)| l.clone()).collect();
        check_unique(&labels)?;
        for (label, count) in &blocks {
            if *count == 0 {
                return Err(AnalysisError::DimensionMismatch(format!(
                    "block `{label}` has zero rows"
                )));
            }
        }
        Ok(Self { blocks })
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn names(&self) -> Vec<String> {
        self.blocks.iter().map(|(l, _)| l.clone()).collect()
    }

    pub fn row_counts(&self) -> Vec<usize> {
        self.blocks.iter().map(|(_, c)| *c).collect()
    }

    pub fn total_rows(&self) -> usize {
        self.blocks.iter().map(|(_, c)| c).sum()
    }
}

/// An ordered sequence of triplets sharing their column labels and metric.
#[derive(Debug, Clone, PartialEq)]
pub struct KTable {
    tables: Vec<Triplet>,
    block_names: Vec<String>,
}

impl KTable {
    pub fn new(tables: Vec<Triplet>, block_names: Vec<String>) -> Result<Self, AnalysisError> {
        if tables.is_empty() {
            return Err(AnalysisError::NotEnoughTables { needed: 1, got: 0 });
        }
        if block_names.len() != tables.len() {
            return Err(AnalysisError::DimensionMismatch(format!(
                "{} block names for {} tables",
                block_names.len(),
                tables.len()
            )));
        }
        check_unique(&block_names)?;
        let first = &tables[0];
        for t in &tables[1..] {
            if t.table().col_labels() != first.table().col_labels() {
                return Err(AnalysisError::ColumnMismatch(
                    "all tables of a k-table must share column labels and order".into(),
                ));
            }
            if t.col_metric() != first.col_metric() {
                return Err(AnalysisError::ColumnMismatch(
                    "all tables of a k-table must share the column metric".into(),
                ));
            }
        }
        Ok(Self {
            tables,
            block_names,
        })
    }

    pub fn k(&self) -> usize {
        self.tables.len()
    }

    pub fn tables(&self) -> &[Triplet] {
        &self.tables
    }

    pub fn block_names(&self) -> &[String] {
        &self.block_names
    }

    pub fn col_metric(&self) -> &ColumnMetric {
        self.tables[0].col_metric()
    }

    pub fn col_labels(&self) -> &[String] {
        self.tables[0].table().col_labels()
    }

    /// Standardize every column within every block independently.
    pub fn partial_standardized(&self) -> Result<KTable, AnalysisError> {
        let mut out = Vec::with_capacity(self.k());
        for (t, name) in self.tables.iter().zip(&self.block_names) {
            out.push(
                t.centered()
                    .scaled_to_unit_variance(Some(name))
                    .map_err(|e| match e {
                        AnalysisError::ZeroVarianceColumn { column, .. } => {
                            AnalysisError::ZeroVarianceColumn {
                                column,
                                block: Some(name.clone()),
                            }
                        }
                        other => other,
                    })?,
            );
        }
        KTable::new(out, self.block_names.clone())
    }

    /// Center every column within every block independently.
    pub fn partial_centered(&self) -> KTable {
        let tables = self.tables.iter().map(Triplet::centered).collect();
        KTable::new(tables, self.block_names.clone()).expect("shape preserved")
    }

    /// Do all tables have the same row labels, in the same order?
    pub fn rows_aligned(&self) -> bool {
        let first = self.tables[0].table().row_labels();
        self.tables
            .iter()
            .all(|t| t.table().row_labels() == first)
    }

    /// Stack the blocks back into one table. Values and labels are restored
    /// exactly; the stacked triplet gets uniform row weights.
    pub fn concatenated(&self) -> Result<Triplet, AnalysisError> {
        let p = self.tables[0].ncols();
        let n: usize = self.tables.iter().map(Triplet::nrows).sum();
        let mut values = Array2::zeros((n, p));
        let mut row_labels = Vec::with_capacity(n);
        let mut at = 0;
        for t in &self.tables {
            let nt = t.nrows();
            values
                .slice_mut(ndarray::s![at..at + nt, ..])
                .assign(t.values());
            row_labels.extend_from_slice(t.table().row_labels());
            at += nt;
        }
        let table = DataTable::new(values, row_labels, self.col_labels().to_vec())?;
        Triplet::new(table, self.col_metric().clone(), RowWeights::uniform(n))
    }
}

/// Two k-tables coupled date by date over shared rows.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedKTables {
    env: KTable,
    spe: KTable,
}

impl PairedKTables {
    pub fn new(env: KTable, spe: KTable) -> Result<Self, AnalysisError> {
        if env.k() != spe.k() {
            return Err(AnalysisError::DimensionMismatch(format!(
                "paired k-tables must have the same length, got {} and {}",
                env.k(),
                spe.k()
            )));
        }
        for (t, (a, b)) in env.tables().iter().zip(spe.tables()).enumerate() {
            if a.table().row_labels() != b.table().row_labels() {
                return Err(AnalysisError::RowMismatch(format!(
                    "tables at position {t} have different row labels"
                )));
            }
            if a.row_weights() != b.row_weights() {
                return Err(AnalysisError::RowMismatch(format!(
                    "tables at position {t} have different row weights"
                )));
            }
        }
        Ok(Self { env, spe })
    }

    pub fn env(&self) -> &KTable {
        &self.env
    }

    pub fn spe(&self) -> &KTable {
        &self.spe
    }

    pub fn k(&self) -> usize {
        self.env.k()
    }
}

/// Center every column of a triplet; alias kept close to the math.
pub fn center_table(t: &Triplet) -> Triplet {
    t.centered()
}

/// Center and scale every column of a triplet to unit weighted variance.
pub fn standardize_table(t: &Triplet) -> Result<Triplet, AnalysisError> {
    t.standardized()
}

/// Standardize each block of a k-table independently.
pub fn partial_standardize(kt: &KTable) -> Result<KTable, AnalysisError> {
    kt.partial_standardized()
}

/// Entry-wise `ln(1 + x)` on a table of nonnegative values.
pub fn log1p_transform(t: &DataTable) -> Result<DataTable, AnalysisError> {
    t.log1p()
}

/// Total inertia `trace(X Dp X^T Dn)` of a triplet.
pub fn total_inertia(t: &Triplet) -> f64 {
    t.total_inertia()
}

/// The table of group means: row `k` is the per-column arithmetic mean over
/// the rows of group `k`. The result triplet keeps the column metric and
/// carries mass-preserving group weights `n_k / n`, so the between/within
/// inertia decomposition of a uniformly weighted table is exact.
pub fn group_means(t: &Triplet, g: &GroupAssignment) -> Result<Triplet, AnalysisError> {
    if g.n_rows() != t.nrows() {
        return Err(AnalysisError::DimensionMismatch(format!(
            "group assignment covers {} rows for a table with {}",
            g.n_rows(),
            t.nrows()
        )));
    }
    let n = t.nrows();
    let gcount = g.n_groups();
    let sizes = g.sizes();
    let mut means = Array2::zeros((gcount, t.ncols()));
    for (i, row) in t.values().axis_iter(Axis(0)).enumerate() {
        let k = g.group_of()[i];
        means
            .row_mut(k)
            .scaled_add(1.0 / sizes[k] as f64, &row);
    }
    let table = DataTable::new(
        means,
        g.group_labels().to_vec(),
        t.table().col_labels().to_vec(),
    )?;
    let weights =
        RowWeights::probabilities(sizes.iter().map(|&c| c as f64 / n as f64).collect())?;
    Triplet::new(table, t.col_metric().clone(), weights)
}

/// Split a stacked triplet into consecutive blocks. Each block becomes a
/// triplet with uniform row weights `1/n_t` and the shared column metric.
pub fn split_blocks(t: &Triplet, b: &BlockDescriptor) -> Result<KTable, AnalysisError> {
    let sum = b.total_rows();
    if sum != t.nrows() {
        return Err(AnalysisError::BlockSizeMismatch { sum, n: t.nrows() });
    }
    let mut tables = Vec::with_capacity(b.len());
    let mut at = 0;
    for (_, count) in b.names().iter().zip(b.row_counts()) {
        let values = t
            .values()
            .slice(ndarray::s![at..at + count, ..])
            .to_owned();
        let rows = t.table().row_labels()[at..at + count].to_vec();
        let table = DataTable::new(values, rows, t.table().col_labels().to_vec())?;
        tables.push(Triplet::new(
            table,
            t.col_metric().clone(),
            RowWeights::uniform(count),
        )?);
        at += count;
    }
    KTable::new(tables, b.names())
}

/// Largest absolute weighted column mean, used to warn when an analysis
/// expecting centered input receives raw data.
pub(crate) fn max_abs_column_mean(t: &Triplet) -> f64 {
    t.column_means().iter().fold(0.0, |m, v| m.max(v.abs()))
}
