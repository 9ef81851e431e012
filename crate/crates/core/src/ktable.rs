//! Partial Triadic Analysis of a sequence of tables sharing rows and columns.
//!
//! Three steps: the interstructure compares the tables through their vector
//! covariances and yields optimal weights, the compromise analyzes their
//! weighted combination, and the intrastructure projects each table's rows
//! and columns back into the compromise analysis.

use ndarray::Array2;

use crate::eigen::{self, Decomposition};
use crate::error::{AnalysisError, Warning};
use crate::tabular::{KTable, Triplet};

/// Tolerance for deciding that an interstructure eigenvector mixes signs.
const MIXED_SIGN_TOL: f64 = 1e-9;

/// Which table-similarity fills the interstructure matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterstructureMode {
    /// Vector covariances `Covv` (the default).
    Covariance,
    /// Vector correlations `Rv`.
    Correlation,
}

/// The k x k table-similarity matrix and its dominant eigenvector.
#[derive(Debug, Clone, PartialEq)]
pub struct Interstructure {
    matrix: Array2<f64>,
    alpha: Vec<f64>,
    first_eigenvalue: f64,
    mode: InterstructureMode,
    block_names: Vec<String>,
    warnings: Vec<Warning>,
}

impl Interstructure {
    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }

    /// Compromise weights: the dominant unit eigenvector, oriented so its
    /// entries sum to a positive value. `sum alpha_k^2 = 1`.
    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn first_eigenvalue(&self) -> f64 {
        self.first_eigenvalue
    }

    pub fn mode(&self) -> InterstructureMode {
        self.mode
    }

    pub fn block_names(&self) -> &[String] {
        &self.block_names
    }

    pub fn warnings(&self) -> &[Warning] {
        &self.warnings
    }
}

/// The weighted combination of the sequence and its analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct Compromise {
    triplet: Triplet,
    analysis: Decomposition,
    alpha: Vec<f64>,
}

impl Compromise {
    /// The compromise triplet `(sum_k alpha_k X_k, Dp, Dn)`.
    pub fn triplet(&self) -> &Triplet {
        &self.triplet
    }

    pub fn analysis(&self) -> &Decomposition {
        &self.analysis
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }
}

/// Per-table diagnostics of the compromise construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TypologicalValue {
    pub table: String,
    /// Compromise weight `alpha_k`.
    pub weight: f64,
    /// Squared vector correlation between the table and the compromise.
    pub cos2: f64,
    /// Vector variance (total inertia) of the table.
    pub inertia: f64,
}

/// Full result of a partial triadic analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct PTAResult {
    pub interstructure: Interstructure,
    pub compromise: Compromise,
    /// Per-table supplementary row scores `R_k = X_k Dp U`.
    pub intrastructure_rows: Vec<Array2<f64>>,
    /// Per-table supplementary column coordinates
    /// `C_k = X_k^T Dn X_c Dp U Lambda^{-1/2}`.
    pub intrastructure_cols: Vec<Array2<f64>>,
    pub typological_values: Vec<TypologicalValue>,
}

/// Options for [`pta`].
#[derive(Debug, Clone, Copy)]
pub struct PtaOptions {
    pub n_axes: usize,
    pub mode: InterstructureMode,
}

impl Default for PtaOptions {
    fn default() -> Self {
        Self {
            n_axes: 2,
            mode: InterstructureMode::Covariance,
        }
    }
}

fn check_same_space(a: &Triplet, b: &Triplet) -> Result<(), AnalysisError> {
    if a.ncols() != b.ncols() || a.nrows() != b.nrows() {
        return Err(AnalysisError::DimensionMismatch(format!(
            "tables are {}x{} and {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    if a.col_metric() != b.col_metric() {
        return Err(AnalysisError::DimensionMismatch(
            "tables have different column metrics".into(),
        ));
    }
    if a.row_weights() != b.row_weights() {
        return Err(AnalysisError::DimensionMismatch(
            "tables have different row weights".into(),
        ));
    }
    Ok(())
}

/// Vector covariance `Covv(A, B) = trace(A^T Dn B Dp)`: the weighted
/// Frobenius inner product of two tables sharing metric and weights.
pub fn covv(a: &Triplet, b: &Triplet) -> Result<f64, AnalysisError> {
    check_same_space(a, b)?;
    let w = a.row_weights().diag();
    let d = a.col_metric().diag();
    let av = a.values();
    let bv = b.values();
    let mut total = 0.0;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            total += w[i] * d[j] * av[[i, j]] * bv[[i, j]];
        }
    }
    Ok(total)
}

/// Vector variance `Varv(A) = Covv(A, A)`, the table's total inertia.
pub fn varv(a: &Triplet) -> f64 {
    a.total_inertia()
}

/// Vector correlation `Rv(A, B) = Covv / sqrt(Varv Varv)`; the cosine of the
/// vectorized tables under the weighted inner product.
pub fn rv(a: &Triplet, b: &Triplet) -> Result<f64, AnalysisError> {
    let va = varv(a);
    let vb = varv(b);
    if va <= 0.0 {
        return Err(AnalysisError::ZeroVarianceTable { table: "a".into() });
    }
    if vb <= 0.0 {
        return Err(AnalysisError::ZeroVarianceTable { table: "b".into() });
    }
    Ok(covv(a, b)? / (va * vb).sqrt())
}

/// Build the table-similarity matrix and extract its dominant eigenvector.
pub fn interstructure(
    kt: &KTable,
    mode: InterstructureMode,
) -> Result<Interstructure, AnalysisError> {
    if kt.k() < 2 {
        return Err(AnalysisError::NotEnoughTables {
            needed: 2,
            got: kt.k(),
        });
    }
    check_rows_aligned(kt)?;
    interstructure_unchecked(kt, mode)
}

fn check_rows_aligned(kt: &KTable) -> Result<(), AnalysisError> {
    if !kt.rows_aligned() {
        return Err(AnalysisError::RowMismatch(
            "interstructure needs the same row labels across all tables".into(),
        ));
    }
    let first = kt.tables()[0].row_weights();
    if kt.tables().iter().any(|t| t.row_weights() != first) {
        return Err(AnalysisError::RowMismatch(
            "interstructure needs the same row weights across all tables".into(),
        ));
    }
    Ok(())
}

fn interstructure_unchecked(
    kt: &KTable,
    mode: InterstructureMode,
) -> Result<Interstructure, AnalysisError> {
    let k = kt.k();
    let mut s = Array2::zeros((k, k));
    for i in 0..k {
        for j in 0..=i {
            let v = match mode {
                InterstructureMode::Covariance => covv(&kt.tables()[i], &kt.tables()[j])?,
                InterstructureMode::Correlation => rv(&kt.tables()[i], &kt.tables()[j])?,
            };
            s[[i, j]] = v;
            s[[j, i]] = v;
        }
    }

    let (eigenvalues, vectors) = eigen::sym_eigen(&s);
    let first_eigenvalue = eigenvalues[0];
    let mut alpha: Vec<f64> = (0..k).map(|i| vectors[[i, 0]]).collect();

    // Unit norm, then orient so the entries sum positive.
    let norm = alpha.iter().map(|a| a * a).sum::<f64>().sqrt();
    for a in alpha.iter_mut() {
        *a /= norm;
    }
    if alpha.iter().sum::<f64>() < 0.0 {
        for a in alpha.iter_mut() {
            *a = -*a;
        }
    }

    let amax = alpha.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let mixed = alpha.iter().any(|&a| a > MIXED_SIGN_TOL * amax)
        && alpha.iter().any(|&a| a < -MIXED_SIGN_TOL * amax);
    let warnings = if mixed {
        vec![Warning::MixedSignEigenvector]
    } else {
        Vec::new()
    };

    Ok(Interstructure {
        matrix: s,
        alpha,
        first_eigenvalue,
        mode,
        block_names: kt.block_names().to_vec(),
        warnings,
    })
}

/// `X_c = sum_k alpha_k X_k` with the shared metric and row weights, and its
/// generalized PCA.
pub fn build_compromise(
    kt: &KTable,
    alpha: &[f64],
    n_axes: usize,
) -> Result<Compromise, AnalysisError> {
    if alpha.len() != kt.k() {
        return Err(AnalysisError::DimensionMismatch(format!(
            "{} weights for {} tables",
            alpha.len(),
            kt.k()
        )));
    }
    let norm2: f64 = alpha.iter().map(|a| a * a).sum();
    if (norm2 - 1.0).abs() > 1e-8 {
        return Err(AnalysisError::InvalidWeights(format!(
            "compromise weights must have unit norm, got sum of squares {norm2}"
        )));
    }
    let first = &kt.tables()[0];
    let (n, p) = (first.nrows(), first.ncols());
    for t in kt.tables() {
        if t.nrows() != n || t.ncols() != p {
            return Err(AnalysisError::DimensionMismatch(
                "all tables must have the same shape to be combined".into(),
            ));
        }
    }
    let mut combined = Array2::zeros((n, p));
    for (a, t) in alpha.iter().zip(kt.tables()) {
        combined.scaled_add(*a, t.values());
    }
    let table = first.table().with_values(combined);
    let triplet = Triplet::new(table, first.col_metric().clone(), first.row_weights().clone())?;
    let analysis = eigen::gpca(&triplet, n_axes)?;
    Ok(Compromise {
        triplet,
        analysis,
        alpha: alpha.to_vec(),
    })
}

/// Per-table supplementary row scores in the compromise analysis.
pub fn intrastructure_rows(
    kt: &KTable,
    compromise: &Compromise,
) -> Result<Vec<Array2<f64>>, AnalysisError> {
    kt.tables()
        .iter()
        .map(|t| eigen::project_rows(compromise.analysis(), t))
        .collect()
}

/// Per-table supplementary column coordinates in the compromise analysis.
pub fn intrastructure_cols(
    kt: &KTable,
    compromise: &Compromise,
) -> Result<Vec<Array2<f64>>, AnalysisError> {
    kt.tables()
        .iter()
        .map(|t| eigen::project_cols(compromise.analysis(), t.values()))
        .collect()
}

/// Weight, squared cosine to the compromise and inertia of every table.
pub fn typological_values(
    kt: &KTable,
    compromise: &Compromise,
) -> Result<Vec<TypologicalValue>, AnalysisError> {
    kt.tables()
        .iter()
        .zip(kt.block_names())
        .zip(compromise.alpha())
        .map(|((t, name), &weight)| {
            let r = rv(t, compromise.triplet())?;
            Ok(TypologicalValue {
                table: name.clone(),
                weight,
                cos2: r * r,
                inertia: varv(t),
            })
        })
        .collect()
}

/// Like [`typological_values`] but treating a degenerate table (or
/// compromise) as having zero cosine instead of failing; used by the
/// orchestrators so an all-zero sequence still yields a result.
fn typological_values_lenient(kt: &KTable, compromise: &Compromise) -> Vec<TypologicalValue> {
    let vc = varv(compromise.triplet());
    kt.tables()
        .iter()
        .zip(kt.block_names())
        .zip(compromise.alpha())
        .map(|((t, name), &weight)| {
            let vt = varv(t);
            let cos2 = if vt > 0.0 && vc > 0.0 {
                let r = covv(t, compromise.triplet()).unwrap_or(0.0) / (vt * vc).sqrt();
                r * r
            } else {
                0.0
            };
            TypologicalValue {
                table: name.clone(),
                weight,
                cos2,
                inertia: vt,
            }
        })
        .collect()
}

/// Partial triadic analysis: interstructure, compromise, intrastructure.
pub fn pta(kt: &KTable, options: PtaOptions) -> Result<PTAResult, AnalysisError> {
    if kt.k() < 2 {
        return Err(AnalysisError::NotEnoughTables {
            needed: 2,
            got: kt.k(),
        });
    }
    check_rows_aligned(kt)?;
    pta_unchecked(kt, options)
}

/// Same pipeline without the `k >= 2` requirement. With a single table the
/// interstructure is trivial (`alpha = [1]`) and the compromise is the table
/// itself; COSTATIS uses this to reduce gracefully to a plain co-inertia
/// analysis when a cube has one slice.
pub(crate) fn pta_single_ok(kt: &KTable, options: PtaOptions) -> Result<PTAResult, AnalysisError> {
    if kt.k() >= 2 {
        check_rows_aligned(kt)?;
    }
    pta_unchecked(kt, options)
}

fn pta_unchecked(kt: &KTable, options: PtaOptions) -> Result<PTAResult, AnalysisError> {
    let interstructure = if kt.k() == 1 {
        let v = varv(&kt.tables()[0]);
        Interstructure {
            matrix: Array2::from_elem((1, 1), v),
            alpha: vec![1.0],
            first_eigenvalue: v,
            mode: options.mode,
            block_names: kt.block_names().to_vec(),
            warnings: Vec::new(),
        }
    } else {
        interstructure_unchecked(kt, options.mode)?
    };
    let compromise = build_compromise(kt, interstructure.alpha(), options.n_axes)?;
    let rows = intrastructure_rows(kt, &compromise)?;
    let cols = intrastructure_cols(kt, &compromise)?;
    let typological = typological_values_lenient(kt, &compromise);
    Ok(PTAResult {
        interstructure,
        compromise,
        intrastructure_rows: rows,
        intrastructure_cols: cols,
        typological_values: typological,
    })
}
