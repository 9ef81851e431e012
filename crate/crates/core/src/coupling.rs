//! Between-group analysis and the three data-cube coupling orchestrators:
//! BGCOIA (co-inertia of two group-mean tables), STATICO (partial triadic
//! analysis of a sequence of cross tables) and COSTATIS (co-inertia of two
//! partial-triadic compromises).

use ndarray::{Array2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::coinertia::{self, CoInertiaResult, PermutationTestResult};
use crate::eigen::{self, Decomposition};
use crate::error::{AnalysisError, Warning};
use crate::ktable::{self, InterstructureMode, PTAResult, PtaOptions};
use crate::tabular::{self, GroupAssignment, KTable, PairedKTables, Triplet};

const CENTERING_WARN_TOL: f64 = 1e-8;

/// Result of a between-group analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct BGAResult {
    /// Analysis of the group-mean triplet.
    pub analysis: Decomposition,
    /// The group-mean triplet itself (rows = groups, weights `n_k/n`).
    pub mean_table: Triplet,
    /// Supplementary scores of the original rows on the group-mean axes.
    pub row_scores: Array2<f64>,
    /// Inertia of the group-mean triplet.
    pub between_inertia: f64,
    /// Inertia of the input triplet.
    pub total_inertia: f64,
    /// `between / total`; zero when the input has no inertia at all.
    pub ratio: f64,
    pub warnings: Vec<Warning>,
}

/// Between-group analysis: the generalized PCA of the table of group means,
/// with the original rows projected as supplementary elements.
pub fn bga(
    t: &Triplet,
    g: &GroupAssignment,
    n_axes: usize,
) -> Result<BGAResult, AnalysisError> {
    if g.n_groups() < 2 {
        return Err(AnalysisError::NotEnoughGroups { got: g.n_groups() });
    }
    let mut warnings = Vec::new();
    if tabular::max_abs_column_mean(t) > CENTERING_WARN_TOL * value_scale(t) {
        warnings.push(Warning::NotCentered {
            table: "x".to_string(),
        });
    }
    let mean_table = tabular::group_means(t, g)?;
    let analysis = eigen::gpca(&mean_table, n_axes)?;
    let row_scores = eigen::project_rows(&analysis, t)?;
    let between_inertia = mean_table.total_inertia();
    let total_inertia = t.total_inertia();
    let ratio = if total_inertia > 0.0 {
        between_inertia / total_inertia
    } else {
        0.0
    };
    Ok(BGAResult {
        analysis,
        mean_table,
        row_scores,
        between_inertia,
        total_inertia,
        ratio,
        warnings,
    })
}

fn value_scale(t: &Triplet) -> f64 {
    t.values().iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0)
}

/// Between/total inertia ratio for an arbitrary assignment vector.
fn between_total_ratio(t: &Triplet, g: &GroupAssignment) -> f64 {
    let mean = tabular::group_means(t, g).expect("valid grouping");
    let total = t.total_inertia();
    if total > 0.0 {
        mean.total_inertia() / total
    } else {
        0.0
    }
}

/// Permutation test of the between/total inertia ratio: group labels are
/// reshuffled across rows `n_perm` times. Deterministic given the seed and
/// independent of thread scheduling.
pub fn bga_permutation_test(
    t: &Triplet,
    g: &GroupAssignment,
    n_perm: usize,
    seed: u64,
) -> Result<PermutationTestResult, AnalysisError> {
    if g.n_groups() < 2 {
        return Err(AnalysisError::NotEnoughGroups { got: g.n_groups() });
    }
    if g.n_rows() != t.nrows() {
        return Err(AnalysisError::DimensionMismatch(format!(
            "group assignment covers {} rows for a table with {}",
            g.n_rows(),
            t.nrows()
        )));
    }
    if n_perm == 0 {
        return Err(AnalysisError::DimensionMismatch(
            "permutation test needs n_perm >= 1".into(),
        ));
    }
    let observed = between_total_ratio(t, g);
    let permuted: Vec<f64> = (0..n_perm)
        .into_par_iter()
        .map(|idx| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(idx as u64 + 1);
            let mut assignment = g.group_of().to_vec();
            assignment.shuffle(&mut rng);
            between_total_ratio(t, &g.with_assignment(assignment))
        })
        .collect();
    let n_perm = permuted.len();
    let count = permuted.iter().filter(|&&v| v >= observed).count();
    let p_value = (count + 1) as f64 / (n_perm + 1) as f64;
    Ok(PermutationTestResult {
        observed,
        permuted,
        p_value,
        seed,
        n_perm,
    })
}

/// Result of a between-group co-inertia analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct BGCOIAResult {
    /// Co-inertia analysis of the two group-mean triplets.
    pub coia: CoInertiaResult,
    /// Group-mean triplets fed to the co-inertia analysis.
    pub x_mean_table: Triplet,
    pub y_mean_table: Triplet,
    /// All original rows of each cube projected onto the co-inertia axes.
    pub x_row_scores: Array2<f64>,
    pub y_row_scores: Array2<f64>,
    /// Per-group barycenters (unweighted means) of the projected rows.
    pub x_barycenters: Array2<f64>,
    pub y_barycenters: Array2<f64>,
    pub group_labels: Vec<String>,
    pub row_labels: Vec<String>,
}

/// Between-group co-inertia analysis: co-inertia of the two tables of group
/// means, then supplementary projection of every original row of both
/// stacked cubes.
pub fn bgcoia(
    tx: &Triplet,
    ty: &Triplet,
    g: &GroupAssignment,
    n_axes: usize,
) -> Result<BGCOIAResult, AnalysisError> {
    if tx.table().row_labels() != ty.table().row_labels() {
        return Err(AnalysisError::RowMismatch(
            "the two stacked tables must share row labels".into(),
        ));
    }
    if g.n_rows() != tx.nrows() {
        return Err(AnalysisError::DimensionMismatch(format!(
            "group assignment covers {} rows for tables with {}",
            g.n_rows(),
            tx.nrows()
        )));
    }
    let x_mean = tabular::group_means(tx, g)?;
    let y_mean = tabular::group_means(ty, g)?;
    let coia = coinertia::coia(&x_mean, &y_mean, n_axes)?;
    let x_rows = coia.project_x_rows(tx)?;
    let y_rows = coia.project_y_rows(ty)?;
    let x_bary = group_barycenters(&x_rows, g);
    let y_bary = group_barycenters(&y_rows, g);
    Ok(BGCOIAResult {
        coia,
        x_mean_table: x_mean,
        y_mean_table: y_mean,
        x_row_scores: x_rows,
        y_row_scores: y_rows,
        x_barycenters: x_bary,
        y_barycenters: y_bary,
        group_labels: g.group_labels().to_vec(),
        row_labels: tx.table().row_labels().to_vec(),
    })
}

/// Unweighted per-group means of score rows.
fn group_barycenters(scores: &Array2<f64>, g: &GroupAssignment) -> Array2<f64> {
    let sizes = g.sizes();
    let mut out = Array2::zeros((g.n_groups(), scores.ncols()));
    for (i, row) in scores.axis_iter(Axis(0)).enumerate() {
        let k = g.group_of()[i];
        out.row_mut(k).scaled_add(1.0 / sizes[k] as f64, &row);
    }
    out
}

/// Result of the STATICO method.
#[derive(Debug, Clone, PartialEq)]
pub struct STATICOResult {
    /// Partial triadic analysis of the sequence of cross tables
    /// `Z_k = Y_k^T Dn_k X_k`. Its intrastructure columns are the per-date
    /// environmental variable scores and its intrastructure rows the
    /// per-date species scores.
    pub pta: PTAResult,
    /// The sequence of cross tables that was analyzed.
    pub cross_tables: KTable,
    /// Per-date site scores seen from the environmental side: `X_k Dp U`.
    pub site_scores_env: Vec<Array2<f64>>,
    /// Per-date site scores seen from the species side: `Y_k Dq B`.
    pub site_scores_spe: Vec<Array2<f64>>,
    /// Row labels of each date's sites (may differ across dates).
    pub site_labels: Vec<Vec<String>>,
    pub block_names: Vec<String>,
    pub env_labels: Vec<String>,
    pub spe_labels: Vec<String>,
}

/// STATICO: partial triadic analysis of the sequence of per-date cross
/// tables, plus supplementary site trajectories from both cubes.
pub fn statico(
    pair: &PairedKTables,
    options: PtaOptions,
) -> Result<STATICOResult, AnalysisError> {
    let k = pair.k();
    let mut crosses = Vec::with_capacity(k);
    for t in 0..k {
        let tx = &pair.env().tables()[t];
        let ty = &pair.spe().tables()[t];
        crosses.push(coinertia::cross_table(tx, ty).map_err(|e| match e {
            AnalysisError::RowMismatch(msg) => {
                AnalysisError::RowMismatch(format!("date {}: {msg}", t + 1))
            }
            other => other,
        })?);
    }
    let cross_kt = KTable::new(crosses, pair.env().block_names().to_vec())?;
    let pta = ktable::pta(&cross_kt, options)?;

    // Site trajectories: the compromise axes live in the environmental
    // variable space, the compromise components in the species space.
    let analysis = pta.compromise.analysis();
    let b = analysis.components(); // q x r, Dq-orthonormal
    let mut site_env = Vec::with_capacity(k);
    let mut site_spe = Vec::with_capacity(k);
    let mut site_labels = Vec::with_capacity(k);
    for t in 0..k {
        let tx = &pair.env().tables()[t];
        let ty = &pair.spe().tables()[t];
        site_env.push(eigen::project_rows(analysis, tx)?);
        let dq = ty.col_metric().diag();
        let mut yd = ty.values().to_owned();
        for (j, mut col) in yd.axis_iter_mut(Axis(1)).enumerate() {
            col *= dq[j];
        }
        site_spe.push(yd.dot(b));
        site_labels.push(ty.table().row_labels().to_vec());
    }

    Ok(STATICOResult {
        pta,
        site_scores_env: site_env,
        site_scores_spe: site_spe,
        site_labels,
        block_names: pair.env().block_names().to_vec(),
        env_labels: pair.env().col_labels().to_vec(),
        spe_labels: pair.spe().col_labels().to_vec(),
        cross_tables: cross_kt,
    })
}

/// Options for [`costatis`].
#[derive(Debug, Clone, Copy)]
pub struct CostatisOptions {
    pub n_axes: usize,
    pub mode: InterstructureMode,
    /// Number of permutations for the significance test; 0 skips the test.
    pub n_perm: usize,
    pub seed: u64,
}

impl Default for CostatisOptions {
    fn default() -> Self {
        Self {
            n_axes: 2,
            mode: InterstructureMode::Covariance,
            n_perm: 999,
            seed: 0,
        }
    }
}

/// Result of the COSTATIS method.
#[derive(Debug, Clone, PartialEq)]
pub struct COSTATISResult {
    pub env_pta: PTAResult,
    pub spe_pta: PTAResult,
    /// Co-inertia analysis of the two compromises.
    pub coia: CoInertiaResult,
    pub permutation: Option<PermutationTestResult>,
    /// Rows of every original table projected on the co-inertia axes.
    pub env_site_scores: Vec<Array2<f64>>,
    pub spe_site_scores: Vec<Array2<f64>>,
    /// Columns of every original table projected against the normalized
    /// co-inertia row scores of their own side.
    pub env_var_scores: Vec<Array2<f64>>,
    pub spe_var_scores: Vec<Array2<f64>>,
    /// Per-site barycenters of the projected rows across the sequence.
    pub env_barycenters: Array2<f64>,
    pub spe_barycenters: Array2<f64>,
    pub env_block_names: Vec<String>,
    pub spe_block_names: Vec<String>,
    pub site_labels: Vec<String>,
    pub env_labels: Vec<String>,
    pub spe_labels: Vec<String>,
}

/// COSTATIS: co-inertia analysis of the compromises of the two partial
/// triadic analyses, with every original table's rows and columns projected
/// as supplementary elements and an optional permutation test.
pub fn costatis(
    env: &KTable,
    spe: &KTable,
    options: CostatisOptions,
) -> Result<COSTATISResult, AnalysisError> {
    check_cube_rows(env, "environmental")?;
    check_cube_rows(spe, "species")?;
    let env_rows = env.tables()[0].table().row_labels();
    let spe_rows = spe.tables()[0].table().row_labels();
    if env_rows != spe_rows {
        return Err(AnalysisError::RowMismatch(
            "the two cubes must share their site labels".into(),
        ));
    }
    if env.tables()[0].row_weights() != spe.tables()[0].row_weights() {
        return Err(AnalysisError::RowMismatch(
            "the two cubes must share their site weights".into(),
        ));
    }

    let pta_opts = PtaOptions {
        n_axes: options.n_axes,
        mode: options.mode,
    };
    let env_pta = ktable::pta_single_ok(env, pta_opts)?;
    let spe_pta = ktable::pta_single_ok(spe, pta_opts)?;

    let xc = env_pta.compromise.triplet();
    let yc = spe_pta.compromise.triplet();
    let coia = coinertia::coia(xc, yc, options.n_axes)?;
    let permutation = if options.n_perm > 0 {
        Some(coinertia::coia_permutation_test(
            xc,
            yc,
            options.n_perm,
            options.seed,
        )?)
    } else {
        None
    };

    // Supplementary rows: sites of every original table on each side.
    let mut env_site_scores = Vec::with_capacity(env.k());
    for t in env.tables() {
        env_site_scores.push(coia.project_x_rows(t)?);
    }
    let mut spe_site_scores = Vec::with_capacity(spe.k());
    for t in spe.tables() {
        spe_site_scores.push(coia.project_y_rows(t)?);
    }

    // Supplementary columns: weighted covariances of each table's columns
    // with the unit-variance co-inertia scores of the same side.
    let w = xc.row_weights();
    let x_hat = normalized_scores(coia.x_scores(), w);
    let y_hat = normalized_scores(coia.y_scores(), w);
    let mut env_var_scores = Vec::with_capacity(env.k());
    for t in env.tables() {
        env_var_scores.push(weighted_cross(t.values(), &x_hat, w));
    }
    let mut spe_var_scores = Vec::with_capacity(spe.k());
    for t in spe.tables() {
        spe_var_scores.push(weighted_cross(t.values(), &y_hat, w));
    }

    let env_barycenters = sequence_barycenters(&env_site_scores);
    let spe_barycenters = sequence_barycenters(&spe_site_scores);

    Ok(COSTATISResult {
        env_pta,
        spe_pta,
        coia,
        permutation,
        env_site_scores,
        spe_site_scores,
        env_var_scores,
        spe_var_scores,
        env_barycenters,
        spe_barycenters,
        env_block_names: env.block_names().to_vec(),
        spe_block_names: spe.block_names().to_vec(),
        site_labels: env_rows.to_vec(),
        env_labels: env.col_labels().to_vec(),
        spe_labels: spe.col_labels().to_vec(),
    })
}

fn check_cube_rows(kt: &KTable, name: &str) -> Result<(), AnalysisError> {
    if !kt.rows_aligned() {
        return Err(AnalysisError::RowMismatch(format!(
            "all tables of the {name} cube must share row labels"
        )));
    }
    let first = kt.tables()[0].row_weights();
    if kt.tables().iter().any(|t| t.row_weights() != first) {
        return Err(AnalysisError::RowMismatch(format!(
            "all tables of the {name} cube must share row weights"
        )));
    }
    Ok(())
}

/// Scale each score column to unit weighted variance.
fn normalized_scores(scores: &Array2<f64>, w: &crate::tabular::RowWeights) -> Array2<f64> {
    let var = eigen::weighted_second_moment(scores, w);
    let mut out = scores.clone();
    for (ax, mut col) in out.axis_iter_mut(Axis(1)).enumerate() {
        let sd = var[ax].sqrt();
        if sd > 0.0 {
            col /= sd;
        }
    }
    out
}

/// `T^T Dn S` for a table `T` and scores `S` over the same rows.
fn weighted_cross(
    table: &Array2<f64>,
    scores: &Array2<f64>,
    w: &crate::tabular::RowWeights,
) -> Array2<f64> {
    let wd = w.diag();
    let mut tw = table.to_owned();
    for (i, mut row) in tw.axis_iter_mut(Axis(0)).enumerate() {
        row *= wd[i];
    }
    tw.t().dot(scores)
}

/// Unweighted mean of each site's points across the sequence of tables.
fn sequence_barycenters(scores: &[Array2<f64>]) -> Array2<f64> {
    let first = &scores[0];
    let mut out = Array2::zeros(first.dim());
    for s in scores {
        out += s;
    }
    out / scores.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tabular::{BlockDescriptor, DataTable};
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    fn plain(values: Array2<f64>) -> Triplet {
        Triplet::plain(DataTable::from_values(values).unwrap())
    }

    fn groups(assignment: Vec<usize>, g: usize) -> GroupAssignment {
        let labels = (1..=g).map(|i| format!("g{i}")).collect();
        GroupAssignment::new(assignment, labels).unwrap()
    }

    #[test]
    fn bga_singleton_groups_ratio_one() {
        let t = plain(array![[1.0, 2.0], [3.0, -1.0], [0.0, 4.0]]).centered();
        let g = groups(vec![0, 1, 2], 3);
        let r = bga(&t, &g, 2).unwrap();
        assert_abs_diff_eq!(r.ratio, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn bga_equal_group_means_ratio_zero() {
        // two groups, both with mean (2, 0) per column
        let t = plain(array![[1.0, -1.0], [3.0, 1.0], [2.0, 2.0], [2.0, -2.0]]).centered();
        let g = groups(vec![0, 0, 1, 1], 2);
        let r = bga(&t, &g, 2).unwrap();
        assert_abs_diff_eq!(r.ratio, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn bga_ratio_in_unit_interval_and_decomposition() {
        let t = plain(array![
            [1.0, 2.0, 0.0],
            [3.0, -1.0, 1.0],
            [0.0, 4.0, -1.0],
            [2.0, 2.0, 2.0],
            [-1.0, 0.0, 1.5],
            [1.5, 1.0, -0.5]
        ])
        .centered();
        let g = groups(vec![0, 0, 0, 1, 1, 1], 2);
        let r = bga(&t, &g, 2).unwrap();
        assert!(r.ratio >= 0.0 && r.ratio <= 1.0);
        assert!(r.between_inertia <= r.total_inertia + 1e-12);
    }

    #[test]
    fn bga_group_mean_of_row_scores_equals_group_score() {
        let t = plain(array![
            [1.0, 2.0],
            [3.0, -1.0],
            [0.0, 4.0],
            [2.0, 2.0],
            [-1.0, 0.0],
            [1.5, 1.0]
        ])
        .centered();
        let g = groups(vec![0, 0, 1, 1, 2, 2], 3);
        let r = bga(&t, &g, 2).unwrap();
        let bary = group_barycenters(&r.row_scores, &g);
        for (got, want) in bary.iter().zip(r.analysis.row_scores()) {
            assert_abs_diff_eq!(*got, *want, epsilon = 1e-10);
        }
    }

    #[test]
    fn bga_warns_on_uncentered_input() {
        let t = plain(array![[10.0, 2.0], [13.0, -1.0], [9.0, 2.0], [11.0, 1.0]]);
        let g = groups(vec![0, 0, 1, 1], 2);
        let r = bga(&t, &g, 2).unwrap();
        assert!(r
            .warnings
            .iter()
            .any(|w| matches!(w, Warning::NotCentered { .. })));
        assert!(bga(&t.centered(), &g, 2).unwrap().warnings.is_empty());
    }

    #[test]
    fn bga_rejects_single_group() {
        let t = plain(array![[1.0], [2.0]]);
        let g = groups(vec![0, 0], 1);
        assert!(matches!(
            bga(&t, &g, 1).unwrap_err(),
            AnalysisError::NotEnoughGroups { got: 1 }
        ));
    }

    #[test]
    fn bga_permutation_singletons_observed_one() {
        let t = plain(array![[1.0, 2.0], [3.0, -1.0], [0.0, 4.0]]).centered();
        let g = groups(vec![0, 1, 2], 3);
        let r = bga_permutation_test(&t, &g, 49, 3).unwrap();
        assert_abs_diff_eq!(r.observed, 1.0, epsilon = 1e-12);
        // every permutation of singleton labels also gives ratio 1
        assert_abs_diff_eq!(r.p_value, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn bga_permutation_deterministic() {
        let t = plain(array![
            [1.0, 2.0],
            [3.0, -1.0],
            [0.0, 4.0],
            [2.0, 2.0],
            [-1.0, 0.0],
            [1.5, 1.0]
        ])
        .centered();
        let g = groups(vec![0, 0, 0, 1, 1, 1], 2);
        let a = bga_permutation_test(&t, &g, 99, 5).unwrap();
        let b = bga_permutation_test(&t, &g, 99, 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bgcoia_reduces_to_coia_for_singleton_groups() {
        let x = plain(array![[1.0, 2.0], [3.0, -1.0], [-4.0, 2.0]]).centered();
        let g = groups(vec![0, 1, 2], 3);
        let r = bgcoia(&x, &x, &g, 2).unwrap();
        let direct = coinertia::coia(
            &tabular::group_means(&x, &g).unwrap(),
            &tabular::group_means(&x, &g).unwrap(),
            2,
        )
        .unwrap();
        assert_eq!(r.coia.eigenvalues(), direct.eigenvalues());
        // singleton groups: mean table is the table itself
        for (a, b) in r.x_mean_table.values().iter().zip(x.values()) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-14);
        }
    }

    #[test]
    fn bgcoia_group_mean_of_projected_rows_is_group_score() {
        let x = plain(array![
            [1.0, 2.0],
            [3.0, -1.0],
            [0.0, 4.0],
            [2.0, 2.0],
            [-1.0, 0.0],
            [1.5, 1.0]
        ])
        .centered();
        let y = plain(array![
            [0.5, 1.0, 0.0],
            [2.0, 0.0, 1.0],
            [1.0, 3.0, -1.0],
            [0.0, 1.0, 2.0],
            [1.0, -1.0, 0.5],
            [2.0, 1.0, 1.0]
        ])
        .centered();
        let g = groups(vec![0, 0, 1, 1, 2, 2], 3);
        let r = bgcoia(&x, &y, &g, 2).unwrap();
        let bary_x = group_barycenters(&r.x_row_scores, &g);
        for (got, want) in bary_x.iter().zip(r.coia.x_scores()) {
            assert_abs_diff_eq!(*got, *want, epsilon = 1e-10);
        }
        let bary_y = group_barycenters(&r.y_row_scores, &g);
        for (got, want) in bary_y.iter().zip(r.coia.y_scores()) {
            assert_abs_diff_eq!(*got, *want, epsilon = 1e-10);
        }
        // barycenters stored on the result are the same quantities
        assert_eq!(r.x_barycenters, bary_x);
        assert_eq!(r.y_barycenters, bary_y);
    }

    #[test]
    fn bgcoia_matches_hand_composition() {
        let x = plain(array![[1.0, 0.0], [0.0, 1.0], [2.0, 2.0], [4.0, 0.0]]).centered();
        let y = plain(array![[1.0, 1.0, 0.0], [0.0, 2.0, 1.0], [1.0, 0.0, 3.0], [2.0, 1.0, 1.0]])
            .centered();
        let g = groups(vec![0, 0, 1, 1], 2);
        let r = bgcoia(&x, &y, &g, 1).unwrap();
        let direct = coinertia::coia(
            &tabular::group_means(&x, &g).unwrap(),
            &tabular::group_means(&y, &g).unwrap(),
            1,
        )
        .unwrap();
        assert_eq!(r.coia.eigenvalues(), direct.eigenvalues());
        assert_eq!(r.coia.x_axes(), direct.x_axes());
    }

    fn paired_cubes() -> PairedKTables {
        // 8 rows stacked as 2 blocks of 4 sites
        let env = plain(array![
            [1.0, 2.0],
            [3.0, -1.0],
            [0.0, 4.0],
            [2.0, 2.0],
            [1.5, 1.8],
            [2.8, -0.6],
            [0.3, 3.6],
            [2.2, 1.9]
        ]);
        let spe = plain(array![
            [0.5, 1.0, 0.0],
            [2.0, 0.0, 1.0],
            [1.0, 3.0, -1.0],
            [0.0, 1.0, 2.0],
            [0.6, 1.1, 0.1],
            [1.9, 0.2, 0.9],
            [1.2, 2.7, -0.8],
            [0.1, 1.2, 1.8]
        ]);
        let blocks = BlockDescriptor::new(vec![("d1".into(), 4), ("d2".into(), 4)]).unwrap();
        let sites = ["s1", "s2", "s3", "s4"];
        let relabel = |kt: KTable| {
            let tables = kt
                .tables()
                .iter()
                .map(|t| {
                    t.with_table(
                        t.table()
                            .relabeled_rows(sites.iter().map(|s| s.to_string()).collect())
                            .unwrap(),
                    )
                    .unwrap()
                    .centered()
                })
                .collect();
            KTable::new(tables, kt.block_names().to_vec()).unwrap()
        };
        let env_kt = relabel(tabular::split_blocks(&env, &blocks).unwrap());
        let spe_kt = relabel(tabular::split_blocks(&spe, &blocks).unwrap());
        PairedKTables::new(env_kt, spe_kt).unwrap()
    }

    #[test]
    fn statico_identical_dates_scales_eigenvalues() {
        let pair = paired_cubes();
        // duplicate one date k times: compromise analysis eigenvalues scale by k
        let tx = pair.env().tables()[0].clone();
        let ty = pair.spe().tables()[0].clone();
        let env_kt = KTable::new(vec![tx.clone(), tx.clone()], vec!["a".into(), "b".into()])
            .unwrap();
        let spe_kt = KTable::new(vec![ty.clone(), ty.clone()], vec!["a".into(), "b".into()])
            .unwrap();
        let pair2 = PairedKTables::new(env_kt, spe_kt).unwrap();
        let r = statico(&pair2, PtaOptions::default()).unwrap();
        let single = eigen::gpca(&coinertia::cross_table(&tx, &ty).unwrap(), 2).unwrap();
        for (got, want) in r
            .pta
            .compromise
            .analysis()
            .eigenvalues()
            .iter()
            .zip(single.eigenvalues())
        {
            assert_abs_diff_eq!(*got, 2.0 * want, epsilon = 1e-10);
        }
    }

    #[test]
    fn statico_zero_cube_all_zero_eigenvalues() {
        let pair = paired_cubes();
        let zero_tables: Vec<Triplet> = pair
            .spe()
            .tables()
            .iter()
            .map(|t| {
                t.with_table(t.table().with_values(Array2::zeros((t.nrows(), t.ncols()))))
                    .unwrap()
            })
            .collect();
        let spe_zero = KTable::new(zero_tables, pair.spe().block_names().to_vec()).unwrap();
        let pair2 = PairedKTables::new(pair.env().clone(), spe_zero).unwrap();
        let r = statico(&pair2, PtaOptions::default()).unwrap();
        assert!(r
            .pta
            .compromise
            .analysis()
            .eigenvalues()
            .iter()
            .all(|&ev| ev == 0.0));
    }

    #[test]
    fn statico_compromise_is_gpca_of_weighted_cross_tables() {
        let pair = paired_cubes();
        let r = statico(&pair, PtaOptions::default()).unwrap();
        // rebuild the compromise cross table by hand
        let mut z = Array2::zeros((3, 2));
        for (a, t) in r
            .pta
            .interstructure
            .alpha()
            .iter()
            .zip(r.cross_tables.tables())
        {
            z.scaled_add(*a, t.values());
        }
        let zt = r.cross_tables.tables()[0]
            .with_table(r.cross_tables.tables()[0].table().with_values(z))
            .unwrap();
        let direct = eigen::gpca(&zt, 2).unwrap();
        assert_eq!(direct, *r.pta.compromise.analysis());
    }

    #[test]
    fn costatis_single_table_cubes_reduce_to_coia() {
        let pair = paired_cubes();
        let tx = pair.env().tables()[0].clone();
        let ty = pair.spe().tables()[0].clone();
        let env_kt = KTable::new(vec![tx.clone()], vec!["only".into()]).unwrap();
        let spe_kt = KTable::new(vec![ty.clone()], vec!["only".into()]).unwrap();
        let r = costatis(
            &env_kt,
            &spe_kt,
            CostatisOptions {
                n_perm: 0,
                ..Default::default()
            },
        )
        .unwrap();
        let direct = coinertia::coia(&tx, &ty, 2).unwrap();
        assert_eq!(r.coia.eigenvalues(), direct.eigenvalues());
        assert!(r.permutation.is_none());
    }

    #[test]
    fn costatis_coia_matches_compromises() {
        let pair = paired_cubes();
        let r = costatis(
            pair.env(),
            pair.spe(),
            CostatisOptions {
                n_perm: 49,
                seed: 9,
                ..Default::default()
            },
        )
        .unwrap();
        let direct = coinertia::coia(
            r.env_pta.compromise.triplet(),
            r.spe_pta.compromise.triplet(),
            2,
        )
        .unwrap();
        assert_eq!(r.coia.eigenvalues(), direct.eigenvalues());
        let test = r.permutation.as_ref().unwrap();
        assert_abs_diff_eq!(test.observed, r.coia.total_coinertia(), epsilon = 1e-12);
        assert_eq!(test.n_perm, 49);
    }

    #[test]
    fn costatis_barycenters_average_dates() {
        let pair = paired_cubes();
        let r = costatis(
            pair.env(),
            pair.spe(),
            CostatisOptions {
                n_perm: 0,
                ..Default::default()
            },
        )
        .unwrap();
        let k = r.env_site_scores.len() as f64;
        for i in 0..r.env_barycenters.nrows() {
            for ax in 0..r.env_barycenters.ncols() {
                let mean: f64 = r.env_site_scores.iter().map(|s| s[[i, ax]]).sum::<f64>() / k;
                assert_abs_diff_eq!(r.env_barycenters[[i, ax]], mean, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn costatis_rejects_mismatched_sites() {
        let pair = paired_cubes();
        let renamed: Vec<Triplet> = pair
            .spe()
            .tables()
            .iter()
            .map(|t| {
                let labels = (0..t.nrows()).map(|i| format!("other{i}")).collect();
                t.with_table(t.table().relabeled_rows(labels).unwrap()).unwrap()
            })
            .collect();
        let spe = KTable::new(renamed, pair.spe().block_names().to_vec()).unwrap();
        assert!(matches!(
            costatis(pair.env(), &spe, CostatisOptions::default()).unwrap_err(),
            AnalysisError::RowMismatch(_)
        ));
    }
}
