//! Analysis dispatch: load inputs, preprocess, run the requested method,
//! assemble the report and the optional factor maps, write everything to
//! the output directory.

use std::path::{Path, PathBuf};

use diadem::coinertia::{self, CoInertiaResult, PermutationTestResult};
use diadem::coupling::{self, CostatisOptions};
use diadem::eigen::{self, Decomposition};
use diadem::ktable::{PTAResult, PtaOptions};
use diadem::tabular::{BlockDescriptor, GroupAssignment, KTable, PairedKTables, Triplet};
use ndarray::Array2;

use crate::config::{Method, RunConfig};
use crate::dataset;
use crate::error::CliError;
use crate::preprocess;
use crate::report::{fmt_g, sha256_hex, AnalysisReport, TestSection};
use crate::svg::{emit_factor_map, FactorMapOptions, Panel, Star};

/// Everything a run produces, before touching the filesystem.
pub struct RunOutput {
    pub report: AnalysisReport,
    /// Extra files: (file name, content).
    pub files: Vec<(String, String)>,
}

/// Run the analysis and write `report.txt`, per-matrix CSV sidecars and any
/// plots into the configured output directory. Returns the report path.
pub fn execute(config: &RunConfig) -> Result<PathBuf, CliError> {
    let output = run(config)?;
    std::fs::create_dir_all(&config.out).map_err(|source| CliError::Io {
        path: config.out.display().to_string(),
        source,
    })?;
    let write = |name: &str, content: &str| -> Result<(), CliError> {
        let path = config.out.join(name);
        std::fs::write(&path, content).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })
    };
    write("config.txt", &config.canonical())?;
    write("report.txt", &output.report.serialize())?;
    for (name, cols, rows) in output.report.matrices() {
        let mut csv = String::from("row,");
        csv.push_str(&cols.join(","));
        csv.push('\n');
        for (label, values) in rows {
            let rendered: Vec<String> = values.iter().map(|v| fmt_g(*v)).collect();
            csv.push_str(&format!("{label},{}\n", rendered.join(",")));
        }
        write(&format!("{name}.csv"), &csv)?;
    }
    for (name, content) in &output.files {
        write(name, content)?;
    }
    Ok(config.out.join("report.txt"))
}

/// Run the analysis in memory.
pub fn run(config: &RunConfig) -> Result<RunOutput, CliError> {
    config.validate()?;

    let mut report = AnalysisReport::new(
        &config.method.to_string(),
        sha256_hex(config.canonical().as_bytes()),
    );
    let register = |path: &Path, report: &mut AnalysisReport| -> Result<(), CliError> {
        let name = path
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        report.inputs.push((name, crate::report::sha256_file(path)?));
        Ok(())
    };

    register(&config.table_x, &mut report)?;
    let table_x = dataset::load_table(&config.table_x)?;
    let table_y = match &config.table_y {
        Some(p) => {
            register(p, &mut report)?;
            Some(dataset::load_table(p)?)
        }
        None => None,
    };
    let groups = match &config.groups {
        Some(p) => {
            register(p, &mut report)?;
            Some(dataset::load_groups(p, table_x.row_labels())?)
        }
        None => None,
    };
    let blocks_x = match &config.blocks_x {
        Some(p) => {
            register(p, &mut report)?;
            Some(dataset::load_blocks(p)?)
        }
        None => None,
    };
    let blocks_y = match &config.blocks_y {
        Some(p) => {
            register(p, &mut report)?;
            Some(dataset::load_blocks(p)?)
        }
        None => blocks_x.clone(),
    };

    let tx = preprocess::apply_chain(table_x, &config.scale_x, blocks_x.as_ref())?;
    let ty = match table_y {
        Some(t) => Some(preprocess::apply_chain(t, &config.scale_y, blocks_y.as_ref())?),
        None => None,
    };

    let mut files = Vec::new();
    match config.method {
        Method::Pca => run_pca(config, &tx, &mut report, &mut files)?,
        Method::Bga => run_bga(config, &tx, groups.as_ref().unwrap(), &mut report, &mut files)?,
        Method::Coia => run_coia(config, &tx, ty.as_ref().unwrap(), &mut report, &mut files)?,
        Method::Pta => run_pta(
            config,
            &tx,
            blocks_x.as_ref().unwrap(),
            groups.as_ref(),
            &mut report,
            &mut files,
        )?,
        Method::Bgcoia => run_bgcoia(
            config,
            &tx,
            ty.as_ref().unwrap(),
            groups.as_ref().unwrap(),
            &mut report,
            &mut files,
        )?,
        Method::Statico => run_statico(
            config,
            &tx,
            ty.as_ref().unwrap(),
            blocks_x.as_ref().unwrap(),
            blocks_y.as_ref().unwrap(),
            groups.as_ref(),
            &mut report,
            &mut files,
        )?,
        Method::Costatis => run_costatis(
            config,
            &tx,
            ty.as_ref().unwrap(),
            blocks_x.as_ref().unwrap(),
            blocks_y.as_ref().unwrap(),
            groups.as_ref(),
            &mut report,
            &mut files,
        )?,
    }

    Ok(RunOutput { report, files })
}

fn axis_cols(r: usize) -> Vec<String> {
    (1..=r).map(|i| format!("Axis{i}")).collect()
}

fn matrix_rows(labels: &[String], m: &Array2<f64>) -> Vec<(String, Vec<f64>)> {
    labels
        .iter()
        .zip(m.rows())
        .map(|(l, row)| (l.clone(), row.to_vec()))
        .collect()
}

fn eigenvalue_entries(values: &[f64]) -> Vec<(String, f64)> {
    values
        .iter()
        .enumerate()
        .map(|(i, v)| (format!("axis_{}", i + 1), *v))
        .collect()
}

fn push_decomposition(report: &mut AnalysisReport, prefix: &str, d: &Decomposition) {
    report.push_vector(
        &format!("{prefix}eigenvalues"),
        eigenvalue_entries(d.eigenvalues()),
    );
    let cols = axis_cols(d.n_axes());
    report.push_matrix(
        &format!("{prefix}axes"),
        cols.clone(),
        matrix_rows(d.col_labels(), d.axes()),
    );
    report.push_matrix(
        &format!("{prefix}row_scores"),
        cols,
        matrix_rows(d.row_labels(), d.row_scores()),
    );
}

fn push_permutation(report: &mut AnalysisReport, name: &str, t: &PermutationTestResult) {
    report.push_test(TestSection {
        name: name.to_string(),
        observed: t.observed,
        p_value: t.p_value,
        n_perm: t.n_perm,
        seed: t.seed,
        permuted: t.permuted.clone(),
    });
}

fn points_of(m: &Array2<f64>) -> Vec<(f64, f64)> {
    m.rows().into_iter().map(|r| (r[0], r[1])).collect()
}

fn plottable(m: &Array2<f64>) -> bool {
    m.ncols() >= 2 && m.nrows() >= 1
}

fn push_plot(
    files: &mut Vec<(String, String)>,
    name: &str,
    m: &Array2<f64>,
    labels: &[String],
    opts: FactorMapOptions,
) -> Result<(), CliError> {
    if !plottable(m) {
        return Ok(());
    }
    let svg = emit_factor_map(&points_of(m), labels, &opts)?;
    files.push((format!("{name}.svg"), svg));
    Ok(())
}

fn warn_all(report: &mut AnalysisReport, warnings: &[diadem::Warning]) {
    for w in warnings {
        report.warnings.push(w.to_string());
    }
}

fn run_pca(
    config: &RunConfig,
    t: &Triplet,
    report: &mut AnalysisReport,
    files: &mut Vec<(String, String)>,
) -> Result<(), CliError> {
    let d = eigen::gpca(t, config.axes).map_err(CliError::Numeric)?;
    report.push_scalar("total_inertia", t.total_inertia());
    report.push_scalar("rank", d.rank() as f64);
    push_decomposition(report, "", &d);
    report.push_matrix(
        "components",
        axis_cols(d.n_axes()),
        matrix_rows(d.row_labels(), d.components()),
    );
    if config.plots {
        push_plot(
            files,
            "rows",
            d.row_scores(),
            d.row_labels(),
            FactorMapOptions { title: "row scores".into(), ..Default::default() },
        )?;
        push_plot(
            files,
            "variables",
            d.axes(),
            d.col_labels(),
            FactorMapOptions { title: "variable loadings".into(), arrows: true, ..Default::default() },
        )?;
    }
    Ok(())
}

fn run_bga(
    config: &RunConfig,
    t: &Triplet,
    groups: &GroupAssignment,
    report: &mut AnalysisReport,
    files: &mut Vec<(String, String)>,
) -> Result<(), CliError> {
    let r = coupling::bga(t, groups, config.axes).map_err(CliError::Numeric)?;
    warn_all(report, &r.warnings);
    report.push_scalar("between_inertia", r.between_inertia);
    report.push_scalar("total_inertia", r.total_inertia);
    report.push_scalar("between_total_ratio", r.ratio);
    push_decomposition(report, "", &r.analysis);
    report.push_matrix(
        "supplementary_row_scores",
        axis_cols(r.analysis.n_axes()),
        matrix_rows(t.table().row_labels(), &r.row_scores),
    );
    if config.n_perm > 0 {
        let test = coupling::bga_permutation_test(
            t,
            groups,
            config.n_perm,
            config.seed.expect("validated"),
        )
        .map_err(CliError::Numeric)?;
        push_permutation(report, "between_group_permutation", &test);
    }
    if config.plots && plottable(&r.row_scores) {
        let stars = group_stars(&r.row_scores, r.analysis.row_scores(), groups, 0);
        push_plot(
            files,
            "rows",
            &r.row_scores,
            t.table().row_labels(),
            FactorMapOptions { title: "rows with group stars".into(), stars, ..Default::default() },
        )?;
    }
    Ok(())
}

/// One star per group: members are row indices (plus `offset`), the center
/// is that group's row in `centers`.
fn group_stars(
    scores: &Array2<f64>,
    centers: &Array2<f64>,
    groups: &GroupAssignment,
    offset: usize,
) -> Vec<Star> {
    (0..groups.n_groups())
        .map(|k| Star {
            label: groups.group_labels()[k].clone(),
            center: (centers[[k, 0]], centers[[k, 1]]),
            members: (0..scores.nrows())
                .filter(|&i| groups.group_of()[i] == k)
                .map(|i| i + offset)
                .collect(),
        })
        .collect()
}

fn push_coia_sections(report: &mut AnalysisReport, co: &CoInertiaResult, prefix: &str) {
    report.push_scalar(&format!("{prefix}total_coinertia"), co.total_coinertia());
    report.push_scalar(&format!("{prefix}rv"), co.rv());
    report.push_vector(
        &format!("{prefix}eigenvalues"),
        eigenvalue_entries(co.eigenvalues()),
    );
    let per_axis = |f: &dyn Fn(&diadem::coinertia::AxisStats) -> f64| {
        co.axis_stats()
            .iter()
            .enumerate()
            .map(|(i, s)| (format!("axis_{}", i + 1), f(s)))
            .collect::<Vec<_>>()
    };
    report.push_vector(&format!("{prefix}axis_covariance"), per_axis(&|s| s.covariance));
    report.push_vector(&format!("{prefix}axis_correlation"), per_axis(&|s| s.correlation));
    report.push_vector(&format!("{prefix}axis_x_variance"), per_axis(&|s| s.x_variance));
    report.push_vector(&format!("{prefix}axis_y_variance"), per_axis(&|s| s.y_variance));
    let cols = axis_cols(co.n_axes());
    report.push_matrix(
        &format!("{prefix}x_axes"),
        cols.clone(),
        matrix_rows(co.x_col_labels(), co.x_axes()),
    );
    report.push_matrix(
        &format!("{prefix}y_axes"),
        cols.clone(),
        matrix_rows(co.y_col_labels(), co.y_axes()),
    );
    report.push_matrix(
        &format!("{prefix}x_scores"),
        cols.clone(),
        matrix_rows(co.row_labels(), co.x_scores()),
    );
    report.push_matrix(
        &format!("{prefix}y_scores"),
        cols,
        matrix_rows(co.row_labels(), co.y_scores()),
    );
}

fn run_coia(
    config: &RunConfig,
    tx: &Triplet,
    ty: &Triplet,
    report: &mut AnalysisReport,
    files: &mut Vec<(String, String)>,
) -> Result<(), CliError> {
    let co = coinertia::coia(tx, ty, config.axes).map_err(CliError::Numeric)?;
    warn_all(report, co.warnings());
    push_coia_sections(report, &co, "");
    if config.n_perm > 0 {
        let test = coinertia::coia_permutation_test(
            tx,
            ty,
            config.n_perm,
            config.seed.expect("validated"),
        )
        .map_err(CliError::Numeric)?;
        push_permutation(report, "coinertia_permutation", &test);
    }
    if config.plots {
        push_plot(
            files,
            "x_variables",
            co.x_axes(),
            tx.table().col_labels(),
            FactorMapOptions { title: "x variable coefficients".into(), arrows: true, ..Default::default() },
        )?;
        push_plot(
            files,
            "y_variables",
            co.y_axes(),
            ty.table().col_labels(),
            FactorMapOptions { title: "y variable coefficients".into(), arrows: true, ..Default::default() },
        )?;
        push_plot(
            files,
            "x_rows",
            co.x_scores(),
            tx.table().row_labels(),
            FactorMapOptions { title: "row scores (x)".into(), ..Default::default() },
        )?;
        push_plot(
            files,
            "y_rows",
            co.y_scores(),
            ty.table().row_labels(),
            FactorMapOptions { title: "row scores (y)".into(), ..Default::default() },
        )?;
    }
    Ok(())
}

fn push_pta_sections(
    report: &mut AnalysisReport,
    r: &PTAResult,
    kt: &KTable,
    prefix: &str,
) {
    let blocks = r.interstructure.block_names().to_vec();
    report.push_matrix(
        &format!("{prefix}interstructure"),
        blocks.clone(),
        matrix_rows(&blocks, r.interstructure.matrix()),
    );
    report.push_vector(
        &format!("{prefix}alpha"),
        blocks
            .iter()
            .cloned()
            .zip(r.interstructure.alpha().iter().copied())
            .collect(),
    );
    report.push_scalar(
        &format!("{prefix}interstructure_eigenvalue"),
        r.interstructure.first_eigenvalue(),
    );
    push_decomposition(
        report,
        &format!("{prefix}compromise_"),
        r.compromise.analysis(),
    );
    report.push_matrix(
        &format!("{prefix}typological_values"),
        vec!["weight".into(), "cos2".into(), "inertia".into()],
        r.typological_values
            .iter()
            .map(|tv| (tv.table.clone(), vec![tv.weight, tv.cos2, tv.inertia]))
            .collect(),
    );
    let cols = axis_cols(r.compromise.analysis().n_axes());
    for ((block, rows), cols_m) in blocks
        .iter()
        .zip(&r.intrastructure_rows)
        .zip(&r.intrastructure_cols)
    {
        let row_labels = kt
            .tables()
            .iter()
            .zip(kt.block_names())
            .find(|(_, name)| *name == block)
            .map(|(t, _)| t.table().row_labels().to_vec())
            .unwrap_or_default();
        report.push_matrix(
            &format!("{prefix}row_scores_{block}"),
            cols.clone(),
            matrix_rows(&row_labels, rows),
        );
        report.push_matrix(
            &format!("{prefix}col_scores_{block}"),
            cols.clone(),
            matrix_rows(kt.col_labels(), cols_m),
        );
    }
    warn_all(report, r.interstructure.warnings());
}

#[allow(clippy::too_many_arguments)]
fn run_pta(
    config: &RunConfig,
    t: &Triplet,
    blocks: &BlockDescriptor,
    groups: Option<&GroupAssignment>,
    report: &mut AnalysisReport,
    files: &mut Vec<(String, String)>,
) -> Result<(), CliError> {
    let kt = preprocess::split_aligned(t, blocks, groups)?;
    let r = diadem::ktable::pta(
        &kt,
        PtaOptions {
            n_axes: config.axes,
            mode: config.interstructure,
        },
    )
    .map_err(CliError::Numeric)?;
    push_pta_sections(report, &r, &kt, "");
    if config.plots {
        let d = r.compromise.analysis();
        push_plot(
            files,
            "compromise_rows",
            d.row_scores(),
            d.row_labels(),
            FactorMapOptions { title: "compromise row scores".into(), ..Default::default() },
        )?;
        push_plot(
            files,
            "compromise_variables",
            d.axes(),
            d.col_labels(),
            FactorMapOptions { title: "compromise variable loadings".into(), arrows: true, ..Default::default() },
        )?;
        emit_panel_plot(files, "intrastructure_rows", &r.intrastructure_rows, &kt, true)?;
        emit_panel_plot(files, "intrastructure_cols", &r.intrastructure_cols, &kt, false)?;
    }
    Ok(())
}

/// Stack per-block score matrices into one faceted map, one panel per block.
fn emit_panel_plot(
    files: &mut Vec<(String, String)>,
    name: &str,
    per_block: &[Array2<f64>],
    kt: &KTable,
    rows_side: bool,
) -> Result<(), CliError> {
    if per_block.iter().any(|m| !plottable(m)) {
        return Ok(());
    }
    let mut points = Vec::new();
    let mut labels = Vec::new();
    let mut panels = Vec::new();
    for ((m, t), block) in per_block.iter().zip(kt.tables()).zip(kt.block_names()) {
        let start = points.len();
        points.extend(points_of(m));
        if rows_side {
            labels.extend(t.table().row_labels().iter().cloned());
        } else {
            labels.extend(kt.col_labels().iter().cloned());
        }
        panels.push(Panel {
            name: block.clone(),
            indices: (start..points.len()).collect(),
        });
    }
    let svg = emit_factor_map(
        &points,
        &labels,
        &FactorMapOptions {
            title: name.into(),
            panels,
            arrows: !rows_side,
            ..Default::default()
        },
    )?;
    files.push((format!("{name}.svg"), svg));
    Ok(())
}

fn run_bgcoia(
    config: &RunConfig,
    tx: &Triplet,
    ty: &Triplet,
    groups: &GroupAssignment,
    report: &mut AnalysisReport,
    files: &mut Vec<(String, String)>,
) -> Result<(), CliError> {
    let r = coupling::bgcoia(tx, ty, groups, config.axes).map_err(CliError::Numeric)?;
    warn_all(report, r.coia.warnings());
    push_coia_sections(report, &r.coia, "");
    let cols = axis_cols(r.coia.n_axes());
    report.push_matrix(
        "x_row_scores",
        cols.clone(),
        matrix_rows(&r.row_labels, &r.x_row_scores),
    );
    report.push_matrix(
        "y_row_scores",
        cols.clone(),
        matrix_rows(&r.row_labels, &r.y_row_scores),
    );
    report.push_matrix(
        "x_barycenters",
        cols.clone(),
        matrix_rows(&r.group_labels, &r.x_barycenters),
    );
    report.push_matrix(
        "y_barycenters",
        cols,
        matrix_rows(&r.group_labels, &r.y_barycenters),
    );
    if config.plots {
        // crossed-table row map (the y-side variables)
        push_plot(
            files,
            "crossed_rows",
            r.coia.crossed().row_scores(),
            r.coia.crossed().row_labels(),
            FactorMapOptions { title: "cross table rows".into(), ..Default::default() },
        )?;
        push_plot(
            files,
            "x_variables",
            r.coia.x_axes(),
            tx.table().col_labels(),
            FactorMapOptions { title: "x variable coefficients".into(), arrows: true, ..Default::default() },
        )?;
        // the site map: both cubes' rows with barycenter stars
        if plottable(&r.x_row_scores) && plottable(&r.y_row_scores) {
            let n = r.x_row_scores.nrows();
            let mut points = points_of(&r.x_row_scores);
            points.extend(points_of(&r.y_row_scores));
            let mut labels = r.row_labels.clone();
            labels.extend(r.row_labels.iter().cloned());
            let mut open = vec![true; n];
            open.extend(vec![false; n]);
            let mut stars = group_stars(&r.x_row_scores, &r.x_barycenters, groups, 0);
            stars.extend(group_stars(&r.y_row_scores, &r.y_barycenters, groups, n));
            let svg = emit_factor_map(
                &points,
                &labels,
                &FactorMapOptions {
                    title: "sites from both cubes".into(),
                    stars,
                    open_markers: open,
                    ..Default::default()
                },
            )?;
            files.push(("sites.svg".into(), svg));
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_statico(
    config: &RunConfig,
    tx: &Triplet,
    ty: &Triplet,
    blocks_x: &BlockDescriptor,
    blocks_y: &BlockDescriptor,
    groups: Option<&GroupAssignment>,
    report: &mut AnalysisReport,
    files: &mut Vec<(String, String)>,
) -> Result<(), CliError> {
    let env_kt = preprocess::split_aligned(tx, blocks_x, groups)?;
    let spe_kt = preprocess::split_aligned(ty, blocks_y, groups)?;
    let pair = PairedKTables::new(env_kt, spe_kt).map_err(CliError::InvalidInput)?;
    let r = coupling::statico(
        &pair,
        PtaOptions {
            n_axes: config.axes,
            mode: config.interstructure,
        },
    )
    .map_err(CliError::Numeric)?;
    push_pta_sections(report, &r.pta, &r.cross_tables, "");
    let cols = axis_cols(r.pta.compromise.analysis().n_axes());
    for (i, block) in r.block_names.iter().enumerate() {
        report.push_matrix(
            &format!("site_scores_env_{block}"),
            cols.clone(),
            matrix_rows(&r.site_labels[i], &r.site_scores_env[i]),
        );
        report.push_matrix(
            &format!("site_scores_spe_{block}"),
            cols.clone(),
            matrix_rows(&r.site_labels[i], &r.site_scores_spe[i]),
        );
    }
    if config.plots {
        let d = r.pta.compromise.analysis();
        push_plot(
            files,
            "compromise_variables",
            d.axes(),
            d.col_labels(),
            FactorMapOptions { title: "compromise environmental variables".into(), arrows: true, ..Default::default() },
        )?;
        push_plot(
            files,
            "compromise_species",
            d.row_scores(),
            d.row_labels(),
            FactorMapOptions { title: "compromise species scores".into(), ..Default::default() },
        )?;
        emit_panel_plot(files, "variables_by_date", &r.pta.intrastructure_cols, &r.cross_tables, false)?;
        emit_panel_plot(files, "species_by_date", &r.pta.intrastructure_rows, &r.cross_tables, true)?;
        emit_site_trajectories(files, "sites_env", &r.site_scores_env, &r.site_labels, &r.block_names)?;
        emit_site_trajectories(files, "sites_spe", &r.site_scores_spe, &r.site_labels, &r.block_names)?;
    }
    Ok(())
}

fn emit_site_trajectories(
    files: &mut Vec<(String, String)>,
    name: &str,
    per_date: &[Array2<f64>],
    site_labels: &[Vec<String>],
    block_names: &[String],
) -> Result<(), CliError> {
    if per_date.iter().any(|m| !plottable(m)) {
        return Ok(());
    }
    let mut points = Vec::new();
    let mut labels = Vec::new();
    let mut panels = Vec::new();
    for ((m, ls), block) in per_date.iter().zip(site_labels).zip(block_names) {
        let start = points.len();
        points.extend(points_of(m));
        labels.extend(ls.iter().cloned());
        panels.push(Panel {
            name: block.clone(),
            indices: (start..points.len()).collect(),
        });
    }
    let svg = emit_factor_map(
        &points,
        &labels,
        &FactorMapOptions {
            title: name.into(),
            panels,
            ..Default::default()
        },
    )?;
    files.push((format!("{name}.svg"), svg));
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_costatis(
    config: &RunConfig,
    tx: &Triplet,
    ty: &Triplet,
    blocks_x: &BlockDescriptor,
    blocks_y: &BlockDescriptor,
    groups: Option<&GroupAssignment>,
    report: &mut AnalysisReport,
    files: &mut Vec<(String, String)>,
) -> Result<(), CliError> {
    let env_kt = preprocess::split_aligned(tx, blocks_x, groups)?;
    let spe_kt = preprocess::split_aligned(ty, blocks_y, groups)?;
    let r = coupling::costatis(
        &env_kt,
        &spe_kt,
        CostatisOptions {
            n_axes: config.axes,
            mode: config.interstructure,
            n_perm: config.n_perm,
            seed: config.seed.unwrap_or(0),
        },
    )
    .map_err(CliError::Numeric)?;
    warn_all(report, r.coia.warnings());
    report.push_vector(
        "alpha_env",
        r.env_block_names
            .iter()
            .cloned()
            .zip(r.env_pta.interstructure.alpha().iter().copied())
            .collect(),
    );
    report.push_vector(
        "alpha_spe",
        r.spe_block_names
            .iter()
            .cloned()
            .zip(r.spe_pta.interstructure.alpha().iter().copied())
            .collect(),
    );
    report.push_vector(
        "env_compromise_eigenvalues",
        eigenvalue_entries(r.env_pta.compromise.analysis().eigenvalues()),
    );
    report.push_vector(
        "spe_compromise_eigenvalues",
        eigenvalue_entries(r.spe_pta.compromise.analysis().eigenvalues()),
    );
    push_coia_sections(report, &r.coia, "");
    let cols = axis_cols(r.coia.n_axes());
    for (i, block) in r.env_block_names.iter().enumerate() {
        report.push_matrix(
            &format!("site_scores_env_{block}"),
            cols.clone(),
            matrix_rows(&r.site_labels, &r.env_site_scores[i]),
        );
        report.push_matrix(
            &format!("var_scores_env_{block}"),
            cols.clone(),
            matrix_rows(&r.env_labels, &r.env_var_scores[i]),
        );
    }
    for (i, block) in r.spe_block_names.iter().enumerate() {
        report.push_matrix(
            &format!("site_scores_spe_{block}"),
            cols.clone(),
            matrix_rows(&r.site_labels, &r.spe_site_scores[i]),
        );
        report.push_matrix(
            &format!("var_scores_spe_{block}"),
            cols.clone(),
            matrix_rows(&r.spe_labels, &r.spe_var_scores[i]),
        );
    }
    report.push_matrix(
        "env_barycenters",
        cols.clone(),
        matrix_rows(&r.site_labels, &r.env_barycenters),
    );
    report.push_matrix(
        "spe_barycenters",
        cols,
        matrix_rows(&r.site_labels, &r.spe_barycenters),
    );
    if let Some(test) = &r.permutation {
        push_permutation(report, "coinertia_permutation", test);
    }
    if config.plots {
        push_plot(
            files,
            "env_variables",
            r.coia.x_axes(),
            &r.env_labels,
            FactorMapOptions { title: "environmental variable coefficients".into(), arrows: true, ..Default::default() },
        )?;
        push_plot(
            files,
            "spe_variables",
            r.coia.y_axes(),
            &r.spe_labels,
            FactorMapOptions { title: "species coefficients".into(), arrows: true, ..Default::default() },
        )?;
        emit_costatis_stars(files, "sites_env", &r.env_site_scores, &r.env_barycenters, &r.site_labels)?;
        emit_costatis_stars(files, "sites_spe", &r.spe_site_scores, &r.spe_barycenters, &r.site_labels)?;
    }
    Ok(())
}

/// All dates of every site, with a star to the site's barycenter.
fn emit_costatis_stars(
    files: &mut Vec<(String, String)>,
    name: &str,
    per_date: &[Array2<f64>],
    barycenters: &Array2<f64>,
    site_labels: &[String],
) -> Result<(), CliError> {
    if per_date.iter().any(|m| !plottable(m)) || !plottable(barycenters) {
        return Ok(());
    }
    let n = site_labels.len();
    let mut points = Vec::new();
    let mut labels = Vec::new();
    for m in per_date {
        points.extend(points_of(m));
        labels.extend(site_labels.iter().cloned());
    }
    let stars: Vec<Star> = (0..n)
        .map(|site| Star {
            label: site_labels[site].clone(),
            center: (barycenters[[site, 0]], barycenters[[site, 1]]),
            members: (0..per_date.len()).map(|k| k * n + site).collect(),
        })
        .collect();
    let svg = emit_factor_map(
        &points,
        &labels,
        &FactorMapOptions {
            title: name.into(),
            stars,
            ..Default::default()
        },
    )?;
    files.push((format!("{name}.svg"), svg));
    Ok(())
}
