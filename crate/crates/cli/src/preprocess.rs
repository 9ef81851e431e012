//! Apply preprocessing chains to stacked tables and split them into
//! aligned k-tables for the sequence methods.

use diadem::tabular::{
    split_blocks, BlockDescriptor, DataTable, GroupAssignment, KTable, Triplet,
};

use crate::config::{ScaleChain, ScaleStep};
use crate::error::CliError;

/// Apply a scale chain to a stacked table under uniform row weights.
/// Within-block steps center or standardize each block independently and
/// re-stack the result.
pub fn apply_chain(
    table: DataTable,
    chain: &ScaleChain,
    blocks: Option<&BlockDescriptor>,
) -> Result<Triplet, CliError> {
    let mut triplet = Triplet::plain(table);
    for step in &chain.0 {
        triplet = match step {
            ScaleStep::Log1p => {
                let transformed = triplet.table().log1p().map_err(CliError::InvalidInput)?;
                triplet.with_table(transformed).map_err(CliError::InvalidInput)?
            }
            ScaleStep::Center => triplet.centered(),
            ScaleStep::Scale => triplet
                .scaled_to_unit_variance(None)
                .map_err(CliError::Numeric)?,
            ScaleStep::Standardize => triplet.standardized().map_err(CliError::Numeric)?,
            ScaleStep::Within | ScaleStep::Partial => {
                let descriptor = blocks.ok_or_else(|| {
                    CliError::Config("within-block scaling needs a block file".into())
                })?;
                let kt = split_blocks(&triplet, descriptor).map_err(CliError::InvalidInput)?;
                let kt = match step {
                    ScaleStep::Within => kt.partial_centered(),
                    _ => kt.partial_standardized().map_err(CliError::Numeric)?,
                };
                kt.concatenated().map_err(CliError::Numeric)?
            }
        };
    }
    Ok(triplet)
}

/// Split a preprocessed stacked triplet into a k-table, relabeling the rows
/// of every block by their group label when a grouping is supplied so that
/// blocks align row-by-row (each block must then hold every group exactly
/// once, in the same order).
pub fn split_aligned(
    triplet: &Triplet,
    blocks: &BlockDescriptor,
    groups: Option<&GroupAssignment>,
) -> Result<KTable, CliError> {
    let kt = split_blocks(triplet, blocks).map_err(CliError::InvalidInput)?;
    let Some(g) = groups else {
        return Ok(kt);
    };
    if g.n_rows() != triplet.nrows() {
        return Err(CliError::Config(format!(
            "group file covers {} rows but the table has {}",
            g.n_rows(),
            triplet.nrows()
        )));
    }
    let mut relabeled = Vec::with_capacity(kt.k());
    let mut at = 0;
    let mut first_order: Option<Vec<usize>> = None;
    for (t, name) in kt.tables().iter().zip(kt.block_names()) {
        let idx: Vec<usize> = (at..at + t.nrows()).map(|i| g.group_of()[i]).collect();
        let mut seen = std::collections::HashSet::new();
        for &k in &idx {
            if !seen.insert(k) {
                return Err(CliError::Config(format!(
                    "block `{name}` holds group `{}` more than once; rows cannot be aligned",
                    g.group_labels()[k]
                )));
            }
        }
        if idx.len() != g.n_groups() {
            return Err(CliError::Config(format!(
                "block `{name}` has {} rows but there are {} groups",
                idx.len(),
                g.n_groups()
            )));
        }
        match &first_order {
            None => first_order = Some(idx.clone()),
            Some(order) if *order != idx => {
                return Err(CliError::Config(format!(
                    "block `{name}` lists groups in a different order than the first block"
                )));
            }
            _ => {}
        }
        let labels: Vec<String> = idx
            .iter()
            .map(|&k| g.group_labels()[k].clone())
            .collect();
        let table = t
            .table()
            .relabeled_rows(labels)
            .map_err(CliError::InvalidInput)?;
        relabeled.push(t.with_table(table).map_err(CliError::InvalidInput)?);
        at += t.nrows();
    }
    KTable::new(relabeled, kt.block_names().to_vec()).map_err(CliError::InvalidInput)
}
