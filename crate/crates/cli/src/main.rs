use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use diadem_cli::config::{
    parse_interstructure, FileConfig, Method, RunConfig, ScaleChain,
};
use diadem_cli::error::CliError;
use diadem_cli::runner;

/// Duality-diagram analyses for paired ecological tables.
#[derive(Parser)]
#[command(name = "diadem", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an analysis and write a report, score matrices and factor maps.
    Analyze(AnalyzeArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// TOML file with defaults for the options below; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,

    /// pca | bga | coia | pta | bgcoia | statico | costatis
    #[arg(long)]
    method: Option<String>,

    /// First (or only) data table, CSV with row and column labels.
    #[arg(long)]
    table_x: Option<PathBuf>,

    /// Second data table for the two-table and cube methods.
    #[arg(long)]
    table_y: Option<PathBuf>,

    /// Group file `row_label,group_label` (bga, bgcoia, row alignment).
    #[arg(long)]
    groups: Option<PathBuf>,

    /// Block file `block_label,row_count` splitting table X into a sequence.
    #[arg(long)]
    blocks_x: Option<PathBuf>,

    /// Block file for table Y (defaults to --blocks-x).
    #[arg(long)]
    blocks_y: Option<PathBuf>,

    /// Preprocessing chain for table X, e.g. `standardize+within+scale`.
    #[arg(long)]
    scale_x: Option<String>,

    /// Preprocessing chain for table Y, e.g. `log1p+center+within`.
    #[arg(long)]
    scale_y: Option<String>,

    /// Number of axes to keep.
    #[arg(long)]
    axes: Option<usize>,

    /// Number of permutations for the significance test (0 = skip).
    #[arg(long)]
    nperm: Option<usize>,

    /// RNG seed; required whenever --nperm > 0.
    #[arg(long)]
    seed: Option<u64>,

    /// Output directory.
    #[arg(long)]
    out: PathBuf,

    /// Also write SVG factor maps.
    #[arg(long)]
    plots: bool,

    /// Interstructure similarity: cov | rv.
    #[arg(long)]
    interstructure: Option<String>,
}

fn build_config(args: AnalyzeArgs) -> Result<RunConfig, CliError> {
    let (file, base): (FileConfig, Option<PathBuf>) = match &args.config {
        Some(path) => (FileConfig::load(path)?, Some(path.clone())),
        None => (FileConfig::default(), None),
    };
    let resolve = |value: &str| -> PathBuf {
        match &base {
            Some(b) => FileConfig::resolve(b, value),
            None => PathBuf::from(value),
        }
    };
    let path_opt = |flag: Option<PathBuf>, file_value: &Option<String>| {
        flag.or_else(|| file_value.as_deref().map(resolve))
    };

    let method = args
        .method
        .or(file.method)
        .ok_or_else(|| CliError::Config("--method is required".into()))?
        .parse::<Method>()
        .map_err(CliError::Config)?;
    let table_x = path_opt(args.table_x, &file.table_x)
        .ok_or_else(|| CliError::Config("--table-x is required".into()))?;
    let scale = |flag: Option<String>, file_value: &Option<String>| -> Result<ScaleChain, CliError> {
        flag.or_else(|| file_value.clone())
            .map(|s| s.parse().map_err(CliError::Config))
            .unwrap_or(Ok(ScaleChain::default()))
    };
    let interstructure = args
        .interstructure
        .or(file.interstructure)
        .map(|s| parse_interstructure(&s).map_err(CliError::Config))
        .unwrap_or(Ok(diadem::ktable::InterstructureMode::Covariance))?;

    Ok(RunConfig {
        method,
        table_x,
        table_y: path_opt(args.table_y, &file.table_y),
        groups: path_opt(args.groups, &file.groups),
        blocks_x: path_opt(args.blocks_x, &file.blocks_x),
        blocks_y: path_opt(args.blocks_y, &file.blocks_y),
        scale_x: scale(args.scale_x, &file.scale_x)?,
        scale_y: scale(args.scale_y, &file.scale_y)?,
        axes: args.axes.or(file.axes).unwrap_or(2),
        n_perm: args.nperm.or(file.nperm).unwrap_or(0),
        seed: args.seed.or(file.seed),
        out: args.out,
        plots: args.plots,
        interstructure,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Command::Analyze(args) = cli.command;
    let config = match build_config(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match runner::execute(&config) {
        Ok(path) => {
            println!("report written to {}", path.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
