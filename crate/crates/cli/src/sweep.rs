use std::path::PathBuf;

use clap::Args;
use critdisc::edges::{threshold_sweep, write_sweep_csv, DEFAULT_SWEEP};

use crate::config::{ConfigFile, Grid, Resolver};
use crate::error::CliError;
use crate::inputs::{load_inputs, InputArgs};
use crate::output::OutDir;

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub inputs: InputArgs,
    /// Comma-separated surprise thresholds.
    #[arg(long, allow_negative_numbers = true)]
    pub thresholds: Option<Grid>,
    /// `key = value` config file; flags override its entries.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

pub fn run(args: &SweepArgs) -> Result<(), CliError> {
    let file = ConfigFile::load(args.config.as_deref())?;
    let mut r = Resolver::new(&file, "sweep");
    let inputs = load_inputs(&args.inputs, &mut r)?;
    let grid = r.value("thresholds", args.thresholds.clone(), Grid(DEFAULT_SWEEP.to_vec()))?;
    let out_dir = r.output("out", args.out.clone())?;
    let meta = r.finish()?;
    let sweep = threshold_sweep(&inputs.series, &inputs.embeddings, &grid.0)?;
    OutDir::create(&out_dir)?.write("sweep.csv", |w| write_sweep_csv(w, &sweep, &meta))?;
    Ok(())
}
