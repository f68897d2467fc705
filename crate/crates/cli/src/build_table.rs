//! Building and persisting beta-value interpolation tables.

use crate::manifest::RunManifest;
use crate::Outcome;
use clap::Args as ClapArgs;
use mib_core::betatable::{
    build_table, generate_n_list, generate_normalized_kl_list, DEFAULT_EXACT_CUTOFF,
};
use mib_core::mcint::{
    McParams, DEFAULT_CONFIDENCE, DEFAULT_MAX_ITERATIONS, DEFAULT_PRECISION_PERCENT,
    DEFAULT_RECORD_FREQ, DEFAULT_STOP_CHECK_FREQ,
};
use mib_core::{sig17, Error, Result};
use std::path::PathBuf;

/// Arguments of the `build-table` command.
#[derive(Debug, ClapArgs)]
pub struct Args {
    /// Mutual information of the reference distribution, in nats
    #[arg(long)]
    pub eta: f64,
    /// Largest sample size kept from the standard tabulation grid
    #[arg(long = "n-max", default_value_t = 10_000)]
    pub n_max: u64,
    /// Largest size filled by exact enumeration instead of Monte Carlo
    #[arg(long = "exact-cutoff", default_value_t = DEFAULT_EXACT_CUTOFF)]
    pub exact_cutoff: u64,
    /// Base seed of the Monte Carlo cells
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Iteration cap of each Monte Carlo cell
    #[arg(long = "max-iterations", default_value_t = DEFAULT_MAX_ITERATIONS)]
    pub max_iterations: u64,
    /// Requested relative precision of Monte Carlo cells, in percent
    #[arg(long = "precision-percent", default_value_t = DEFAULT_PRECISION_PERCENT)]
    pub precision_percent: f64,
    /// Confidence level backing the precision request
    #[arg(long, default_value_t = DEFAULT_CONFIDENCE)]
    pub confidence: f64,
    /// Output table path
    #[arg(long)]
    pub out: PathBuf,
}

/// Builds the table on the standard grids and saves it; per-cell warnings
/// (non-converged or vanished Monte Carlo estimates) go to stderr.
pub fn run(args: &Args) -> Result<Outcome> {
    let n_grid: Vec<u64> = generate_n_list().into_iter().filter(|&n| n <= args.n_max).collect();
    if n_grid.is_empty() {
        return Err(Error::domain(format!(
            "the standard grid has no sizes at or below {}",
            args.n_max
        )));
    }
    let ticks = generate_normalized_kl_list(0.1, 2.0, 4)?;
    let mc = McParams {
        max_iterations: args.max_iterations,
        record_freq: DEFAULT_RECORD_FREQ,
        stop_check_freq: DEFAULT_STOP_CHECK_FREQ,
        precision_percent: args.precision_percent,
        confidence: args.confidence,
    };
    let build = build_table(args.eta, &n_grid, &ticks, &mc, args.exact_cutoff, args.seed)?;
    for warning in &build.warnings {
        eprintln!("warning: {warning}");
    }
    build.table.save_to_path(&args.out)?;
    RunManifest::new("build-table", args.seed)
        .param("eta", sig17(args.eta))
        .param("n_max", args.n_max)
        .param("exact_cutoff", args.exact_cutoff)
        .param("max_iterations", args.max_iterations)
        .param("precision_percent", sig17(args.precision_percent))
        .param("confidence", sig17(args.confidence))
        .artifact(&args.out)
        .write_beside(&args.out)?;
    println!(
        "interpolation table for eta {} with {} sizes written to {}",
        sig17(args.eta),
        build.table.n_grid().len(),
        args.out.display()
    );
    Ok(Outcome::Success)
}
