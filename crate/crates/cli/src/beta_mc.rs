//! Monte Carlo beta-value estimation with a convergence trace.

use crate::manifest::RunManifest;
use crate::{util, Outcome};
use clap::Args as ClapArgs;
use mib_core::mcint::{
    monte_carlo_integrate, IntegrandContext, DEFAULT_CONFIDENCE, DEFAULT_MAX_ITERATIONS,
    DEFAULT_PRECISION_PERCENT, DEFAULT_RECORD_FREQ, DEFAULT_STOP_CHECK_FREQ,
};
use mib_core::{sig17, Result};
use std::path::PathBuf;

/// Arguments of the `beta-mc` command.
#[derive(Debug, ClapArgs)]
pub struct Args {
    /// Sample size of the empirical table
    #[arg(long = "n-samples")]
    pub n_samples: u64,
    /// Mutual information of the reference distribution, in nats
    #[arg(long)]
    pub eta: f64,
    /// Acceptance threshold to evaluate, in nats
    #[arg(long)]
    pub gamma: f64,
    /// Seed of the sampling stream
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Hard cap on the number of iterations
    #[arg(long = "max-iterations", default_value_t = DEFAULT_MAX_ITERATIONS)]
    pub max_iterations: u64,
    /// Iterations between recorded trace points
    #[arg(long = "record-freq", default_value_t = DEFAULT_RECORD_FREQ)]
    pub record_freq: u64,
    /// Iterations between stopping-criterion checks
    #[arg(long = "stop-check-freq", default_value_t = DEFAULT_STOP_CHECK_FREQ)]
    pub stop_check_freq: u64,
    /// Requested relative precision, in percent
    #[arg(long = "precision-percent", default_value_t = DEFAULT_PRECISION_PERCENT)]
    pub precision_percent: f64,
    /// Confidence level backing the precision request
    #[arg(long, default_value_t = DEFAULT_CONFIDENCE)]
    pub confidence: f64,
    /// Output CSV path for the convergence trace
    #[arg(long)]
    pub out: PathBuf,
}

/// Runs the estimator and writes the trace; the final estimate is the last
/// trace row. Exits nonzero (code 3) when the iteration cap is reached
/// before the precision criterion.
pub fn run(args: &Args) -> Result<Outcome> {
    let ctx = IntegrandContext::new(args.n_samples, args.eta, args.gamma)?;
    let result = monte_carlo_integrate(
        &ctx,
        args.max_iterations,
        args.record_freq,
        args.stop_check_freq,
        args.precision_percent,
        args.confidence,
        args.seed,
    )?;
    let mut writer = util::csv_writer(&args.out)?;
    writer
        .write_record(["iteration", "estimate"])
        .map_err(util::from_csv)?;
    for &(iteration, estimate) in result.iterations() {
        writer
            .write_record([iteration.to_string(), sig17(estimate)])
            .map_err(util::from_csv)?;
    }
    writer.flush()?;
    RunManifest::new("beta-mc", args.seed)
        .param("n_samples", args.n_samples)
        .param("eta", sig17(args.eta))
        .param("gamma", sig17(args.gamma))
        .param("max_iterations", args.max_iterations)
        .param("record_freq", args.record_freq)
        .param("stop_check_freq", args.stop_check_freq)
        .param("precision_percent", sig17(args.precision_percent))
        .param("confidence", sig17(args.confidence))
        .artifact(&args.out)
        .write_beside(&args.out)?;
    let iterations = result.iterations().last().map_or(0, |&(i, _)| i);
    let stop = if result.stopped_by_criterion() {
        "precision criterion met"
    } else {
        "iteration cap reached"
    };
    println!(
        "beta estimate {} after {iterations} iterations ({stop})",
        sig17(result.final_estimate())
    );
    Ok(if result.stopped_by_criterion() {
        Outcome::Success
    } else {
        Outcome::NonConverged
    })
}
