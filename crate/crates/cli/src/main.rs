//! Command-line surface of the beta-value toolkit: exact and Monte Carlo
//! beta queries, interpolation-table building, structure learning, seeded
//! recovery experiments, sample-complexity bound tables, and divergence
//! curve scans.
//!
//! Every command that writes files also writes a JSON run manifest beside
//! its primary output, and repeated invocation with an identical manifest
//! yields identical artifacts. All CSV outputs carry a header row and
//! 17-significant-digit floats. Exit codes: 0 on success, 2 on domain or
//! usage errors, 3 when a run finishes without meeting its convergence
//! criterion.

mod beta_exact;
mod beta_mc;
mod bounds_cmd;
mod build_table;
mod experiment;
mod iproj_cmd;
mod learn;
mod manifest;
mod util;

use clap::{Parser, Subcommand};

/// How a successful run finished: cleanly, or at its iteration cap without
/// meeting the requested precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// The command completed normally.
    Success,
    /// The command produced its outputs but stopped at the iteration cap.
    NonConverged,
}

#[derive(Parser)]
#[command(
    name = "mib",
    version,
    about = "Beta-values of the mutual-information independence test: exact \
             enumeration, Monte Carlo estimation, interpolation tables, \
             sparsity-boosted structure learning, and sample-size bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the exact beta-value CDF and dump or query it
    BetaExact(beta_exact::Args),
    /// Estimate one beta-value by importance-sampled Monte Carlo
    BetaMc(beta_mc::Args),
    /// Build and save a beta-value interpolation table
    BuildTable(build_table::Args),
    /// Learn a structure from a data file by exhaustive scoring
    Learn(learn::Args),
    /// Run seeded structure-recovery sweeps and summarize recovery rates
    Experiment(experiment::Args),
    /// Evaluate sample-complexity bounds with every quantity labeled
    Bounds(bounds_cmd::Args),
    /// Scan the divergence curve over equal-marginal distributions
    Iproj(iproj_cmd::Args),
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::BetaExact(args) => beta_exact::run(args),
        Command::BetaMc(args) => beta_mc::run(args),
        Command::BuildTable(args) => build_table::run(args),
        Command::Learn(args) => learn::run(args),
        Command::Experiment(args) => experiment::run(args),
        Command::Bounds(args) => bounds_cmd::run(args),
        Command::Iproj(args) => iproj_cmd::run(args),
    };
    match result {
        Ok(Outcome::Success) => {}
        Ok(Outcome::NonConverged) => {
            eprintln!(
                "warning: stopped at the iteration cap before reaching the \
                 requested precision"
            );
            std::process::exit(3);
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}
