//! Structure learning from a data file by exhaustive scoring.

use crate::manifest::RunManifest;
use crate::{util, Outcome};
use clap::Args as ClapArgs;
use mib_core::bayesnet::{enumerate_dags, Dag, EmpiricalCounts, SeparatingCollection};
use mib_core::score::{learn, score, ScoreConfig};
use mib_core::{sig17, Result};
use std::io::Write;
use std::path::PathBuf;

/// Arguments of the `learn` command.
#[derive(Debug, ClapArgs)]
pub struct Args {
    /// Input data file of joint assignment counts
    #[arg(long)]
    pub data: PathBuf,
    /// Interpolation table path; default taken from BETA_TABLE_PATH
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Reference dependence of the boost; must match the table's (default:
    /// the table's own value)
    #[arg(long)]
    pub eta: Option<f64>,
    /// Complexity-penalty weight
    #[arg(long, default_value_t = 0.5)]
    pub kappa: f64,
    /// In-degree bound of the candidate structures
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Output path of the winning structure; the per-candidate score table
    /// lands beside it at <out>.scores.csv
    #[arg(long)]
    pub out: PathBuf,
}

/// One candidate structure as an edge list, `-` for the empty graph.
pub fn structure_label(dag: &Dag) -> String {
    let edges = dag.edges();
    if edges.is_empty() {
        return "-".to_string();
    }
    edges
        .iter()
        .map(|(parent, child)| format!("{parent}->{child}"))
        .collect::<Vec<_>>()
        .join(";")
}

/// Scores every candidate, writes the winner and the full score table.
pub fn run(args: &Args) -> Result<Outcome> {
    let counts = EmpiricalCounts::load_from_path(&args.data)?;
    let table = util::load_table(args.table.as_deref())?;
    let eta = args.eta.unwrap_or_else(|| table.eta());
    let cfg = ScoreConfig::new(eta, args.kappa, table, SeparatingCollection::AllSubsets {
        d: args.d,
    })?;
    let n = counts.num_vars();
    let winner = learn(&counts, n, args.d, &cfg)?;
    let winner_total = score(&counts, &winner, &cfg)?.total;

    let scores_path = util::suffixed(&args.out, ".scores.csv");
    let mut writer = util::csv_writer(&scores_path)?;
    writer
        .write_record([
            "structure",
            "log_likelihood",
            "complexity_penalty",
            "sparsity_boost",
            "total",
            "winner",
        ])
        .map_err(util::from_csv)?;
    for dag in enumerate_dags(n, args.d)? {
        let parts = score(&counts, &dag, &cfg)?;
        writer
            .write_record([
                structure_label(&dag),
                sig17(parts.log_likelihood),
                sig17(parts.complexity_penalty),
                sig17(parts.sparsity_boost),
                sig17(parts.total),
                u8::from(dag == winner).to_string(),
            ])
            .map_err(util::from_csv)?;
    }
    writer.flush()?;

    let mut file = std::io::BufWriter::new(std::fs::File::create(&args.out)?);
    writeln!(file, "{} {}", winner.n(), winner.max_in_degree())?;
    for v in 0..winner.n() {
        let parents: Vec<String> = winner.parents(v).iter().map(usize::to_string).collect();
        writeln!(file, "{v}: {}", parents.join(" "))?;
    }
    file.flush()?;

    RunManifest::new("learn", 0)
        .param("data", args.data.display())
        .param("eta", sig17(eta))
        .param("kappa", sig17(args.kappa))
        .param("d", args.d)
        .artifact(&args.out)
        .artifact(&scores_path)
        .write_beside(&args.out)?;
    println!(
        "winner {} with total score {} over {} records",
        structure_label(&winner),
        sig17(winner_total),
        counts.total()
    );
    Ok(Outcome::Success)
}
