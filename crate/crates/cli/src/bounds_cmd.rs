//! Sample-complexity bound tables with every quantity labeled.

use crate::manifest::RunManifest;
use crate::{util, Outcome};
use clap::Args as ClapArgs;
use mib_core::bounds::{eta_n_minus, f, kappa_prime, theorem_sample_size, BoundParams};
use mib_core::{sig17, Result};
use std::path::PathBuf;

/// Catalog order of the bound identifiers.
const ALL_IDS: [&str; 7] = ["2.1", "2.3a", "2.3b", "2.4", "2.5a", "2.5b", "2.6"];

/// Arguments of the `bounds` command.
#[derive(Debug, ClapArgs)]
pub struct Args {
    /// Bound identifier (2.1, 2.3a, 2.3b, 2.4, 2.5a, 2.5b, 2.6) or "all"
    #[arg(long, default_value = "all")]
    pub id: String,
    /// Minimum edge strength of the generating network
    #[arg(long, default_value_t = 0.2)]
    pub epsilon: f64,
    /// Independence threshold of the test, below epsilon
    #[arg(long, default_value_t = 0.1)]
    pub eta: f64,
    /// Failure probability
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    /// KL radius below which a competitor counts as equivalent
    #[arg(long, default_value_t = 0.1)]
    pub zeta: f64,
    /// Complexity-penalty weight
    #[arg(long, default_value_t = 0.5)]
    pub kappa: f64,
    /// Gap-splitting parameter
    #[arg(long, default_value_t = 1.0e-6)]
    pub lambda: f64,
    /// Threshold-splitting parameter
    #[arg(long, default_value_t = 0.5)]
    pub mu: f64,
    /// Stratum-frequency slack
    #[arg(long, default_value_t = 0.5)]
    pub theta: f64,
    /// Boost-budget split
    #[arg(long = "big-theta", default_value_t = 0.5)]
    pub big_theta: f64,
    /// Number of network nodes
    #[arg(long, default_value_t = 10)]
    pub n: u64,
    /// In-degree bound of the graph family
    #[arg(long, default_value_t = 2)]
    pub d: u64,
    /// Surplus-edge count charged in the union bounds
    #[arg(long, default_value_t = 1)]
    pub l: u64,
    /// Bound on inverse stratum probabilities over present edges
    #[arg(long, default_value_t = 16.0)]
    pub m: f64,
    /// Bound on inverse stratum probabilities over absent pairs
    #[arg(long = "m-hat", default_value_t = 4.0)]
    pub m_hat: f64,
    /// Joint alphabet size of a variable pair
    #[arg(long = "x-card", default_value_t = 4)]
    pub x_card: u64,
    /// Optional CSV path for the same rows as (id, quantity, value)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn params_of(args: &Args) -> BoundParams {
    BoundParams {
        epsilon: args.epsilon,
        eta: args.eta,
        delta: args.delta,
        zeta: args.zeta,
        kappa: args.kappa,
        lambda: args.lambda,
        mu: args.mu,
        theta: args.theta,
        big_theta: args.big_theta,
        n: args.n,
        d: args.d,
        l: args.l,
        m: args.m,
        m_hat: args.m_hat,
        x_card: args.x_card,
    }
}

fn title(id: &str) -> &'static str {
    match id {
        "2.1" => "two-node comparison in both directions, concentration route",
        "2.3a" => "two-node independent case, concentration route",
        "2.3b" => "two-node independent case, type-counting route",
        "2.4" => "two-node comparison, combined route",
        "2.5a" => "n-node recovery against distant competitors, divergence route",
        "2.5b" => "n-node skeleton recovery, concentration route",
        "2.6" => "n-node skeleton recovery, type-counting route",
        other => unreachable!("unknown bound id {other} survived evaluation"),
    }
}

fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (1..=k).fold(1.0, |acc, i| acc * (n - k + i) as f64 / i as f64)
}

/// Every quantity the identified bound reads or derives, labeled, ending
/// with the certified sample size.
fn quantity_rows(id: &str, p: &BoundParams) -> Result<Vec<(&'static str, f64)>> {
    let sample_size = theorem_sample_size(id, p)?;
    let mut rows: Vec<(&'static str, f64)> = Vec::new();
    let two_node = matches!(id, "2.1" | "2.3a" | "2.3b" | "2.4");
    let epsilon = ("epsilon (minimum edge strength)", p.epsilon);
    let eta = ("eta (independence threshold)", p.eta);
    let delta = ("delta (failure probability)", p.delta);
    let kappa = ("kappa (penalty weight)", p.kappa);
    let lambda = ("lambda (gap split)", p.lambda);
    let mu = ("mu (threshold split)", p.mu);
    let theta = ("theta (stratum-frequency slack)", p.theta);
    let big_theta = ("big theta (boost-budget split)", p.big_theta);
    let x_card = ("x_card (pair alphabet size)", p.x_card as f64);
    match id {
        "2.1" => rows.extend([epsilon, eta, delta, kappa, lambda, mu, big_theta]),
        "2.3a" => rows.extend([epsilon, eta, delta, lambda, mu]),
        "2.3b" => rows.extend([eta, delta, kappa, mu, x_card]),
        "2.4" => rows.extend([epsilon, eta, delta, kappa, lambda, mu, big_theta, x_card]),
        "2.5a" => rows.extend([
            epsilon,
            eta,
            delta,
            ("zeta (equivalence radius)", p.zeta),
            kappa,
            theta,
            big_theta,
            ("m (inverse stratum probability, present edges)", p.m),
        ]),
        "2.5b" => rows.extend([
            epsilon,
            eta,
            delta,
            kappa,
            mu,
            theta,
            big_theta,
            ("l (surplus edges)", p.l as f64),
            ("m (inverse stratum probability, present edges)", p.m),
            ("m_hat (inverse stratum probability, absent pairs)", p.m_hat),
        ]),
        "2.6" => rows.extend([
            epsilon,
            eta,
            delta,
            kappa,
            theta,
            big_theta,
            ("l (surplus edges)", p.l as f64),
            ("m (inverse stratum probability, present edges)", p.m),
            ("m_hat (inverse stratum probability, absent pairs)", p.m_hat),
            x_card,
        ]),
        other => unreachable!("unknown bound id {other} survived evaluation"),
    }
    if matches!(id, "2.1" | "2.3a" | "2.4" | "2.5a" | "2.5b" | "2.6") {
        rows.push(("separation epsilon - eta", p.epsilon - p.eta));
    }
    if matches!(id, "2.1" | "2.3a" | "2.5b") {
        rows.push(("deviation rate F(mu eta)", f(p.mu * p.eta)?));
    }
    if matches!(id, "2.3b" | "2.4") {
        let at = sample_size.ceil() as u64;
        let corrected = kappa_prime(at, p.kappa, p.x_card)?;
        rows.push(("corrected penalty kappa'(N)", corrected));
        rows.push((
            "detection radius eta_N^-(N)",
            eta_n_minus(at, p.eta, corrected, p.x_card)?,
        ));
    }
    if !two_node {
        rows.push(("n (node count)", p.n as f64));
        rows.push(("d (in-degree bound)", p.d as f64));
        let excess = p.n as f64 * (2f64.powi(p.d as i32) - 1.0);
        rows.push(("worst-case edge count n d", (p.n * p.d) as f64));
        rows.push(("worst-case parameter excess n (2^d - 1)", excess));
        rows.push(("separating-set count C(n, d)", binomial(p.n, p.d)));
        rows.push(("strata per separating set 2^d", 2f64.powi(p.d as i32)));
        if id == "2.6" {
            rows.push((
                "boost spare kappa n (2^d - 1) - l x_card",
                p.kappa * excess - (p.l * p.x_card) as f64,
            ));
        }
    }
    rows.push(("sample size N", sample_size));
    Ok(rows)
}

/// Prints one labeled table per requested bound; optionally mirrors the
/// rows to a CSV file.
pub fn run(args: &Args) -> Result<Outcome> {
    let params = params_of(args);
    let ids: Vec<&str> = if args.id == "all" {
        ALL_IDS.to_vec()
    } else {
        vec![args.id.as_str()]
    };
    let mut tables = Vec::new();
    for id in &ids {
        tables.push((*id, quantity_rows(id, &params)?));
    }
    for (id, rows) in &tables {
        println!("bound {id}: {}", title(id));
        for (label, value) in rows {
            println!("  {label} = {}", sig17(*value));
        }
    }
    if let Some(out) = &args.out {
        let mut writer = util::csv_writer(out)?;
        writer.write_record(["id", "quantity", "value"]).map_err(util::from_csv)?;
        for (id, rows) in &tables {
            for (label, value) in rows {
                writer
                    .write_record([id.to_string(), label.to_string(), sig17(*value)])
                    .map_err(util::from_csv)?;
            }
        }
        writer.flush()?;
        RunManifest::new("bounds", 0)
            .param("id", &args.id)
            .param("epsilon", sig17(args.epsilon))
            .param("eta", sig17(args.eta))
            .param("delta", sig17(args.delta))
            .param("zeta", sig17(args.zeta))
            .param("kappa", sig17(args.kappa))
            .param("lambda", sig17(args.lambda))
            .param("mu", sig17(args.mu))
            .param("theta", sig17(args.theta))
            .param("big_theta", sig17(args.big_theta))
            .param("n", args.n)
            .param("d", args.d)
            .param("l", args.l)
            .param("m", sig17(args.m))
            .param("m_hat", sig17(args.m_hat))
            .param("x_card", args.x_card)
            .artifact(out)
            .write_beside(out)?;
    }
    Ok(Outcome::Success)
}
