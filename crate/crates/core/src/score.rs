//! Structure scoring and the exhaustive learner.
//!
//! The objective rewards fit through the log-likelihood, charges a
//! complexity penalty proportional to the structure's parameter count,
//! and adds a sparsity boost: for every absent edge, evidence that the
//! pair is conditionally independent, measured through tabulated
//! beta-values of the dependence test. [`learn`] maximizes the score
//! over all structures with bounded in-degree.

use rayon::prelude::*;

use crate::bayesnet::{
    conditional_pair_table, enumerate_dags, matching_count, separating_sets, Dag,
    EmpiricalCounts, SeparatingCollection,
};
use crate::betatable::{interpolate_log_beta, BetaTable};
use crate::simplex::{entropy_unchecked, kl_unchecked, mutual_information};
use crate::{Error, Result};

/// Which sample size drives the beta lookup for a conditioned pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoostSampleSize {
    /// The number of records matching the conditioning assignment.
    #[default]
    Stratum,
    /// The full record count, regardless of conditioning.
    Global,
}

/// Everything the score needs besides the data: the reference dependence,
/// the penalty weight, the beta-value table, and the conditioning-set
/// collection.
#[derive(Debug, Clone)]
pub struct ScoreConfig {
    eta: f64,
    kappa: f64,
    psi2: f64,
    table: BetaTable,
    collection: SeparatingCollection,
    boost_sample_size: BoostSampleSize,
}

impl ScoreConfig {
    /// Builds a configuration; the penalty weight must be positive and the
    /// reference dependence must match the table's.
    pub fn new(
        eta: f64,
        kappa: f64,
        table: BetaTable,
        collection: SeparatingCollection,
    ) -> Result<ScoreConfig> {
        if !(kappa > 0.0) {
            return Err(Error::domain(format!("penalty weight {kappa} must be positive")));
        }
        if (eta - table.eta()).abs() > 1e-12 {
            return Err(Error::domain(format!(
                "reference dependence {eta} does not match the table's {}",
                table.eta()
            )));
        }
        Ok(ScoreConfig {
            eta,
            kappa,
            psi2: 1.0,
            table,
            collection,
            boost_sample_size: BoostSampleSize::default(),
        })
    }

    /// Replaces the boost's sample-size convention.
    pub fn with_boost_sample_size(mut self, choice: BoostSampleSize) -> ScoreConfig {
        self.boost_sample_size = choice;
        self
    }

    /// The reference dependence.
    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// The penalty weight.
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// The beta-value table.
    pub fn table(&self) -> &BetaTable {
        &self.table
    }

    /// The conditioning-set collection.
    pub fn collection(&self) -> &SeparatingCollection {
        &self.collection
    }
}

/// The score's additive parts: `total = log_likelihood -
/// complexity_penalty + sparsity_boost`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreBreakdown {
    /// Maximized log-likelihood of the structure.
    pub log_likelihood: f64,
    /// Penalty-weight times log sample size times parameter count.
    pub complexity_penalty: f64,
    /// Reward for absent edges supported by independence evidence.
    pub sparsity_boost: f64,
    /// The assembled score.
    pub total: f64,
}

/// The structure's parameter count: one table row per vertex and parent
/// assignment, `sum_v 2^{|Pa(v)|}`.
pub fn parameter_count(g: &Dag) -> u64 {
    (0..g.n()).map(|v| 1u64 << g.parents(v).len()).sum()
}

/// The marginal of a joint distribution onto the given sorted variables;
/// bit `j` of the result's index is the value of `vars[j]`.
fn marginal(joint: &[f64], vars: &[usize]) -> Vec<f64> {
    let mut out = vec![0.0; 1usize << vars.len()];
    for (w, &p) in joint.iter().enumerate() {
        let idx = vars
            .iter()
            .enumerate()
            .fold(0usize, |acc, (j, &v)| acc | (((w >> v) & 1) << j));
        out[idx] += p;
    }
    out
}

/// Sum over vertices of the conditional entropy H(X_v | Pa(X_v)) under
/// the given joint, each computed as H(v, Pa) - H(Pa).
fn conditional_entropy_sum(joint: &[f64], g: &Dag) -> f64 {
    (0..g.n())
        .map(|v| {
            let mut with_v: Vec<usize> = g.parents(v).to_vec();
            with_v.push(v);
            with_v.sort_unstable();
            entropy_unchecked(&marginal(joint, &with_v))
                - entropy_unchecked(&marginal(joint, g.parents(v)))
        })
        .sum()
}

/// The maximized log-likelihood of the structure on the counts,
/// `-N sum_v H(X_v | Pa(X_v))` under the empirical distribution.
pub fn log_likelihood(counts: &EmpiricalCounts, g: &Dag) -> f64 {
    let joint = counts.empirical_distribution();
    -(counts.total() as f64) * conditional_entropy_sum(&joint, g)
}

/// The expected log-likelihood of `n` draws from the true joint under the
/// structure's best-fitting parameters, `-N sum_v H_P(X_v | Pa(X_v))`.
pub fn idealized_log_likelihood(joint: &[f64], g: &Dag, n: u64) -> Result<f64> {
    check_joint(joint, g)?;
    Ok(-(n as f64) * conditional_entropy_sum(joint, g))
}

fn check_joint(joint: &[f64], g: &Dag) -> Result<()> {
    if joint.len() != 1usize << g.n() {
        return Err(Error::domain(format!(
            "joint over {} assignments does not match {} vertices",
            joint.len(),
            g.n()
        )));
    }
    Ok(())
}

/// The joint's closest distribution factorizing by the structure: the
/// product of the joint's own conditionals along the structure. Parent
/// assignments with zero probability get uniform conditionals.
pub fn project_onto_dag(joint: &[f64], g: &Dag) -> Result<Vec<f64>> {
    check_joint(joint, g)?;
    let mut factors: Vec<(Vec<f64>, Vec<f64>)> = Vec::with_capacity(g.n());
    for v in 0..g.n() {
        let mut with_v: Vec<usize> = g.parents(v).to_vec();
        with_v.push(v);
        with_v.sort_unstable();
        factors.push((marginal(joint, &with_v), marginal(joint, g.parents(v))));
    }
    let project = |w: usize, vars: &[usize]| {
        vars.iter()
            .enumerate()
            .fold(0usize, |acc, (j, &v)| acc | (((w >> v) & 1) << j))
    };
    Ok((0..joint.len())
        .map(|w| {
            (0..g.n())
                .map(|v| {
                    let parents = g.parents(v);
                    let mut with_v: Vec<usize> = parents.to_vec();
                    with_v.push(v);
                    with_v.sort_unstable();
                    let pa_mass = factors[v].1[project(w, parents)];
                    if pa_mass > 0.0 {
                        factors[v].0[project(w, &with_v)] / pa_mass
                    } else {
                        0.5
                    }
                })
                .product()
        })
        .collect())
}

/// The reward for absent edges: over each unordered non-adjacent pair,
/// the largest over conditioning sets of the smallest over conditioning
/// assignments of the negated log beta-value at the stratum's empirical
/// dependence. Empty strata contribute candidate 0.
pub fn sparsity_boost(counts: &EmpiricalCounts, g: &Dag, cfg: &ScoreConfig) -> Result<f64> {
    let mut boost = 0.0;
    for a in 0..g.n() {
        for b in (a + 1)..g.n() {
            if g.adjacent(a, b) {
                continue;
            }
            let mut best_over_sets = f64::NEG_INFINITY;
            for s in separating_sets(&cfg.collection, g, a, b) {
                let mut worst_over_strata = f64::INFINITY;
                for s_value in 0..1usize << s.len() {
                    let candidate = match conditional_pair_table(counts, a, b, &s, s_value) {
                        Some(table) => {
                            let n_eff = match cfg.boost_sample_size {
                                BoostSampleSize::Stratum => matching_count(counts, &s, s_value),
                                BoostSampleSize::Global => counts.total(),
                            };
                            let gamma = mutual_information(&table);
                            -interpolate_log_beta(&cfg.table, n_eff, gamma)?
                        }
                        None => 0.0,
                    };
                    worst_over_strata = worst_over_strata.min(candidate);
                }
                best_over_sets = best_over_sets.max(worst_over_strata);
            }
            if best_over_sets.is_finite() {
                boost += best_over_sets;
            }
        }
    }
    Ok(boost)
}

/// Scores a structure on the counts: log-likelihood minus
/// `kappa * ln N * parameter_count` plus the sparsity boost.
pub fn score(counts: &EmpiricalCounts, g: &Dag, cfg: &ScoreConfig) -> Result<ScoreBreakdown> {
    let log_likelihood = crate::score::log_likelihood(counts, g);
    let complexity_penalty =
        cfg.kappa * (counts.total() as f64).ln() * parameter_count(g) as f64;
    let sparsity_boost = cfg.psi2 * crate::score::sparsity_boost(counts, g, cfg)?;
    Ok(ScoreBreakdown {
        log_likelihood,
        complexity_penalty,
        sparsity_boost,
        total: log_likelihood - complexity_penalty + sparsity_boost,
    })
}

/// Whether the challenger beats the incumbent: higher score, with ties
/// broken toward fewer edges and then lexicographically smaller parent
/// sets.
fn prefers(challenger: (&Dag, f64), incumbent: (&Dag, f64)) -> bool {
    match challenger.1.total_cmp(&incumbent.1) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => {
            match challenger.0.edge_count().cmp(&incumbent.0.edge_count()) {
                std::cmp::Ordering::Less => true,
                std::cmp::Ordering::Greater => false,
                std::cmp::Ordering::Equal => challenger.0 < incumbent.0,
            }
        }
    }
}

/// The score-maximizing structure over all DAGs on `n` vertices with
/// in-degree at most `d`. Ties prefer fewer edges, then lexicographically
/// smaller parent sets.
pub fn learn(counts: &EmpiricalCounts, n: usize, d: usize, cfg: &ScoreConfig) -> Result<Dag> {
    if counts.num_vars() != n {
        return Err(Error::domain(format!(
            "counts cover {} variables, learner asked for {n}",
            counts.num_vars()
        )));
    }
    let candidates = enumerate_dags(n, d)?;
    let scored: Vec<(Dag, f64)> = candidates
        .into_par_iter()
        .map(|dag| {
            let total = score(counts, &dag, cfg)?.total;
            Ok((dag, total))
        })
        .collect::<Result<_>>()?;
    let mut best: Option<(Dag, f64)> = None;
    for (dag, total) in scored {
        let replace = match &best {
            None => true,
            Some((b_dag, b_total)) => prefers((&dag, total), (b_dag, *b_total)),
        };
        if replace {
            best = Some((dag, total));
        }
    }
    Ok(best.expect("enumeration yields at least the empty graph").0)
}

/// Relative entropy between two joint distributions over the same
/// assignments.
pub fn joint_divergence(p: &[f64], q: &[f64]) -> f64 {
    kl_unchecked(p, q)
}
