//! Bayesian networks over binary variables.
//!
//! A [`Dag`] fixes the structure, a [`BayesNet`] adds one conditional
//! probability table per vertex, and [`sample`] draws i.i.d. observations
//! into aggregated [`EmpiricalCounts`]. Pairwise conditional tables
//! extracted from counts or from a true joint distribution feed the
//! independence tests used by scoring: [`separating_sets`] produces the
//! candidate conditioning sets and [`edge_strength`] measures the margin
//! by which a structure's edges are detectable. Joint assignments are
//! encoded as integers whose bit `v` holds the value of variable `v`.

use std::io::{BufRead, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::simplex::{mutual_information_cells, ContingencyTable};
use crate::{Error, Result};

const CPT_ROW_SUM_TOL: f64 = 1e-12;

/// A directed acyclic graph over `n` binary variables, stored as one
/// sorted parent list per vertex.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dag {
    n: usize,
    parent_sets: Vec<Vec<usize>>,
}

impl Dag {
    /// Builds a DAG from per-vertex parent lists, which are sorted and
    /// checked for range, duplicates, self-loops, and acyclicity.
    pub fn new(n: usize, parent_sets: Vec<Vec<usize>>) -> Result<Dag> {
        if parent_sets.len() != n {
            return Err(Error::domain(format!(
                "expected {n} parent sets, got {}",
                parent_sets.len()
            )));
        }
        let mut sorted = parent_sets;
        for (v, parents) in sorted.iter_mut().enumerate() {
            parents.sort_unstable();
            for w in parents.windows(2) {
                if w[0] == w[1] {
                    return Err(Error::domain(format!("vertex {v} lists parent {} twice", w[0])));
                }
            }
            for &p in parents.iter() {
                if p >= n {
                    return Err(Error::domain(format!("vertex {v} has out-of-range parent {p}")));
                }
                if p == v {
                    return Err(Error::domain(format!("vertex {v} is its own parent")));
                }
            }
        }
        let dag = Dag { n, parent_sets: sorted };
        if dag.topological_order().is_none() {
            return Err(Error::domain("parent sets contain a directed cycle"));
        }
        Ok(dag)
    }

    /// The edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Dag {
        Dag { n, parent_sets: vec![Vec::new(); n] }
    }

    /// Number of vertices.
    pub fn n(&self) -> usize {
        self.n
    }

    /// The sorted parents of a vertex.
    pub fn parents(&self, v: usize) -> &[usize] {
        &self.parent_sets[v]
    }

    /// The largest parent-set size.
    pub fn max_in_degree(&self) -> usize {
        self.parent_sets.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Total number of directed edges.
    pub fn edge_count(&self) -> usize {
        self.parent_sets.iter().map(Vec::len).sum()
    }

    /// Whether an edge connects the pair in either direction.
    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.parent_sets[a].contains(&b) || self.parent_sets[b].contains(&a)
    }

    /// Directed edges as (parent, child) pairs, ordered by child.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges = Vec::with_capacity(self.edge_count());
        for (child, parents) in self.parent_sets.iter().enumerate() {
            for &parent in parents {
                edges.push((parent, child));
            }
        }
        edges
    }

    /// A topological order, or `None` if the graph has a cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let mut remaining: Vec<u32> = self
            .parent_sets
            .iter()
            .map(|ps| ps.iter().fold(0u32, |m, &p| m | (1 << p)))
            .collect();
        let mut removed = 0u32;
        let mut order = Vec::with_capacity(self.n);
        while order.len() < self.n {
            let next = (0..self.n)
                .find(|&v| removed & (1 << v) == 0 && remaining[v] & !removed == 0)?;
            removed |= 1 << next;
            remaining[next] = 0;
            order.push(next);
        }
        Some(order)
    }
}

/// A Bayesian network: a structure plus one conditional distribution per
/// vertex and parent assignment, stored as `[p(0), p(1)]` rows indexed by
/// the parent assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct BayesNet {
    dag: Dag,
    cpts: Vec<Vec<[f64; 2]>>,
}

/// The row of a vertex's table selected by a full assignment: bit `j` of
/// the row index is the assignment's value at the vertex's `j`-th parent.
pub(crate) fn parent_row(assignment: usize, parents: &[usize]) -> usize {
    parents
        .iter()
        .enumerate()
        .fold(0, |row, (j, &p)| row | (((assignment >> p) & 1) << j))
}

impl BayesNet {
    /// Builds a network, validating that every vertex has one row per
    /// parent assignment and every row is a distribution.
    pub fn new(dag: Dag, cpts: Vec<Vec<[f64; 2]>>) -> Result<BayesNet> {
        if cpts.len() != dag.n() {
            return Err(Error::domain(format!(
                "expected {} tables, got {}",
                dag.n(),
                cpts.len()
            )));
        }
        for (v, rows) in cpts.iter().enumerate() {
            let expected = 1usize << dag.parents(v).len();
            if rows.len() != expected {
                return Err(Error::domain(format!(
                    "vertex {v} needs {expected} rows, got {}",
                    rows.len()
                )));
            }
            for (r, row) in rows.iter().enumerate() {
                if row.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
                    return Err(Error::domain(format!(
                        "vertex {v} row {r} has probabilities outside [0, 1]"
                    )));
                }
                if ((row[0] + row[1]) - 1.0).abs() > CPT_ROW_SUM_TOL {
                    return Err(Error::domain(format!(
                        "vertex {v} row {r} sums to {}, not 1",
                        row[0] + row[1]
                    )));
                }
            }
        }
        Ok(BayesNet { dag, cpts })
    }

    /// Builds a network from per-row probabilities of the value 1.
    pub fn from_success_probabilities(dag: Dag, p1: Vec<Vec<f64>>) -> Result<BayesNet> {
        let cpts = p1
            .into_iter()
            .map(|rows| rows.into_iter().map(|p| [1.0 - p, p]).collect())
            .collect();
        BayesNet::new(dag, cpts)
    }

    /// The structure.
    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    /// The conditional rows of a vertex, indexed by parent assignment.
    pub fn cpt(&self, v: usize) -> &[[f64; 2]] {
        &self.cpts[v]
    }

    /// The full joint distribution over all `2^n` assignments.
    pub fn joint_distribution(&self) -> Vec<f64> {
        let n = self.dag.n();
        (0..1usize << n)
            .map(|w| {
                (0..n)
                    .map(|v| self.cpts[v][parent_row(w, self.dag.parents(v))][(w >> v) & 1])
                    .product()
            })
            .collect()
    }

    /// Writes the network in the text format: a `n d` header, one
    /// `v: parents...` line per vertex, then `v assignment p1` rows.
    pub fn save<W: Write>(&self, writer: &mut W) -> Result<()> {
        writeln!(writer, "{} {}", self.dag.n(), self.dag.max_in_degree())?;
        for v in 0..self.dag.n() {
            let parents: Vec<String> =
                self.dag.parents(v).iter().map(usize::to_string).collect();
            writeln!(writer, "{v}: {}", parents.join(" "))?;
        }
        for (v, rows) in self.cpts.iter().enumerate() {
            for (assignment, row) in rows.iter().enumerate() {
                writeln!(writer, "{v} {assignment} {}", crate::sig17(row[1]))?;
            }
        }
        Ok(())
    }

    /// Saves to a file path.
    pub fn save_to_path<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.save(&mut file)
    }

    /// Reads a network written by [`BayesNet::save`].
    pub fn load<R: BufRead>(reader: R) -> Result<BayesNet> {
        let mut lines = reader.lines().filter(|l| match l {
            Ok(s) => !s.trim().is_empty(),
            Err(_) => true,
        });
        let mut next_line = || -> Result<String> {
            lines
                .next()
                .ok_or_else(|| Error::Parse("unexpected end of network file".into()))?
                .map_err(Error::from)
        };
        let header = next_line()?;
        let mut parts = header.split_whitespace();
        let n: usize = parse_field(parts.next(), "vertex count")?;
        let d: usize = parse_field(parts.next(), "in-degree bound")?;
        if n == 0 || n > 16 {
            return Err(Error::Parse(format!("vertex count {n} out of range 1..=16")));
        }
        let mut parent_sets = vec![Vec::new(); n];
        for _ in 0..n {
            let line = next_line()?;
            let (head, rest) = line
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("expected \"v: parents...\", got {line:?}")))?;
            let v: usize = head
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("malformed vertex id {head:?}")))?;
            if v >= n {
                return Err(Error::Parse(format!("vertex id {v} out of range")));
            }
            for token in rest.split_whitespace() {
                let p: usize = token
                    .parse()
                    .map_err(|_| Error::Parse(format!("malformed parent {token:?}")))?;
                parent_sets[v].push(p);
            }
            if parent_sets[v].len() > d {
                return Err(Error::Parse(format!(
                    "vertex {v} has {} parents, exceeding the declared bound {d}",
                    parent_sets[v].len()
                )));
            }
        }
        let dag = Dag::new(n, parent_sets).map_err(|e| Error::Parse(e.to_string()))?;
        let mut p1: Vec<Vec<Option<f64>>> = (0..n)
            .map(|v| vec![None; 1usize << dag.parents(v).len()])
            .collect();
        for line in lines {
            let line = line?;
            let mut parts = line.split_whitespace();
            let v: usize = parse_field(parts.next(), "table vertex")?;
            let assignment: usize = parse_field(parts.next(), "table row")?;
            let p: f64 = parse_field(parts.next(), "table probability")?;
            if v >= n || assignment >= p1[v].len() {
                return Err(Error::Parse(format!("table row {v} {assignment} out of range")));
            }
            if p1[v][assignment].replace(p).is_some() {
                return Err(Error::Parse(format!("duplicate table row {v} {assignment}")));
            }
        }
        let mut filled = Vec::with_capacity(n);
        for (v, rows) in p1.into_iter().enumerate() {
            let mut out = Vec::with_capacity(rows.len());
            for (assignment, row) in rows.into_iter().enumerate() {
                out.push(row.ok_or_else(|| {
                    Error::Parse(format!("missing table row {v} {assignment}"))
                })?);
            }
            filled.push(out);
        }
        BayesNet::from_success_probabilities(dag, filled).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Loads from a file path.
    pub fn load_from_path<P: AsRef<Path>>(path: P) -> Result<BayesNet> {
        BayesNet::load(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}

fn parse_field<T: std::str::FromStr>(token: Option<&str>, what: &str) -> Result<T> {
    token
        .ok_or_else(|| Error::Parse(format!("missing {what}")))?
        .parse()
        .map_err(|_| Error::Parse(format!("malformed {what}")))
}

/// Aggregated frequency counts of full joint assignments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmpiricalCounts {
    num_vars: usize,
    total: u64,
    counts: Vec<u64>,
}

impl EmpiricalCounts {
    /// Wraps a dense count vector of length `2^num_vars`.
    pub fn new(num_vars: usize, counts: Vec<u64>) -> Result<EmpiricalCounts> {
        if num_vars == 0 || num_vars > 16 {
            return Err(Error::domain(format!(
                "variable count {num_vars} out of range 1..=16"
            )));
        }
        if counts.len() != 1usize << num_vars {
            return Err(Error::domain(format!(
                "expected {} count cells, got {}",
                1usize << num_vars,
                counts.len()
            )));
        }
        let total = counts.iter().sum();
        Ok(EmpiricalCounts { num_vars, total, counts })
    }

    /// Number of variables.
    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Total number of records.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// The count of one full assignment.
    pub fn count(&self, assignment: usize) -> u64 {
        self.counts[assignment]
    }

    /// All counts, indexed by assignment.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// The empirical joint distribution (counts divided by the total).
    pub fn empirical_distribution(&self) -> Vec<f64> {
        let n = self.total.max(1) as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }

    /// Writes the data format: a `n N` header, then one
    /// `assignment count` line per nonzero cell.
    pub fn save<W: Write>(&self, writer: &mut W) -> Result<()> {
        writeln!(writer, "{} {}", self.num_vars, self.total)?;
        for (assignment, &count) in self.counts.iter().enumerate() {
            if count > 0 {
                writeln!(writer, "{assignment} {count}")?;
            }
        }
        Ok(())
    }

    /// Saves to a file path.
    pub fn save_to_path<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.save(&mut file)
    }

    /// Reads counts written by [`EmpiricalCounts::save`].
    pub fn load<R: BufRead>(reader: R) -> Result<EmpiricalCounts> {
        let mut lines = reader.lines().filter(|l| match l {
            Ok(s) => !s.trim().is_empty(),
            Err(_) => true,
        });
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty data file".into()))??;
        let mut parts = header.split_whitespace();
        let num_vars: usize = parse_field(parts.next(), "variable count")?;
        let declared: u64 = parse_field(parts.next(), "record count")?;
        if num_vars == 0 || num_vars > 16 {
            return Err(Error::Parse(format!(
                "variable count {num_vars} out of range 1..=16"
            )));
        }
        let mut counts = vec![0u64; 1usize << num_vars];
        for line in lines {
            let line = line?;
            let mut parts = line.split_whitespace();
            let assignment: usize = parse_field(parts.next(), "assignment")?;
            let count: u64 = parse_field(parts.next(), "count")?;
            if assignment >= counts.len() {
                return Err(Error::Parse(format!("assignment {assignment} out of range")));
            }
            counts[assignment] += count;
        }
        let built = EmpiricalCounts::new(num_vars, counts).map_err(|e| Error::Parse(e.to_string()))?;
        if built.total() != declared {
            return Err(Error::Parse(format!(
                "counts sum to {}, header declares {declared}",
                built.total()
            )));
        }
        Ok(built)
    }

    /// Loads from a file path.
    pub fn load_from_path<P: AsRef<Path>>(path: P) -> Result<EmpiricalCounts> {
        EmpiricalCounts::load(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}

/// The family of conditioning sets tried when testing a vertex pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeparatingCollection {
    /// Every subset of the remaining vertices up to the given size.
    AllSubsets {
        /// Maximum subset size.
        d: usize,
    },
    /// The two parent sets of the pair, each with the partner removed.
    ParentBased,
}

/// Draws `n_draws` i.i.d. observations from the network by ancestral
/// sampling in topological order; deterministic per seed.
pub fn sample(bn: &BayesNet, n_draws: u64, seed: u64) -> Result<EmpiricalCounts> {
    if n_draws == 0 {
        return Err(Error::domain("at least one draw is required"));
    }
    let dag = bn.dag();
    let order = dag.topological_order().expect("a constructed DAG is acyclic");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; 1usize << dag.n()];
    for _ in 0..n_draws {
        let mut w = 0usize;
        for &v in &order {
            let p1 = bn.cpt(v)[parent_row(w, dag.parents(v))][1];
            if rng.gen::<f64>() < p1 {
                w |= 1 << v;
            }
        }
        counts[w] += 1;
    }
    EmpiricalCounts::new(dag.n(), counts)
}

fn assignment_matches(w: usize, s: &[usize], s_value: usize) -> bool {
    s.iter()
        .enumerate()
        .all(|(j, &v)| (w >> v) & 1 == (s_value >> j) & 1)
}

/// Number of records matching the conditioning assignment, where bit `j`
/// of `s_value` is the required value of `s[j]`.
pub fn matching_count(counts: &EmpiricalCounts, s: &[usize], s_value: usize) -> u64 {
    (0..counts.counts().len())
        .filter(|&w| assignment_matches(w, s, s_value))
        .map(|w| counts.count(w))
        .sum()
}

/// The empirical pairwise table of (A, B) among records matching the
/// conditioning assignment, or `None` when no record matches. Cell (i, j)
/// holds the fraction with A = i, B = j.
pub fn conditional_pair_table(
    counts: &EmpiricalCounts,
    a: usize,
    b: usize,
    s: &[usize],
    s_value: usize,
) -> Option<ContingencyTable> {
    assert!(a != b, "the pair must be distinct");
    assert!(!s.contains(&a) && !s.contains(&b), "the pair must not be conditioned on");
    let mut cells = [0u64; 4];
    for (w, &count) in counts.counts().iter().enumerate() {
        if count > 0 && assignment_matches(w, s, s_value) {
            cells[((w >> a) & 1) * 2 + ((w >> b) & 1)] += count;
        }
    }
    let total: u64 = cells.iter().sum();
    if total == 0 {
        return None;
    }
    let cells = cells.iter().map(|&c| c as f64 / total as f64).collect();
    Some(ContingencyTable::new(2, 2, cells).expect("normalized counts form a distribution"))
}

/// Like [`conditional_pair_table`] but for a true joint distribution:
/// returns the conditional pairwise cells and the conditioning event's
/// probability, or `None` when that probability is zero.
pub(crate) fn conditional_pair_from_joint(
    joint: &[f64],
    a: usize,
    b: usize,
    s: &[usize],
    s_value: usize,
) -> Option<([f64; 4], f64)> {
    let mut cells = [0.0f64; 4];
    for (w, &p) in joint.iter().enumerate() {
        if assignment_matches(w, s, s_value) {
            cells[((w >> a) & 1) * 2 + ((w >> b) & 1)] += p;
        }
    }
    let total: f64 = cells.iter().sum();
    if total <= 0.0 {
        return None;
    }
    for c in &mut cells {
        *c /= total;
    }
    Some((cells, total))
}

/// The conditioning sets the collection assigns to a vertex pair: every
/// subset of the other vertices up to size `d`, or the pair's parent sets
/// with the partner removed (deduplicated).
pub fn separating_sets(
    coll: &SeparatingCollection,
    g: &Dag,
    a: usize,
    b: usize,
) -> Vec<Vec<usize>> {
    assert!(a != b, "the pair must be distinct");
    match *coll {
        SeparatingCollection::AllSubsets { d } => {
            let others: Vec<usize> = (0..g.n()).filter(|&v| v != a && v != b).collect();
            let mut sets = Vec::new();
            for mask in 0..1usize << others.len() {
                if (mask.count_ones() as usize) <= d {
                    sets.push(
                        others
                            .iter()
                            .enumerate()
                            .filter(|&(j, _)| (mask >> j) & 1 == 1)
                            .map(|(_, &v)| v)
                            .collect(),
                    );
                }
            }
            sets.sort_by_key(|s: &Vec<usize>| (s.len(), s.clone()));
            sets
        }
        SeparatingCollection::ParentBased => {
            let strip = |v: usize, other: usize| -> Vec<usize> {
                g.parents(v).iter().copied().filter(|&p| p != other).collect()
            };
            let first = strip(a, b);
            let second = strip(b, a);
            if first == second {
                vec![first]
            } else {
                vec![first, second]
            }
        }
    }
}

/// The margin of the structure's edges under the true joint: over each
/// connected pair, the smallest over conditioning sets of the largest
/// conditional dependence over conditioning assignments. Edgeless graphs
/// return positive infinity.
pub fn edge_strength(
    joint: &[f64],
    g: &Dag,
    coll: &SeparatingCollection,
) -> Result<f64> {
    if joint.len() != 1usize << g.n() {
        return Err(Error::domain(format!(
            "joint over {} assignments does not match {} vertices",
            joint.len(),
            g.n()
        )));
    }
    let mut strength = f64::INFINITY;
    for (parent, child) in g.edges() {
        let (a, b) = (parent.min(child), parent.max(child));
        for s in separating_sets(coll, g, a, b) {
            let mut largest: Option<f64> = None;
            for s_value in 0..1usize << s.len() {
                if let Some((cells, _)) = conditional_pair_from_joint(joint, a, b, &s, s_value) {
                    let tau = mutual_information_cells(&cells);
                    largest = Some(largest.map_or(tau, |m: f64| m.max(tau)));
                }
            }
            let largest = largest.ok_or_else(|| {
                Error::domain(format!(
                    "every assignment of the conditioning set {s:?} has probability zero"
                ))
            })?;
            strength = strength.min(largest);
        }
    }
    Ok(strength)
}

/// All DAGs on `n` labeled vertices with in-degree at most `d`, each
/// exactly once. Only the exhaustive regime `n <= 5` is supported.
pub fn enumerate_dags(n: usize, d: usize) -> Result<Vec<Dag>> {
    if n == 0 {
        return Err(Error::domain("at least one vertex is required"));
    }
    if n > 5 {
        return Err(Error::domain(format!(
            "exhaustive enumeration is limited to 5 vertices, got {n}; larger structure spaces need a greedy search, which this library does not provide"
        )));
    }
    let candidate_masks: Vec<Vec<u32>> = (0..n)
        .map(|v| {
            (0..1u32 << n)
                .filter(|&mask| mask & (1 << v) == 0 && (mask.count_ones() as usize) <= d)
                .collect()
        })
        .collect();
    let mut dags = Vec::new();
    let mut chosen = vec![0u32; n];
    enumerate_rec(0, n, &candidate_masks, &mut chosen, &mut dags);
    Ok(dags)
}

fn enumerate_rec(
    v: usize,
    n: usize,
    candidates: &[Vec<u32>],
    chosen: &mut Vec<u32>,
    out: &mut Vec<Dag>,
) {
    if v == n {
        if masks_acyclic(n, chosen) {
            let parent_sets = chosen
                .iter()
                .map(|&mask| (0..n).filter(|&p| mask & (1 << p) != 0).collect())
                .collect();
            out.push(Dag { n, parent_sets });
        }
        return;
    }
    for &mask in &candidates[v] {
        chosen[v] = mask;
        enumerate_rec(v + 1, n, candidates, chosen, out);
    }
}

fn masks_acyclic(n: usize, parent_masks: &[u32]) -> bool {
    let mut removed = 0u32;
    for _ in 0..n {
        let mut progressed = false;
        for v in 0..n {
            if removed & (1 << v) == 0 && parent_masks[v] & !removed == 0 {
                removed |= 1 << v;
                progressed = true;
            }
        }
        if removed.count_ones() as usize == n {
            return true;
        }
        if !progressed {
            return false;
        }
    }
    removed.count_ones() as usize == n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplex::mutual_information;
    use approx::assert_abs_diff_eq;

    fn two_node_net(p_a: f64, p_b_given: [f64; 2]) -> BayesNet {
        let dag = Dag::new(2, vec![vec![], vec![0]]).unwrap();
        BayesNet::from_success_probabilities(dag, vec![vec![p_a], p_b_given.to_vec()]).unwrap()
    }

    fn chain_net() -> BayesNet {
        let dag = Dag::new(3, vec![vec![], vec![0], vec![1]]).unwrap();
        BayesNet::from_success_probabilities(
            dag,
            vec![vec![0.3], vec![0.2, 0.8], vec![0.1, 0.9]],
        )
        .unwrap()
    }

    #[test]
    fn dag_construction_rejects_invalid_input() {
        assert!(Dag::new(2, vec![vec![], vec![0]]).is_ok());
        assert!(Dag::new(2, vec![vec![1], vec![0]]).is_err());
        assert!(Dag::new(2, vec![vec![0], vec![]]).is_err());
        assert!(Dag::new(2, vec![vec![], vec![2]]).is_err());
        assert!(Dag::new(2, vec![vec![]]).is_err());
        assert!(Dag::new(3, vec![vec![], vec![0, 0], vec![]]).is_err());
        let chain = Dag::new(3, vec![vec![1], vec![2], vec![]]).unwrap();
        assert_eq!(chain.topological_order(), Some(vec![2, 1, 0]));
        assert!(chain.adjacent(0, 1) && chain.adjacent(1, 0));
        assert!(!chain.adjacent(0, 2));
    }

    #[test]
    fn joint_distribution_is_normalized_and_factorizes() {
        let bn = chain_net();
        let joint = bn.joint_distribution();
        assert_abs_diff_eq!(joint.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        // Independent two-node net: joint equals the product of marginals.
        let dag = Dag::empty(2);
        let bn =
            BayesNet::from_success_probabilities(dag, vec![vec![0.3], vec![0.7]]).unwrap();
        let joint = bn.joint_distribution();
        for w in 0..4 {
            let pa = if w & 1 == 1 { 0.3 } else { 0.7 };
            let pb = if w & 2 == 2 { 0.7 } else { 0.3 };
            assert_abs_diff_eq!(joint[w], pa * pb, epsilon = 1e-15);
        }
    }

    #[test]
    fn deterministic_net_samples_to_single_support_point() {
        let dag = Dag::new(3, vec![vec![], vec![0], vec![0, 1]]).unwrap();
        let bn = BayesNet::from_success_probabilities(
            dag,
            vec![vec![1.0], vec![0.0, 1.0], vec![0.0, 0.0, 0.0, 1.0]],
        )
        .unwrap();
        let counts = sample(&bn, 250, 7).unwrap();
        assert_eq!(counts.total(), 250);
        assert_eq!(counts.count(0b111), 250);
        assert_eq!(counts.counts().iter().filter(|&&c| c > 0).count(), 1);
    }

    #[test]
    fn independent_net_yields_small_pairwise_dependence() {
        let bn = BayesNet::from_success_probabilities(
            Dag::empty(2),
            vec![vec![0.5], vec![0.5]],
        )
        .unwrap();
        let counts = sample(&bn, 100_000, 42).unwrap();
        let table = conditional_pair_table(&counts, 0, 1, &[], 0).unwrap();
        assert!(mutual_information(&table) < 1e-3);
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let bn = chain_net();
        let first = sample(&bn, 1000, 5).unwrap();
        let second = sample(&bn, 1000, 5).unwrap();
        assert_eq!(first, second);
        let third = sample(&bn, 1000, 6).unwrap();
        assert_ne!(first, third);
    }

    #[test]
    fn unconditioned_pair_table_is_the_pairwise_marginal() {
        let counts = EmpiricalCounts::new(3, vec![3, 1, 0, 2, 4, 0, 1, 5]).unwrap();
        let table = conditional_pair_table(&counts, 0, 1, &[], 0).unwrap();
        // A is bit 0, B is bit 1; sum over bit 2.
        let expected = [3 + 4, 0 + 1, 1 + 0, 2 + 5];
        let total: u64 = expected.iter().sum();
        for (idx, &count) in expected.iter().enumerate() {
            let cell = table.cell(idx / 2, idx % 2);
            assert_abs_diff_eq!(cell, count as f64 / total as f64, epsilon = 1e-15);
            // Scaling back by the record total recovers the integer count.
            assert_eq!((cell * total as f64).round() as u64, count);
        }
    }

    #[test]
    fn conditioning_restricts_to_matching_records() {
        let counts = EmpiricalCounts::new(3, vec![3, 1, 0, 2, 4, 0, 1, 5]).unwrap();
        // Condition on X2 = 1: assignments 4..8 with counts 4, 0, 1, 5.
        assert_eq!(matching_count(&counts, &[2], 1), 10);
        let table = conditional_pair_table(&counts, 0, 1, &[2], 1).unwrap();
        let expected = [4.0, 1.0, 0.0, 5.0];
        for (idx, &count) in expected.iter().enumerate() {
            assert_abs_diff_eq!(table.cell(idx / 2, idx % 2), count / 10.0, epsilon = 1e-15);
        }
        // Condition the pair (0, 2) on X1 = 1: assignments 2, 3, 6, 7.
        let table = conditional_pair_table(&counts, 0, 2, &[1], 1).unwrap();
        assert_abs_diff_eq!(table.cell(0, 0), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(table.cell(0, 1), 1.0 / 8.0, epsilon = 1e-15);
        assert_abs_diff_eq!(table.cell(1, 0), 2.0 / 8.0, epsilon = 1e-15);
        assert_abs_diff_eq!(table.cell(1, 1), 5.0 / 8.0, epsilon = 1e-15);
    }

    #[test]
    fn empty_conditioning_stratum_is_a_marker_not_an_error() {
        let counts = EmpiricalCounts::new(3, vec![3, 1, 0, 2, 0, 0, 0, 0]).unwrap();
        assert!(conditional_pair_table(&counts, 0, 1, &[2], 1).is_none());
        assert_eq!(matching_count(&counts, &[2], 1), 0);
    }

    #[test]
    fn separating_sets_enumerates_bounded_subsets() {
        let g = Dag::empty(2);
        let sets = separating_sets(&SeparatingCollection::AllSubsets { d: 1 }, &g, 0, 1);
        assert_eq!(sets, vec![Vec::<usize>::new()]);
        let g = Dag::empty(4);
        let sets = separating_sets(&SeparatingCollection::AllSubsets { d: 1 }, &g, 0, 1);
        assert_eq!(sets, vec![vec![], vec![2], vec![3]]);
        let sets = separating_sets(&SeparatingCollection::AllSubsets { d: 2 }, &g, 0, 1);
        assert_eq!(sets, vec![vec![], vec![2], vec![3], vec![2, 3]]);
    }

    #[test]
    fn parent_based_sets_strip_the_partner_and_deduplicate() {
        let g = Dag::new(2, vec![vec![], vec![0]]).unwrap();
        let sets = separating_sets(&SeparatingCollection::ParentBased, &g, 0, 1);
        assert_eq!(sets, vec![Vec::<usize>::new()]);
        let g = Dag::new(3, vec![vec![2], vec![0, 2], vec![]]).unwrap();
        let sets = separating_sets(&SeparatingCollection::ParentBased, &g, 0, 1);
        assert_eq!(sets, vec![vec![2]]);
    }

    #[test]
    fn edge_strength_of_a_single_edge_is_the_pairwise_dependence() {
        let bn = two_node_net(0.4, [0.2, 0.9]);
        let joint = bn.joint_distribution();
        let coll = SeparatingCollection::AllSubsets { d: 0 };
        let strength = edge_strength(&joint, bn.dag(), &coll).unwrap();
        let table = ContingencyTable::new(
            2,
            2,
            vec![joint[0], joint[2], joint[1], joint[3]],
        )
        .unwrap();
        assert_abs_diff_eq!(strength, mutual_information(&table), epsilon = 1e-12);
        assert!(strength > 0.05);
    }

    #[test]
    fn edgeless_graph_has_infinite_strength() {
        let joint = vec![0.25; 4];
        let coll = SeparatingCollection::AllSubsets { d: 1 };
        assert_eq!(edge_strength(&joint, &Dag::empty(2), &coll).unwrap(), f64::INFINITY);
    }

    #[test]
    fn chain_strength_matches_direct_conditional_evaluation() {
        let bn = chain_net();
        let joint = bn.joint_distribution();
        let coll = SeparatingCollection::AllSubsets { d: 1 };
        let got = edge_strength(&joint, bn.dag(), &coll).unwrap();

        // Independent re-derivation with explicit loops over the 8 cells.
        let tau_of = |cells: [f64; 4]| {
            let t = ContingencyTable::new(2, 2, cells.to_vec()).unwrap();
            mutual_information(&t)
        };
        let mut expected = f64::INFINITY;
        for (a, b) in [(0usize, 1usize), (1, 2)] {
            let c = 3 - a - b;
            let mut pair = [0.0; 4];
            for w in 0..8 {
                pair[((w >> a) & 1) * 2 + ((w >> b) & 1)] += joint[w];
            }
            let unconditioned = tau_of(pair);
            let mut conditioned: f64 = 0.0;
            for value in 0..2usize {
                let mut cells = [0.0; 4];
                let mut mass = 0.0;
                for w in 0..8 {
                    if (w >> c) & 1 == value {
                        cells[((w >> a) & 1) * 2 + ((w >> b) & 1)] += joint[w];
                        mass += joint[w];
                    }
                }
                for cell in &mut cells {
                    *cell /= mass;
                }
                conditioned = conditioned.max(tau_of(cells));
            }
            expected = expected.min(unconditioned.min(conditioned));
        }
        assert_abs_diff_eq!(got, expected, epsilon = 1e-12);
    }

    #[test]
    fn edge_strength_is_invariant_under_relabeling() {
        let bn = chain_net();
        let joint = bn.joint_distribution();
        let coll = SeparatingCollection::AllSubsets { d: 1 };
        let base = edge_strength(&joint, bn.dag(), &coll).unwrap();
        // Relabel vertices by the cycle 0 -> 1 -> 2 -> 0.
        let perm = [1usize, 2, 0];
        let mut permuted_joint = vec![0.0; 8];
        for (w, &p) in joint.iter().enumerate() {
            let mut pw = 0usize;
            for (v, &pv) in perm.iter().enumerate() {
                pw |= ((w >> v) & 1) << pv;
            }
            permuted_joint[pw] += p;
        }
        let permuted_dag = Dag::new(
            3,
            {
                let mut sets = vec![Vec::new(); 3];
                for (child, parents) in bn.dag().parent_sets.iter().enumerate() {
                    sets[perm[child]] = parents.iter().map(|&p| perm[p]).collect();
                }
                sets
            },
        )
        .unwrap();
        let relabeled = edge_strength(&permuted_joint, &permuted_dag, &coll).unwrap();
        assert_abs_diff_eq!(base, relabeled, epsilon = 1e-12);
    }

    #[test]
    fn enumeration_counts_follow_the_labeled_dag_recurrence() {
        assert_eq!(enumerate_dags(1, 0).unwrap().len(), 1);
        assert_eq!(enumerate_dags(2, 1).unwrap().len(), 3);
        assert_eq!(enumerate_dags(3, 2).unwrap().len(), 25);
        assert_eq!(enumerate_dags(4, 3).unwrap().len(), 543);
        assert!(enumerate_dags(6, 2).is_err());
    }

    #[test]
    fn enumerated_dags_are_valid_unique_and_bounded() {
        let dags = enumerate_dags(4, 2).unwrap();
        let mut seen = std::collections::HashSet::new();
        for dag in &dags {
            assert!(dag.topological_order().is_some());
            assert!(dag.max_in_degree() <= 2);
            assert!(seen.insert(dag.clone()));
            Dag::new(dag.n(), dag.parent_sets.clone()).unwrap();
        }
        // Every in-degree <= 2 DAG on 4 vertices, no others.
        let unbounded = enumerate_dags(4, 3).unwrap();
        let bounded_count = unbounded.iter().filter(|d| d.max_in_degree() <= 2).count();
        assert_eq!(dags.len(), bounded_count);
    }

    #[test]
    fn network_file_round_trips() {
        let bn = chain_net();
        let mut buffer = Vec::new();
        bn.save(&mut buffer).unwrap();
        let loaded = BayesNet::load(buffer.as_slice()).unwrap();
        assert_eq!(loaded, bn);
        assert!(BayesNet::load(&b"2 0\n0:\n1: 0\n"[..]).is_err());
        assert!(BayesNet::load(&b"1 0\n0:\n"[..]).is_err());
    }

    #[test]
    fn data_file_round_trips() {
        let counts = EmpiricalCounts::new(3, vec![3, 1, 0, 2, 4, 0, 1, 5]).unwrap();
        let mut buffer = Vec::new();
        counts.save(&mut buffer).unwrap();
        let loaded = EmpiricalCounts::load(buffer.as_slice()).unwrap();
        assert_eq!(loaded, counts);
        assert!(EmpiricalCounts::load(&b"3 99\n0 1\n"[..]).is_err());
    }
}
