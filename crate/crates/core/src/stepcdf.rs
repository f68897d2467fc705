//! Step-function CDFs over mutual-information values, and the exact
//! beta-value computation by full type-class enumeration.
//!
//! The beta-value of the independence test at threshold gamma is the
//! probability, under N samples from the dependent reference distribution,
//! that the empirical mutual information is at or below gamma. As a function
//! of gamma it is a monotone step function with one jump per distinct
//! empirical mutual-information value, which [`StepCdf`] stores exactly.
//!
//! The closed event convention "tau at or below gamma" is used throughout:
//! [`StepCdf::cumulative_at`] includes the jump located at the query point.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use statrs::function::gamma::ln_gamma;

use crate::simplex::{mutual_information_cells, reference_distribution};
use crate::typespace::{children_last_entry_mod, dfs_process, TypePrefix};
use crate::{sig17, Error, Result};

/// Quantum for discontinuity keys: values closer than half a quantum are
/// stored as one jump, preventing floating-point near-duplicates from
/// proliferating.
const KEY_QUANTUM: f64 = 1e-14;

fn quantize(value: f64) -> i64 {
    (value / KEY_QUANTUM).round() as i64
}

/// A monotone step function stored as sorted (discontinuity, mass) pairs.
///
/// Invariants: masses are nonnegative; `cumulative_at` is nondecreasing.
/// For beta-value CDFs the total mass is 1 within 1e-9.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StepCdf {
    jumps: BTreeMap<i64, f64>,
}

impl StepCdf {
    /// An empty CDF (identically zero).
    pub fn new() -> Self {
        StepCdf::default()
    }

    /// Adds the step `probability * 1_{>= value}` to the function.
    pub fn account_for_event(&mut self, probability: f64, value: f64) -> Result<()> {
        if !probability.is_finite() || probability < 0.0 {
            return Err(Error::domain(format!(
                "event probability {probability} must be nonnegative"
            )));
        }
        if !value.is_finite() {
            return Err(Error::domain(format!("event value {value} must be finite")));
        }
        if probability == 0.0 {
            return Ok(());
        }
        *self.jumps.entry(quantize(value)).or_insert(0.0) += probability;
        Ok(())
    }

    /// The CDF value at `value`: the sum of masses at discontinuities at or
    /// below it.
    pub fn cumulative_at(&self, value: f64) -> f64 {
        if !value.is_finite() {
            return if value > 0.0 { self.total_mass() } else { 0.0 };
        }
        self.jumps.range(..=quantize(value)).map(|(_, m)| m).sum()
    }

    /// Adds `other`'s function to this one, jump by jump.
    pub fn merge_from(&mut self, other: &StepCdf) {
        for (&key, &mass) in &other.jumps {
            *self.jumps.entry(key).or_insert(0.0) += mass;
        }
    }

    /// The total accumulated mass.
    pub fn total_mass(&self) -> f64 {
        self.jumps.values().sum()
    }

    /// Number of stored discontinuities.
    pub fn len(&self) -> usize {
        self.jumps.len()
    }

    /// Whether the function is identically zero.
    pub fn is_empty(&self) -> bool {
        self.jumps.is_empty()
    }

    /// Iterates over (discontinuity value, mass at that value) in increasing
    /// order of value.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.jumps.iter().map(|(&k, &m)| (k as f64 * KEY_QUANTUM, m))
    }

    /// Writes the function as tab-separated "gamma<TAB>beta" lines with 17
    /// significant digits, one line per discontinuity, beta cumulative.
    pub fn write_tsv<W: Write>(&self, writer: &mut W) -> std::io::Result<()> {
        let mut running = 0.0;
        for (value, mass) in self.iter() {
            running += mass;
            writeln!(writer, "{}\t{}", sig17(value), sig17(running))?;
        }
        Ok(())
    }
}

/// Validates the shared arguments of the exact drivers and returns the
/// reference cell probabilities in log space together with a log-factorial
/// table for counts 0..=N.
fn exact_setup(size: u64, eta: f64, alphabet: usize) -> Result<([f64; 4], Vec<f64>)> {
    if size < 1 {
        return Err(Error::domain("sample size must be at least 1"));
    }
    if alphabet != 4 {
        return Err(Error::domain(
            "mutual information needs a 2 x 2 arrangement, so the alphabet size must be 4",
        ));
    }
    let p = reference_distribution(eta)?;
    let mut log_p = [0.0; 4];
    for (slot, &cell) in log_p.iter_mut().zip(p.cells()) {
        *slot = cell.ln();
    }
    let log_factorial: Vec<f64> =
        (0..=size).map(|i| ln_gamma(i as f64 + 1.0)).collect();
    Ok((log_p, log_factorial))
}

/// Accumulates every type below the given prefixes into a fresh CDF.
fn accumulate_subtrees(
    prefixes: &[TypePrefix],
    size: u64,
    log_p: &[f64; 4],
    log_factorial: &[f64],
) -> StepCdf {
    let mut cdf = StepCdf::new();
    let n = size as f64;
    let log_n_factorial = log_factorial[size as usize];
    for prefix in prefixes {
        dfs_process(prefix, &mut |t| {
            let c = t.counts();
            let mut log_prob = log_n_factorial;
            for i in 0..4 {
                if c[i] > 0 {
                    log_prob += c[i] as f64 * log_p[i] - log_factorial[c[i] as usize];
                }
            }
            let q = [
                c[0] as f64 / n,
                c[1] as f64 / n,
                c[2] as f64 / n,
                c[3] as f64 / n,
            ];
            let tau = mutual_information_cells(&q);
            cdf.account_for_event(log_prob.exp(), tau)
                .expect("emission probabilities are nonnegative");
        });
    }
    cdf
}

/// The exact beta-value CDF at sample size N for the reference distribution
/// with mutual information `eta`, by serial enumeration of all type classes
/// over an alphabet of `alphabet` cells (must be 4).
///
/// For every gamma, `cumulative_at(gamma)` equals the summed emission
/// probability of the types whose empirical mutual information is at or
/// below gamma; the total mass is 1 within 1e-9.
pub fn exact_beta_cdf(size: u64, eta: f64, alphabet: usize) -> Result<StepCdf> {
    let (log_p, log_factorial) = exact_setup(size, eta, alphabet)?;
    let root = TypePrefix::root(size, alphabet)?;
    Ok(accumulate_subtrees(&[root], size, &log_p, &log_factorial))
}

/// Parallel variant of [`exact_beta_cdf`]: the root's branches are split
/// into `modulus` residue classes by their leading count, each class is
/// enumerated into a private CDF on a worker, and the results are merged.
///
/// The merged function agrees with the serial one within 1e-12 at every
/// query point.
pub fn exact_beta_cdf_parallel(
    size: u64,
    eta: f64,
    alphabet: usize,
    modulus: u64,
) -> Result<StepCdf> {
    if modulus < 1 {
        return Err(Error::domain("modulus must be at least 1"));
    }
    let (log_p, log_factorial) = exact_setup(size, eta, alphabet)?;
    let root = TypePrefix::root(size, alphabet)?;
    let classes: Vec<Vec<TypePrefix>> = (0..modulus)
        .map(|k| children_last_entry_mod(&root, k, modulus))
        .collect::<Result<_>>()?;
    let partials: Vec<StepCdf> = classes
        .par_iter()
        .map(|prefixes| accumulate_subtrees(prefixes, size, &log_p, &log_factorial))
        .collect();
    let mut merged = StepCdf::new();
    for partial in &partials {
        merged.merge_from(partial);
    }
    Ok(merged)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::typespace::{dfs_process, emission_probability, TypePrefix};
    use approx::assert_abs_diff_eq;

    #[test]
    fn account_and_query_single_step() {
        let mut cdf = StepCdf::new();
        cdf.account_for_event(0.3, 0.5).unwrap();
        assert_eq!(cdf.cumulative_at(0.4), 0.0);
        assert_eq!(cdf.cumulative_at(0.5), 0.3);
        assert_eq!(cdf.cumulative_at(0.6), 0.3);
    }

    #[test]
    fn repeated_events_accumulate_and_zero_mass_is_noop() {
        let mut cdf = StepCdf::new();
        cdf.account_for_event(0.1, 0.2).unwrap();
        cdf.account_for_event(0.1, 0.2).unwrap();
        assert_abs_diff_eq!(cdf.cumulative_at(0.2), 0.2, epsilon = 1e-15);
        assert_eq!(cdf.len(), 1);
        cdf.account_for_event(0.0, 0.7).unwrap();
        assert_eq!(cdf.len(), 1);
        assert!(cdf.account_for_event(-0.1, 0.2).is_err());
    }

    #[test]
    fn nearby_keys_quantize_to_one_jump() {
        let mut cdf = StepCdf::new();
        cdf.account_for_event(0.1, 0.1).unwrap();
        cdf.account_for_event(0.1, 0.1 + 1e-15).unwrap();
        assert_eq!(cdf.len(), 1);
    }

    #[test]
    fn merge_matches_serial_accumulation() {
        let events = [(0.125, 0.1), (0.25, 0.3), (0.125, 0.1), (0.5, 0.7)];
        let mut serial = StepCdf::new();
        for &(p, v) in &events {
            serial.account_for_event(p, v).unwrap();
        }
        let mut left = StepCdf::new();
        let mut right = StepCdf::new();
        for (i, &(p, v)) in events.iter().enumerate() {
            let target = if i % 2 == 0 { &mut left } else { &mut right };
            target.account_for_event(p, v).unwrap();
        }
        let mut merged = left.clone();
        merged.merge_from(&right);
        let mut commuted = right.clone();
        commuted.merge_from(&left);
        for q in [-1.0, 0.0, 0.1, 0.2, 0.3, 0.5, 0.7, 1.0] {
            assert_abs_diff_eq!(
                merged.cumulative_at(q),
                serial.cumulative_at(q),
                epsilon = 1e-12
            );
            assert_abs_diff_eq!(
                merged.cumulative_at(q),
                commuted.cumulative_at(q),
                epsilon = 1e-15
            );
        }
        let empty = StepCdf::new();
        let mut unchanged = serial.clone();
        unchanged.merge_from(&empty);
        assert_eq!(unchanged, serial);
    }

    #[test]
    fn exact_cdf_total_mass_is_one() {
        for &size in &[1u64, 4, 10, 25] {
            for &eta in &[0.01, 0.1] {
                let cdf = exact_beta_cdf(size, eta, 4).unwrap();
                assert_abs_diff_eq!(cdf.total_mass(), 1.0, epsilon = 1e-9);
                assert_abs_diff_eq!(cdf.cumulative_at(4.0f64.ln()), 1.0, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn single_draw_gives_one_point_mass_jump() {
        // Each single-draw empirical is a point mass, whose mutual
        // information is zero, so the whole mass sits in one jump at 0.
        let cdf = exact_beta_cdf(1, 0.1, 4).unwrap();
        assert_eq!(cdf.len(), 1);
        let (value, mass) = cdf.iter().next().unwrap();
        assert_eq!(value, 0.0);
        assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn mass_at_zero_sums_product_types() {
        // Independent oracle: a type's empirical is a product distribution
        // exactly when c00 * c11 == c01 * c10 (integer arithmetic).
        let eta = 0.01;
        let p = reference_distribution(eta).unwrap();
        let root = TypePrefix::root(4, 4).unwrap();
        let mut product_mass = 0.0;
        let mut product_count = 0usize;
        dfs_process(&root, &mut |t| {
            let c = t.counts();
            if c[0] * c[3] == c[1] * c[2] {
                product_count += 1;
                product_mass += emission_probability(t, p.cells()).unwrap();
            }
        });
        assert_eq!(product_count, 17);
        let cdf = exact_beta_cdf(4, eta, 4).unwrap();
        assert_abs_diff_eq!(cdf.cumulative_at(0.0), product_mass, epsilon = 1e-12);
    }

    #[test]
    fn parallel_matches_serial() {
        let serial = exact_beta_cdf(30, 0.01, 4).unwrap();
        for modulus in [1, 4, 8] {
            let parallel = exact_beta_cdf_parallel(30, 0.01, 4, modulus).unwrap();
            assert_eq!(parallel.len(), serial.len());
            for i in 0..=100 {
                let q = 0.693 * i as f64 / 100.0;
                assert_abs_diff_eq!(
                    parallel.cumulative_at(q),
                    serial.cumulative_at(q),
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn stronger_dependence_leaves_less_mass_below_gamma() {
        let weak = exact_beta_cdf(25, 0.1, 4).unwrap();
        let strong = exact_beta_cdf(25, 0.2, 4).unwrap();
        for i in 0..10 {
            let gamma = 0.01 * i as f64;
            assert!(strong.cumulative_at(gamma) <= weak.cumulative_at(gamma) + 1e-12);
        }
    }

    #[test]
    fn cumulative_is_monotone() {
        let cdf = exact_beta_cdf(10, 0.1, 4).unwrap();
        let mut last = 0.0;
        for i in 0..=200 {
            let q = 1.4 * i as f64 / 200.0;
            let value = cdf.cumulative_at(q);
            assert!(value >= last);
            last = value;
        }
    }

    #[test]
    fn tsv_dump_round_trips() {
        let cdf = exact_beta_cdf(4, 0.1, 4).unwrap();
        let mut buffer = Vec::new();
        cdf.write_tsv(&mut buffer).unwrap();
        let text = String::from_utf8(buffer).unwrap();
        let mut last_beta = 0.0;
        let mut lines = 0;
        for line in text.lines() {
            let mut parts = line.split('\t');
            let gamma: f64 = parts.next().unwrap().parse().unwrap();
            let beta: f64 = parts.next().unwrap().parse().unwrap();
            assert!(beta >= last_beta);
            assert_abs_diff_eq!(beta, cdf.cumulative_at(gamma), epsilon = 1e-12);
            last_beta = beta;
            lines += 1;
        }
        assert_eq!(lines, cdf.len());
    }
}
