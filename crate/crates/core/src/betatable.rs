//! Interpolation tables of log beta-values.
//!
//! Scoring needs beta-values at arbitrary (sample size, threshold) pairs,
//! which are too expensive to compute on demand. A [`BetaTable`] stores
//! log beta on a grid: sample sizes from [`generate_n_list`], and threshold
//! positions realized from normalized KL coordinates along the
//! uniform-marginals path. The interpolation statistic is the KL divergence
//! from the threshold's path point to the reference distribution, which is
//! close to linear in log beta; the two sides of the reference dependence
//! are kept as separate tables because that statistic is not monotone
//! across it. Below [`gamma_zero`] the acceptance window is narrower than
//! the lattice spacing and cells are omitted; lookups clamp there.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::mcint::{monte_carlo_integrate, IntegrandContext, McParams};
use crate::numeric::bisect;
use crate::simplex::{
    kl_unchecked, path_cells, reference_distribution, t_gamma_minus, t_gamma_plus, tau_on_path,
    TPath,
};
use crate::stepcdf::exact_beta_cdf;
use crate::{sig17, Error, Result};

/// Number of evenly spaced KL points on the upper side of the reference.
pub const UPPER_SIDE_POINTS: usize = 10;

/// Default largest sample size computed by exact enumeration.
pub const DEFAULT_EXACT_CUTOFF: u64 = 200;

const GAMMA_ZERO_TOL: f64 = 1e-14;

/// A grid of log beta-values over (sample size, KL coordinate) with the
/// per-size clamping thresholds, ready for interpolated lookups.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaTable {
    eta: f64,
    n_grid: Vec<u64>,
    gamma0: Vec<f64>,
    lower: Vec<Vec<(f64, f64)>>,
    upper: Vec<Vec<(f64, f64)>>,
}

/// A built table together with quality warnings for cells whose Monte
/// Carlo run did not converge or whose value vanished.
#[derive(Debug, Clone)]
pub struct BetaBuild {
    /// The usable table.
    pub table: BetaTable,
    /// One message per problematic cell; empty for fully exact builds.
    pub warnings: Vec<String>,
}

impl BetaTable {
    /// The reference mutual information the table was built for.
    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// The tabulated sample sizes, ascending.
    pub fn n_grid(&self) -> &[u64] {
        &self.n_grid
    }

    /// The clamping threshold stored for a tabulated sample size.
    pub fn gamma0(&self, n: u64) -> Option<f64> {
        let idx = self.n_grid.iter().position(|&g| g == n)?;
        Some(self.gamma0[idx])
    }

    /// Iterates over lower-side cells as (sample size, kl, log beta).
    pub fn lower_cells(&self) -> impl Iterator<Item = (u64, f64, f64)> + '_ {
        self.n_grid
            .iter()
            .zip(&self.lower)
            .flat_map(|(&n, row)| row.iter().map(move |&(kl, lb)| (n, kl, lb)))
    }

    /// Iterates over upper-side cells as (sample size, kl, log beta).
    pub fn upper_cells(&self) -> impl Iterator<Item = (u64, f64, f64)> + '_ {
        self.n_grid
            .iter()
            .zip(&self.upper)
            .flat_map(|(&n, row)| row.iter().map(move |&(kl, lb)| (n, kl, lb)))
    }

    /// Writes the table in the versioned line format.
    pub fn save<W: Write>(&self, writer: &mut W) -> Result<()> {
        writeln!(writer, "betatable 1")?;
        writeln!(writer, "eta {}", sig17(self.eta))?;
        writeln!(writer, "gamma0 {}", self.n_grid.len())?;
        for (&n, &g0) in self.n_grid.iter().zip(&self.gamma0) {
            writeln!(writer, "{n} {}", sig17(g0))?;
        }
        for (name, side) in [("lower", &self.lower), ("upper", &self.upper)] {
            let count: usize = side.iter().map(Vec::len).sum();
            writeln!(writer, "{name} {count}")?;
            for (&n, row) in self.n_grid.iter().zip(side) {
                for &(kl, lb) in row {
                    writeln!(writer, "{n}\t{}\t{}", sig17(kl), sig17(lb))?;
                }
            }
        }
        Ok(())
    }

    /// Saves to a file path.
    pub fn save_to_path<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.save(&mut file)
    }

    /// Reads a table written by [`BetaTable::save`]. Malformed input is
    /// rejected with a parse error naming the offending line.
    pub fn load<R: BufRead>(reader: R) -> Result<BetaTable> {
        let mut lines = reader.lines();
        let mut lineno = 0usize;
        let mut next_line = |lineno: &mut usize| -> Result<String> {
            *lineno += 1;
            lines
                .next()
                .ok_or_else(|| Error::Parse(format!("line {lineno}: unexpected end of table file")))?
                .map_err(Error::from)
        };
        // Every parse failure names the 1-based line it came from.
        let fail = |lineno: usize, msg: String| Error::Parse(format!("line {lineno}: {msg}"));
        let rewrap = |lineno: usize, e: Error| match e {
            Error::Parse(msg) => Error::Parse(format!("line {lineno}: {msg}")),
            other => other,
        };
        let header = next_line(&mut lineno)?;
        if header.trim() != "betatable 1" {
            return Err(fail(
                lineno,
                format!("unsupported table header {header:?}, expected \"betatable 1\""),
            ));
        }
        let eta = parse_tagged_value(&next_line(&mut lineno)?, "eta")
            .map_err(|e| rewrap(lineno, e))?;
        if !(eta > 0.0 && eta < std::f64::consts::LN_2) {
            return Err(fail(lineno, format!("eta {eta} out of range")));
        }
        let gamma0_count = parse_tagged_count(&next_line(&mut lineno)?, "gamma0")
            .map_err(|e| rewrap(lineno, e))?;
        let mut gamma0_map = BTreeMap::new();
        for _ in 0..gamma0_count {
            let line = next_line(&mut lineno)?;
            let mut parts = line.split_whitespace();
            let n: u64 =
                parse_token(parts.next(), "sample size").map_err(|e| rewrap(lineno, e))?;
            let g0: f64 =
                parse_token(parts.next(), "gamma0 value").map_err(|e| rewrap(lineno, e))?;
            if !(g0 > 0.0) || !g0.is_finite() {
                return Err(fail(lineno, format!("gamma0 {g0} for N={n} out of range")));
            }
            if gamma0_map.insert(n, g0).is_some() {
                return Err(fail(lineno, format!("duplicate gamma0 entry for N={n}")));
            }
        }
        if gamma0_map.is_empty() {
            return Err(fail(lineno, "table has no sample sizes".into()));
        }
        let mut sides: Vec<BTreeMap<u64, Vec<(f64, f64)>>> = Vec::new();
        for name in ["lower", "upper"] {
            let count = parse_tagged_count(&next_line(&mut lineno)?, name)
                .map_err(|e| rewrap(lineno, e))?;
            let mut cells: BTreeMap<u64, Vec<(f64, f64)>> = BTreeMap::new();
            for _ in 0..count {
                let line = next_line(&mut lineno)?;
                let mut parts = line.split_whitespace();
                let n: u64 =
                    parse_token(parts.next(), "sample size").map_err(|e| rewrap(lineno, e))?;
                let kl: f64 =
                    parse_token(parts.next(), "kl coordinate").map_err(|e| rewrap(lineno, e))?;
                let lb: f64 =
                    parse_token(parts.next(), "log beta").map_err(|e| rewrap(lineno, e))?;
                if !gamma0_map.contains_key(&n) {
                    return Err(fail(lineno, format!("cell at N={n} has no gamma0 entry")));
                }
                if !kl.is_finite() || kl < 0.0 {
                    return Err(fail(lineno, format!("kl coordinate {kl} out of range")));
                }
                if !lb.is_finite() || lb > 1e-9 {
                    return Err(fail(lineno, format!("log beta {lb} out of range")));
                }
                cells.entry(n).or_default().push((kl, lb.min(0.0)));
            }
            for row in cells.values_mut() {
                row.sort_by(|a, b| a.0.total_cmp(&b.0));
            }
            sides.push(cells);
        }
        if lines.next().is_some() {
            return Err(fail(lineno + 1, "trailing content after table".into()));
        }
        let upper_cells = sides.pop().expect("two sides were parsed");
        let lower_cells = sides.pop().expect("two sides were parsed");
        let n_grid: Vec<u64> = gamma0_map.keys().copied().collect();
        let gamma0 = gamma0_map.values().copied().collect();
        let take = |mut cells: BTreeMap<u64, Vec<(f64, f64)>>| {
            n_grid
                .iter()
                .map(|n| cells.remove(n).unwrap_or_default())
                .collect()
        };
        Ok(BetaTable {
            eta,
            n_grid: n_grid.clone(),
            gamma0,
            lower: take(lower_cells),
            upper: take(upper_cells),
        })
    }

    /// Loads from a file path.
    pub fn load_from_path<P: AsRef<Path>>(path: P) -> Result<BetaTable> {
        BetaTable::load(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}

fn parse_tagged_value(line: &str, tag: &str) -> Result<f64> {
    let mut parts = line.split_whitespace();
    if parts.next() != Some(tag) {
        return Err(Error::Parse(format!("expected \"{tag} <value>\", got {line:?}")));
    }
    parse_token(parts.next(), tag)
}

fn parse_tagged_count(line: &str, tag: &str) -> Result<usize> {
    let mut parts = line.split_whitespace();
    if parts.next() != Some(tag) {
        return Err(Error::Parse(format!("expected \"{tag} <count>\", got {line:?}")));
    }
    parse_token(parts.next(), tag)
}

fn parse_token<T: std::str::FromStr>(token: Option<&str>, what: &str) -> Result<T> {
    token
        .ok_or_else(|| Error::Parse(format!("missing {what}")))?
        .parse()
        .map_err(|_| Error::Parse(format!("malformed {what}")))
}

/// The standard grid of tabulated sample sizes: spacing 5 up to 100, 10 up
/// to 200, 50 up to 500, 100 up to 1000, and 1000 up to 10000.
pub fn generate_n_list() -> Vec<u64> {
    let mut ns = Vec::new();
    for (start, end, step) in [
        (5u64, 100u64, 5u64),
        (110, 200, 10),
        (250, 500, 50),
        (600, 1000, 100),
        (2000, 10000, 1000),
    ] {
        let mut n = start;
        while n <= end {
            ns.push(n);
            n += step;
        }
    }
    ns
}

/// Normalized KL ticks on [0, 1), densest near 1.
///
/// The first level covers [0, 1/2) with spacing `stepsize`; each further
/// level halves the remaining interval toward 1 and divides the spacing by
/// `level_ratio`; the interval left after `num_levels` levels is filled
/// with the last spacing.
pub fn generate_normalized_kl_list(
    stepsize: f64,
    level_ratio: f64,
    num_levels: u32,
) -> Result<Vec<f64>> {
    if !(stepsize > 0.0 && stepsize.is_finite()) {
        return Err(Error::domain("stepsize must be positive"));
    }
    if !(level_ratio > 1.0) {
        return Err(Error::domain("level ratio must exceed 1"));
    }
    let mut ticks = Vec::new();
    let mut start = 0.0;
    let mut step = stepsize;
    let mut remaining = 1.0;
    for level in 0..num_levels {
        if level > 0 {
            step /= level_ratio;
        }
        remaining /= 2.0;
        let end = start + remaining;
        let mut i = 0u64;
        loop {
            let x = start + step * i as f64;
            if x >= end - 1e-12 {
                break;
            }
            ticks.push(x);
            i += 1;
        }
        start = end;
    }
    let mut i = 0u64;
    loop {
        let x = start + step * i as f64;
        if x >= 1.0 - 1e-12 {
            break;
        }
        ticks.push(x);
        i += 1;
    }
    Ok(ticks)
}

/// Length of the acceptance interval on the uniform-marginals path.
fn acceptance_length(path: &TPath, gamma: f64) -> Result<f64> {
    Ok(t_gamma_plus(path, gamma)? - t_gamma_minus(path, gamma)?)
}

/// The threshold whose acceptance interval has length exactly 1/N on the
/// uniform-marginals path: below it the interval is narrower than the
/// frequency-lattice spacing and tabulated beta-values stop being
/// informative.
pub fn gamma_zero(n: u64) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain(format!(
            "acceptance length 1/{n} exceeds the maximum path length 1/2"
        )));
    }
    let path = TPath::uniform();
    let target = 1.0 / n as f64;
    Ok(bisect(
        |gamma| acceptance_length(&path, gamma).expect("thresholds below ln 2 are valid") - target,
        0.0,
        std::f64::consts::LN_2,
        GAMMA_ZERO_TOL,
        200,
    ))
}

/// Realizes the lower-side grid: for each normalized tick `z` the threshold
/// whose path point sits at KL fraction `z` between the reference (z = 0)
/// and the independent projection (z = 1). Returns ascending (kl, gamma)
/// pairs; gamma descends from `eta` toward 0.
pub fn lower_gamma_targets(eta: f64, normalized_kl: &[f64]) -> Result<Vec<(f64, f64)>> {
    let (path, reference) = reference_data(eta)?;
    let t_eta = t_gamma_plus(&path, eta)?;
    let kl_at = |t: f64| kl_unchecked(&path_cells(&path, t), &reference);
    let kl_max = kl_at(0.0);
    let mut targets = Vec::with_capacity(normalized_kl.len());
    for &z in normalized_kl {
        if !(0.0..1.0).contains(&z) {
            return Err(Error::domain(format!(
                "normalized kl tick {z} must lie in [0, 1)"
            )));
        }
        let target = z * kl_max;
        // KL falls from kl_max at t = 0 to 0 at t_eta.
        let t = bisect(|t| target - kl_at(t), 0.0, t_eta, 1e-14, 200);
        targets.push((kl_at(t), tau_on_path(&path, t)));
    }
    targets.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(targets)
}

/// Realizes the upper-side grid: evenly spaced KL values from the reference
/// up to the KL of the path endpoint, excluding the reference itself.
/// Returns ascending (kl, gamma) pairs; gamma ascends from `eta` to ln 2.
pub fn upper_gamma_targets(eta: f64) -> Result<Vec<(f64, f64)>> {
    let (path, reference) = reference_data(eta)?;
    let t_eta = t_gamma_plus(&path, eta)?;
    let kl_at = |t: f64| kl_unchecked(&path_cells(&path, t), &reference);
    let kl_max = kl_at(path.t_max());
    let mut targets = Vec::with_capacity(UPPER_SIDE_POINTS);
    for j in 1..=UPPER_SIDE_POINTS {
        let target = kl_max * j as f64 / UPPER_SIDE_POINTS as f64;
        // KL rises from 0 at t_eta to kl_max at the path end.
        let t = bisect(
            |t| kl_at(t) - target,
            t_eta,
            path.t_max(),
            1e-14,
            200,
        );
        targets.push((kl_at(t), tau_on_path(&path, t)));
    }
    Ok(targets)
}

fn reference_data(eta: f64) -> Result<(TPath, [f64; 4])> {
    let table = reference_distribution(eta)?;
    if eta <= 0.0 {
        return Err(Error::domain("the reference dependence must be positive"));
    }
    let mut reference = [0.0; 4];
    reference.copy_from_slice(table.cells());
    Ok((TPath::uniform(), reference))
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn cell_seed(seed: u64, n: u64, side: u64, idx: u64) -> u64 {
    splitmix(seed ^ splitmix(n ^ splitmix(side ^ splitmix(idx))))
}

/// Builds a table for reference dependence `eta` over the given sample
/// sizes and normalized lower-side ticks.
///
/// Sizes up to `exact_cutoff_n` are filled from the exact enumeration CDF
/// (one enumeration per size, shared by all that size's cells); larger
/// sizes fall back to Monte Carlo estimation with per-cell seeds derived
/// from `seed`. Cells whose threshold lies below the size's
/// [`gamma_zero`] are omitted. Non-converged Monte Carlo cells are kept
/// but reported in the build's warnings; cells whose value vanishes are
/// omitted and reported.
pub fn build_table(
    eta: f64,
    n_grid: &[u64],
    normalized_kl: &[f64],
    mc: &McParams,
    exact_cutoff_n: u64,
    seed: u64,
) -> Result<BetaBuild> {
    if n_grid.is_empty() {
        return Err(Error::domain("the sample-size grid must not be empty"));
    }
    let mut sizes: Vec<u64> = n_grid.to_vec();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes[0] < 2 {
        return Err(Error::domain("tabulated sample sizes must be at least 2"));
    }
    let lower_targets = lower_gamma_targets(eta, normalized_kl)?;
    let upper_targets = upper_gamma_targets(eta)?;

    struct RowBuild {
        gamma0: f64,
        lower: Vec<(f64, f64)>,
        upper: Vec<(f64, f64)>,
        warnings: Vec<String>,
    }

    let rows: Vec<RowBuild> = sizes
        .par_iter()
        .map(|&n| -> Result<RowBuild> {
            let g0 = gamma_zero(n)?;
            let exact = if n <= exact_cutoff_n {
                Some(exact_beta_cdf(n, eta, 4)?)
            } else {
                None
            };
            let mut warnings = Vec::new();
            let mut fill = |targets: &[(f64, f64)], side: u64| -> Result<Vec<(f64, f64)>> {
                let mut row = Vec::new();
                for (idx, &(kl, gamma)) in targets.iter().enumerate() {
                    if gamma < g0 - 1e-15 {
                        continue;
                    }
                    let beta = match &exact {
                        Some(cdf) => cdf.cumulative_at(gamma),
                        None => {
                            let ctx = IntegrandContext::new(n, eta, gamma)?;
                            let run = monte_carlo_integrate(
                                &ctx,
                                mc.max_iterations,
                                mc.record_freq,
                                mc.stop_check_freq,
                                mc.precision_percent,
                                mc.confidence,
                                cell_seed(seed, n, side, idx as u64),
                            )?;
                            if !run.stopped_by_criterion() {
                                warnings.push(format!(
                                    "cell N={n} gamma={gamma:.6e}: estimate did not reach the requested precision"
                                ));
                            }
                            run.final_estimate()
                        }
                    };
                    if beta > 0.0 {
                        row.push((kl, beta.ln().min(0.0)));
                    } else {
                        warnings.push(format!(
                            "cell N={n} gamma={gamma:.6e}: beta-value vanished, cell omitted"
                        ));
                    }
                }
                Ok(row)
            };
            let lower = fill(&lower_targets, 0)?;
            let upper = fill(&upper_targets, 1)?;
            Ok(RowBuild { gamma0: g0, lower, upper, warnings })
        })
        .collect::<Result<_>>()?;

    let mut gamma0 = Vec::with_capacity(rows.len());
    let mut lower = Vec::with_capacity(rows.len());
    let mut upper = Vec::with_capacity(rows.len());
    let mut warnings = Vec::new();
    for row in rows {
        gamma0.push(row.gamma0);
        lower.push(row.lower);
        upper.push(row.upper);
        warnings.extend(row.warnings);
    }
    Ok(BetaBuild {
        table: BetaTable { eta, n_grid: sizes, gamma0, lower, upper },
        warnings,
    })
}

/// Linear interpolation of a sorted (kl, log beta) row, clamping to the
/// boundary values outside the row's range; empty rows evaluate to 0.
fn row_value(row: &[(f64, f64)], kl: f64) -> f64 {
    let Some(&(first_kl, first_lb)) = row.first() else {
        return 0.0;
    };
    if kl <= first_kl {
        return first_lb;
    }
    let &(last_kl, last_lb) = row.last().expect("row is nonempty");
    if kl >= last_kl {
        return last_lb;
    }
    let hi = row.partition_point(|&(x, _)| x < kl);
    let (x0, y0) = row[hi - 1];
    let (x1, y1) = row[hi];
    if x1 == x0 {
        return y0;
    }
    y0 + (y1 - y0) * (kl - x0) / (x1 - x0)
}

/// Like [`row_value`] for the upper side, joined continuously to the
/// lower side's value at the reference (where the KL coordinate is 0).
fn upper_row_value(upper: &[(f64, f64)], lower: &[(f64, f64)], kl: f64) -> f64 {
    match upper.first() {
        Some(&(first_kl, first_lb)) if kl < first_kl => {
            let join = lower
                .first()
                .filter(|&&(lkl, _)| lkl <= 1e-12)
                .map(|&(_, lb)| lb);
            match join {
                Some(join_lb) if first_kl > 0.0 => {
                    join_lb + (first_lb - join_lb) * kl.max(0.0) / first_kl
                }
                _ => first_lb,
            }
        }
        _ => row_value(upper, kl),
    }
}

/// Interpolated log beta at sample size `n` and threshold `gamma`.
///
/// Sizes below the grid return 0 (no evidence); sizes above it are linearly
/// extrapolated from the two largest rows. The threshold is clamped to
/// [`gamma_zero`]`(n)` from below and to ln 2 from above, converted to the
/// KL coordinate, and looked up on the matching side with linear
/// interpolation in KL, then in N; KL coordinates beyond a row's range
/// clamp to its boundary value. The result is never positive.
pub fn interpolate_log_beta(table: &BetaTable, n: u64, gamma: f64) -> Result<f64> {
    if table.n_grid.is_empty() {
        return Err(Error::domain("the table has no rows"));
    }
    if !gamma.is_finite() || gamma < 0.0 {
        return Err(Error::domain(format!("threshold {gamma} must be nonnegative")));
    }
    if n < table.n_grid[0] {
        return Ok(0.0);
    }
    let g = gamma.max(gamma_zero(n)?).min(std::f64::consts::LN_2);
    let (path, reference) = reference_data(table.eta)?;
    let t = t_gamma_plus(&path, g)?;
    let kl = kl_unchecked(&path_cells(&path, t), &reference);
    let at = |idx: usize| -> f64 {
        if g < table.eta {
            row_value(&table.lower[idx], kl)
        } else {
            upper_row_value(&table.upper[idx], &table.lower[idx], kl)
        }
    };
    let last = table.n_grid.len() - 1;
    let value = if n >= table.n_grid[last] {
        if n == table.n_grid[last] || last == 0 {
            at(last)
        } else {
            let (n0, n1) = (table.n_grid[last - 1] as f64, table.n_grid[last] as f64);
            let (v0, v1) = (at(last - 1), at(last));
            v1 + (v1 - v0) * (n as f64 - n1) / (n1 - n0)
        }
    } else {
        let hi = table.n_grid.partition_point(|&g| g < n);
        if table.n_grid[hi] == n {
            at(hi)
        } else {
            let (n0, n1) = (table.n_grid[hi - 1] as f64, table.n_grid[hi] as f64);
            let (v0, v1) = (at(hi - 1), at(hi));
            v0 + (v1 - v0) * (n as f64 - n0) / (n1 - n0)
        }
    };
    Ok(value.min(0.0))
}
