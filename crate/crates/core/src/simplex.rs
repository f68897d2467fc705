//! Distributions on k x l contingency tables: entropy, KL divergence,
//! mutual information, product projections, and one-parameter paths of
//! constant-marginal distributions.
//!
//! All information quantities are in nats. The convention 0 * ln 0 = 0 is
//! applied throughout, and cells with magnitude at most [`ZERO_CELL`] are
//! treated as exact zeros in support checks.

use crate::numeric::bisect;
use crate::{Error, Result};

/// Cells at or below this magnitude count as exact zeros in support checks.
pub const ZERO_CELL: f64 = 1e-15;

/// Absolute tolerance on total mass for table and marginal constructors.
const MASS_TOL: f64 = 1e-12;

/// Looser mass tolerance accepted by vector-level entropy.
const ENTROPY_MASS_TOL: f64 = 1e-9;

/// Tolerance for the product-form check on path base tables.
const PRODUCT_TOL: f64 = 1e-10;

/// Bracket width at which root bisections stop.
const BISECT_TOL: f64 = 1e-13;

/// Iteration cap for root bisections.
const BISECT_MAX_ITER: u32 = 200;

/// A joint distribution of a pair of finite variables, stored as a k x l
/// table of cell probabilities in row-major order.
///
/// Invariants: every cell is nonnegative and the cells sum to 1 within
/// 1e-12. Construction clamps cells within [`ZERO_CELL`] of zero to exact
/// zero so that boundary distributions round-trip cleanly.
#[derive(Debug, Clone, PartialEq)]
pub struct ContingencyTable {
    k: usize,
    l: usize,
    cells: Vec<f64>,
}

impl ContingencyTable {
    /// Builds a k x l table from row-major cells.
    ///
    /// ```
    /// use mib_core::simplex::ContingencyTable;
    /// let p = ContingencyTable::new(2, 2, vec![0.4, 0.1, 0.1, 0.4]).unwrap();
    /// assert_eq!(p.cell(0, 0), 0.4);
    /// ```
    pub fn new(k: usize, l: usize, cells: Vec<f64>) -> Result<Self> {
        if k == 0 || l == 0 {
            return Err(Error::domain("table dimensions must be positive"));
        }
        if cells.len() != k * l {
            return Err(Error::domain(format!(
                "expected {} cells for a {k} x {l} table, got {}",
                k * l,
                cells.len()
            )));
        }
        let mut cells = cells;
        for c in &mut cells {
            if !c.is_finite() || *c < -ZERO_CELL {
                return Err(Error::domain(format!("negative or non-finite cell {c}")));
            }
            if *c < ZERO_CELL {
                *c = 0.0;
            }
        }
        let sum: f64 = cells.iter().sum();
        if (sum - 1.0).abs() > MASS_TOL {
            return Err(Error::domain(format!("cells sum to {sum}, not 1")));
        }
        Ok(ContingencyTable { k, l, cells })
    }

    /// The uniform distribution on a k x l table.
    pub fn uniform(k: usize, l: usize) -> Self {
        let cell = 1.0 / (k * l) as f64;
        ContingencyTable { k, l, cells: vec![cell; k * l] }
    }

    /// Number of rows (values of the first variable).
    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of columns (values of the second variable).
    pub fn l(&self) -> usize {
        self.l
    }

    /// Row-major cell probabilities.
    pub fn cells(&self) -> &[f64] {
        &self.cells
    }

    /// The probability of cell (i, j).
    pub fn cell(&self, i: usize, j: usize) -> f64 {
        self.cells[i * self.l + j]
    }

    /// The distribution of the first variable (row sums).
    pub fn marginal_a(&self) -> Marginal {
        let mut probs = vec![0.0; self.k];
        for i in 0..self.k {
            for j in 0..self.l {
                probs[i] += self.cell(i, j);
            }
        }
        Marginal { probs }
    }

    /// The distribution of the second variable (column sums).
    pub fn marginal_b(&self) -> Marginal {
        let mut probs = vec![0.0; self.l];
        for i in 0..self.k {
            for j in 0..self.l {
                probs[j] += self.cell(i, j);
            }
        }
        Marginal { probs }
    }
}

/// The distribution of a single variable of a contingency table.
///
/// Invariant: entries are nonnegative and sum to 1 within 1e-12.
#[derive(Debug, Clone, PartialEq)]
pub struct Marginal {
    probs: Vec<f64>,
}

impl Marginal {
    /// Builds a marginal from a probability vector.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        for p in &probs {
            if !p.is_finite() || *p < -ZERO_CELL {
                return Err(Error::domain(format!("negative or non-finite entry {p}")));
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > MASS_TOL {
            return Err(Error::domain(format!("entries sum to {sum}, not 1")));
        }
        Ok(Marginal { probs })
    }

    /// The probability vector.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// A one-parameter family of 2 x 2 distributions sharing the marginals of a
/// product base table: at parameter t the cells are
/// `[base00 + t, base01 - t, base10 - t, base11 + t]`.
///
/// Invariants: the base equals the product of its own marginals within
/// 1e-10; `t_min = -min(base00, base11)` and `t_max = min(base01, base10)`.
/// Valid parameters form the half-open interval `(t_min, t_max]`.
#[derive(Debug, Clone)]
pub struct TPath {
    base: ContingencyTable,
    t_min: f64,
    t_max: f64,
}

impl TPath {
    /// Builds the path through a 2 x 2 product distribution.
    pub fn from_product(base: ContingencyTable) -> Result<Self> {
        if base.k != 2 || base.l != 2 {
            return Err(Error::domain("paths are defined for 2 x 2 tables only"));
        }
        let a = base.marginal_a();
        let b = base.marginal_b();
        for i in 0..2 {
            for j in 0..2 {
                let product = a.probs[i] * b.probs[j];
                if (base.cell(i, j) - product).abs() > PRODUCT_TOL {
                    return Err(Error::domain(
                        "path base must be the product of its marginals",
                    ));
                }
            }
        }
        let t_min = -base.cell(0, 0).min(base.cell(1, 1));
        let t_max = base.cell(0, 1).min(base.cell(1, 0));
        Ok(TPath { base, t_min, t_max })
    }

    /// The path through the uniform 2 x 2 distribution.
    pub fn uniform() -> Self {
        TPath { base: ContingencyTable::uniform(2, 2), t_min: -0.25, t_max: 0.25 }
    }

    /// The product base table (the path's value at t = 0).
    pub fn base(&self) -> &ContingencyTable {
        &self.base
    }

    /// Lower endpoint of the parameter interval (excluded).
    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    /// Upper endpoint of the parameter interval (included).
    pub fn t_max(&self) -> f64 {
        self.t_max
    }
}

/// Entropy of a probability vector in nats, with 0 * ln 0 = 0.
///
/// ```
/// use mib_core::simplex::entropy;
/// let h = entropy(&[0.25; 4]).unwrap();
/// assert!((h - 4.0f64.ln()).abs() < 1e-12);
/// ```
pub fn entropy(probs: &[f64]) -> Result<f64> {
    let mut sum = 0.0;
    for p in probs {
        if !p.is_finite() || *p < -ZERO_CELL {
            return Err(Error::domain(format!("negative or non-finite entry {p}")));
        }
        sum += p;
    }
    if (sum - 1.0).abs() > ENTROPY_MASS_TOL {
        return Err(Error::domain(format!("entries sum to {sum}, not 1")));
    }
    Ok(entropy_unchecked(probs))
}

/// Entropy without input validation; zero entries contribute zero.
pub(crate) fn entropy_unchecked(probs: &[f64]) -> f64 {
    let mut h = 0.0;
    for &p in probs {
        if p > ZERO_CELL {
            h -= p * p.ln();
        }
    }
    h
}

/// KL divergence from `p` to `q` in nats.
///
/// Requires matching shapes and absolute continuity: every cell where `q`
/// vanishes must vanish in `p`.
pub fn kl_divergence(p: &ContingencyTable, q: &ContingencyTable) -> Result<f64> {
    if p.k != q.k || p.l != q.l {
        return Err(Error::domain("tables must have the same shape"));
    }
    for (pi, qi) in p.cells.iter().zip(&q.cells) {
        if *qi <= ZERO_CELL && *pi > ZERO_CELL {
            return Err(Error::domain(
                "support violation: p places mass where q vanishes",
            ));
        }
    }
    Ok(kl_unchecked(&p.cells, &q.cells))
}

/// KL divergence without validation; cells of `p` at zero contribute zero.
pub(crate) fn kl_unchecked(p: &[f64], q: &[f64]) -> f64 {
    let mut d = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi > ZERO_CELL {
            d += pi * (pi / qi).ln();
        }
    }
    d.max(0.0)
}

/// The product of `p`'s marginals, the closest independent distribution in
/// KL divergence from `p`.
pub fn m_projection(p: &ContingencyTable) -> ContingencyTable {
    let a = p.marginal_a();
    let b = p.marginal_b();
    let mut cells = Vec::with_capacity(p.k * p.l);
    for i in 0..p.k {
        for j in 0..p.l {
            cells.push(a.probs[i] * b.probs[j]);
        }
    }
    ContingencyTable::new(p.k, p.l, cells)
        .expect("product of marginals is a valid table")
}

/// Mutual information of a table in nats, computed as
/// `H(p_A) + H(p_B) - H(p)`; equals the KL divergence from `p` to its
/// product projection.
///
/// ```
/// use mib_core::simplex::{mutual_information, ContingencyTable};
/// let even = ContingencyTable::new(2, 2, vec![0.5, 0.0, 0.0, 0.5]).unwrap();
/// assert!((mutual_information(&even) - 2.0f64.ln()).abs() < 1e-12);
/// ```
pub fn mutual_information(p: &ContingencyTable) -> f64 {
    let ha = entropy_unchecked(&p.marginal_a().probs);
    let hb = entropy_unchecked(&p.marginal_b().probs);
    let h = entropy_unchecked(&p.cells);
    (ha + hb - h).max(0.0)
}

/// Cells of a 2 x 2 path at parameter t, without the interval check.
pub(crate) fn path_cells(path: &TPath, t: f64) -> [f64; 4] {
    let b = &path.base.cells;
    [b[0] + t, b[1] - t, b[2] - t, b[3] + t]
}

/// Mutual information of raw 2 x 2 cells `[c00, c01, c10, c11]`.
pub(crate) fn mutual_information_cells(c: &[f64; 4]) -> f64 {
    let a = [c[0] + c[1], c[2] + c[3]];
    let b = [c[0] + c[2], c[1] + c[3]];
    (entropy_unchecked(&a) + entropy_unchecked(&b) - entropy_unchecked(c)).max(0.0)
}

/// Mutual information along a path at parameter t, defined on the closed
/// interval `[t_min, t_max]`.
pub(crate) fn tau_on_path(path: &TPath, t: f64) -> f64 {
    let mut c = path_cells(path, t);
    for x in &mut c {
        if x.abs() < ZERO_CELL {
            *x = 0.0;
        }
    }
    mutual_information_cells(&c)
}

/// The path's distribution at parameter t.
///
/// The parameter must lie in `(t_min, t_max]`; the result shares the base's
/// marginals.
pub fn path_at(path: &TPath, t: f64) -> Result<ContingencyTable> {
    if !(t > path.t_min && t <= path.t_max) {
        return Err(Error::domain(format!(
            "path parameter {t} outside ({}, {}]",
            path.t_min, path.t_max
        )));
    }
    let c = path_cells(path, t);
    ContingencyTable::new(2, 2, c.to_vec())
}

/// The 2 x 2 distribution with uniform marginals and mutual information
/// `eta`, taken on the positive side of the uniform path.
///
/// Realizable for `0 <= eta < ln 2`; solved by bisection on t in (0, 1/4].
pub fn reference_distribution(eta: f64) -> Result<ContingencyTable> {
    if !eta.is_finite() || eta < 0.0 || eta >= std::f64::consts::LN_2 {
        return Err(Error::domain(format!(
            "mutual information {eta} not realizable with uniform marginals",
        )));
    }
    let path = TPath::uniform();
    if eta == 0.0 {
        return Ok(path.base.clone());
    }
    let t = bisect(
        |t| tau_on_path(&path, t) - eta,
        0.0,
        0.25,
        BISECT_TOL,
        BISECT_MAX_ITER,
    );
    path_at(&path, t)
}

/// The positive parameter where the path's mutual information reaches
/// `gamma`: the largest t > 0 with tau at or below `gamma`.
///
/// Errors when `gamma` exceeds the maximum mutual information on the
/// positive side of the path.
pub fn t_gamma_plus(path: &TPath, gamma: f64) -> Result<f64> {
    if !gamma.is_finite() || gamma < 0.0 {
        return Err(Error::domain(format!("threshold {gamma} must be nonnegative")));
    }
    if gamma == 0.0 {
        return Ok(0.0);
    }
    let tau_max = tau_on_path(path, path.t_max);
    if gamma > tau_max {
        return Err(Error::domain(format!(
            "threshold {gamma} exceeds maximum mutual information {tau_max} on the path",
        )));
    }
    Ok(bisect(
        |t| tau_on_path(path, t) - gamma,
        0.0,
        path.t_max,
        BISECT_TOL,
        BISECT_MAX_ITER,
    ))
}

/// The negative counterpart of [`t_gamma_plus`]: the smallest t < 0 with
/// tau at or below `gamma`.
pub fn t_gamma_minus(path: &TPath, gamma: f64) -> Result<f64> {
    if !gamma.is_finite() || gamma < 0.0 {
        return Err(Error::domain(format!("threshold {gamma} must be nonnegative")));
    }
    if gamma == 0.0 {
        return Ok(0.0);
    }
    let tau_min = tau_on_path(path, path.t_min);
    if gamma > tau_min {
        return Err(Error::domain(format!(
            "threshold {gamma} exceeds maximum mutual information {tau_min} on the path",
        )));
    }
    // tau falls on [t_min, 0], so bisect the rising difference gamma - tau.
    Ok(bisect(
        |t| gamma - tau_on_path(path, t),
        path.t_min,
        0.0,
        BISECT_TOL,
        BISECT_MAX_ITER,
    ))
}
