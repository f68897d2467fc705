//! Numerical study of the divergence curve behind independence projection.
//!
//! For a positively associated reference distribution with dependence level
//! `eta`, the closest member of the low-dependence set is hard to
//! characterize in general. This module scans the curve
//! `x -> min KL(q || reference)` over distributions `q` with both marginals
//! equal to `(x, 1 - x)` and mutual information at most `gamma`
//! ([`kl_curve`]), detects its local minima, solves the stationarity
//! equation of the `gamma = 0` case through both Lambert W branches
//! ([`yz_solutions`]), and exposes the threshold constants below which the
//! minimum at `x = 1/2` is provably unique ([`conjecture_threshold`]).

use crate::bounds::script_w;
use crate::numeric::{bisect, golden_min};
use crate::simplex::{path_cells, t_gamma_plus, TPath};
use crate::simplex::{kl_unchecked, mutual_information_cells, tau_on_path};
use crate::{Error, Result};

/// Divergence scan over equal-marginal distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct KlCurve {
    /// Dependence level of the reference distribution.
    pub eta: f64,
    /// Mutual-information ceiling defining the projection target set.
    pub gamma: f64,
    /// Curve samples `(x, kl)` with `x` strictly increasing in `(0, 1)`.
    pub samples: Vec<(f64, f64)>,
    /// Detected local minima `(x, kl)`, refined beyond the grid.
    pub minima: Vec<(f64, f64)>,
}

/// Cells of the 2 x 2 distribution with both marginals `(x, 1 - x)` and
/// association offset `s` (independent at `s = 0`).
fn equal_marginal_cells(x: f64, s: f64) -> [f64; 4] {
    let y = 1.0 - x;
    [x * x + s, x * y - s, x * y - s, y * y + s]
}

/// Divergence from the nearest admissible point with marginals `(x, 1 - x)`
/// to the reference.
fn curve_value(x: f64, gamma: f64, reference: &[f64; 4]) -> f64 {
    let kl_at = |s: f64| kl_unchecked(&equal_marginal_cells(x, s), reference);
    if gamma == 0.0 {
        return kl_at(0.0);
    }
    let s_hi = x * (1.0 - x);
    let s_lo = -(x * x).min((1.0 - x) * (1.0 - x));
    let margin = 1e-12 * (s_hi - s_lo);
    let s_best = golden_min(kl_at, s_lo + margin, s_hi - margin, 1e-13);
    let tau_at = |s: f64| mutual_information_cells(&equal_marginal_cells(x, s));
    if tau_at(s_best) <= gamma {
        return kl_at(s_best);
    }
    // The reference is positively associated, so the unconstrained optimum
    // sits at s > 0 and the nearest admissible point lies on the boundary
    // between independence and that optimum.
    let s_boundary = bisect(|s| tau_at(s) - gamma, 0.0, s_best, 0.0, 200);
    kl_at(s_boundary)
}

/// Scans the divergence curve for dependence level `eta` and ceiling
/// `gamma` on a uniform grid of `resolution` interior points.
///
/// At `gamma = 0` each curve point is the divergence from the product
/// distribution with marginals `(x, 1 - x)`; at `gamma > 0` the distribution
/// minimizing the divergence subject to the mutual-information ceiling is
/// used, which lies on the ceiling's boundary whenever the unconstrained
/// optimum is too strongly associated. Local minima are detected by sign
/// changes of discrete differences and refined by golden-section search.
pub fn kl_curve(eta: f64, gamma: f64, resolution: usize) -> Result<KlCurve> {
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(Error::domain(format!("gamma = {gamma} must be nonnegative")));
    }
    if resolution < 100 {
        return Err(Error::domain(format!(
            "resolution = {resolution} must be at least 100"
        )));
    }
    let path = TPath::uniform();
    let t_eta = t_gamma_plus(&path, eta)?;
    let reference = path_cells(&path, t_eta);
    let n = resolution;
    let mut samples = Vec::with_capacity(n);
    for i in 1..=n {
        let x = i as f64 / (n + 1) as f64;
        samples.push((x, curve_value(x, gamma, &reference)));
    }
    let mut minima = Vec::new();
    for i in 1..n - 1 {
        if samples[i].1 < samples[i - 1].1 && samples[i].1 <= samples[i + 1].1 {
            let x_min = golden_min(
                |x| curve_value(x, gamma, &reference),
                samples[i - 1].0,
                samples[i + 1].0,
                1e-10,
            );
            minima.push((x_min, curve_value(x_min, gamma, &reference)));
        }
    }
    Ok(KlCurve { eta, gamma, samples, minima })
}

/// Principal Lambert branch on `(-1/e, 0)`: the solution `w` in `(-1, 0)` of
/// `w e^w = u`, found as the negated lower root of `v e^{-v} = -u`.
fn principal_w(u: f64) -> f64 {
    -bisect(|v| v * (-v).exp() + u, 0.0, 1.0, 0.0, 200)
}

/// Both roots `y` of the stationarity equation `ln y + y ln z - ln z = 0`.
///
/// The first returned root is the anchor `y = 1`, present for every
/// `z` in `(0, 1)`. The second is `ln z' / ln z = z / z'` where `z'` is the
/// conjugate point with `z' ln z' = z ln z` on the other side of `1/e`; it is
/// recovered from the Lambert branch opposite to the one holding `ln z`, lies
/// below 1 for `z < 1/e`, above 1 for `z > 1/e`, and merges into a double
/// root at `z = 1/e`.
pub fn yz_solutions(z: f64) -> Result<(f64, f64)> {
    if !(z > 0.0 && z < 1.0) {
        return Err(Error::domain(format!("z = {z} must lie in (0, 1)")));
    }
    let u = z * z.ln();
    let other = if z < (-1.0f64).exp() {
        principal_w(u) / z.ln()
    } else {
        -script_w(-u)? / z.ln()
    };
    Ok((1.0, other))
}

/// Threshold constants for uniqueness of the closest independent
/// distribution: the path coordinate `t0 = (1 - e^{-1}) / (4 (1 + e^{-1}))`
/// at which a second stationary point of the `gamma = 0` curve appears, and
/// the dependence level `eta0` whose positive path coordinate equals `t0`.
///
/// Below `eta0` the `gamma = 0` curve provably has its unique minimum at
/// `x = 1/2`; for `gamma > 0` the same behavior is checked empirically,
/// never asserted as proven.
pub fn conjecture_threshold() -> (f64, f64) {
    let e_inv = (-1.0f64).exp();
    let t0 = (1.0 - e_inv) / (4.0 * (1.0 + e_inv));
    let eta0 = tau_on_path(&TPath::uniform(), t0);
    (t0, eta0)
}
